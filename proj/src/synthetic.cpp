#include "emoq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

#include "emoq/error.hpp"
#include "emoq/rng.hpp"

namespace emoq {

namespace {

constexpr const char* kFiller[] = {
    "the",    "a",      "this",   "that",   "is",     "was",    "about",  "government",
    "people", "think",  "really", "just",   "what",   "today",  "thread", "point",
    "vote",   "bill",   "minister", "news", "post",   "comment", "reply", "week",
    "year",   "state",  "city",   "say",    "said",   "know",   "they",   "we",
    "you",    "our",    "their",  "because", "and",   "or",     "but",    "on",
    "in",     "with",   "for",    "of",     "to",     "it",     "here",   "there",
    "some",   "more",   "time",   "again",  "still",  "also",   "new",    "issue",
    "debate", "reform", "budget", "health", "school", "work",   "tax",    "council",
};
constexpr std::size_t kFillerCount = sizeof(kFiller) / sizeof(kFiller[0]);

constexpr std::size_t kAuthors = 40;
constexpr std::size_t kTrollAuthors = 5;

bool governed_negative(EmotionKind e) {
    return e == EmotionKind::anger || e == EmotionKind::fear || e == EmotionKind::sadness ||
           e == EmotionKind::disgust;
}

std::string pad4(std::size_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04zu", v);
    return buf;
}

struct Pools {
    std::array<std::vector<std::string>, kEmotionCount> words;
};

struct Composed {
    std::string text;
    std::optional<EmotionKind> dominant;
    double intensity = 0.0;
};

class ConversationWriter {
public:
    ConversationWriter(const SyntheticSpec& spec, const Pools& pools, Rng& rng)
        : spec_(spec), pools_(pools), rng_(rng) {
        double total = 0.0;
        for (double w : spec.mixture) total += w;
        double acc = 0.0;
        for (std::size_t i = 0; i < kEmotionCount; ++i) {
            acc += spec.mixture[i] / total;
            cumulative_[i] = acc;
        }
    }

    EmotionKind draw_mixture() {
        const double u = rng_.uniform();
        for (std::size_t i = 0; i < kEmotionCount; ++i) {
            if (u < cumulative_[i]) return kAllEmotions[i];
        }
        return kAllEmotions[kEmotionCount - 1];
    }

    Composed ordinary(std::optional<EmotionKind> forced) {
        std::optional<EmotionKind> e = forced;
        if (!e && !rng_.chance(spec_.neutral_rate)) e = draw_mixture();
        if (!e) {
            const std::size_t n = rng_.between(4, 12);
            return {write(std::nullopt, 0, std::nullopt, n), std::nullopt, 0.0};
        }
        const std::size_t n = rng_.between(6, 16);
        const double u = rng_.uniform();
        const std::size_t k = u < 0.6 ? 1 : (u < 0.9 ? 2 : 3);
        std::optional<EmotionKind> secondary;
        if (k >= 2 && rng_.chance(0.25)) {
            const auto s = draw_mixture();
            if (s != *e) secondary = s;
        }
        return {write(e, k, secondary, n), e, intensity(k, n)};
    }

    Composed troll() {
        const EmotionKind e = rng_.chance(0.5) ? EmotionKind::anger : EmotionKind::disgust;
        const std::size_t n = rng_.between(5, 10);
        const auto base = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.2 * n)));
        const std::size_t k = std::min(n, base + rng_.between(0, 2));
        std::optional<EmotionKind> secondary;
        if (k >= 2 && k < n && rng_.chance(0.5)) {
            secondary = e == EmotionKind::anger ? EmotionKind::disgust : EmotionKind::anger;
        }
        return {write(e, k, secondary, n) + "!!", e, intensity(k, n)};
    }

private:
    static double intensity(std::size_t k, std::size_t n) {
        return std::clamp(4.0 * static_cast<double>(k) / static_cast<double>(n), 0.1, 1.0);
    }

    std::string write(std::optional<EmotionKind> e, std::size_t k,
                      std::optional<EmotionKind> secondary, std::size_t n) {
        std::vector<std::string> words;
        words.reserve(n);
        if (e) {
            const auto& pool = pools_.words[index_of(*e)];
            for (std::size_t i = 0; i < k; ++i) words.push_back(pool[rng_.below(pool.size())]);
        }
        if (secondary && words.size() < n) {
            const auto& pool = pools_.words[index_of(*secondary)];
            words.push_back(pool[rng_.below(pool.size())]);
        }
        while (words.size() < n) words.emplace_back(kFiller[rng_.below(kFillerCount)]);
        for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng_.below(i)]);
        std::string out;
        for (const auto& w : words) {
            if (!out.empty()) out += ' ';
            out += w;
        }
        return out;
    }

    const SyntheticSpec& spec_;
    const Pools& pools_;
    Rng& rng_;
    std::array<double, kEmotionCount> cumulative_{};
};

struct NodeState {
    int replies = 0;
    double intensity = 0.0;
    std::optional<EmotionKind> dominant;
};

} // namespace

std::string_view to_string(Attachment a) noexcept {
    return a == Attachment::preferential ? "preferential" : "uniform";
}

void SyntheticSpec::validate() const {
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
    };
    unit(troll_rate, "troll_rate");
    unit(neutral_rate, "neutral_rate");
    unit(root_bias, "root_bias");
    unit(contagion, "contagion");
    unit(escalation, "escalation");
    if (conversations == 0) throw ConfigError("conversations must be positive");
    if (comments_per_conversation == 0) throw ConfigError("comments_per_conversation must be positive");
    if (conversations > 10000 || comments_per_conversation > 10000) {
        throw ConfigError("conversations and comments_per_conversation are capped at 10000");
    }
    double sum = 0.0;
    for (double w : mixture) {
        if (!(w >= 0.0 && w <= 1.0)) throw ConfigError("mixture weights must be in [0, 1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("mixture weights must sum to 1");
    if (!(mean_interarrival > 0.0)) throw ConfigError("mean_interarrival must be positive");
    if (!(recency > 0.0)) throw ConfigError("recency must be positive");
    if (!(engagement >= 0.0)) throw ConfigError("engagement must be nonnegative");
    if (!(start_time >= 0.0)) throw ConfigError("start_time must be nonnegative");
    if (!(conversation_spacing >= 0.0)) throw ConfigError("conversation_spacing must be nonnegative");
}

EventStream generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                               const Lexicon& lexicon) {
    spec.validate();
    Pools pools;
    for (auto e : kAllEmotions) {
        pools.words[index_of(e)] = lexicon.exclusive_terms(e);
        if (pools.words[index_of(e)].empty()) {
            throw ConfigError("lexicon has no term tied only to " + std::string(to_string(e)));
        }
    }

    const std::size_t n = spec.comments_per_conversation;
    std::vector<double> decay(n + 1);
    for (std::size_t a = 0; a <= n; ++a) decay[a] = std::exp(-static_cast<double>(a) / spec.recency);

    std::vector<RawRecord> records;
    records.reserve(spec.conversations * n);
    std::vector<NodeState> nodes;
    std::vector<double> weight;
    for (std::size_t c = 0; c < spec.conversations; ++c) {
        Rng rng(seed, c);
        ConversationWriter writer(spec, pools, rng);
        const std::string prefix = "c" + pad4(c) + "-";
        double t = spec.start_time + static_cast<double>(c) * spec.conversation_spacing;
        nodes.clear();

        auto root = writer.ordinary(std::nullopt);
        records.push_back({prefix + pad4(0), std::nullopt, "op-" + pad4(c), t, root.text, false});
        nodes.push_back({0, root.intensity, root.dominant});

        for (std::size_t i = 1; i < n; ++i) {
            t += rng.exponential(spec.mean_interarrival);
            const double ramp =
                n > 2 ? 1.0 + spec.escalation * (2.0 * static_cast<double>(i - 1) /
                                                     static_cast<double>(n - 2) - 1.0)
                      : 1.0;
            const bool is_troll = rng.chance(std::min(1.0, spec.troll_rate * ramp));

            std::size_t parent = 0;
            if (spec.attachment == Attachment::uniform) {
                parent = rng.below(i);
            } else if (!rng.chance(spec.root_bias)) {
                weight.resize(i);
                double total = 0.0;
                for (std::size_t j = 0; j < i; ++j) {
                    total += (1.0 + nodes[j].replies) * (1.0 + spec.engagement * nodes[j].intensity) *
                             decay[i - 1 - j];
                    weight[j] = total;
                }
                const double u = rng.uniform() * total;
                parent = static_cast<std::size_t>(
                    std::upper_bound(weight.begin(), weight.end(), u) - weight.begin());
                parent = std::min(parent, i - 1);
            }

            Composed body;
            if (is_troll) {
                body = writer.troll();
            } else {
                std::optional<EmotionKind> forced;
                const auto pd = nodes[parent].dominant;
                if (pd && governed_negative(*pd) && rng.chance(spec.contagion)) forced = pd;
                body = writer.ordinary(forced);
            }

            std::string author = is_troll ? "troll-" + std::to_string(rng.below(kTrollAuthors))
                                          : "u" + pad4(c) + "-" + std::to_string(rng.below(kAuthors));
            const double stamp = std::round(t * 1000.0) / 1000.0;
            records.push_back({prefix + pad4(i), prefix + pad4(parent), std::move(author), stamp,
                               std::move(body.text), is_troll});
            ++nodes[parent].replies;
            nodes.push_back({0, body.intensity, body.dominant});
        }
    }
    return EventStream(std::move(records));
}

} // namespace emoq
