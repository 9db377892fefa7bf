#include "emoq/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "emoq/error.hpp"

namespace emoq {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

[[noreturn]] void unknown_key(const KeyValue& kv) {
    throw ConfigError("line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
    std::filesystem::path p{std::string(value)};
    if (p.is_relative() && !base.empty()) p = base / p;
    return p;
}

} // namespace

double parse_double(std::string_view key, std::string_view value) {
    double v = 0.0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(std::string(key) + ": '" + std::string(value) + "' is not a number");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(std::string(key) + ": '" + std::string(value) +
                          "' is not a nonnegative integer");
    }
    return v;
}

std::vector<KeyValue> parse_key_values(std::string_view text) {
    std::vector<KeyValue> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        out.push_back({std::string(key), std::string(value), line_no});
    }
    return out;
}

void apply_config(AppConfig& config, const std::vector<KeyValue>& entries,
                  const std::filesystem::path& base_dir) {
    auto& sim = config.simulation;
    auto& th = sim.thresholds;
    for (const auto& kv : entries) {
        const std::string& k = kv.key;
        const std::string& v = kv.value;
        if (k == "window_size") {
            sim.window_size = parse_uint(k, v);
        } else if (k == "weight.intensity") {
            sim.weights.intensity = parse_double(k, v);
        } else if (k == "weight.pagerank") {
            sim.weights.pagerank = parse_double(k, v);
        } else if (k == "weight.depth") {
            sim.weights.depth = parse_double(k, v);
        } else if (k == "weight.replies") {
            sim.weights.replies = parse_double(k, v);
        } else if (k == "kappa") {
            sim.kappa = parse_double(k, v);
        } else if (k == "rho") {
            sim.rho = parse_double(k, v);
        } else if (k == "activity_cutoff") {
            sim.activity_cutoff = parse_double(k, v);
        } else if (k == "activity_window") {
            sim.activity_window = parse_uint(k, v);
        } else if (k == "idle_timeout") {
            sim.idle_timeout = parse_double(k, v);
        } else if (k == "damping") {
            sim.damping = parse_double(k, v);
        } else if (k == "seed") {
            sim.seed = parse_uint(k, v);
        } else if (k == "spread_basis") {
            if (v == "final_graph") {
                sim.spread_basis = SpreadBasis::final_graph;
            } else if (v == "at_admission") {
                sim.spread_basis = SpreadBasis::at_admission;
            } else {
                throw ConfigError("spread_basis must be final_graph or at_admission");
            }
        } else if (k == "threshold.active_relax") {
            th.active_relax = parse_double(k, v);
        } else if (k == "threshold.quiet_tighten") {
            th.quiet_tighten = parse_double(k, v);
        } else if (k == "threshold.decay_gamma") {
            th.decay_gamma = parse_double(k, v);
        } else if (k == "threshold.decay_scale") {
            th.decay_scale = parse_double(k, v);
        } else if (k == "threshold.floor") {
            th.floor.fill(parse_double(k, v));
        } else if (k == "threshold.ceiling") {
            th.ceiling.fill(parse_double(k, v));
        } else if (k.rfind("threshold.", 0) == 0) {
            auto e = parse_emotion(std::string_view(k).substr(10));
            if (!e) unknown_key(kv);
            if (v == "none") {
                th.base[index_of(*e)].reset();
            } else {
                th.base[index_of(*e)] = parse_double(k, v);
            }
        } else if (k == "lexicon") {
            config.lexicon = resolve(base_dir, v);
        } else if (k == "emoji_lexicon") {
            config.emoji_lexicon = resolve(base_dir, v);
        } else if (k == "provider") {
            if (v == "offline") {
                config.provider.kind = ProviderKind::offline_proxy;
            } else if (v == "external") {
                config.provider.kind = ProviderKind::external_http;
            } else {
                throw ConfigError("provider must be offline or external");
            }
        } else if (k == "BASELINE_ENDPOINT") {
            config.provider.http.endpoint = v;
        } else if (k == "BASELINE_KEY_ENV") {
            config.provider.http.key_env = v;
        } else if (k == "provider.cache") {
            config.provider.http.cache_path = resolve(base_dir, v);
        } else if (k == "provider.rate_limit") {
            config.provider.http.requests_per_second = parse_double(k, v);
        } else if (k == "provider.timeout") {
            config.provider.http.timeout_seconds = static_cast<int>(parse_uint(k, v));
        } else if (k == "kappa_t") {
            config.provider.kappa_t = parse_double(k, v);
        } else if (k == "toxicity_floor") {
            config.policy.toxicity_floor = parse_double(k, v);
        } else if (k == "influence_percentile") {
            config.policy.influence_percentile = parse_double(k, v);
        } else if (k == "jobs") {
            config.jobs = static_cast<unsigned>(parse_uint(k, v));
        } else {
            unknown_key(kv);
        }
    }
    config.policy.weights = sim.weights;
    sim.validate();
    if (!(config.policy.toxicity_floor >= 0.0 && config.policy.toxicity_floor <= 1.0)) {
        throw ConfigError("toxicity_floor must be in [0, 1]");
    }
    if (!(config.policy.influence_percentile >= 0.0 && config.policy.influence_percentile <= 100.0)) {
        throw ConfigError("influence_percentile must be in [0, 100]");
    }
    if (!(config.provider.kappa_t > 0.0)) throw ConfigError("kappa_t must be positive");
    if (!(config.provider.http.requests_per_second > 0.0)) {
        throw ConfigError("provider.rate_limit must be positive");
    }
}

AppConfig load_config(const std::filesystem::path& path, AppConfig defaults) {
    apply_config(defaults, parse_key_values(read_text(path)), path.parent_path());
    return defaults;
}

void apply_synthetic_spec(SyntheticSpec& spec, const std::vector<KeyValue>& entries) {
    bool mixture_given = false;
    std::array<double, kEmotionCount> mixture{};
    for (const auto& kv : entries) {
        const std::string& k = kv.key;
        const std::string& v = kv.value;
        if (k == "conversations") {
            spec.conversations = parse_uint(k, v);
        } else if (k == "comments_per_conversation") {
            spec.comments_per_conversation = parse_uint(k, v);
        } else if (k == "troll_rate") {
            spec.troll_rate = parse_double(k, v);
        } else if (k == "neutral_rate") {
            spec.neutral_rate = parse_double(k, v);
        } else if (k == "mean_interarrival") {
            spec.mean_interarrival = parse_double(k, v);
        } else if (k == "attachment") {
            if (v == "preferential") {
                spec.attachment = Attachment::preferential;
            } else if (v == "uniform") {
                spec.attachment = Attachment::uniform;
            } else {
                throw ConfigError("attachment must be preferential or uniform");
            }
        } else if (k == "root_bias") {
            spec.root_bias = parse_double(k, v);
        } else if (k == "recency") {
            spec.recency = parse_double(k, v);
        } else if (k == "engagement") {
            spec.engagement = parse_double(k, v);
        } else if (k == "contagion") {
            spec.contagion = parse_double(k, v);
        } else if (k == "escalation") {
            spec.escalation = parse_double(k, v);
        } else if (k == "start_time") {
            spec.start_time = parse_double(k, v);
        } else if (k == "conversation_spacing") {
            spec.conversation_spacing = parse_double(k, v);
        } else if (k.rfind("mixture.", 0) == 0) {
            auto e = parse_emotion(std::string_view(k).substr(8));
            if (!e) unknown_key(kv);
            mixture_given = true;
            mixture[index_of(*e)] = parse_double(k, v);
        } else {
            unknown_key(kv);
        }
    }
    // A partial mixture leaves the other emotions at zero.
    if (mixture_given) spec.mixture = mixture;
    spec.validate();
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    SyntheticSpec spec;
    apply_synthetic_spec(spec, parse_key_values(read_text(path)));
    return spec;
}

} // namespace emoq
