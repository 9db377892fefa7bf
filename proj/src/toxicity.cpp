#include "emoq/toxicity.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "emoq/error.hpp"
#include "emoq/hashing.hpp"
#include "emoq/tokenizer.hpp"

namespace emoq {

using nlohmann::json;

OfflineToxicityProxy::OfflineToxicityProxy(const Lexicon& lexicon, double kappa_t)
    : lexicon_(lexicon), kappa_t_(kappa_t) {}

double OfflineToxicityProxy::score(std::string_view text) {
    const auto tokens = tokenize(text);
    double hits = 0.0;
    for (const auto& tok : tokens) {
        const auto* set = lexicon_.find(tok);
        if (!set) continue;
        for (auto e : {EmotionKind::anger, EmotionKind::disgust, EmotionKind::fear}) {
            if (set->contains(e)) hits += 1.0;
        }
    }
    const double n = static_cast<double>(std::max<std::size_t>(1, tokens.size()));
    return std::clamp(kappa_t_ * hits / n, 0.0, 1.0);
}

ScoreCache::ScoreCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    bool corrupt = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("hash") || !j["hash"].is_string() ||
            !j.contains("score") || !j["score"].is_number()) {
            corrupt = true;
            continue;
        }
        const double s = j["score"].get<double>();
        if (!(s >= 0.0 && s <= 1.0)) {
            corrupt = true;
            continue;
        }
        entries_[j["hash"].get<std::string>()] = s;
    }
    in.close();
    if (corrupt) {
        rebuilt_ = true;
        std::ofstream out(path_, std::ios::trunc);
        for (const auto& [h, s] : entries_) out << json{{"hash", h}, {"score", s}}.dump() << '\n';
    }
}

std::optional<double> ScoreCache::get(const std::string& hash) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(hash);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ScoreCache::put(const std::string& hash, double score) {
    std::lock_guard lock(mu_);
    entries_[hash] = score;
    if (path_.empty()) return;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IoError("cannot append to cache " + path_.string());
    out << json{{"hash", hash}, {"score", score}}.dump() << '\n';
}

std::size_t ScoreCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(burst), tokens_(burst), last_(Clock::now()) {
    if (!(rate_ > 0.0) || !(burst_ >= 1.0)) throw ConfigError("token bucket needs rate > 0, burst >= 1");
}

void TokenBucket::acquire() {
    std::unique_lock lock(mu_);
    while (true) {
        const auto now = Clock::now();
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
            tokens_ -= 1.0;
            return;
        }
        const double wait = (1.0 - tokens_) / rate_;
        std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
}

HttpToxicityProvider::HttpToxicityProvider(HttpProviderConfig config)
    : config_(std::move(config)),
      cache_(config_.cache_path),
      bucket_(config_.requests_per_second) {
    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (url.empty() || scheme_end == std::string::npos) {
        throw ConfigError("BASELINE_ENDPOINT must be an http(s) URL, got '" + url + "'");
    }
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_ = url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

double HttpToxicityProvider::score(std::string_view text) {
    if (text.empty()) throw ProviderError("external provider needs non-empty text");
    const std::string key = sha256_hex(text);
    if (auto hit = cache_.get(key)) return *hit;
    const double s = fetch(text);
    cache_.put(key, s);
    return s;
}

double HttpToxicityProvider::fetch(std::string_view text) {
    std::lock_guard lock(request_mu_);
    bucket_.acquire();
    ++calls_;

    httplib::Client client(scheme_host_);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (!config_.key_env.empty()) {
        const char* key = std::getenv(config_.key_env.c_str());
        if (!key || !*key) {
            throw ProviderError("environment variable " + config_.key_env + " is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const std::string body = json{{"text", std::string(text)}}.dump();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
        throw ProviderError("request to " + config_.endpoint + " failed: " +
                            httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw ProviderError("provider returned HTTP " + std::to_string(res->status));
    }
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("score") || !j["score"].is_number()) {
        throw ProviderError("provider response lacks a numeric score");
    }
    const double s = j["score"].get<double>();
    if (!(s >= 0.0 && s <= 1.0)) throw ProviderError("provider score outside [0, 1]");
    return s;
}

std::unique_ptr<ToxicityProvider> make_provider(const ProviderConfig& config,
                                                const Lexicon& lexicon) {
    switch (config.kind) {
    case ProviderKind::offline_proxy:
        return std::make_unique<OfflineToxicityProxy>(lexicon, config.kappa_t);
    case ProviderKind::external_http:
        if (config.http.endpoint.empty()) {
            throw ConfigError("external provider selected but BASELINE_ENDPOINT is empty");
        }
        return std::make_unique<HttpToxicityProvider>(config.http);
    }
    throw ConfigError("unknown provider kind");
}

PolicyOutcome& PolicyOutcome::operator+=(const PolicyOutcome& o) {
    nodes += o.nodes;
    detected += o.detected;
    removed += o.removed;
    removed_toxic_mass += o.removed_toxic_mass;
    total_toxic_mass += o.total_toxic_mass;
    return *this;
}

PolicyComparison& PolicyComparison::operator+=(const PolicyComparison& o) {
    influence_toxicity += o.influence_toxicity;
    toxicity_only += o.toxicity_only;
    return *this;
}

ToxicityScores score_graph(const ConversationGraph& graph, ToxicityProvider& provider) {
    ToxicityScores scores;
    scores.reserve(graph.size());
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const auto& c = graph.comment(v);
        scores[c.id] = c.text.empty() ? 0.0 : provider.score(c.text);
    }
    return scores;
}

namespace {

PolicyOutcome outcome_of(const PruneResult& r, std::size_t nodes) {
    PolicyOutcome o;
    o.nodes = nodes;
    o.detected = r.selected.size();
    o.removed = r.removed_count;
    o.removed_toxic_mass = r.removed_toxic_mass;
    o.total_toxic_mass = r.total_toxic_mass;
    return o;
}

} // namespace

PolicyComparison compare_policies(const ConversationGraph& graph, const ToxicityScores& toxicity,
                                  const PolicyOptions& options) {
    const auto infl = graph.influences(options.weights);
    const double floor = percentile(infl, options.influence_percentile);
    auto a = prune_influential_toxic(graph, toxicity, floor, options.toxicity_floor, options.weights);

    struct Ranked {
        double score;
        std::string text_hash;
        std::string id;
    };
    std::vector<Ranked> ranked;
    for (std::size_t v = 1; v < graph.size(); ++v) {
        const auto& c = graph.comment(v);
        auto it = toxicity.find(c.id);
        const double t = it == toxicity.end() ? 0.0 : it->second;
        if (t >= options.toxicity_floor) ranked.push_back({t, sha256_hex(c.text), c.id});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& x, const Ranked& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.text_hash != y.text_hash) return x.text_hash < y.text_hash;
        return x.id < y.id;
    });
    std::vector<std::string> chosen;
    for (std::size_t i = 0; i < ranked.size() && i < a.selected.size(); ++i) {
        chosen.push_back(ranked[i].id);
    }
    auto b = prune_subtrees(graph, chosen, toxicity);

    PolicyComparison cmp;
    cmp.influence_toxicity = outcome_of(a, graph.size());
    cmp.toxicity_only = outcome_of(b, graph.size());
    return cmp;
}

PolicyComparison compare_policies(const ConversationGraph& graph, ToxicityProvider& provider,
                                  const PolicyOptions& options) {
    return compare_policies(graph, score_graph(graph, provider), options);
}

} // namespace emoq
