#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "emoq/graph.hpp"
#include "emoq/lexicon.hpp"
#include "emoq/prune.hpp"

namespace emoq {

// Scores text toxicity in [0, 1].
class ToxicityProvider {
public:
    virtual ~ToxicityProvider() = default;
    virtual double score(std::string_view text) = 0;
    virtual std::string_view name() const noexcept = 0;
};

// Lexicon-density proxy: clamp(kappa_t * (anger + disgust + fear hits) /
// max(1, tokens), 0, 1). Pure and deterministic.
class OfflineToxicityProxy final : public ToxicityProvider {
public:
    explicit OfflineToxicityProxy(const Lexicon& lexicon, double kappa_t = 3.0);
    double score(std::string_view text) override;
    std::string_view name() const noexcept override { return "offline_proxy"; }

private:
    const Lexicon& lexicon_;
    double kappa_t_;
};

// Content hash -> score, persisted as one JSON object per line
// ({"hash": ..., "score": ...}). A file with unreadable lines is rebuilt from
// its valid entries on load.
class ScoreCache {
public:
    ScoreCache() = default;
    explicit ScoreCache(std::filesystem::path path);

    std::optional<double> get(const std::string& hash) const;
    void put(const std::string& hash, double score);

    std::size_t size() const;
    bool rebuilt() const noexcept { return rebuilt_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, double> entries_;
    bool rebuilt_ = false;
};

// Classic token bucket; acquire() blocks until a token is available.
class TokenBucket {
public:
    using Clock = std::chrono::steady_clock;

    explicit TokenBucket(double rate_per_second, double burst = 1.0);
    void acquire();

private:
    std::mutex mu_;
    double rate_;
    double burst_;
    double tokens_;
    Clock::time_point last_;
};

struct HttpProviderConfig {
    std::string endpoint;  // http(s)://host[:port]/path
    std::string key_env;   // name of the env var holding the API key; may be empty
    std::filesystem::path cache_path;
    double requests_per_second = 1.0;
    int timeout_seconds = 10;
};

// Generic score endpoint: POST {"text": ...} -> {"score": x}. Requests are
// serialized and rate limited; responses are cached by content hash.
// Failures raise ProviderError, never a silent 0.
class HttpToxicityProvider final : public ToxicityProvider {
public:
    explicit HttpToxicityProvider(HttpProviderConfig config);
    double score(std::string_view text) override;
    std::string_view name() const noexcept override { return "external_http"; }

    std::size_t network_calls() const noexcept { return calls_.load(); }
    const ScoreCache& cache() const noexcept { return cache_; }

private:
    double fetch(std::string_view text);

    HttpProviderConfig config_;
    ScoreCache cache_;
    TokenBucket bucket_;
    std::mutex request_mu_;
    std::atomic<std::size_t> calls_{0};
    std::string scheme_host_;
    std::string path_;
};

enum class ProviderKind { offline_proxy, external_http };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::offline_proxy;
    double kappa_t = 3.0;
    HttpProviderConfig http;
};

// Throws ConfigError for an external provider without an endpoint.
std::unique_ptr<ToxicityProvider> make_provider(const ProviderConfig& config,
                                                const Lexicon& lexicon);

struct PolicyOptions {
    double toxicity_floor = 0.5;
    double influence_percentile = 95.0;  // influence floor = this percentile
    InfluenceWeights weights;
};

struct PolicyOutcome {
    std::size_t nodes = 0;
    std::size_t detected = 0;  // flagged nodes (subtree roots)
    std::size_t removed = 0;   // nodes removed with their replies
    double removed_toxic_mass = 0.0;
    double total_toxic_mass = 0.0;

    double detected_fraction() const noexcept {
        return nodes ? static_cast<double>(detected) / static_cast<double>(nodes) : 0.0;
    }
    double reduction() const noexcept {
        return total_toxic_mass > 0.0 ? removed_toxic_mass / total_toxic_mass : 0.0;
    }
    PolicyOutcome& operator+=(const PolicyOutcome& o);
};

struct PolicyComparison {
    PolicyOutcome influence_toxicity;  // influence AND toxicity selection
    PolicyOutcome toxicity_only;       // text-only ranking, same budget

    PolicyComparison& operator+=(const PolicyComparison& o);
};

ToxicityScores score_graph(const ConversationGraph& graph, ToxicityProvider& provider);

// Policy A flags nodes at or above the influence percentile whose toxicity
// reaches the floor. Policy B sees only text: it flags the same number of
// nodes, picking the most toxic ones (ties by text hash, then id).
PolicyComparison compare_policies(const ConversationGraph& graph, const ToxicityScores& toxicity,
                                  const PolicyOptions& options = {});

PolicyComparison compare_policies(const ConversationGraph& graph, ToxicityProvider& provider,
                                  const PolicyOptions& options = {});

} // namespace emoq
