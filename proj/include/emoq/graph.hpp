#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoq/classifier.hpp"
#include "emoq/emotion.hpp"

namespace emoq {

inline constexpr double kDefaultDamping = 0.85;

// Weights of the four influence factors; nonnegative, summing to 1.
struct InfluenceWeights {
    double intensity = 0.4;
    double pagerank = 0.2;
    double depth = 0.2;
    double replies = 0.2;

    void validate() const;  // throws ConfigError
};

struct NodeMetrics {
    int depth = 0;
    int reply_count = 0;
    double pagerank = 0.0;
    double influence = 0.0;
};

// Percentage of influence-weighted emotion per kind. Either all zero or
// summing to 100.
struct EmotionBoard {
    std::array<double, kEmotionCount> percent{};
    std::size_t window_size = 0;   // nodes the board was computed over
    std::size_t contributors = 0;  // of those, nodes with a non-zero vector

    double operator[](EmotionKind e) const noexcept { return percent[index_of(e)]; }
    bool all_zero() const noexcept;

    friend bool operator==(const EmotionBoard&, const EmotionBoard&) = default;
};

enum class BoardScope { window, history };

struct BoardOptions {
    std::size_t window_size = 100;
    InfluenceWeights weights;
    BoardScope scope = BoardScope::window;
};

// Single-root reply tree in admission order. Node 0 is the root; a node's
// parent always has a smaller index.
class ConversationGraph {
public:
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    explicit ConversationGraph(ClassifiedComment root, double damping = kDefaultDamping);

    // Admits `comment` as a reply to `parent_id`. Throws LookupError for an
    // unknown parent and StructuralError for a duplicate id.
    std::size_t add(ClassifiedComment comment, std::string_view parent_id);

    std::size_t size() const noexcept { return comments_.size(); }
    double damping() const noexcept { return damping_; }

    bool contains(std::string_view id) const;
    std::optional<std::size_t> find(std::string_view id) const;
    std::size_t index(std::string_view id) const;  // throws LookupError

    const ClassifiedComment& comment(std::size_t i) const { return comments_[i]; }
    const ClassifiedComment& root() const { return comments_.front(); }
    std::size_t parent(std::size_t i) const { return parent_[i]; }
    int depth(std::size_t i) const { return depth_[i]; }
    int replies(std::size_t i) const { return replies_[i]; }

    // Exact stationary PageRank (insertion order), refreshed lazily after
    // admissions.
    std::span<const double> pagerank() const;

    NodeMetrics metrics(std::size_t i, const InfluenceWeights& w) const;
    std::vector<double> influences(const InfluenceWeights& w) const;

    EmotionBoard board(const BoardOptions& opts) const;

    // Board as if `candidate` were admitted under `parent_id` now. The graph
    // is not modified; the result is bit-identical to board() after the
    // corresponding add().
    EmotionBoard hypothetical_board(const BoardOptions& opts, const ClassifiedComment& candidate,
                                    std::string_view parent_id) const;

    // Node and all of its descendants, ascending index order.
    std::vector<std::size_t> subtree(std::size_t i) const;

private:
    std::vector<ClassifiedComment> comments_;
    std::vector<std::size_t> parent_;
    std::vector<int> depth_;
    std::vector<int> replies_;
    std::vector<double> intensity_;
    std::vector<EmotionVector> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
    double damping_;

    mutable std::vector<double> pagerank_;
    mutable bool pagerank_fresh_ = false;
};

struct BuildResult {
    ConversationGraph graph;
    std::size_t orphans = 0;  // comments whose parent was missing, reattached to the root
};

// Builds a graph from an unordered batch. Exactly one comment may lack a
// parent id; comments are admitted in (timestamp, id) order, a comment whose
// parent arrives later waits for it. Throws StructuralError on zero or
// multiple roots and on reply cycles.
BuildResult build_graph(std::vector<ClassifiedComment> comments, double damping = kDefaultDamping);

struct PageRankOptions {
    double damping = kDefaultDamping;
    double tolerance = 1e-8;
    int max_iterations = 200;
};

struct PageRankResult {
    std::vector<double> scores;  // insertion order
    int iterations = 0;
    bool converged = false;
};

// Power iteration with edges child -> parent; the root's (dangling) mass is
// spread uniformly. Stops when the L1 change drops below the tolerance.
PageRankResult pagerank(const ConversationGraph& graph, const PageRankOptions& opts = {});

// Closed-form stationary vector for a reply tree given parent indices
// (parent[0] ignored, parent[i] < i). Solves the same fixed point as the
// power iteration: pr(v) = s(v) / sum(s) with s(v) = 1 + d * sum(s(child)).
std::vector<double> stationary_tree_pagerank(std::span<const std::size_t> parent, double damping);

double node_influence(const ConversationGraph& graph, std::string_view id,
                      const InfluenceWeights& weights);

} // namespace emoq
