#include "emoq/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "emoq/error.hpp"

namespace emoq {

namespace {

double log2_1p(int r) {
    static const std::array<double, 1024> table = [] {
        std::array<double, 1024> t{};
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::log2(1.0 + static_cast<double>(i));
        return t;
    }();
    if (r >= 0 && static_cast<std::size_t>(r) < table.size()) return table[r];
    return std::log2(1.0 + static_cast<double>(r));
}

// Node columns plus an optional not-yet-admitted node appended at index
// base.size(). Every board, real or hypothetical, goes through
// compute_board() so that the two agree bit for bit.
struct Columns {
    std::span<const std::size_t> parent;
    std::span<const int> depth;
    std::span<const int> replies;
    std::span<const double> intensity;
    std::span<const EmotionVector> vectors;
};

struct Extra {
    std::size_t parent;
    int depth;
    double intensity;
    const EmotionVector* vector;
};

template <typename ParentFn>
void accumulate_subtree_mass(std::size_t n, ParentFn parent_of, double damping,
                             std::vector<double>& s) {
    s.assign(n, 1.0);
    for (std::size_t v = n; v-- > 1;) s[parent_of(v)] += damping * s[v];
}

EmotionBoard compute_board(const Columns& base, const Extra* extra, const BoardOptions& opts,
                           double damping) {
    const std::size_t nb = base.parent.size();
    const std::size_t n = nb + (extra ? 1 : 0);

    auto parent_of = [&](std::size_t v) { return v < nb ? base.parent[v] : extra->parent; };
    auto replies_of = [&](std::size_t v) {
        if (v >= nb) return 0;
        return base.replies[v] + ((extra && extra->parent == v) ? 1 : 0);
    };
    auto depth_of = [&](std::size_t v) { return v < nb ? base.depth[v] : extra->depth; };
    auto intensity_of = [&](std::size_t v) { return v < nb ? base.intensity[v] : extra->intensity; };
    auto vector_of = [&](std::size_t v) -> const EmotionVector& {
        return v < nb ? base.vectors[v] : *extra->vector;
    };

    thread_local std::vector<double> mass;
    accumulate_subtree_mass(n, parent_of, damping, mass);
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) total += mass[v];
    double max_pr = 0.0;
    int max_replies = 0;
    for (std::size_t v = 0; v < n; ++v) {
        max_pr = std::max(max_pr, mass[v] / total);
        max_replies = std::max(max_replies, replies_of(v));
    }
    const double replies_den = max_replies == 0 ? 1.0 : log2_1p(max_replies);

    std::size_t first = 0;
    if (opts.scope == BoardScope::window && n > opts.window_size) first = n - opts.window_size;

    EmotionBoard board;
    board.window_size = n - first;
    std::array<double, kEmotionCount> sums{};
    const auto& w = opts.weights;
    for (std::size_t v = first; v < n; ++v) {
        const EmotionVector& vec = vector_of(v);
        if (vec.is_zero()) continue;
        ++board.contributors;
        const double influence = w.intensity * intensity_of(v) +
                                 w.pagerank * ((mass[v] / total) / max_pr) +
                                 w.depth * (1.0 / (1.0 + depth_of(v))) +
                                 w.replies * (log2_1p(replies_of(v)) / replies_den);
        for (std::size_t e = 0; e < kEmotionCount; ++e) sums[e] += influence * vec.weights[e];
    }
    double grand = 0.0;
    for (double s : sums) grand += s;
    if (grand > 0.0) {
        for (std::size_t e = 0; e < kEmotionCount; ++e) board.percent[e] = 100.0 * sums[e] / grand;
    }
    return board;
}

} // namespace

void InfluenceWeights::validate() const {
    for (double x : {intensity, pagerank, depth, replies}) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("influence weights must be nonnegative");
    }
    if (std::abs(intensity + pagerank + depth + replies - 1.0) > 1e-9) {
        throw ConfigError("influence weights must sum to 1");
    }
}

bool EmotionBoard::all_zero() const noexcept {
    return std::all_of(percent.begin(), percent.end(), [](double p) { return p == 0.0; });
}

ConversationGraph::ConversationGraph(ClassifiedComment root, double damping) : damping_(damping) {
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping must lie in (0, 1)");
    root.parent_id.reset();
    index_.emplace(root.id, 0);
    parent_.push_back(npos);
    depth_.push_back(0);
    replies_.push_back(0);
    intensity_.push_back(root.intensity);
    vectors_.push_back(root.vector);
    comments_.push_back(std::move(root));
}

std::size_t ConversationGraph::add(ClassifiedComment comment, std::string_view parent_id) {
    const std::size_t p = index(parent_id);
    if (index_.contains(comment.id)) throw StructuralError("duplicate comment id " + comment.id);
    const std::size_t i = comments_.size();
    index_.emplace(comment.id, i);
    comment.parent_id = std::string(parent_id);
    parent_.push_back(p);
    depth_.push_back(depth_[p] + 1);
    replies_.push_back(0);
    ++replies_[p];
    intensity_.push_back(comment.intensity);
    vectors_.push_back(comment.vector);
    comments_.push_back(std::move(comment));
    pagerank_fresh_ = false;
    return i;
}

bool ConversationGraph::contains(std::string_view id) const { return find(id).has_value(); }

std::optional<std::size_t> ConversationGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t ConversationGraph::index(std::string_view id) const {
    auto i = find(id);
    if (!i) throw LookupError("unknown comment id " + std::string(id));
    return *i;
}

std::span<const double> ConversationGraph::pagerank() const {
    if (!pagerank_fresh_) {
        pagerank_ = stationary_tree_pagerank(parent_, damping_);
        pagerank_fresh_ = true;
    }
    return pagerank_;
}

NodeMetrics ConversationGraph::metrics(std::size_t i, const InfluenceWeights& w) const {
    auto pr = pagerank();
    const double max_pr = *std::max_element(pr.begin(), pr.end());
    const int max_replies = *std::max_element(replies_.begin(), replies_.end());
    const double den = max_replies == 0 ? 1.0 : log2_1p(max_replies);
    NodeMetrics m;
    m.depth = depth_[i];
    m.reply_count = replies_[i];
    m.pagerank = pr[i];
    m.influence = w.intensity * intensity_[i] + w.pagerank * (pr[i] / max_pr) +
                  w.depth * (1.0 / (1.0 + depth_[i])) + w.replies * (log2_1p(replies_[i]) / den);
    return m;
}

std::vector<double> ConversationGraph::influences(const InfluenceWeights& w) const {
    auto pr = pagerank();
    const double max_pr = *std::max_element(pr.begin(), pr.end());
    const int max_replies = *std::max_element(replies_.begin(), replies_.end());
    const double den = max_replies == 0 ? 1.0 : log2_1p(max_replies);
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = w.intensity * intensity_[i] + w.pagerank * (pr[i] / max_pr) +
                 w.depth * (1.0 / (1.0 + depth_[i])) + w.replies * (log2_1p(replies_[i]) / den);
    }
    return out;
}

EmotionBoard ConversationGraph::board(const BoardOptions& opts) const {
    if (opts.window_size == 0) throw ConfigError("window size must be at least 1");
    Columns cols{parent_, depth_, replies_, intensity_, vectors_};
    return compute_board(cols, nullptr, opts, damping_);
}

EmotionBoard ConversationGraph::hypothetical_board(const BoardOptions& opts,
                                                   const ClassifiedComment& candidate,
                                                   std::string_view parent_id) const {
    if (opts.window_size == 0) throw ConfigError("window size must be at least 1");
    const std::size_t p = index(parent_id);
    Columns cols{parent_, depth_, replies_, intensity_, vectors_};
    Extra extra{p, depth_[p] + 1, candidate.intensity, &candidate.vector};
    return compute_board(cols, &extra, opts, damping_);
}

std::vector<std::size_t> ConversationGraph::subtree(std::size_t i) const {
    // Parents precede children, so one forward sweep marks every descendant.
    std::vector<char> in(size(), 0);
    in[i] = 1;
    std::vector<std::size_t> out{i};
    for (std::size_t v = i + 1; v < size(); ++v) {
        if (in[parent_[v]]) {
            in[v] = 1;
            out.push_back(v);
        }
    }
    return out;
}

BuildResult build_graph(std::vector<ClassifiedComment> comments, double damping) {
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < comments.size(); ++i) {
        if (!comments[i].parent_id) roots.push_back(i);
    }
    if (roots.size() != 1) {
        throw StructuralError("expected exactly one root comment, found " +
                              std::to_string(roots.size()));
    }

    std::unordered_map<std::string, std::size_t> known;
    for (std::size_t i = 0; i < comments.size(); ++i) {
        if (!known.emplace(comments[i].id, i).second) {
            throw StructuralError("duplicate comment id " + comments[i].id);
        }
    }

    ClassifiedComment root = std::move(comments[roots.front()]);
    std::vector<ClassifiedComment> rest;
    rest.reserve(comments.size() - 1);
    for (std::size_t i = 0; i < comments.size(); ++i) {
        if (i != roots.front()) rest.push_back(std::move(comments[i]));
    }
    std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
        return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.id < b.id;
    });

    BuildResult result{ConversationGraph(std::move(root), damping), 0};
    auto& graph = result.graph;
    const std::string root_id = graph.root().id;
    for (auto& c : rest) {
        if (!known.contains(*c.parent_id)) {
            c.parent_id = root_id;
            ++result.orphans;
        }
    }

    // Comments waiting for a parent that has not been admitted yet, in
    // arrival order per parent.
    std::map<std::string, std::vector<ClassifiedComment>> waiting;
    std::vector<ClassifiedComment> ready;
    for (auto& c : rest) {
        if (graph.contains(*c.parent_id)) {
            ready.push_back(std::move(c));
        } else {
            waiting[*c.parent_id].push_back(std::move(c));
        }
        while (!ready.empty()) {
            ClassifiedComment next = std::move(ready.back());
            ready.pop_back();
            const std::string id = next.id;
            const std::string pid = *next.parent_id;
            graph.add(std::move(next), pid);
            auto it = waiting.find(id);
            if (it != waiting.end()) {
                // Reverse so that pop_back admits them in arrival order.
                for (auto r = it->second.rbegin(); r != it->second.rend(); ++r) {
                    ready.push_back(std::move(*r));
                }
                waiting.erase(it);
            }
        }
    }
    if (!waiting.empty()) {
        throw StructuralError("reply cycle detected involving parent " + waiting.begin()->first);
    }
    return result;
}

std::vector<double> stationary_tree_pagerank(std::span<const std::size_t> parent, double damping) {
    std::vector<double> mass;
    accumulate_subtree_mass(parent.size(), [&](std::size_t v) { return parent[v]; }, damping, mass);
    double total = 0.0;
    for (double m : mass) total += m;
    for (double& m : mass) m /= total;
    return mass;
}

PageRankResult pagerank(const ConversationGraph& graph, const PageRankOptions& opts) {
    const std::size_t n = graph.size();
    const double d = opts.damping;
    const double inv_n = 1.0 / static_cast<double>(n);
    PageRankResult result;
    std::vector<double> cur(n, inv_n);
    std::vector<double> next(n);
    for (int it = 0; it < opts.max_iterations; ++it) {
        // Only the root is dangling: every reply has exactly one out-edge.
        const double base = (1.0 - d) * inv_n + d * cur[0] * inv_n;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t v = 1; v < n; ++v) next[graph.parent(v)] += d * cur[v];
        double delta = 0.0;
        for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - cur[v]);
        cur.swap(next);
        result.iterations = it + 1;
        if (delta < opts.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.scores = std::move(cur);
    return result;
}

double node_influence(const ConversationGraph& graph, std::string_view id,
                      const InfluenceWeights& weights) {
    return graph.metrics(graph.index(id), weights).influence;
}

} // namespace emoq
