#include "emoq/prune.hpp"

#include <algorithm>
#include <cmath>

#include "emoq/error.hpp"

namespace emoq {

namespace {

double score_of(const ToxicityScores& toxicity, const std::string& id) {
    auto it = toxicity.find(id);
    if (it == toxicity.end()) return 0.0;
    if (!(it->second >= 0.0 && it->second <= 1.0)) {
        throw ConfigError("toxicity score for " + id + " outside [0, 1]");
    }
    return it->second;
}

} // namespace

PruneResult prune_subtrees(const ConversationGraph& graph, std::span<const std::string> selected,
                           const ToxicityScores& toxicity) {
    const std::size_t n = graph.size();
    std::vector<char> removed(n, 0);
    std::vector<std::string> roots;
    bool root_skipped = false;
    for (const auto& id : selected) {
        const std::size_t i = graph.index(id);
        if (i == 0) {
            root_skipped = true;
            continue;
        }
        if (removed[i]) continue;  // already inside a removed subtree
        roots.push_back(id);
        for (auto v : graph.subtree(i)) removed[v] = 1;
    }

    PruneResult result{ConversationGraph(graph.root(), graph.damping()), {}, 0, 0.0, 0.0,
                       root_skipped};
    for (std::size_t v = 0; v < n; ++v) {
        const double t = score_of(toxicity, graph.comment(v).id);
        result.total_toxic_mass += t;
        if (removed[v]) {
            ++result.removed_count;
            result.removed_toxic_mass += t;
        } else if (v != 0) {
            result.graph.add(graph.comment(v), graph.comment(graph.parent(v)).id);
        }
    }
    result.selected = std::move(roots);
    return result;
}

PruneResult prune_influential_toxic(const ConversationGraph& graph, const ToxicityScores& toxicity,
                                    double influence_floor, double toxicity_floor,
                                    const InfluenceWeights& weights) {
    const auto infl = graph.influences(weights);
    std::vector<std::string> selected;
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const auto& id = graph.comment(v).id;
        if (infl[v] >= influence_floor && score_of(toxicity, id) >= toxicity_floor) {
            selected.push_back(id);
        }
    }
    return prune_subtrees(graph, selected, toxicity);
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw Error("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

} // namespace emoq
