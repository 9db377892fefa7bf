#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "emoq/graph.hpp"

namespace emoq {

// Comment id -> toxicity in [0, 1]. Ids without a score count as 0.
using ToxicityScores = std::unordered_map<std::string, double>;

struct PruneResult {
    ConversationGraph graph;            // survivors, admission order kept
    std::vector<std::string> selected;  // subtree roots that were deactivated
    std::size_t removed_count = 0;      // nodes removed, subtrees included
    double removed_toxic_mass = 0.0;
    double total_toxic_mass = 0.0;
    bool root_skipped = false;  // the root matched and was kept

    double reduction() const noexcept {
        return total_toxic_mass > 0.0 ? removed_toxic_mass / total_toxic_mass : 0.0;
    }
};

// Removes the closed reply subtree of every selected node. The root is never
// removed; selecting it sets root_skipped.
PruneResult prune_subtrees(const ConversationGraph& graph, std::span<const std::string> selected,
                           const ToxicityScores& toxicity);

// Deactivates every node with influence >= influence_floor and toxicity >=
// toxicity_floor together with its replies.
PruneResult prune_influential_toxic(const ConversationGraph& graph, const ToxicityScores& toxicity,
                                    double influence_floor, double toxicity_floor,
                                    const InfluenceWeights& weights);

// Linear-interpolated percentile (p in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double p);

} // namespace emoq
