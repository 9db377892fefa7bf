#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "emoq/classifier.hpp"
#include "emoq/graph.hpp"
#include "emoq/ingest.hpp"
#include "emoq/lexicon.hpp"
#include "emoq/regulator.hpp"

namespace emoq {

// Which graph the per-comment influence in the spread metric is read from.
enum class SpreadBasis {
    final_graph,   // influence in the conversation's final admitted graph
    at_admission,  // influence in the graph as it stood right after admission
};

std::string_view to_string(SpreadBasis b) noexcept;

struct SimulationConfig {
    std::size_t window_size = 100;
    InfluenceWeights weights;
    ThresholdConfig thresholds = ThresholdConfig::defaults();
    double kappa = kDefaultKappa;
    double rho = 0.5;
    double activity_cutoff = 60.0;
    std::size_t activity_window = 20;
    double idle_timeout = 3600.0;  // a longer gap finalizes the queue first
    double damping = kDefaultDamping;
    SpreadBasis spread_basis = SpreadBasis::final_graph;
    std::uint64_t seed = 0;

    void validate() const;  // throws ConfigError
    RegulatorConfig regulator() const;
};

using EmotionMass = std::array<double, kEmotionCount>;

// Outcome of one conversation under one condition.
struct ConversationRun {
    std::string root_id;
    std::size_t total = 0;
    std::size_t admitted = 0;
    std::size_t held = 0;
    std::size_t suspended = 0;
    std::size_t orphans = 0;
    std::vector<double> hold_durations;  // resolution order
    EmotionBoard final_board;
    std::vector<EmotionMass> masses;  // per admission event, not cumulative
    std::vector<DecisionRecord> decisions;
};

struct RunReport {
    bool queue = false;
    std::string stream_hash;
    std::size_t conversations = 0;
    std::size_t total = 0;
    std::size_t admitted = 0;
    std::size_t held_count = 0;
    std::size_t suspended_count = 0;
    std::size_t orphans = 0;
    double held_fraction = 0.0;
    double suspended_fraction = 0.0;
    std::vector<double> hold_durations;
    double mean_hold = 0.0;
    double median_hold = 0.0;
    // Mean of the conversations' non-zero final boards.
    EmotionBoard final_board;
    // Cumulative spread per emotion after each admission event; conversations
    // concatenated in root-id order.
    std::vector<EmotionMass> spread_series;
    EmotionMass spread{};
    double anger_fear_spread = 0.0;
    std::vector<double> conversation_anger_fear;  // per conversation, root-id order
};

struct ComparisonReport {
    std::string stream_hash;
    double reduction_pct = 0.0;
    RunReport no_queue;
    RunReport with_queue;
    std::vector<std::size_t> hold_histogram;  // with-queue, 1-second bins from 0
};

// Classifies every record of every conversation. The root comes first.
std::vector<std::vector<ClassifiedComment>> classify_conversations(
    const std::vector<Conversation>& conversations, const Lexicon& lexicon,
    const EmojiLexicon& emoji, double kappa);

ConversationRun simulate_conversation(const std::vector<ClassifiedComment>& comments, bool queue,
                                      const SimulationConfig& config, bool keep_decisions = false);

// Per-node influence used by the spread metric, in admission order.
std::vector<double> spread_influences(const ConversationGraph& graph,
                                      const InfluenceWeights& weights, SpreadBasis basis);

struct RunOptions {
    unsigned jobs = 0;  // 0: hardware concurrency
    bool keep_decisions = false;
};

struct PairedRun {
    std::vector<ConversationRun> no_queue;
    std::vector<ConversationRun> with_queue;
};

// Runs conversations across worker threads; results are ordered by root id
// whatever the scheduling.
std::vector<ConversationRun> run_conversations(
    const std::vector<std::vector<ClassifiedComment>>& conversations, bool queue,
    const SimulationConfig& config, const RunOptions& options = {});

RunReport summarize(const std::vector<ConversationRun>& runs, bool queue,
                    const std::string& stream_hash);

RunReport run_without_queue(const EventStream& stream, const Lexicon& lexicon,
                            const EmojiLexicon& emoji, const SimulationConfig& config,
                            const RunOptions& options = {});
RunReport run_with_queue(const EventStream& stream, const Lexicon& lexicon,
                         const EmojiLexicon& emoji, const SimulationConfig& config,
                         const RunOptions& options = {});

// 100 * (1 - with / no), 0 when the baseline spread is 0.
double reduction_pct(double no_queue_spread, double with_queue_spread) noexcept;

// Throws MismatchError when the stream hashes differ.
ComparisonReport compare(const RunReport& no_queue, const RunReport& with_queue);

std::vector<std::size_t> hold_histogram(const std::vector<double>& durations);

} // namespace emoq
