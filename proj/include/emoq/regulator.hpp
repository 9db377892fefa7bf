#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "emoq/classifier.hpp"
#include "emoq/emotion.hpp"
#include "emoq/graph.hpp"

namespace emoq {

// Board-percentage thresholds for the governed (negative) emotions.
// Emotions without a base value are ungoverned.
struct ThresholdConfig {
    std::array<std::optional<double>, kEmotionCount> base{};
    double active_relax = 10.0;   // added while the conversation is active
    double quiet_tighten = 5.0;   // subtracted while it is quiet
    double decay_gamma = 5.0;     // full decay after decay_scale comments
    double decay_scale = 1000.0;
    std::array<double, kEmotionCount> floor{};
    std::array<double, kEmotionCount> ceiling{};

    // anger 50, fear 60, disgust 60, sadness 60; floor 30, ceiling 90.
    static ThresholdConfig defaults();

    bool governs(EmotionKind e) const noexcept { return base[index_of(e)].has_value(); }
    void validate() const;  // throws ConfigError
};

using Thresholds = std::array<std::optional<double>, kEmotionCount>;

// Active/quiet staging from the median gap between the last K admissions.
class ActivityState {
public:
    explicit ActivityState(double cutoff_seconds = 60.0, std::size_t window = 20);

    void record(double now);

    bool active() const noexcept { return active_; }
    // Median of the gaps inside the ring; 0 while fewer than two admissions.
    double median_gap() const noexcept { return median_gap_; }
    std::size_t admissions() const noexcept { return admissions_; }
    double cutoff() const noexcept { return cutoff_; }
    std::size_t window() const noexcept { return window_; }

private:
    double cutoff_;
    std::size_t window_;
    std::deque<double> times_;
    std::size_t admissions_ = 0;
    double median_gap_ = 0.0;
    bool active_ = false;
};

ActivityState activity_update(ActivityState state, double now);

Thresholds effective_thresholds(const ThresholdConfig& cfg, const ActivityState& activity,
                                std::uint64_t processed);

enum class QueueStatus { held, released, revised, suspended };

std::string_view to_string(QueueStatus s) noexcept;

struct QueueEntry {
    ClassifiedComment comment;
    std::string parent_id;
    double enqueue_time = 0.0;
    int reeval_count = 0;
    QueueStatus status = QueueStatus::held;
    bool revised = false;
    std::optional<double> release_time;
    std::optional<double> resolve_time;  // release or suspension time

    std::optional<double> hold_duration() const {
        if (!resolve_time) return std::nullopt;
        return *resolve_time - enqueue_time;
    }
};

// Why a candidate was (or was not) admissible.
enum class AdmitRule {
    neutral,             // zero vector
    positive_allowance,  // joy / trust / anticipation dominant
    within_thresholds,   // every governed emotion under threshold or not worsened
    breach,
};

enum class DecisionKind { admitted, held, released, suspended };

std::string_view to_string(AdmitRule r) noexcept;
std::string_view to_string(DecisionKind d) noexcept;

struct DecisionRecord {
    std::uint64_t event_seq = 0;
    std::string comment_id;
    DecisionKind decision = DecisionKind::admitted;
    AdmitRule rule = AdmitRule::neutral;
    double time = 0.0;
    EmotionBoard board_before;
    EmotionBoard board_after;
    Thresholds thresholds{};
    bool active = false;
    double median_gap = 0.0;
    std::optional<double> hold_duration;
    bool revised = false;
};

struct RegulatorConfig {
    ThresholdConfig thresholds = ThresholdConfig::defaults();
    BoardOptions board;
    double rho = 0.5;  // intensity multiplier for simulated revision
    double activity_cutoff = 60.0;
    std::size_t activity_window = 20;
    double damping = kDefaultDamping;

    void validate() const;  // throws ConfigError
};

// Comment-queuing state machine for one conversation. Single owner; not
// safe for concurrent use.
class RegulationEngine {
public:
    RegulationEngine(ClassifiedComment root, RegulatorConfig config);

    // Admits or holds `candidate` as a reply to the admitted `parent_id`.
    // Admission triggers requeue_scan(now). Throws LookupError for an
    // unknown parent and ClockError when `now` precedes the last event.
    DecisionKind submit(ClassifiedComment candidate, std::string_view parent_id, double now);

    // Re-tests held entries in priority order (board share of the entry's
    // dominant emotion ascending, then enqueue time, then id) and admits
    // every one that passes. Returns the released entries.
    std::vector<QueueEntry> requeue_scan(double now);

    // End of stream: every remaining entry is revised (intensity * rho) and
    // tested once more; it is released or suspended.
    std::vector<QueueEntry> finalize(double now);

    // Nearest admitted ancestor for a reply addressed to `requested`: held or
    // suspended comments are skipped, unknown ids map to the root.
    std::string visible_parent(std::string_view requested) const;

    const ConversationGraph& graph() const noexcept { return graph_; }
    const RegulatorConfig& config() const noexcept { return config_; }
    std::span<const QueueEntry> queue() const noexcept { return queue_; }
    std::span<const QueueEntry> resolved() const noexcept { return resolved_; }
    const std::vector<DecisionRecord>& decisions() const noexcept { return decisions_; }
    const EmotionBoard& board() const noexcept { return board_; }
    const ActivityState& activity() const noexcept { return activity_; }
    Thresholds thresholds() const;

    std::uint64_t processed() const noexcept { return processed_; }
    std::uint64_t held_total() const noexcept { return held_total_; }
    std::uint64_t suspended() const noexcept { return suspended_; }
    double clock() const noexcept { return clock_; }

    void set_logging(bool on) noexcept { logging_ = on; }

private:
    struct Evaluation {
        AdmitRule rule = AdmitRule::breach;
        std::optional<EmotionBoard> hypothetical;
    };

    Evaluation evaluate(const ClassifiedComment& candidate, std::string_view parent_id,
                        const Thresholds& eff) const;
    void admit(ClassifiedComment comment, std::string_view parent_id, const Evaluation& ev);
    void advance_clock(double now);
    std::vector<std::size_t> priority_order() const;
    void log(const std::string& id, DecisionKind kind, AdmitRule rule, double now,
             const EmotionBoard& before, const Thresholds& eff, std::optional<double> hold,
             bool revised);

    RegulatorConfig config_;
    ConversationGraph graph_;
    EmotionBoard board_;
    ActivityState activity_;
    std::vector<QueueEntry> queue_;
    std::vector<QueueEntry> resolved_;
    std::unordered_map<std::string, std::string> redirect_;  // held/suspended id -> its parent
    std::vector<DecisionRecord> decisions_;
    std::uint64_t processed_ = 1;  // the root
    std::uint64_t held_total_ = 0;
    std::uint64_t suspended_ = 0;
    std::uint64_t event_seq_ = 0;
    double clock_;
    bool logging_ = false;
};

} // namespace emoq
