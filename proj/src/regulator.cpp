#include "emoq/regulator.hpp"

#include <algorithm>
#include <cmath>

#include "emoq/error.hpp"

namespace emoq {

ThresholdConfig ThresholdConfig::defaults() {
    ThresholdConfig cfg;
    cfg.base[index_of(EmotionKind::anger)] = 50.0;
    cfg.base[index_of(EmotionKind::fear)] = 60.0;
    cfg.base[index_of(EmotionKind::disgust)] = 60.0;
    cfg.base[index_of(EmotionKind::sadness)] = 60.0;
    cfg.floor.fill(30.0);
    cfg.ceiling.fill(90.0);
    return cfg;
}

void ThresholdConfig::validate() const {
    for (double x : {active_relax, quiet_tighten, decay_gamma}) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ConfigError("threshold adjustments must be finite and nonnegative");
        }
    }
    if (!(decay_scale > 0.0)) throw ConfigError("decay_scale must be positive");
    for (auto e : kAllEmotions) {
        const auto& b = base[index_of(e)];
        if (!b) continue;
        const double lo = floor[index_of(e)];
        const double hi = ceiling[index_of(e)];
        if (!(lo > 0.0 && lo <= *b && *b <= hi && hi <= 100.0)) {
            throw ConfigError("threshold for " + std::string(to_string(e)) +
                              " must satisfy 0 < floor <= base <= ceiling <= 100");
        }
    }
}

ActivityState::ActivityState(double cutoff_seconds, std::size_t window)
    : cutoff_(cutoff_seconds), window_(window) {}

void ActivityState::record(double now) {
    times_.push_back(now);
    if (times_.size() > window_) times_.pop_front();
    ++admissions_;
    if (times_.size() >= 2) {
        std::vector<double> gaps;
        gaps.reserve(times_.size() - 1);
        for (std::size_t i = 1; i < times_.size(); ++i) gaps.push_back(times_[i] - times_[i - 1]);
        std::sort(gaps.begin(), gaps.end());
        const std::size_t m = gaps.size() / 2;
        median_gap_ = gaps.size() % 2 == 1 ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
    }
    active_ = admissions_ >= window_ && median_gap_ < cutoff_;
}

ActivityState activity_update(ActivityState state, double now) {
    state.record(now);
    return state;
}

Thresholds effective_thresholds(const ThresholdConfig& cfg, const ActivityState& activity,
                                std::uint64_t processed) {
    Thresholds eff{};
    const double stage = activity.active() ? cfg.active_relax : -cfg.quiet_tighten;
    const double decay =
        cfg.decay_gamma * std::min(1.0, static_cast<double>(processed) / cfg.decay_scale);
    for (auto e : kAllEmotions) {
        const auto i = index_of(e);
        if (!cfg.base[i]) continue;
        eff[i] = std::clamp(*cfg.base[i] + stage - decay, cfg.floor[i], cfg.ceiling[i]);
    }
    return eff;
}

std::string_view to_string(QueueStatus s) noexcept {
    switch (s) {
    case QueueStatus::held: return "held";
    case QueueStatus::released: return "released";
    case QueueStatus::revised: return "revised";
    case QueueStatus::suspended: return "suspended";
    }
    return "?";
}

std::string_view to_string(AdmitRule r) noexcept {
    switch (r) {
    case AdmitRule::neutral: return "neutral";
    case AdmitRule::positive_allowance: return "positive_allowance";
    case AdmitRule::within_thresholds: return "within_thresholds";
    case AdmitRule::breach: return "breach";
    }
    return "?";
}

std::string_view to_string(DecisionKind d) noexcept {
    switch (d) {
    case DecisionKind::admitted: return "admitted";
    case DecisionKind::held: return "held";
    case DecisionKind::released: return "released";
    case DecisionKind::suspended: return "suspended";
    }
    return "?";
}

void RegulatorConfig::validate() const {
    thresholds.validate();
    board.weights.validate();
    if (board.window_size == 0) throw ConfigError("window_size must be at least 1");
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    if (!(activity_cutoff > 0.0)) throw ConfigError("activity_cutoff must be positive");
    if (activity_window < 2) throw ConfigError("activity window must be at least 2");
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping must lie in (0, 1)");
}

RegulationEngine::RegulationEngine(ClassifiedComment root, RegulatorConfig config)
    : config_((config.validate(), std::move(config))),
      graph_(std::move(root), config_.damping),
      activity_(config_.activity_cutoff, config_.activity_window),
      clock_(graph_.root().timestamp) {
    board_ = graph_.board(config_.board);
    activity_.record(clock_);
}

Thresholds RegulationEngine::thresholds() const {
    return effective_thresholds(config_.thresholds, activity_, processed_);
}

void RegulationEngine::advance_clock(double now) {
    if (now < clock_) {
        throw ClockError("event time " + std::to_string(now) + " precedes engine clock " +
                         std::to_string(clock_));
    }
    clock_ = now;
}

RegulationEngine::Evaluation RegulationEngine::evaluate(const ClassifiedComment& candidate,
                                                        std::string_view parent_id,
                                                        const Thresholds& eff) const {
    Evaluation ev;
    if (candidate.neutral()) {
        ev.rule = AdmitRule::neutral;
        return ev;
    }
    if (is_positive(*candidate.dominant)) {
        ev.rule = AdmitRule::positive_allowance;
        return ev;
    }
    ev.hypothetical = graph_.hypothetical_board(config_.board, candidate, parent_id);
    const EmotionBoard& hyp = *ev.hypothetical;
    ev.rule = AdmitRule::within_thresholds;
    for (auto e : kAllEmotions) {
        const auto& limit = eff[index_of(e)];
        if (!limit) continue;
        // A candidate is never blamed for a breach it does not worsen.
        if (!(hyp[e] <= *limit || hyp[e] <= board_[e])) {
            ev.rule = AdmitRule::breach;
            break;
        }
    }
    return ev;
}

void RegulationEngine::admit(ClassifiedComment comment, std::string_view parent_id,
                             const Evaluation& ev) {
    graph_.add(std::move(comment), parent_id);
    board_ = ev.hypothetical ? *ev.hypothetical : graph_.board(config_.board);
}

void RegulationEngine::log(const std::string& id, DecisionKind kind, AdmitRule rule, double now,
                           const EmotionBoard& before, const Thresholds& eff,
                           std::optional<double> hold, bool revised) {
    if (!logging_) {
        ++event_seq_;
        return;
    }
    DecisionRecord rec;
    rec.event_seq = event_seq_++;
    rec.comment_id = id;
    rec.decision = kind;
    rec.rule = rule;
    rec.time = now;
    rec.board_before = before;
    rec.board_after = board_;
    rec.thresholds = eff;
    rec.active = activity_.active();
    rec.median_gap = activity_.median_gap();
    rec.hold_duration = hold;
    rec.revised = revised;
    decisions_.push_back(std::move(rec));
}

DecisionKind RegulationEngine::submit(ClassifiedComment candidate, std::string_view parent_id,
                                      double now) {
    graph_.index(parent_id);
    if (graph_.contains(candidate.id) || redirect_.contains(candidate.id)) {
        throw StructuralError("duplicate comment id " + candidate.id);
    }
    advance_clock(now);

    const Thresholds eff = thresholds();
    ++processed_;
    const EmotionBoard before = board_;
    const Evaluation ev = evaluate(candidate, parent_id, eff);

    if (ev.rule != AdmitRule::breach) {
        const std::string id = candidate.id;
        admit(std::move(candidate), parent_id, ev);
        activity_.record(now);
        log(id, DecisionKind::admitted, ev.rule, now, before, eff, std::nullopt, false);
        requeue_scan(now);
        return DecisionKind::admitted;
    }

    QueueEntry entry;
    entry.parent_id = std::string(parent_id);
    entry.enqueue_time = now;
    redirect_[candidate.id] = entry.parent_id;
    const std::string id = candidate.id;
    entry.comment = std::move(candidate);
    queue_.push_back(std::move(entry));
    ++held_total_;
    log(id, DecisionKind::held, ev.rule, now, before, eff, std::nullopt, false);
    return DecisionKind::held;
}

std::vector<std::size_t> RegulationEngine::priority_order() const {
    std::vector<std::size_t> order(queue_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto share = [&](const QueueEntry& q) { return q.comment.dominant ? board_[*q.comment.dominant] : 0.0; };
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& qa = queue_[a];
        const auto& qb = queue_[b];
        const double sa = share(qa);
        const double sb = share(qb);
        if (sa != sb) return sa < sb;
        if (qa.enqueue_time != qb.enqueue_time) return qa.enqueue_time < qb.enqueue_time;
        return qa.comment.id < qb.comment.id;
    });
    return order;
}

std::vector<QueueEntry> RegulationEngine::requeue_scan(double now) {
    advance_clock(now);
    std::vector<QueueEntry> released;
    if (queue_.empty()) return released;

    const Thresholds eff = thresholds();
    std::vector<char> done(queue_.size(), 0);
    for (std::size_t idx : priority_order()) {
        QueueEntry& entry = queue_[idx];
        ++entry.reeval_count;
        const Evaluation ev = evaluate(entry.comment, entry.parent_id, eff);
        if (ev.rule == AdmitRule::breach) continue;
        const EmotionBoard before = board_;
        admit(entry.comment, entry.parent_id, ev);
        entry.status = QueueStatus::released;
        entry.release_time = now;
        entry.resolve_time = now;
        redirect_.erase(entry.comment.id);
        log(entry.comment.id, DecisionKind::released, ev.rule, now, before, eff,
            entry.hold_duration(), false);
        done[idx] = 1;
    }

    std::vector<QueueEntry> remaining;
    for (std::size_t i = 0; i < queue_.size(); ++i) {
        if (done[i]) {
            released.push_back(queue_[i]);
            resolved_.push_back(std::move(queue_[i]));
        } else {
            remaining.push_back(std::move(queue_[i]));
        }
    }
    queue_ = std::move(remaining);
    return released;
}

std::vector<QueueEntry> RegulationEngine::finalize(double now) {
    advance_clock(now);
    std::vector<QueueEntry> out;
    if (queue_.empty()) return out;

    const Thresholds eff = thresholds();
    for (std::size_t idx : priority_order()) {
        QueueEntry& entry = queue_[idx];
        entry.status = QueueStatus::revised;
        entry.revised = true;
        entry.comment.intensity =
            std::max(kMinIntensity, entry.comment.intensity * config_.rho);
        ++entry.reeval_count;
        const Evaluation ev = evaluate(entry.comment, entry.parent_id, eff);
        const EmotionBoard before = board_;
        entry.resolve_time = now;
        if (ev.rule != AdmitRule::breach) {
            admit(entry.comment, entry.parent_id, ev);
            entry.status = QueueStatus::released;
            entry.release_time = now;
            redirect_.erase(entry.comment.id);
            log(entry.comment.id, DecisionKind::released, ev.rule, now, before, eff,
                entry.hold_duration(), true);
        } else {
            entry.status = QueueStatus::suspended;
            ++suspended_;
            log(entry.comment.id, DecisionKind::suspended, ev.rule, now, before, eff,
                entry.hold_duration(), true);
        }
        out.push_back(entry);
    }
    for (auto& e : out) resolved_.push_back(e);
    queue_.clear();
    return out;
}

std::string RegulationEngine::visible_parent(std::string_view requested) const {
    std::string cur(requested);
    // Redirect chains are acyclic: every hop points at an earlier submission.
    for (std::size_t hops = 0; hops <= redirect_.size(); ++hops) {
        if (graph_.contains(cur)) return cur;
        auto it = redirect_.find(cur);
        if (it == redirect_.end()) break;
        cur = it->second;
    }
    return graph_.root().id;
}

} // namespace emoq
