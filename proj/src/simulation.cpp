#include "emoq/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "emoq/error.hpp"

namespace emoq {

std::string_view to_string(SpreadBasis b) noexcept {
    return b == SpreadBasis::final_graph ? "final_graph" : "at_admission";
}

void SimulationConfig::validate() const {
    regulator().validate();
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    if (!(idle_timeout > 0.0)) throw ConfigError("idle_timeout must be positive");
}

RegulatorConfig SimulationConfig::regulator() const {
    RegulatorConfig r;
    r.thresholds = thresholds;
    r.board.window_size = window_size;
    r.board.weights = weights;
    r.rho = rho;
    r.activity_cutoff = activity_cutoff;
    r.activity_window = activity_window;
    r.damping = damping;
    return r;
}

std::vector<std::vector<ClassifiedComment>> classify_conversations(
    const std::vector<Conversation>& conversations, const Lexicon& lexicon,
    const EmojiLexicon& emoji, double kappa) {
    std::vector<std::vector<ClassifiedComment>> out;
    out.reserve(conversations.size());
    for (const auto& conv : conversations) {
        auto& comments = out.emplace_back();
        comments.reserve(conv.records.size());
        for (const auto& r : conv.records) {
            const auto cls = classify(r.text, lexicon, emoji, kappa);
            comments.push_back(
                {r.id, r.author, r.parent_id, r.created_at, r.text, cls.vector, cls.dominant, cls.intensity});
        }
    }
    return out;
}

std::vector<double> spread_influences(const ConversationGraph& graph,
                                      const InfluenceWeights& weights, SpreadBasis basis) {
    if (basis == SpreadBasis::final_graph) return graph.influences(weights);
    std::vector<double> out(graph.size());
    ConversationGraph prefix(graph.root(), graph.damping());
    out[0] = prefix.metrics(0, weights).influence;
    for (std::size_t v = 1; v < graph.size(); ++v) {
        prefix.add(graph.comment(v), graph.comment(graph.parent(v)).id);
        out[v] = prefix.metrics(v, weights).influence;
    }
    return out;
}

namespace {

void fill_masses(ConversationRun& run, const ConversationGraph& graph,
                 const SimulationConfig& config) {
    const auto infl = spread_influences(graph, config.weights, config.spread_basis);
    run.masses.resize(graph.size());
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const auto& w = graph.comment(v).vector.weights;
        for (std::size_t e = 0; e < kEmotionCount; ++e) run.masses[v][e] = infl[v] * w[e];
    }
}

} // namespace

ConversationRun simulate_conversation(const std::vector<ClassifiedComment>& comments, bool queue,
                                      const SimulationConfig& config, bool keep_decisions) {
    if (comments.empty()) throw StructuralError("conversation without comments");
    ConversationRun run;
    run.root_id = comments.front().id;
    run.total = comments.size();
    const RegulatorConfig reg = config.regulator();

    if (!queue) {
        ConversationGraph graph(comments.front(), config.damping);
        for (std::size_t i = 1; i < comments.size(); ++i) {
            const auto& c = comments[i];
            std::string parent = c.parent_id.value_or(graph.root().id);
            if (!graph.contains(parent)) {
                ++run.orphans;
                parent = graph.root().id;
            }
            graph.add(c, parent);
        }
        run.admitted = graph.size();
        run.final_board = graph.board(reg.board);
        fill_masses(run, graph, config);
        if (keep_decisions) {
            for (std::size_t v = 0; v < graph.size(); ++v) {
                DecisionRecord d;
                d.event_seq = v;
                d.comment_id = graph.comment(v).id;
                d.rule = graph.comment(v).neutral() ? AdmitRule::neutral
                         : is_positive(*graph.comment(v).dominant) ? AdmitRule::positive_allowance
                                                                   : AdmitRule::within_thresholds;
                d.time = graph.comment(v).timestamp;
                run.decisions.push_back(std::move(d));
            }
        }
        return run;
    }

    RegulationEngine engine(comments.front(), reg);
    engine.set_logging(keep_decisions);
    std::unordered_set<std::string> seen;
    seen.insert(comments.front().id);
    for (std::size_t i = 1; i < comments.size(); ++i) {
        const auto& c = comments[i];
        const double now = std::max(c.timestamp, engine.clock());
        if (!engine.queue().empty() && now - engine.clock() > config.idle_timeout) {
            engine.finalize(engine.clock() + config.idle_timeout);
        }
        const std::string requested = c.parent_id.value_or(engine.graph().root().id);
        if (!seen.contains(requested)) ++run.orphans;
        seen.insert(c.id);
        engine.submit(c, engine.visible_parent(requested), now);
    }
    engine.finalize(engine.clock());

    const auto& graph = engine.graph();
    run.admitted = graph.size();
    run.held = engine.held_total();
    run.suspended = engine.suspended();
    for (const auto& e : engine.resolved()) {
        if (auto h = e.hold_duration()) run.hold_durations.push_back(*h);
    }
    run.final_board = engine.board();
    fill_masses(run, graph, config);
    if (keep_decisions) run.decisions = engine.decisions();
    return run;
}

std::vector<ConversationRun> run_conversations(
    const std::vector<std::vector<ClassifiedComment>>& conversations, bool queue,
    const SimulationConfig& config, const RunOptions& options) {
    config.validate();
    std::vector<ConversationRun> out(conversations.size());
    unsigned jobs = options.jobs ? options.jobs : std::max(1U, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, conversations.size()));

    if (jobs <= 1) {
        for (std::size_t i = 0; i < conversations.size(); ++i) {
            out[i] = simulate_conversation(conversations[i], queue, config, options.keep_decisions);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= conversations.size()) return;
                try {
                    out[i] = simulate_conversation(conversations[i], queue, config,
                                                   options.keep_decisions);
                } catch (...) {
                    std::lock_guard lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    next = conversations.size();
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }
    std::sort(out.begin(), out.end(),
              [](const ConversationRun& a, const ConversationRun& b) { return a.root_id < b.root_id; });
    return out;
}

RunReport summarize(const std::vector<ConversationRun>& runs, bool queue,
                    const std::string& stream_hash) {
    RunReport r;
    r.queue = queue;
    r.stream_hash = stream_hash;
    r.conversations = runs.size();
    EmotionMass cum{};
    std::size_t boards = 0;
    for (const auto& run : runs) {
        r.total += run.total;
        r.admitted += run.admitted;
        r.held_count += run.held;
        r.suspended_count += run.suspended;
        r.orphans += run.orphans;
        r.hold_durations.insert(r.hold_durations.end(), run.hold_durations.begin(),
                                run.hold_durations.end());
        double af = 0.0;
        for (const auto& m : run.masses) {
            for (std::size_t e = 0; e < kEmotionCount; ++e) cum[e] += m[e];
            af += m[index_of(EmotionKind::anger)] + m[index_of(EmotionKind::fear)];
            r.spread_series.push_back(cum);
        }
        r.conversation_anger_fear.push_back(af);
        if (!run.final_board.all_zero()) {
            ++boards;
            for (std::size_t e = 0; e < kEmotionCount; ++e) {
                r.final_board.percent[e] += run.final_board.percent[e];
            }
            r.final_board.contributors += run.final_board.contributors;
        }
    }
    if (boards) {
        for (auto& p : r.final_board.percent) p /= static_cast<double>(boards);
    }
    r.spread = cum;
    r.anger_fear_spread = cum[index_of(EmotionKind::anger)] + cum[index_of(EmotionKind::fear)];
    if (r.total) {
        r.held_fraction = static_cast<double>(r.held_count) / static_cast<double>(r.total);
        r.suspended_fraction = static_cast<double>(r.suspended_count) / static_cast<double>(r.total);
    }
    if (!r.hold_durations.empty()) {
        double sum = 0.0;
        for (double h : r.hold_durations) sum += h;
        r.mean_hold = sum / static_cast<double>(r.hold_durations.size());
        auto sorted = r.hold_durations;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t m = sorted.size() / 2;
        r.median_hold = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
    }
    return r;
}

namespace {

RunReport run_stream(const EventStream& stream, const Lexicon& lexicon, const EmojiLexicon& emoji,
                     const SimulationConfig& config, const RunOptions& options, bool queue) {
    config.validate();
    const auto convs = classify_conversations(partition_conversations(stream), lexicon, emoji,
                                              config.kappa);
    return summarize(run_conversations(convs, queue, config, options), queue, stream.hash());
}

} // namespace

RunReport run_without_queue(const EventStream& stream, const Lexicon& lexicon,
                            const EmojiLexicon& emoji, const SimulationConfig& config,
                            const RunOptions& options) {
    return run_stream(stream, lexicon, emoji, config, options, false);
}

RunReport run_with_queue(const EventStream& stream, const Lexicon& lexicon,
                         const EmojiLexicon& emoji, const SimulationConfig& config,
                         const RunOptions& options) {
    return run_stream(stream, lexicon, emoji, config, options, true);
}

double reduction_pct(double no_queue_spread, double with_queue_spread) noexcept {
    if (!(no_queue_spread > 0.0)) return 0.0;
    return 100.0 * (1.0 - with_queue_spread / no_queue_spread);
}

ComparisonReport compare(const RunReport& no_queue, const RunReport& with_queue) {
    if (no_queue.stream_hash != with_queue.stream_hash) {
        throw MismatchError("runs come from different streams (" + no_queue.stream_hash + " vs " +
                            with_queue.stream_hash + ")");
    }
    ComparisonReport c;
    c.stream_hash = no_queue.stream_hash;
    c.reduction_pct = reduction_pct(no_queue.anger_fear_spread, with_queue.anger_fear_spread);
    c.no_queue = no_queue;
    c.with_queue = with_queue;
    c.hold_histogram = hold_histogram(with_queue.hold_durations);
    return c;
}

std::vector<std::size_t> hold_histogram(const std::vector<double>& durations) {
    std::vector<std::size_t> bins;
    for (double d : durations) {
        const auto b = static_cast<std::size_t>(std::max(0.0, d));
        if (b >= bins.size()) bins.resize(b + 1, 0);
        ++bins[b];
    }
    return bins;
}

} // namespace emoq
