#include "emoq/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emoq/error.hpp"

namespace emoq {

namespace {

using nlohmann::json;

double r6(double x) {
    const double r = std::round(x * 1e6) / 1e6;
    return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string f6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", r6(x));
    return buf;
}

json board_json(const EmotionBoard& b) {
    json j = json::object();
    for (auto e : kAllEmotions) j[std::string(to_string(e))] = r6(b[e]);
    return j;
}

json mass_json(const EmotionMass& m) {
    json j = json::object();
    for (auto e : kAllEmotions) j[std::string(to_string(e))] = r6(m[index_of(e)]);
    return j;
}

json thresholds_json(const Thresholds& t) {
    json j = json::object();
    for (auto e : kAllEmotions) {
        if (t[index_of(e)]) j[std::string(to_string(e))] = r6(*t[index_of(e)]);
    }
    return j;
}

json config_json(const SimulationConfig& c) {
    json j;
    j["window_size"] = c.window_size;
    j["weights"] = {{"intensity", c.weights.intensity},
                    {"pagerank", c.weights.pagerank},
                    {"depth", c.weights.depth},
                    {"replies", c.weights.replies}};
    json th = json::object();
    for (auto e : kAllEmotions) {
        if (auto b = c.thresholds.base[index_of(e)]) th[std::string(to_string(e))] = *b;
    }
    j["thresholds"] = {{"base", th},
                       {"active_relax", c.thresholds.active_relax},
                       {"quiet_tighten", c.thresholds.quiet_tighten},
                       {"decay_gamma", c.thresholds.decay_gamma},
                       {"decay_scale", c.thresholds.decay_scale}};
    j["kappa"] = c.kappa;
    j["rho"] = c.rho;
    j["activity_cutoff"] = c.activity_cutoff;
    j["activity_window"] = c.activity_window;
    j["idle_timeout"] = c.idle_timeout;
    j["damping"] = c.damping;
    j["spread_basis"] = std::string(to_string(c.spread_basis));
    j["seed"] = c.seed;
    return j;
}

json report_body(const RunReport& r) {
    json j;
    j["queue"] = r.queue;
    j["stream_hash"] = r.stream_hash;
    j["conversations"] = r.conversations;
    j["total"] = r.total;
    j["admitted"] = r.admitted;
    j["held_count"] = r.held_count;
    j["suspended_count"] = r.suspended_count;
    j["orphans"] = r.orphans;
    j["held_fraction"] = r6(r.held_fraction);
    j["suspended_fraction"] = r6(r.suspended_fraction);
    j["mean_hold"] = r6(r.mean_hold);
    j["median_hold"] = r6(r.median_hold);
    json holds = json::array();
    for (double h : r.hold_durations) holds.push_back(r6(h));
    j["hold_durations"] = std::move(holds);
    j["final_board"] = board_json(r.final_board);
    j["spread"] = mass_json(r.spread);
    j["anger_fear_spread"] = r6(r.anger_fear_spread);
    json conv = json::array();
    for (double x : r.conversation_anger_fear) conv.push_back(r6(x));
    j["conversation_anger_fear"] = std::move(conv);
    json series = json::array();
    for (const auto& m : r.spread_series) {
        json row = json::array();
        for (double x : m) row.push_back(r6(x));
        series.push_back(std::move(row));
    }
    j["spread_series"] = std::move(series);
    return j;
}

EmotionBoard board_from(const json& j) {
    EmotionBoard b;
    for (auto e : kAllEmotions) b.percent[index_of(e)] = j.at(std::string(to_string(e))).get<double>();
    return b;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

} // namespace

ReportFormat parse_report_format(std::string_view s) {
    if (s == "all") return ReportFormat::all;
    if (s == "json") return ReportFormat::json;
    if (s == "csv") return ReportFormat::csv;
    throw ConfigError("unknown format '" + std::string(s) + "' (expected all, json or csv)");
}

std::string run_report_json(const RunReport& report, const SimulationConfig& config) {
    json j = report_body(report);
    j["config"] = config_json(config);
    return j.dump(2) + "\n";
}

RunReport parse_run_report_json(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw LoadError("report.json is not a JSON object");
    try {
        RunReport r;
        r.queue = j.at("queue").get<bool>();
        r.stream_hash = j.at("stream_hash").get<std::string>();
        r.conversations = j.at("conversations").get<std::size_t>();
        r.total = j.at("total").get<std::size_t>();
        r.admitted = j.at("admitted").get<std::size_t>();
        r.held_count = j.at("held_count").get<std::size_t>();
        r.suspended_count = j.at("suspended_count").get<std::size_t>();
        r.orphans = j.at("orphans").get<std::size_t>();
        r.held_fraction = j.at("held_fraction").get<double>();
        r.suspended_fraction = j.at("suspended_fraction").get<double>();
        r.mean_hold = j.at("mean_hold").get<double>();
        r.median_hold = j.at("median_hold").get<double>();
        r.hold_durations = j.at("hold_durations").get<std::vector<double>>();
        r.final_board = board_from(j.at("final_board"));
        const auto& spread = j.at("spread");
        for (auto e : kAllEmotions) {
            r.spread[index_of(e)] = spread.at(std::string(to_string(e))).get<double>();
        }
        r.anger_fear_spread = j.at("anger_fear_spread").get<double>();
        r.conversation_anger_fear = j.at("conversation_anger_fear").get<std::vector<double>>();
        for (const auto& row : j.at("spread_series")) {
            EmotionMass m{};
            if (row.size() != kEmotionCount) throw LoadError("spread_series row has wrong width");
            for (std::size_t e = 0; e < kEmotionCount; ++e) m[e] = row[e].get<double>();
            r.spread_series.push_back(m);
        }
        return r;
    } catch (const json::exception& ex) {
        throw LoadError(std::string("report.json: ") + ex.what());
    }
}

std::string comparison_json(const ComparisonReport& c) {
    json j;
    j["stream_hash"] = c.stream_hash;
    j["reduction_pct"] = r6(c.reduction_pct);
    auto side = [](const RunReport& r) {
        json s;
        s["total"] = r.total;
        s["admitted"] = r.admitted;
        s["held_count"] = r.held_count;
        s["suspended_count"] = r.suspended_count;
        s["held_fraction"] = r6(r.held_fraction);
        s["suspended_fraction"] = r6(r.suspended_fraction);
        s["mean_hold"] = r6(r.mean_hold);
        s["median_hold"] = r6(r.median_hold);
        s["anger_fear_spread"] = r6(r.anger_fear_spread);
        s["spread"] = mass_json(r.spread);
        s["final_board"] = board_json(r.final_board);
        return s;
    };
    j["no_queue"] = side(c.no_queue);
    j["with_queue"] = side(c.with_queue);
    j["hold_histogram"] = c.hold_histogram;
    return j.dump(2) + "\n";
}

std::string hold_histogram_csv(const std::vector<std::size_t>& bins) {
    std::string out = "bin_start_s,bin_end_s,count\n";
    for (std::size_t i = 0; i < bins.size(); ++i) {
        out += std::to_string(i) + ',' + std::to_string(i + 1) + ',' + std::to_string(bins[i]) + '\n';
    }
    return out;
}

std::string emotion_timeseries_csv(const std::vector<EmotionMass>& series) {
    std::string out = "event";
    for (auto e : kAllEmotions) out += ',' + std::string(to_string(e));
    out += '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(i);
        for (double x : series[i]) out += ',' + f6(x);
        out += '\n';
    }
    return out;
}

std::string final_board_csv(const EmotionBoard& board) {
    std::string out = "emotion,percent\n";
    for (auto e : kAllEmotions) out += std::string(to_string(e)) + ',' + f6(board[e]) + '\n';
    return out;
}

std::string final_board_comparison_csv(const EmotionBoard& no_queue, const EmotionBoard& with_queue) {
    std::string out = "emotion,no_queue,with_queue\n";
    for (auto e : kAllEmotions) {
        out += std::string(to_string(e)) + ',' + f6(no_queue[e]) + ',' + f6(with_queue[e]) + '\n';
    }
    return out;
}

std::string decision_log(const std::vector<ConversationRun>& runs, bool queue) {
    std::string out;
    for (const auto& run : runs) {
        for (const auto& d : run.decisions) {
            json j;
            j["conversation"] = run.root_id;
            j["event_seq"] = d.event_seq;
            j["comment_id"] = d.comment_id;
            j["decision"] = std::string(to_string(d.decision));
            j["time"] = r6(d.time);
            if (queue) {
                j["rule"] = std::string(to_string(d.rule));
                j["board_before"] = board_json(d.board_before);
                j["board_after"] = board_json(d.board_after);
                j["eff_thresholds"] = thresholds_json(d.thresholds);
                j["activity"] = {{"active", d.active}, {"median_gap", r6(d.median_gap)}};
                if (d.hold_duration) j["hold_duration"] = r6(*d.hold_duration);
                j["revised"] = d.revised;
            }
            out += j.dump();
            out += '\n';
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string());
    }
}

} // namespace

void emit_run(const std::filesystem::path& dir, const RunReport& report,
              const std::vector<ConversationRun>& runs, const SimulationConfig& config,
              ReportFormat format) {
    ensure_dir(dir);
    if (format != ReportFormat::csv) write_file(dir / "report.json", run_report_json(report, config));
    if (format != ReportFormat::json) {
        write_file(dir / "hold_histogram.csv", hold_histogram_csv(hold_histogram(report.hold_durations)));
        write_file(dir / "emotion_timeseries.csv", emotion_timeseries_csv(report.spread_series));
        write_file(dir / "final_board.csv", final_board_csv(report.final_board));
    }
    write_file(dir / "decisions.log", decision_log(runs, report.queue));
}

void emit_comparison(const std::filesystem::path& dir, const ComparisonReport& c,
                     ReportFormat format) {
    ensure_dir(dir);
    if (format != ReportFormat::csv) write_file(dir / "comparison.json", comparison_json(c));
    if (format != ReportFormat::json) {
        write_file(dir / "hold_histogram.csv", hold_histogram_csv(c.hold_histogram));
        write_file(dir / "final_board.csv",
                   final_board_comparison_csv(c.no_queue.final_board, c.with_queue.final_board));
    }
}

RunReport load_run_report(const std::filesystem::path& dir) {
    return parse_run_report_json(read_file(dir / "report.json"));
}

std::string graph_snapshot_json(const ConversationGraph& graph, const BoardOptions& opts) {
    json nodes = json::array();
    for (std::size_t v = 0; v < graph.size(); ++v) {
        const auto& c = graph.comment(v);
        const auto m = graph.metrics(v, opts.weights);
        json n;
        n["id"] = c.id;
        n["parent"] = v == 0 ? json(nullptr) : json(graph.comment(graph.parent(v)).id);
        n["timestamp"] = r6(c.timestamp);
        json vec = json::object();
        for (auto e : kAllEmotions) vec[std::string(to_string(e))] = r6(c.vector[e]);
        n["vector"] = std::move(vec);
        n["dominant"] = c.dominant ? json(std::string(to_string(*c.dominant))) : json(nullptr);
        n["intensity"] = r6(c.intensity);
        n["metrics"] = {{"depth", m.depth},
                        {"reply_count", m.reply_count},
                        {"pagerank", r6(m.pagerank)},
                        {"influence", r6(m.influence)}};
        nodes.push_back(std::move(n));
    }
    const auto b = graph.board(opts);
    json j;
    j["root"] = graph.root().id;
    j["nodes"] = std::move(nodes);
    j["board"] = board_json(b);
    j["board_window"] = b.window_size;
    j["board_contributors"] = b.contributors;
    return j.dump(2) + "\n";
}

} // namespace emoq
