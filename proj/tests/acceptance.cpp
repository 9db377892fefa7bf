// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "emoq/config.hpp"
#include "emoq/hashing.hpp"
#include "emoq/report.hpp"
#include "emoq/simulation.hpp"
#include "emoq/synthetic.hpp"
#include "emoq/toxicity.hpp"
#include "oracles.hpp"

using namespace emoq;

namespace {

const std::filesystem::path kData = EMOQ_DATA_DIR;
const std::filesystem::path kFixtures = EMOQ_TEST_FIXTURES;
const std::string kCli = EMOQ_CLI_PATH;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Lex {
    Lexicon words = load_lexicon(kData / "lexicon/emotion_terms.tsv");
    EmojiLexicon emoji = load_emoji_lexicon(kData / "lexicon/emoji.tsv");
};

const Lex& lex() {
    static const Lex l;
    return l;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::filesystem::path scratch(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "emoq-acceptance" / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> read_csv_numbers(const std::filesystem::path& p) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            row.push_back(end != cell.c_str() ? v : NAN);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(20240611);
    std::size_t mismatches = 0;
    std::size_t decisions = 0;
    std::size_t holds = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto comments = oracle::random_conversation(rng, rng.between(1, 20), "k" + std::to_string(i));
        const auto cfg = oracle::random_config(rng);
        const auto run = simulate_conversation(comments, true, cfg, true);
        const auto ref = oracle::brute_force_regulator(comments, cfg);
        holds += ref.held;
        if (run.decisions.size() != ref.decisions.size() || run.held != ref.held ||
            run.suspended != ref.suspended) {
            ++mismatches;
            continue;
        }
        for (std::size_t k = 0; k < ref.decisions.size(); ++k) {
            const auto& a = run.decisions[k];
            const auto& b = ref.decisions[k];
            ++decisions;
            if (a.comment_id != b.comment_id || a.decision != b.kind || a.rule != b.rule || a.time != b.time ||
                a.revised != b.revised || a.board_after.percent != b.board_after.percent) {
                ++mismatches;
                break;
            }
        }
    }
    const double secs = seconds_since(t0);
    return {mismatches == 0 && secs < 30.0,
            std::to_string(mismatches) + " mismatching conversations, " + std::to_string(decisions) +
                " decisions, " + std::to_string(holds) + " holds, " + fmt("%.2f s", secs)};
}

Outcome pagerank_oracle() {
    Rng rng(7);
    double worst = 0.0;
    double worst_sum = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = rng.between(1, 50);
        std::vector<std::size_t> parent(n, 0);
        ClassifiedComment root;
        root.id = "n0";
        ConversationGraph g(root);
        for (std::size_t v = 1; v < n; ++v) {
            parent[v] = rng.below(v);
            ClassifiedComment c;
            c.id = "n" + std::to_string(v);
            g.add(c, "n" + std::to_string(parent[v]));
        }
        const auto want = oracle::dense_pagerank(parent, kDefaultDamping);
        const auto got = g.pagerank();
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            worst = std::max(worst, std::abs(got[v] - want[v]));
            sum += got[v];
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    return {worst <= 1e-8 && worst_sum <= 1e-8, fmt("max node error %.3g, max |sum-1| %.3g", worst, worst_sum)};
}

Outcome board_normalization() {
    Rng rng(31);
    std::size_t boards = 0;
    std::size_t bad_sum = 0;
    std::size_t mutated = 0;
    double worst = 0.0;
    for (int t = 0; t < 300; ++t) {
        auto comments = oracle::random_conversation(rng, rng.between(1, 60), "b" + std::to_string(t));
        BoardOptions opts;
        opts.window_size = rng.between(1, 70);
        if (rng.uniform() < 0.5) opts.weights = {0.25, 0.25, 0.25, 0.25};
        ConversationGraph g(comments.front());
        for (std::size_t i = 1; i < comments.size(); ++i) {
            const auto parent = g.comment(rng.below(g.size())).id;
            const auto before_board = g.board(opts);
            const auto before_snapshot = graph_snapshot_json(g, opts);
            const auto before_pr = std::vector<double>(g.pagerank().begin(), g.pagerank().end());
            const auto hyp = g.hypothetical_board(opts, comments[i], parent);
            if (!(g.board(opts) == before_board) || graph_snapshot_json(g, opts) != before_snapshot ||
                std::vector<double>(g.pagerank().begin(), g.pagerank().end()) != before_pr) {
                ++mutated;
            }
            g.add(comments[i], parent);
            const auto after = g.board(opts);
            for (const auto* b : {&hyp, &after}) {
                ++boards;
                if (b->all_zero()) continue;
                const double s = std::accumulate(b->percent.begin(), b->percent.end(), 0.0);
                worst = std::max(worst, std::abs(s - 100.0));
                if (std::abs(s - 100.0) > 1e-6) ++bad_sum;
            }
            if (!(hyp == after)) ++mutated;
        }
    }
    return {bad_sum == 0 && mutated == 0,
            std::to_string(boards) + " boards, " + std::to_string(bad_sum) + " off-sum, max |sum-100| " +
                fmt("%.3g", worst) + ", " + std::to_string(mutated) + " state changes"};
}

Outcome threshold_safety() {
    auto spec = load_synthetic_spec(kData / "synth/calibrated.spec");
    spec.conversations = 500;
    const auto stream = generate_synthetic(spec, 4, lex().words);
    const SimulationConfig cfg;
    const auto convs = classify_conversations(partition_conversations(stream), lex().words, lex().emoji, cfg.kappa);
    const auto runs = run_conversations(convs, true, cfg, {0, true});
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::size_t holds = 0;
    for (const auto& run : runs) {
        holds += run.held;
        for (const auto& d : run.decisions) {
            const bool admission = d.decision == DecisionKind::admitted || d.decision == DecisionKind::released;
            if (!admission || d.rule != AdmitRule::within_thresholds) continue;
            ++checked;
            for (auto e : kAllEmotions) {
                const auto& lim = d.thresholds[index_of(e)];
                if (lim && d.board_after[e] > *lim && d.board_after[e] > d.board_before[e]) {
                    ++violations;
                    break;
                }
            }
        }
    }
    return {violations == 0 && checked > 0,
            std::to_string(runs.size()) + " conversations, " + std::to_string(checked) +
                " threshold admissions, " + std::to_string(holds) + " holds, " + std::to_string(violations) +
                " violations"};
}

struct CalibratedSeed {
    RunReport no_queue;
    RunReport with_queue;
    double reduction = 0.0;
    bool timeseries_monotone = true;
    double max_negative_no = 0.0;
    double max_negative_with = 0.0;
};

struct Calibrated {
    std::vector<CalibratedSeed> seeds;
    double seconds = 0.0;
};

double max_governed_negative(const std::filesystem::path& final_board_csv, const ThresholdConfig& th) {
    std::istringstream in(slurp(final_board_csv));
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        const auto e = parse_emotion(line.substr(0, comma));
        if (e && th.governs(*e)) worst = std::max(worst, std::stod(line.substr(comma + 1)));
    }
    return worst;
}

bool monotone_columns(const std::filesystem::path& csv) {
    const auto rows = read_csv_numbers(csv);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != rows[i - 1].size()) return false;
        for (std::size_t c = 1; c < rows[i].size(); ++c) {
            if (!(rows[i][c] >= rows[i - 1][c])) return false;
        }
    }
    return true;
}

const Calibrated& calibrated_runs() {
    static const Calibrated result = [] {
        Calibrated out;
        const auto t0 = std::chrono::steady_clock::now();
        const auto spec = load_synthetic_spec(kData / "synth/calibrated.spec");
        const SimulationConfig cfg;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto stream = generate_synthetic(spec, seed, lex().words);
            const auto convs =
                classify_conversations(partition_conversations(stream), lex().words, lex().emoji, cfg.kappa);
            const auto no_runs = run_conversations(convs, false, cfg);
            const auto with_runs = run_conversations(convs, true, cfg);
            CalibratedSeed s;
            s.no_queue = summarize(no_runs, false, stream.hash());
            s.with_queue = summarize(with_runs, true, stream.hash());
            s.reduction = compare(s.no_queue, s.with_queue).reduction_pct;
            const auto dir_no = scratch("seed" + std::to_string(seed) + "-noqueue");
            const auto dir_with = scratch("seed" + std::to_string(seed) + "-queue");
            emit_run(dir_no, s.no_queue, no_runs, cfg, ReportFormat::csv);
            emit_run(dir_with, s.with_queue, with_runs, cfg, ReportFormat::csv);
            s.timeseries_monotone = monotone_columns(dir_no / "emotion_timeseries.csv") &&
                                    monotone_columns(dir_with / "emotion_timeseries.csv");
            s.max_negative_no = max_governed_negative(dir_no / "final_board.csv", cfg.thresholds);
            s.max_negative_with = max_governed_negative(dir_with / "final_board.csv", cfg.thresholds);
            out.seeds.push_back(std::move(s));
        }
        out.seconds = seconds_since(t0);
        return out;
    }();
    return result;
}

Outcome spread_reduction() {
    const auto& c = calibrated_runs();
    double sum = 0.0;
    double lo = 1e300;
    std::size_t positive = 0;
    for (const auto& s : c.seeds) {
        sum += s.reduction;
        lo = std::min(lo, s.reduction);
        if (s.reduction > 0.0) ++positive;
    }
    const double mean = sum / static_cast<double>(c.seeds.size());
    const bool in_band = mean >= 10.0 && mean <= 20.0;
    return {in_band && positive == c.seeds.size() && c.seconds < 120.0,
            fmt("mean reduction %.3f%% (band 10-20%%), min %.3f%%, ", mean, lo) + std::to_string(positive) +
                "/20 seeds > 0, " + fmt("%.1f s for 20 paired seeds", c.seconds)};
}

Outcome held_fraction() {
    const auto& c = calibrated_runs();
    double held = 0.0;
    double suspended = 0.0;
    for (const auto& s : c.seeds) {
        held += s.with_queue.held_fraction;
        suspended += s.with_queue.suspended_fraction;
    }
    held /= static_cast<double>(c.seeds.size());
    suspended /= static_cast<double>(c.seeds.size());
    return {held >= 0.01 && held <= 0.10 && suspended < held,
            fmt("mean held_fraction %.4f, mean suspended_fraction %.4f", held, suspended)};
}

Outcome hold_durations() {
    const auto& c = calibrated_runs();
    double total = 0.0;
    std::size_t n = 0;
    std::size_t negative = 0;
    bool histogram_ok = true;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        for (double h : c.seeds[i].with_queue.hold_durations) {
            total += h;
            ++n;
            if (!(h >= 0.0)) ++negative;
        }
        const auto rows =
            read_csv_numbers(std::filesystem::temp_directory_path() / "emoq-acceptance" /
                             ("seed" + std::to_string(i + 1) + "-queue") / "hold_histogram.csv");
        std::size_t binned = 0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != 3 || rows[r][0] != static_cast<double>(r) || rows[r][1] != rows[r][0] + 1.0) {
                histogram_ok = false;
            } else {
                binned += static_cast<std::size_t>(rows[r][2]);
            }
        }
        if (binned != c.seeds[i].with_queue.hold_durations.size()) histogram_ok = false;
    }
    const double mean = n ? total / static_cast<double>(n) : 0.0;
    return {n > 0 && mean >= 20.0 && mean <= 80.0 && negative == 0 && histogram_ok,
            fmt("mean hold %.2f s over ", mean) + std::to_string(n) + " holds, " + std::to_string(negative) +
                " negative, histogram " + (histogram_ok ? "1-second bins" : "malformed")};
}

Outcome report_shapes() {
    const auto& c = calibrated_runs();
    std::size_t monotone = 0;
    std::size_t board_ok = 0;
    double margin = 1e300;
    for (const auto& s : c.seeds) {
        if (s.timeseries_monotone) ++monotone;
        if (s.max_negative_with <= s.max_negative_no) ++board_ok;
        margin = std::min(margin, s.max_negative_no - s.max_negative_with);
    }
    return {monotone == c.seeds.size() && board_ok == c.seeds.size(),
            std::to_string(monotone) + "/20 monotone timeseries, " + std::to_string(board_ok) +
                "/20 seeds with-queue max governed-negative <= no-queue, " +
                fmt("smallest margin %.4f points", margin)};
}

Outcome policy_directionality() {
    auto spec = load_synthetic_spec(kData / "synth/calibrated.spec");
    spec.conversations = 20;
    const SimulationConfig sim;
    const PolicyOptions opts;
    OfflineToxicityProxy proxy(lex().words);
    std::size_t a_wins = 0;
    std::size_t detected = 0;
    std::size_t nodes = 0;
    double a_sum = 0.0;
    double b_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto stream = generate_synthetic(spec, 1000 + seed, lex().words);
        const auto convs = classify_conversations(partition_conversations(stream), lex().words, lex().emoji, sim.kappa);
        PolicyComparison total;
        for (const auto& comments : convs) {
            total += compare_policies(build_graph(comments, sim.damping).graph, proxy, opts);
        }
        const double a = total.influence_toxicity.reduction();
        const double b = total.toxicity_only.reduction();
        a_sum += a;
        b_sum += b;
        if (a >= b) ++a_wins;
        detected += total.influence_toxicity.detected;
        nodes += total.influence_toxicity.nodes;
    }
    const double frac = static_cast<double>(detected) / static_cast<double>(nodes);
    return {a_wins >= 90 && frac >= 0.01 && frac <= 0.04,
            std::to_string(a_wins) + "/100 seeds A >= B, mean reduction A " + fmt("%.3f B %.3f", a_sum / 100, b_sum / 100) +
                fmt(", A detected fraction %.4f", frac)};
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string directory_digest(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.push_back(std::filesystem::relative(e.path(), dir));
    }
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.string() + '\n' + sha256_hex(slurp(dir / f)) + '\n';
    return sha256_hex(all);
}

Outcome determinism() {
    const auto base = scratch("determinism");
    const auto corpus = base / "corpus.jsonl";
    const auto spec = base / "small.spec";
    std::ofstream(spec) << "conversations = 40\ncomments_per_conversation = 120\ntroll_rate = 0.2\n";
    if (run_cli("synth \"" + spec.string() + "\" --seed 11 --out \"" + corpus.string() + "\"") != 0) {
        return {false, "synth failed"};
    }
    std::vector<std::string> digests;
    for (auto [name, jobs] : {std::pair{"one", "0"}, std::pair{"two", "0"}, std::pair{"serial", "1"}}) {
        const int rc = run_cli("simulate \"" + corpus.string() + "\" --queue on --seed 3 --jobs " + jobs +
                               " --out \"" + base.string() + "\" --run-id " + name);
        if (rc != 0) return {false, std::string("simulate exited ") + std::to_string(rc)};
        digests.push_back(directory_digest(base / name));
    }
    const bool same = digests[0] == digests[1] && digests[1] == digests[2];
    return {same, "run directory digests " + digests[0].substr(0, 12) + " / " + digests[1].substr(0, 12) +
                      " / " + digests[2].substr(0, 12) + " (serial)"};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence (regulator)", oracle_equivalence},
        {2, "pagerank oracle", pagerank_oracle},
        {3, "board normalization", board_normalization},
        {4, "threshold safety", threshold_safety},
        {5, "anger+fear spread reduction", spread_reduction},
        {6, "held fraction", held_fraction},
        {7, "hold durations", hold_durations},
        {8, "policy directionality", policy_directionality},
        {9, "determinism", determinism},
        {10, "report shapes", report_shapes},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
