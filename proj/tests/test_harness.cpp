#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "emoq/config.hpp"
#include "emoq/error.hpp"
#include "emoq/ingest.hpp"
#include "emoq/report.hpp"
#include "emoq/simulation.hpp"
#include "emoq/synthetic.hpp"
#include "oracles.hpp"

using namespace emoq;

namespace {

const std::filesystem::path kFixtures = EMOQ_TEST_FIXTURES;
const std::filesystem::path kData = EMOQ_DATA_DIR;

struct Lex {
    Lexicon words = load_lexicon(kData / "lexicon/emotion_terms.tsv");
    EmojiLexicon emoji = load_emoji_lexicon(kData / "lexicon/emoji.tsv");
};

const Lex& lex() {
    static const Lex l;
    return l;
}

EventStream load(const std::string& name) { return EventStream(parse_jsonl(kFixtures / name).records); }

SyntheticSpec calibrated(std::size_t convs) {
    auto s = load_synthetic_spec(kData / "synth/calibrated.spec");
    s.conversations = convs;
    return s;
}

SyntheticSpec small_spec(std::size_t convs = 12, std::size_t per = 60) {
    SyntheticSpec s;
    s.conversations = convs;
    s.comments_per_conversation = per;
    return s;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "emoq-tests" / name;
    std::filesystem::remove_all(d);
    return d;
}

EventStream uniform_stream(std::optional<EmotionKind> e, std::size_t n) {
    const std::string word = !e ? "the bridge opens" : *e == EmotionKind::anger ? "annoyed" : "awesome";
    std::vector<RawRecord> recs;
    recs.push_back({"r", std::nullopt, "op", 0.0, word, false});
    for (std::size_t i = 1; i < n; ++i) {
        recs.push_back({"c" + std::to_string(i), "r", "u", static_cast<double>(i), word, false});
    }
    return EventStream(std::move(recs));
}

} // namespace

TEST_CASE("synthetic corpus: determinism and shape") {
    const auto spec = small_spec();
    const auto a = generate_synthetic(spec, 42, lex().words);
    const auto b = generate_synthetic(spec, 42, lex().words);
    const auto c = generate_synthetic(spec, 43, lex().words);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.size() == 12 * 60);
    const auto convs = partition_conversations(a);
    CHECK(convs.size() == 12);
    for (const auto& conv : convs) {
        CHECK(conv.records.size() == 60);
        CHECK(conv.orphans == 0);
        for (std::size_t i = 1; i < conv.records.size(); ++i) {
            CHECK(conv.records[i].created_at >= conv.records[i - 1].created_at);
        }
    }
}

TEST_CASE("synthetic corpus: troll comments are high-intensity anger or disgust") {
    auto spec = small_spec();
    spec.troll_rate = 1.0;
    const auto s = generate_synthetic(spec, 1, lex().words);
    std::size_t trolls = 0;
    for (const auto& r : s.records()) {
        if (!r.parent_id) continue;
        CHECK(r.troll);
        ++trolls;
        const auto cls = classify(r.text, lex().words, lex().emoji);
        REQUIRE(cls.dominant.has_value());
        CHECK((*cls.dominant == EmotionKind::anger || *cls.dominant == EmotionKind::disgust));
        CHECK(cls.intensity >= 0.8);
    }
    CHECK(trolls == 12 * 59);

    spec.troll_rate = 0.0;
    for (const auto& r : generate_synthetic(spec, 1, lex().words).records()) CHECK_FALSE(r.troll);
}

TEST_CASE("synthetic corpus: ordinary comments classify as intended") {
    auto spec = small_spec(4, 200);
    spec.troll_rate = 0.0;
    spec.neutral_rate = 0.0;
    spec.contagion = 0.0;
    spec.mixture = {0, 0, 0, 0, 0, 0, 1, 0};
    for (const auto& r : generate_synthetic(spec, 3, lex().words).records()) {
        if (!r.parent_id) continue;
        CHECK(classify(r.text, lex().words, lex().emoji).dominant == EmotionKind::joy);
    }
}

TEST_CASE("synthetic spec validation") {
    auto bad = small_spec();
    bad.troll_rate = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_spec();
    bad.mixture = {0.5, 0.5, 0.5, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_spec();
    bad.mean_interarrival = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_spec();
    bad.conversations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("no-queue run: trivial streams") {
    const SimulationConfig cfg;
    const auto neutral = run_without_queue(uniform_stream(std::nullopt, 10), lex().words, lex().emoji, cfg);
    CHECK(neutral.anger_fear_spread == 0.0);
    CHECK(neutral.final_board.all_zero());
    CHECK(neutral.held_count == 0);
    CHECK(neutral.admitted == 10);

    const auto anger = run_without_queue(uniform_stream(EmotionKind::anger, 10), lex().words, lex().emoji, cfg);
    CHECK(anger.final_board[EmotionKind::anger] == doctest::Approx(100.0));
}

TEST_CASE("no-queue run: spread equals hand-summed influence times vector") {
    const auto stream = load("six.jsonl");
    const SimulationConfig cfg;
    const auto rep = run_without_queue(stream, lex().words, lex().emoji, cfg);
    REQUIRE(rep.spread_series.size() == 6);

    // Final graph by hand: p1 root; p2, p3 under p1; p4, p6 under p3; p5
    // under p2.
    std::vector<oracle::Node> nodes;
    const std::vector<std::size_t> parent{0, 0, 0, 2, 1, 2};
    std::size_t i = 0;
    for (const auto& r : stream.records()) {
        const auto cls = classify(r.text, lex().words, lex().emoji);
        nodes.push_back({parent[i++], cls.intensity, cls.vector});
    }
    EmotionMass want{};
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        const double infl = oracle::scratch_influence(nodes, v, cfg.weights, cfg.damping);
        for (std::size_t e = 0; e < kEmotionCount; ++e) want[e] += infl * nodes[v].vector.weights[e];
    }
    for (std::size_t e = 0; e < kEmotionCount; ++e) CHECK(rep.spread[e] == doctest::Approx(want[e]).epsilon(1e-12));
    CHECK(rep.anger_fear_spread ==
          doctest::Approx(want[index_of(EmotionKind::anger)] + want[index_of(EmotionKind::fear)]).epsilon(1e-12));
}

TEST_CASE("with-queue run: trivial streams") {
    const SimulationConfig cfg;
    const auto stream = uniform_stream(std::nullopt, 20);
    const auto a = run_without_queue(stream, lex().words, lex().emoji, cfg);
    const auto b = run_with_queue(stream, lex().words, lex().emoji, cfg);
    CHECK(a.spread_series == b.spread_series);
    CHECK(a.admitted == b.admitted);
    CHECK(b.held_count == 0);

    const auto root_only = run_with_queue(uniform_stream(EmotionKind::anger, 1), lex().words, lex().emoji, cfg);
    CHECK(root_only.admitted == 1);
    CHECK(root_only.held_count == 0);
}

TEST_CASE("paired runs on a troll-injected corpus") {
    const auto stream = generate_synthetic(calibrated(40), 9, lex().words);
    const SimulationConfig cfg;
    const auto no = run_without_queue(stream, lex().words, lex().emoji, cfg);
    const auto with = run_with_queue(stream, lex().words, lex().emoji, cfg);

    CHECK(with.held_count > 0);
    CHECK(with.anger_fear_spread < no.anger_fear_spread);
    CHECK(with.admitted + with.suspended_count == no.admitted);
    CHECK(with.held_fraction == doctest::Approx(static_cast<double>(with.held_count) / with.total));
    CHECK(with.spread_series.size() == with.admitted);
    for (const auto* r : {&no, &with}) {
        for (std::size_t i = 1; i < r->spread_series.size(); ++i) {
            for (std::size_t e = 0; e < kEmotionCount; ++e) CHECK(r->spread_series[i][e] >= r->spread_series[i - 1][e]);
        }
        const auto& last = r->spread_series.back();
        CHECK(r->anger_fear_spread == last[0] + last[1]);
    }
    for (double h : with.hold_durations) CHECK(h >= 0.0);

    const auto cmp = compare(no, with);
    CHECK(cmp.reduction_pct > 0.0);
    std::size_t binned = 0;
    for (auto n : cmp.hold_histogram) binned += n;
    CHECK(binned == with.hold_durations.size());
}

TEST_CASE("per-index anger+fear comparison: a held comment lets a larger one move up") {
    // Intensity-only influence. Board 50/50 anger/joy; X (anger 0.4) would
    // push anger to 58% and is held, B (fear 0.5) passes. With-queue event 2
    // is B where the no-queue run has X, yet the final mass is lower.
    SimulationConfig cfg;
    cfg.weights = {1.0, 0.0, 0.0, 0.0};
    std::vector<ClassifiedComment> comments(4);
    const std::vector<std::string> ids{"R", "J", "X", "B"};
    for (std::size_t i = 0; i < 4; ++i) {
        comments[i].id = ids[i];
        comments[i].timestamp = static_cast<double>(i);
        if (i) comments[i].parent_id = "R";
    }
    oracle::set_vector(comments[0], EmotionVector::unit(EmotionKind::anger), 1.0);
    oracle::set_vector(comments[1], EmotionVector::unit(EmotionKind::joy), 1.0);
    oracle::set_vector(comments[2], EmotionVector::unit(EmotionKind::anger), 0.4);
    oracle::set_vector(comments[3], EmotionVector::unit(EmotionKind::fear), 0.5);
    const auto no = simulate_conversation(comments, false, cfg);
    const auto with = simulate_conversation(comments, true, cfg);
    REQUIRE(with.held == 1);
    REQUIRE(with.masses.size() == 4);
    auto cumulative = [](const ConversationRun& r, std::size_t upto) {
        double m = 0.0;
        for (std::size_t i = 0; i <= upto; ++i) m += r.masses[i][0] + r.masses[i][1];
        return m;
    };
    CHECK(cumulative(no, 2) == doctest::Approx(1.4));
    CHECK(cumulative(with, 2) == doctest::Approx(1.5));
    CHECK(cumulative(with, 3) == doctest::Approx(1.7));
    CHECK(cumulative(no, 3) == doctest::Approx(1.9));
}

TEST_CASE("calibrated corpus: with-queue final anger+fear stays below the no-queue run") {
    const SimulationConfig cfg;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto stream = generate_synthetic(calibrated(60), seed, lex().words);
        const auto no = run_without_queue(stream, lex().words, lex().emoji, cfg);
        const auto with = run_with_queue(stream, lex().words, lex().emoji, cfg);
        CHECK(with.anger_fear_spread < no.anger_fear_spread);
    }
}

TEST_CASE("compare: conventions and mismatch") {
    RunReport a;
    a.stream_hash = "h";
    a.anger_fear_spread = 5.0;
    CHECK(compare(a, a).reduction_pct == 0.0);
    RunReport zero = a;
    zero.anger_fear_spread = 0.0;
    CHECK(compare(zero, a).reduction_pct == 0.0);
    RunReport half = a;
    half.anger_fear_spread = 4.0;
    CHECK(compare(a, half).reduction_pct == doctest::Approx(20.0));
    RunReport other = a;
    other.stream_hash = "g";
    CHECK_THROWS_AS(compare(a, other), MismatchError);
    CHECK(hold_histogram({0.2, 0.9, 1.0, 3.5}) == std::vector<std::size_t>{2, 1, 0, 1});
    CHECK(hold_histogram({}).empty());
}

TEST_CASE("worker count does not change results") {
    const auto stream = generate_synthetic(small_spec(16, 120), 5, lex().words);
    const SimulationConfig cfg;
    const auto convs = classify_conversations(partition_conversations(stream), lex().words, lex().emoji, cfg.kappa);
    RunOptions serial{1, true};
    RunOptions wide{4, true};
    const auto a = run_conversations(convs, true, cfg, serial);
    const auto b = run_conversations(convs, true, cfg, wide);
    CHECK(decision_log(a, true) == decision_log(b, true));
    const auto ra = summarize(a, true, stream.hash());
    const auto rb = summarize(b, true, stream.hash());
    CHECK(run_report_json(ra, cfg) == run_report_json(rb, cfg));
}

TEST_CASE("reports: empty report gives header-only CSVs") {
    const RunReport empty;
    CHECK(hold_histogram_csv(hold_histogram(empty.hold_durations)) == "bin_start_s,bin_end_s,count\n");
    CHECK(emotion_timeseries_csv(empty.spread_series) ==
          "event,anger,fear,anticipation,trust,surprise,sadness,joy,disgust\n");
    CHECK(parse_report_format("json") == ReportFormat::json);
    CHECK_THROWS_AS(parse_report_format("xml"), ConfigError);
}

TEST_CASE("reports: timeseries has one row per admission and JSON round-trips") {
    const auto stream = load("six.jsonl");
    const SimulationConfig cfg;
    const auto rep = run_with_queue(stream, lex().words, lex().emoji, cfg);
    const auto csv = emotion_timeseries_csv(rep.spread_series);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == rep.admitted + 1);
    const auto back = parse_run_report_json(run_report_json(rep, cfg));
    CHECK(back.stream_hash == rep.stream_hash);
    CHECK(back.admitted == rep.admitted);
    CHECK(back.anger_fear_spread == doctest::Approx(rep.anger_fear_spread).epsilon(1e-6));
    CHECK_THROWS_AS(parse_run_report_json("[1,2]"), LoadError);
    CHECK_THROWS_AS(parse_run_report_json("{\"queue\": true}"), LoadError);
}

TEST_CASE("reports: golden run directory for the six-comment fixture") {
    const auto stream = load("six.jsonl");
    SimulationConfig cfg;
    const auto convs = classify_conversations(partition_conversations(stream), lex().words, lex().emoji, cfg.kappa);
    for (bool queue : {false, true}) {
        const auto runs = run_conversations(convs, queue, cfg, {1, true});
        const auto rep = summarize(runs, queue, stream.hash());
        const auto dir = fresh_dir(queue ? "golden-q" : "golden-n");
        emit_run(dir, rep, runs, cfg);
        const auto golden = kFixtures / "golden" / (queue ? "queue" : "noqueue");
        for (auto name : {"report.json", "hold_histogram.csv", "emotion_timeseries.csv", "final_board.csv", "decisions.log"}) {
            INFO(name);
            CHECK(slurp(dir / name) == slurp(golden / name));
        }
    }
}

TEST_CASE("reports: unwritable output is an I/O error") {
    CHECK_THROWS_AS(write_file("/proc/definitely/not/here.csv", "x"), IoError);
}

TEST_CASE("decision log records every event with its context") {
    const auto stream = generate_synthetic(calibrated(3), 2, lex().words);
    const SimulationConfig cfg;
    const auto convs = classify_conversations(partition_conversations(stream), lex().words, lex().emoji, cfg.kappa);
    const auto runs = run_conversations(convs, true, cfg, {1, true});
    const auto log = decision_log(runs, true);
    std::size_t lines = 0;
    std::set<std::string> kinds;
    std::istringstream in(log);
    for (std::string line; std::getline(in, line);) {
        ++lines;
        auto j = nlohmann::json::parse(line);
        for (auto key : {"event_seq", "comment_id", "decision", "board_before", "board_after", "eff_thresholds", "activity"}) {
            CHECK(j.contains(key));
        }
        kinds.insert(j["decision"].get<std::string>());
        if (j["decision"] == "released" || j["decision"] == "suspended") CHECK(j.contains("hold_duration"));
    }
    std::size_t events = 0;
    for (const auto& r : runs) events += r.decisions.size();
    CHECK(lines == events);
    CHECK(kinds.count("held") == 1);
}
