// emoq: classify, simulate, compare, synth and prune-eval.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "emoq/config.hpp"
#include "emoq/error.hpp"
#include "emoq/ingest.hpp"
#include "emoq/lexicon.hpp"
#include "emoq/report.hpp"
#include "emoq/simulation.hpp"
#include "emoq/synthetic.hpp"
#include "emoq/toxicity.hpp"

#ifndef EMOQ_DATA_DIR
#define EMOQ_DATA_DIR "data"
#endif

namespace {

using namespace emoq;
using nlohmann::json;

enum Exit : int {
    kOk = 0,
    kOther = 1,
    kEmptyInput = 2,
    kLoad = 3,
    kConfig = 4,
    kMismatch = 5,
    kProvider = 6,
};

struct Options {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    std::string format = "all";
    std::string lexicon;
    std::string emoji_lexicon;
};

AppConfig make_config(const Options& o) {
    AppConfig cfg;
    cfg.lexicon = std::filesystem::path(EMOQ_DATA_DIR) / "lexicon" / "emotion_terms.tsv";
    cfg.emoji_lexicon = std::filesystem::path(EMOQ_DATA_DIR) / "lexicon" / "emoji.tsv";
    if (!o.config.empty()) cfg = load_config(o.config, cfg);
    if (!o.lexicon.empty()) cfg.lexicon = o.lexicon;
    if (!o.emoji_lexicon.empty()) cfg.emoji_lexicon = o.emoji_lexicon;
    if (o.seed) cfg.simulation.seed = *o.seed;
    if (o.jobs) cfg.jobs = *o.jobs;
    return cfg;
}

struct Lexicons {
    Lexicon words;
    EmojiLexicon emoji;
};

Lexicons load_lexicons(const AppConfig& cfg) {
    Lexicons l;
    l.words = load_lexicon(cfg.lexicon);
    if (l.words.empty()) throw LoadError("lexicon " + cfg.lexicon.string() + " has no entries");
    l.emoji = load_emoji_lexicon(cfg.emoji_lexicon);
    return l;
}

EventStream read_stream(const std::string& input) {
    auto parsed = parse_jsonl(input);
    if (parsed.malformed || parsed.duplicates) {
        std::cerr << "note: " << parsed.malformed << " malformed line(s), " << parsed.duplicates
                  << " duplicate id(s) in " << input << '\n';
    }
    return EventStream(std::move(parsed.records));
}

// Writes to `path`, or to stdout when it is empty or "-".
void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    write_file(path, content);
}

int cmd_classify(const std::string& input, const Options& o) {
    const auto cfg = make_config(o);
    const auto lex = load_lexicons(cfg);
    const auto parsed = parse_jsonl(input);
    std::string out;
    for (const auto& r : parsed.records) {
        const auto cls = classify(r.text, lex.words, lex.emoji, cfg.simulation.kappa);
        json j;
        j["id"] = r.id;
        j["parent_id"] = r.parent_id ? json(*r.parent_id) : json(nullptr);
        j["author"] = r.author;
        j["created_at"] = r.created_at;
        j["text"] = r.text;
        json vec = json::object();
        for (auto e : kAllEmotions) vec[std::string(to_string(e))] = cls.vector[e];
        j["vector"] = std::move(vec);
        j["dominant"] = cls.dominant ? json(std::string(to_string(*cls.dominant))) : json(nullptr);
        j["intensity"] = cls.intensity;
        out += j.dump();
        out += '\n';
    }
    write_output(o.out, out);
    return kOk;
}

std::string default_run_id(bool queue, const std::string& hash) {
    return std::string(queue ? "queue-" : "noqueue-") + hash.substr(0, 12);
}

int cmd_simulate(const std::string& input, const std::string& queue_flag, const std::string& run_id,
                 const Options& o) {
    if (queue_flag != "on" && queue_flag != "off") throw ConfigError("--queue must be on or off");
    const bool queue = queue_flag == "on";
    const auto cfg = make_config(o);
    const auto format = parse_report_format(o.format);
    const auto lex = load_lexicons(cfg);
    const auto stream = read_stream(input);
    const auto hash = stream.hash();

    const auto convs = classify_conversations(partition_conversations(stream), lex.words, lex.emoji,
                                              cfg.simulation.kappa);
    RunOptions ro;
    ro.jobs = cfg.jobs;
    ro.keep_decisions = true;
    const auto runs = run_conversations(convs, queue, cfg.simulation, ro);
    const auto report = summarize(runs, queue, hash);

    const std::filesystem::path base = o.out.empty() ? "runs" : o.out;
    const auto dir = base / (run_id.empty() ? default_run_id(queue, hash) : run_id);
    emit_run(dir, report, runs, cfg.simulation, format);

    double reduction = 0.0;
    if (queue) {
        ro.keep_decisions = false;
        const auto baseline = summarize(run_conversations(convs, false, cfg.simulation, ro), false, hash);
        reduction = reduction_pct(baseline.anger_fear_spread, report.anger_fear_spread);
    }
    std::printf("run_dir %s\n", dir.string().c_str());
    std::printf("comments %zu admitted %zu held %zu suspended %zu\n", report.total, report.admitted,
                report.held_count, report.suspended_count);
    std::printf("held_fraction %.6f\n", report.held_fraction);
    std::printf("mean_hold_s %.6f\n", report.mean_hold);
    std::printf("anger_fear_spread %.6f\n", report.anger_fear_spread);
    std::printf("reduction_pct %.6f\n", reduction);
    return kOk;
}

int cmd_compare(const std::string& run_a, const std::string& run_b, const Options& o) {
    const auto format = parse_report_format(o.format);
    auto a = load_run_report(run_a);
    auto b = load_run_report(run_b);
    // The no-queue run is the baseline whichever order the runs come in.
    if (a.queue && !b.queue) std::swap(a, b);
    const auto c = compare(a, b);
    const std::filesystem::path dir = o.out.empty()
                                          ? std::filesystem::path(run_a).parent_path() / "comparison"
                                          : std::filesystem::path(o.out);
    emit_comparison(dir, c, format);
    std::printf("comparison_dir %s\n", dir.string().c_str());
    std::printf("reduction_pct %.6f\n", c.reduction_pct);
    return kOk;
}

int cmd_synth(const std::string& spec_path, const Options& o) {
    AppConfig cfg = make_config(o);
    const auto spec = load_synthetic_spec(spec_path);
    const auto lex = load_lexicons(cfg);
    const auto stream = generate_synthetic(spec, cfg.simulation.seed, lex.words);
    std::ostringstream ss;
    write_jsonl(ss, stream.records());
    write_output(o.out, ss.str());
    return kOk;
}

int cmd_prune_eval(const std::string& input, const std::string& provider, const Options& o) {
    AppConfig cfg = make_config(o);
    if (provider == "offline") {
        cfg.provider.kind = ProviderKind::offline_proxy;
    } else if (provider == "external") {
        cfg.provider.kind = ProviderKind::external_http;
    } else if (!provider.empty()) {
        throw ConfigError("--provider must be offline or external");
    }
    const auto lex = load_lexicons(cfg);
    const auto stream = read_stream(input);
    auto scorer = make_provider(cfg.provider, lex.words);
    const auto convs = classify_conversations(partition_conversations(stream), lex.words, lex.emoji,
                                              cfg.simulation.kappa);
    PolicyComparison total;
    for (const auto& comments : convs) {
        const auto built = build_graph(comments, cfg.simulation.damping);
        total += compare_policies(built.graph, *scorer, cfg.policy);
    }
    auto side = [](const PolicyOutcome& p) {
        return json{{"nodes", p.nodes},
                    {"detected", p.detected},
                    {"removed", p.removed},
                    {"detected_fraction", p.detected_fraction()},
                    {"estimated_reduction", p.reduction()}};
    };
    json j;
    j["provider"] = std::string(scorer->name());
    j["influence_toxicity"] = side(total.influence_toxicity);
    j["toxicity_only"] = side(total.toxicity_only);
    if (!o.out.empty()) write_file(o.out, j.dump(2) + "\n");
    std::printf("provider %s\n", std::string(scorer->name()).c_str());
    std::printf("influence_toxicity detected_fraction %.6f estimated_reduction %.6f\n",
                total.influence_toxicity.detected_fraction(), total.influence_toxicity.reduction());
    std::printf("toxicity_only detected_fraction %.6f estimated_reduction %.6f\n",
                total.toxicity_only.detected_fraction(), total.toxicity_only.reduction());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion-board comment queuing: classification, simulation and evaluation"};
    app.require_subcommand(1, 1);

    Options o;
    auto common = [&](CLI::App* sub, bool with_out_help = true) {
        sub->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
        if (with_out_help) sub->add_option("--out", o.out, "output path");
        sub->add_option("--seed", o.seed, "seed");
        sub->add_option("--jobs", o.jobs, "worker threads (1 = serial)");
        sub->add_option("--format", o.format, "all | json | csv");
        sub->add_option("--lexicon", o.lexicon, "word-emotion lexicon");
        sub->add_option("--emoji-lexicon", o.emoji_lexicon, "emoji lexicon");
    };

    std::string input;
    std::string input_b;
    std::string queue = "on";
    std::string run_id;
    std::string provider;

    auto* classify_cmd = app.add_subcommand("classify", "classify every record of a JSONL stream");
    classify_cmd->add_option("input", input, "JSONL input")->required();
    common(classify_cmd);

    auto* simulate_cmd = app.add_subcommand("simulate", "replay a stream and write a run directory");
    simulate_cmd->add_option("input", input, "JSONL input")->required();
    simulate_cmd->add_option("--queue", queue, "on | off");
    simulate_cmd->add_option("--run-id", run_id, "run directory name");
    common(simulate_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "compare two run directories");
    compare_cmd->add_option("run_a", input, "first run directory")->required();
    compare_cmd->add_option("run_b", input_b, "second run directory")->required();
    common(compare_cmd);

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic JSONL corpus");
    synth_cmd->add_option("spec", input, "synthetic spec file")->required();
    common(synth_cmd);

    auto* prune_cmd = app.add_subcommand("prune-eval", "compare pruning policies");
    prune_cmd->add_option("input", input, "JSONL input")->required();
    prune_cmd->add_option("--provider", provider, "offline | external");
    common(prune_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*classify_cmd) return cmd_classify(input, o);
        if (*simulate_cmd) return cmd_simulate(input, queue, run_id, o);
        if (*compare_cmd) return cmd_compare(input, input_b, o);
        if (*synth_cmd) return cmd_synth(input, o);
        if (*prune_cmd) return cmd_prune_eval(input, provider, o);
    } catch (const EmptyInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEmptyInput;
    } catch (const LoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kLoad;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const MismatchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMismatch;
    } catch (const ProviderError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kProvider;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
    return kOther;
}
