#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;

namespace {

const std::filesystem::path kFixtures = EMOQ_TEST_FIXTURES;
const std::string kCli = EMOQ_CLI_PATH;

std::filesystem::path work_dir() {
    auto d = std::filesystem::temp_directory_path() / "emoq-tests" / "cli";
    std::filesystem::create_directories(d);
    return d;
}

int run(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " > \"" + (work_dir() / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

} // namespace

TEST_CASE("cli exit codes") {
    const auto dir = work_dir();
    CHECK(run("classify " + q(kFixtures / "six.jsonl")) == 0);
    CHECK(run("classify " + q(kFixtures / "empty.jsonl")) == 2);
    CHECK(run("classify " + q(dir / "missing.jsonl")) == 3);
    CHECK(run("classify " + q(kFixtures / "six.jsonl") + " --lexicon " + q(dir / "missing.tsv")) == 3);
    CHECK(run("simulate " + q(kFixtures / "six.jsonl") + " --queue maybe") == 4);
    CHECK(run("frobnicate") == 4);

    const auto bad_conf = dir / "bad.conf";
    {
        std::ofstream(bad_conf) << "rho = 0.5\nnot_a_key = 1\n";
    }
    CHECK(run("simulate " + q(kFixtures / "six.jsonl") + " --config " + q(bad_conf)) == 4);
    CHECK(slurp(dir / "stdout.txt").find("line 2") != std::string::npos);

    std::filesystem::remove_all(dir / "a");
    std::filesystem::remove_all(dir / "b");
    CHECK(run("simulate " + q(kFixtures / "six.jsonl") + " --queue off --out " + q(dir) + " --run-id a") == 0);
    CHECK(run("simulate " + q(kFixtures / "three.jsonl") + " --queue on --out " + q(dir) + " --run-id b") == 0);
    CHECK(run("compare " + q(dir / "a") + " " + q(dir / "b")) == 5);
}

TEST_CASE("cli simulate is deterministic and compare reads run directories") {
    const auto dir = work_dir();
    for (auto name : {"r1", "r2", "base", "cmp"}) std::filesystem::remove_all(dir / name);
    const auto in = q(kFixtures / "six.jsonl");
    REQUIRE(run("simulate " + in + " --queue on --out " + q(dir) + " --run-id r1") == 0);
    const auto printed = slurp(dir / "stdout.txt");
    CHECK(printed.find("reduction_pct") != std::string::npos);
    REQUIRE(run("simulate " + in + " --queue on --out " + q(dir) + " --run-id r2 --jobs 3") == 0);
    for (auto f : {"report.json", "decisions.log", "emotion_timeseries.csv", "final_board.csv", "hold_histogram.csv"}) {
        INFO(f);
        CHECK(std::filesystem::exists(dir / "r1" / f));
        CHECK(slurp(dir / "r1" / f) == slurp(dir / "r2" / f));
    }
    REQUIRE(run("simulate " + in + " --queue off --out " + q(dir) + " --run-id base") == 0);
    CHECK(run("compare " + q(dir / "r1") + " " + q(dir / "base") + " --out " + q(dir / "cmp")) == 0);
    CHECK(std::filesystem::exists(dir / "cmp" / "comparison.json"));
}

TEST_CASE("cli synth and classify write JSONL") {
    const auto dir = work_dir();
    const auto spec = dir / "tiny.spec";
    {
        std::ofstream(spec) << "conversations = 2\ncomments_per_conversation = 5\n";
    }
    REQUIRE(run("synth " + q(spec) + " --seed 7 --out " + q(dir / "tiny.jsonl")) == 0);
    const auto a = slurp(dir / "tiny.jsonl");
    REQUIRE(run("synth " + q(spec) + " --seed 7 --out " + q(dir / "tiny2.jsonl")) == 0);
    CHECK(a == slurp(dir / "tiny2.jsonl"));
    CHECK(std::count(a.begin(), a.end(), '\n') == 10);

    REQUIRE(run("classify " + q(dir / "tiny.jsonl") + " --out " + q(dir / "tiny.cls.jsonl")) == 0);
    const auto cls = slurp(dir / "tiny.cls.jsonl");
    CHECK(std::count(cls.begin(), cls.end(), '\n') == 10);
    CHECK(cls.find("\"intensity\"") != std::string::npos);

    CHECK(run("prune-eval " + q(kFixtures / "six.jsonl")) == 0);
    CHECK(run("prune-eval " + q(kFixtures / "six.jsonl") + " --provider external") == 4);
}
