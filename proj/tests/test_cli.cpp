// End-to-end checks of the command-line surface: exit codes, diagnostics,
// and file outputs. Driven through the installed binary (TOPIC_XRAY_BIN).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
    const char* path = std::getenv("TOPIC_XRAY_BIN");
    REQUIRE_MESSAGE(path != nullptr, "TOPIC_XRAY_BIN must point at the topic-xray binary");
    return path;
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "topic_xray_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("tree on an empty corpus exits nonzero with a machine-readable error") {
    const fs::path dir = work_dir();
    std::ofstream(dir / "empty.jsonl") << "";
    const std::string err_file = (dir / "err.txt").string();
    const int rc = run(bin() + " tree --in " + (dir / "empty.jsonl").string() +
                       " > /dev/null 2> " + err_file);
    CHECK(rc == 1);
    const json diag = json::parse(slurp(err_file));
    CHECK(diag.at("error").get<std::string>().find("empty corpus") != std::string::npos);
}

TEST_CASE("unknown provider and bad scenario exit nonzero") {
    const fs::path dir = work_dir();
    std::ofstream(dir / "one.jsonl") << "{\"kind\":\"paper\",\"id\":\"s\",\"t\":2000}\n";
    CHECK(run(bin() + " depth --in " + (dir / "one.jsonl").string() +
              " --provider bogus > /dev/null 2>&1") == 1);
    CHECK(run(bin() + " synth --scenario nope > /dev/null 2>&1") == 1);
}

TEST_CASE("synth writes corpus, embeddings, ground truth, and run.json") {
    const fs::path dir = work_dir() / "synth_out";
    fs::remove_all(dir);
    CHECK(run(bin() + " synth --scenario star --seed 3 --n 40 --out " + dir.string() +
              " > /dev/null") == 0);
    CHECK(fs::exists(dir / "corpus.jsonl"));
    CHECK(fs::exists(dir / "embeddings.tsv"));
    CHECK(fs::exists(dir / "groundtruth.json"));
    const json run_cfg = json::parse(slurp(dir / "run.json"));
    CHECK(run_cfg.at("command") == "synth");
    CHECK(run_cfg.at("rng_seed") == 3);
}

TEST_CASE("depth over a piped corpus reports the planted stl") {
    const fs::path dir = work_dir() / "pipe";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario relay --seed 7 --out " + (dir / "s").string() +
              " > /dev/null") == 0);
    CHECK(run(bin() + " synth --scenario relay --seed 7 | " + bin() + " depth > " +
              (dir / "depth.json").string()) == 0);
    const json depth = json::parse(slurp(dir / "depth.json"));
    const json truth = json::parse(slurp(dir / "s/groundtruth.json"));
    CHECK(depth.at("stl") == truth.at("planted_stl"));
}

TEST_CASE("entropy ledger csv carries the documented header") {
    const fs::path dir = work_dir() / "ledger";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario star --seed 4 --n 30 | " + bin() + " entropy > " +
              (dir / "ledger.csv").string()) == 0);
    const std::string csv = slurp(dir / "ledger.csv");
    CHECK(csv.rfind("t,node_id,ke,level,visible\n", 0) == 0);
}

TEST_CASE("screen emits the potential report schema") {
    const fs::path dir = work_dir() / "screen";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario overpowered --seed 9 --n 240 | " + bin() +
              " screen > " + (dir / "screen.json").string()) == 0);
    const json report = json::parse(slurp(dir / "screen.json"));
    REQUIRE(!report.at("nodes").empty());
    for (const auto& node : report.at("nodes")) {
        CHECK(node.contains("node"));
        CHECK(node.contains("ke"));
        CHECK(node.contains("t0"));
        CHECK(node.contains("delta_d_now"));
        CHECK(node.contains("delta_d_upper"));
        CHECK(node.contains("regime"));
    }
}

TEST_CASE("screen on an exhausted topic prints only sub-unit upper bounds") {
    const fs::path dir = work_dir() / "exhausted";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario relay --stages 3 --quiet-years 8 --seed 301 | " +
              bin() + " screen > " + (dir / "screen.json").string()) == 0);
    const json report = json::parse(slurp(dir / "screen.json"));
    REQUIRE(!report.at("nodes").empty());
    for (const auto& node : report.at("nodes")) {
        CHECK(node.at("delta_d_upper").get<double>() < 1.0);
    }
}

TEST_CASE("ilf-fit consumes synth samples and recovers the exponent") {
    const fs::path dir = work_dir() / "fit";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --ilf-samples 60 --beta 1.8803 --seed 11 | " + bin() +
              " ilf-fit > " + (dir / "fit.json").string()) == 0);
    const json fit = json::parse(slurp(dir / "fit.json"));
    CHECK(std::abs(fit.at("beta").get<double>() - 1.8803) <= 1e-4);
    CHECK(fit.at("n") == 60);
}

TEST_CASE("topic command emits the seed-rooted network") {
    const fs::path dir = work_dir() / "topic";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario star --seed 6 --n 25 | " + bin() + " topic > " +
              (dir / "topic.json").string()) == 0);
    const json topic = json::parse(slurp(dir / "topic.json"));
    CHECK(topic.at("seed_id") == "p00000");
    CHECK(topic.at("nodes").size() >= 25);
}

TEST_CASE("patterns --compare adds the rate table") {
    const fs::path dir = work_dir() / "compare";
    fs::remove_all(dir);
    fs::create_directories(dir);
    CHECK(run(bin() + " synth --scenario relay --seed 31 --out " + (dir / "fast").string() +
              " > /dev/null") == 0);
    CHECK(run(bin() + " synth --scenario relay --stages 2 --seed 32 --out " +
              (dir / "slow").string() + " > /dev/null") == 0);
    CHECK(run(bin() + " patterns --in " + (dir / "fast/corpus.jsonl").string() + " --compare " +
              (dir / "slow/corpus.jsonl").string() + " > " + (dir / "out.json").string()) == 0);
    const json out = json::parse(slurp(dir / "out.json"));
    CHECK(out.contains("findings"));
    CHECK(out.at("p7_rates").contains("ratio"));
}

TEST_CASE("export converts a stored tree to dot") {
    const fs::path dir = work_dir() / "export";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "tree.json")
        << R"({"root":"s","parents":{"a":"s","b":"a"},"depths":{"s":0,"a":1,"b":2}})";
    CHECK(run(bin() + " export --in " + (dir / "tree.json").string() + " --format dot > " +
              (dir / "tree.dot").string()) == 0);
    const std::string dot = slurp(dir / "tree.dot");
    CHECK(dot.find("digraph ideatree") != std::string::npos);
    CHECK(dot.find("\"s\" -> \"a\"") != std::string::npos);
    CHECK(dot.find("\"a\" -> \"b\"") != std::string::npos);
}
