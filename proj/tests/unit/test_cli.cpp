#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = bnp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "bnp_cli_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

nlohmann::json manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("stats prints the uniform-process growth value") {
    const auto r = call({"stats", "--process", "up", "--theta", "2", "--n", "10000"});
    CHECK(r.code == 0);
    CHECK(r.out == "200\n");
  }

  TEST_CASE("shipped simulate config equals the built-in defaults; flags override it") {
    const auto a = scratch("cfg_a"), b = scratch("cfg_b");
    const std::string cfg = std::string(BNP_CONFIG_DIR) + "/simulate_default.json";
    REQUIRE(call({"simulate", "--config", cfg, "--replicates", "3", "--n", "50", "--out", a.string()}).code == 0);
    REQUIRE(call({"simulate", "--replicates", "3", "--n", "50", "--out", b.string()}).code == 0);
    const auto ca = manifest(a)["config"], cb = manifest(b)["config"];
    CHECK(ca == cb);
    CHECK(ca["replicates"] == "3");
    CHECK(ca["n"] == "50");
    for (const char* f : {"k_growth.csv", "cluster_sizes.csv", "k_exponents.csv"}) {
      std::ifstream x(a / f), y(b / f);
      std::stringstream sx, sy;
      sx << x.rdbuf();
      sy << y.rdbuf();
      CHECK(sx.str() == sy.str());
    }
  }

  TEST_CASE("seed from the environment, command line wins") {
    const auto a = scratch("env_a"), b = scratch("env_b");
    ::setenv("BNP_SEED", "42", 1);
    REQUIRE(call({"synth", "--clusters", "2", "--docs-per-cluster", "2", "--out", a.string()}).code == 0);
    REQUIRE(call({"synth", "--clusters", "2", "--docs-per-cluster", "2", "--seed", "7", "--out", b.string()}).code == 0);
    ::unsetenv("BNP_SEED");
    CHECK(manifest(a)["master_seed"] == 42);
    CHECK(manifest(b)["master_seed"] == 7);
  }

  TEST_CASE("manifest contents") {
    const auto d = scratch("manifest");
    REQUIRE(call({"synth", "--clusters", "2", "--docs-per-cluster", "3", "--out", d.string()}).code == 0);
    const auto m = manifest(d);
    CHECK(m["command"] == "synth");
    CHECK(m["tool_version"] == BNP_VERSION);
    CHECK(m["outputs"].size() == 3);
    CHECK(m.contains("wall_clock_seconds"));

    const auto e = scratch("manifest_inputs");
    const std::string corpus = (d / "synth.json").string();
    REQUIRE(call({"cluster", "--corpus", corpus, "--sweeps", "2", "--chains", "1", "--out", e.string()}).code == 0);
    const auto inputs = manifest(e)["inputs"];
    REQUIRE(inputs.size() == 1);
    CHECK(inputs.at(corpus).get<std::string>().size() == 64);
  }

  TEST_CASE("existing run is refused without --force") {
    const auto d = scratch("force");
    const std::vector<std::string> args{"synth", "--clusters", "2", "--docs-per-cluster", "2", "--out", d.string()};
    REQUIRE(call(args).code == 0);
    const auto again = call(args);
    CHECK(again.code == 1);
    CHECK(again.err.find("--force") != std::string::npos);
    auto forced = args;
    forced.push_back("--force");
    CHECK(call(forced).code == 0);
  }

  TEST_CASE("exit codes") {
    CHECK(call({}).code == 2);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"synth"}).code == 2);
    CHECK(call({"synth", "--bogus", "1", "--out", scratch("x").string()}).code == 2);
    CHECK(call({"synth", "--jobs", "0", "--out", scratch("y").string()}).code == 2);
    CHECK(call({"stats", "--process", "nope"}).code != 0);
    CHECK(call({"cluster", "--corpus", "/nonexistent/corpus.txt", "--out", scratch("z").string()}).code == 1);
    CHECK(call({"--version"}).code == 0);
  }
}
