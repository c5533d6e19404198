#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "ontosim/io.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using ontosim::io::json;
using namespace ontosim::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ontosim-cli-" + std::to_string(std::random_device{}()) + "-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string fx(const std::string& name) { return testkit::fixture(name); }

}  // namespace

TEST_CASE("cycles: 30-state fixture, identity and error exit codes") {
  Result r = invoke({"cycles", "--input", fx("permutation_30.json")});
  REQUIRE(r.code == kOk);
  CHECK(r.err.empty());
  CHECK(json::parse(r.out)["ranks"] == json{2, 3, 6, 8, 11});

  r = invoke({"cycles", "--input", fx("identity_permutation.json")});
  CHECK(json::parse(r.out)["ranks"] == json(std::vector<int>(8, 1)));

  r = invoke({"cycles", "--input", fx("corrupted_permutation.json")});
  CHECK(r.code == kParseError);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());

  CHECK(invoke({"cycles", "--input", fx("missing.json")}).code == kFileNotFound);
  CHECK(invoke({"cycles", "--input", fx("non_bijective_permutation.json")}).code == kInvalidModel);
  CHECK(invoke({"cycles"}).code == kUsage);
  CHECK(invoke({"frobnicate"}).code == kUsage);
  CHECK(invoke({}).code == kUsage);

  // A model file reports the cycles of its step map.
  r = invoke({"cycles", "--input", fx("two_state_10_7.json")});
  REQUIRE(r.code == kOk);
  CHECK(json::parse(r.out)["size"] == 140);
}

TEST_CASE("spectrum: free model sum rule and size cap") {
  const fs::path dir = scratch("spectrum");
  Result r = invoke({"spectrum", "--input", fx("free_2_3.json"), "--summary", (dir / "s.json").string()});
  REQUIRE(r.code == kOk);
  std::istringstream csv(r.out);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "cycle_index,n,energy,re_phase,im_phase");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 12);
  const json s = json::parse(slurp(dir / "s.json"));
  CHECK(s["free_sum_rule"]["exact_match"] == true);
  CHECK(r.err.find("warning") != std::string::npos);

  std::ofstream(dir / "big.json") << R"({"slow_count": 2, "periods": [200, 200]})";
  CHECK(invoke({"spectrum", "--input", (dir / "big.json").string()}).code == kSizeCap);
  fs::remove_all(dir);
}

TEST_CASE("simulate: exact enumeration, seeded ensembles, seed required") {
  Result r = invoke({"simulate", "--input", fx("two_state_10_7.json"), "--horizon", "70"});
  REQUIRE(r.code == kOk);
  CHECK(r.out.rfind("t,state_0_freq,state_1_freq\n0,1,0\n", 0) == 0);
  CHECK(r.out.find("\n70,0,1\n") != std::string::npos);

  CHECK(invoke({"simulate", "--input", fx("two_state_10_7.json"), "--samples", "100"}).code == kUsage);
  const Result a = invoke({"simulate", "--input", fx("two_state_10_7.json"), "--samples", "500", "--seed", "4"});
  const Result b = invoke({"simulate", "--input", fx("two_state_10_7.json"), "--samples", "500", "--seed", "4",
                           "--workers", "3"});
  CHECK(a.code == kOk);
  CHECK(a.out == b.out);
  CHECK(invoke({"simulate", "--input", fx("two_state_10_7.json"), "--initial", "2"}).code == kUsage);
  CHECK(invoke({"simulate", "--input", fx("two_state_10_7.json"), "--horizon", "abc"}).code == kUsage);
}

TEST_CASE("compile: exact target, class and reachability errors") {
  const fs::path dir = scratch("compile");
  Result r = invoke({"compile", "--input", fx("target_two_state_exact.json"), "--report", (dir / "r.json").string()});
  REQUIRE(r.code == kOk);
  const json model = json::parse(r.out);
  CHECK(model["slow_count"] == 2);
  const json report = json::parse(slurp(dir / "r.json"));
  CHECK(report["max_error"] == 0.0);
  CHECK(report["effective"]["couplings"][0]["den"].get<int>() % 70 == 0);

  CHECK(invoke({"compile", "--input", fx("target_diagonal.json")}).code == kNotRepresentable);
  CHECK(invoke({"compile", "--input", fx("target_two_state_exact.json"), "--tolerance", "0"}).code == kUsage);
  std::ofstream(dir / "hard.json") << R"({"im": [[0, -0.0141421356], [0.0141421356, 0]]})";
  CHECK(invoke({"compile", "--input", (dir / "hard.json").string(), "--tolerance", "1e-9", "--max-period", "5"}).code ==
        kUnreachable);
  fs::remove_all(dir);
}

TEST_CASE("compare: exact target emits the model, report and three curves") {
  const fs::path dir = scratch("compare");
  const Result r = invoke({"compare", "--input", fx("target_two_state_exact.json"), "--horizon", "140", "--output",
                           dir.string()});
  REQUIRE(r.code == kOk);
  CHECK(r.out.empty());
  const json report = json::parse(slurp(dir / "report.json"));
  CHECK(report["max_error"] == 0.0);
  CHECK(report["comparison"]["max_abs_classical_vs_full_quantum"].get<double>() < 1e-10);
  const std::string csv = slurp(dir / "comparison.csv");
  CHECK(csv.rfind("t,classical,full_quantum,effective\n", 0) == 0);
  CHECK(fs::exists(dir / "model.json"));
  CHECK(fs::exists(dir / "effective.json"));
  const std::string first = csv;

  // Same inputs, same bytes.
  REQUIRE(invoke({"compare", "--input", fx("target_two_state_exact.json"), "--horizon", "140", "--output",
                  dir.string()}).code == kOk);
  CHECK(slurp(dir / "comparison.csv") == first);

  const fs::path zero = dir / "zero";
  REQUIRE(invoke({"compare", "--input", fx("target_zero.json"), "--horizon", "10", "--output", zero.string()}).code ==
          kOk);
  std::istringstream rows(slurp(zero / "comparison.csv"));
  std::string line;
  std::getline(rows, line);
  int n = 0;
  while (std::getline(rows, line)) {
    CHECK(line == std::to_string(n) + ",0,0,0");
    ++n;
  }
  CHECK(n == 11);
  CHECK(invoke({"compare", "--input", fx("target_diagonal.json"), "--output", dir.string()}).code == kNotRepresentable);
  CHECK(invoke({"compare", "--input", fx("target_zero.json")}).code == kUsage);
  fs::remove_all(dir);
}

TEST_CASE("bell: report bundle, determinism and config precedence") {
  const fs::path dir = scratch("bell");
  Result r = invoke({"bell", "--output", (dir / "a").string(), "--samples", "5000", "--seed", "11", "--grid", "16"});
  REQUIRE(r.code == kOk);
  CHECK(r.out.empty());
  const json chsh = json::parse(slurp(dir / "a" / "chsh.json"));
  CHECK(std::abs(chsh["S"].get<double>() - 2.0 * std::sqrt(2.0)) < 1e-9);
  CHECK(chsh["bound"] == 2);
  CHECK(chsh["settings_deg"] == json{0.0, 45.0, 22.5, 67.5});
  CHECK(chsh["grid_max_abs_err"].get<double>() <= 1e-6);
  const json marg = json::parse(slurp(dir / "a" / "marginals.json"));
  CHECK(marg["marginals"].size() == 3);
  const std::string grid = slurp(dir / "a" / "correlation_grid.csv");
  CHECK(grid.rfind("a_deg,b_deg,E_quant,E_correlated,abs_err\n", 0) == 0);
  const std::string samples = slurp(dir / "a" / "samples.csv");
  CHECK(samples.rfind("a,b,lambda,A,B\n", 0) == 0);

  REQUIRE(invoke({"bell", "--output", (dir / "b").string(), "--samples", "5000", "--seed", "11", "--grid", "16"}).code ==
          kOk);
  CHECK(slurp(dir / "b" / "samples.csv") == samples);
  CHECK(slurp(dir / "b" / "chsh.json") == slurp(dir / "a" / "chsh.json"));

  // Config supplies grid 16, 2000 samples and seed 7; the flag overrides the grid.
  REQUIRE(invoke({"bell", "--config", fx("bell_config.json"), "--grid", "4", "--output", (dir / "c").string()}).code ==
          kOk);
  std::istringstream rows(slurp(dir / "c" / "correlation_grid.csv"));
  std::string line;
  int n = -1;
  while (std::getline(rows, line)) ++n;
  CHECK(n == 16);
  std::istringstream srows(slurp(dir / "c" / "samples.csv"));
  n = -1;
  while (std::getline(srows, line)) ++n;
  CHECK(n == 2000);

  r = invoke({"bell", "--output", (dir / "d").string(), "--settings", "0,45,22.5", "--samples", "0"});
  CHECK(r.code == kUsage);
  r = invoke({"bell", "--output", (dir / "d").string(), "--settings", "10,20,30,40", "--samples", "0"});
  REQUIRE(r.code == kOk);
  CHECK(json::parse(slurp(dir / "d" / "chsh.json"))["settings_deg"] == json{10.0, 20.0, 30.0, 40.0});
  CHECK(invoke({"bell", "--output", (dir / "e").string(), "--samples", "10"}).code == kUsage);

  std::ofstream(dir / "typo.json") << R"({"sample": 10})";
  CHECK(invoke({"bell", "--config", (dir / "typo.json").string(), "--output", (dir / "f").string()}).code == kUsage);
  std::ofstream(dir / "wrong.json") << R"({"command": "cycles"})";
  CHECK(invoke({"bell", "--config", (dir / "wrong.json").string(), "--output", (dir / "f").string()}).code == kUsage);
  fs::remove_all(dir);
}

TEST_CASE("help goes to stdout with exit code 0") {
  const Result r = invoke({"--help"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("bell") != std::string::npos);
}
