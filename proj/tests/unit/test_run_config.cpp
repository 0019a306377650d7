#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "confbaryo/run_config.hpp"

using namespace cb;
namespace fs = std::filesystem;

namespace {

const std::string kScenario1 = R"({
  "scenario": "scenario1",
  "t": 0.5,
  "m": 1.0,
  "cutoffs": {"eps": 0.001, "Lambda": 10.0},
  "profile": {"family": "gaussian_bump", "A": 0.1, "w": 1.0, "t0": 0.0},
  "quadrature": {"rel_tol": 1e-8}
})";

const std::string kSweep = R"({
  "scenario": "scenario1",
  "m": 1.0,
  "cutoffs": {"eps": 0.001, "Lambda": 10.0},
  "profile": {"family": "gaussian_bump", "A": 0.1, "w": 1.0},
  "quadrature": {"rel_tol": 1e-8},
  "sweep": {"variable": "t", "from": 0.5, "to": 0.5, "points": 1}
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("confbaryo_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("unknown keys are rejected by name") {
  const std::string bad = replace(kScenario1, "\"t\": 0.5,", "\"t\": 0.5, \"tt\": 1,");
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("tt"), ConfigError);
  const std::string bad_nested = replace(kScenario1, "\"eps\": 0.001,", "\"eps\": 0.001, \"lambda\": 3,");
  CHECK_THROWS_AS(parse_config(bad_nested), ConfigError);
}

TEST_CASE("invalid values raise ConfigError") {
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kScenario1, "\"Lambda\": 10.0", "\"Lambda\": 5.0")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kScenario1, "\"scenario1\"", "\"scenario9\"")), ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kScenario1, "\"family\": \"gaussian_bump\", \"A\": 0.1, \"w\": 1.0, \"t0\": 0.0",
                                       "\"family\": \"flrw\", \"polynomial\": [1.0, 0.2]")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(replace(kScenario1, "\"scenario1\"", "\"mixed\"")), ConfigError);
}

TEST_CASE("config hash is stable and ignores threads and output") {
  const RunConfig a = parse_config(kScenario1);
  ConfigOverrides ov;
  ov.threads = 4;
  ov.out_dir = "elsewhere";
  const RunConfig b = parse_config(kScenario1, ov);
  CHECK(a.hash == b.hash);
  CHECK(a.hash.size() == 16);
  CHECK(b.request.quad.threads == 4);
  ConfigOverrides seed;
  seed.seed = 7;
  CHECK(parse_config(kScenario1, seed).hash != a.hash);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("overrides apply on top of the file") {
  ConfigOverrides ov;
  ov.tolerance = 1e-6;
  ov.seed = 99;
  const RunConfig c = parse_config(kScenario1, ov);
  CHECK(c.request.quad.rel_tol == 1e-6);
  CHECK(c.request.quad.seed == 99);
  ov.threads = 0;
  CHECK_THROWS_AS(parse_config(kScenario1, ov), ConfigError);
}

TEST_CASE("report embeds a replayable canonical config") {
  const RunConfig c = parse_config(kScenario1);
  const RateReport rep = evaluate(c);
  const std::string body = report_json(rep, c);
  CHECK(body.find("\"config_hash\": \"" + c.hash + "\"") != std::string::npos);
  const RunConfig again = parse_config(c.canonical);
  CHECK(again.hash == c.hash);
  CHECK(report_json(evaluate(again), again) == body);
}

TEST_CASE("run writes report and annotated tables") {
  const fs::path dir = scratch("run");
  ConfigOverrides ov;
  ov.out_dir = dir.string();
  const RunOutcome out = run(parse_config(kScenario1, ov));
  CHECK(out.exit_code == 0);
  REQUIRE(fs::exists(dir / "report.json"));
  REQUIRE(fs::exists(dir / "k_table.csv"));
  const std::string csv = slurp(dir / "k_table.csv");
  CHECK(csv.rfind("# config_hash=", 0) == 0);
  const auto nl = csv.find('\n');
  const std::string header = csv.substr(nl + 1, csv.find('\n', nl + 1) - nl - 1);
  CHECK(header.find("[") != std::string::npos);
  CHECK(header.find("{eps=") != std::string::npos);
  CHECK(header.find("Lambda=") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("sweep validation and single-point agreement") {
  CHECK_THROWS_WITH_AS(parse_config(replace(kSweep, "\"points\": 1", "\"points\": 0")), doctest::Contains("empty"),
                       ConfigError);
  const fs::path dir = scratch("sweep");
  ConfigOverrides ov;
  ov.out_dir = dir.string();
  const RunConfig c = parse_config(kSweep, ov);
  REQUIRE(c.sweep);
  CHECK(c.sweep->values().size() == 1);
  const RunOutcome out = sweep(c);
  CHECK(out.exit_code == 0);
  REQUIRE(fs::exists(dir / "sweep.csv"));
  const RunConfig single = parse_config(kScenario1);
  const double b = evaluate(single).B2;
  const std::string csv = slurp(dir / "sweep.csv");
  std::istringstream ls(csv);
  std::string line, last;
  while (std::getline(ls, line))
    if (!line.empty()) last = line;
  const double swept = std::stod(last.substr(last.find(',') + 1));
  CHECK(swept == doctest::Approx(b).epsilon(1e-15));
  fs::remove_all(dir);
}

TEST_CASE("radial table profiles load from CSV") {
  const std::string cfg = R"({
    "scenario": "scenario1", "t": 0.0, "m": 1.0,
    "cutoffs": {"eps": 0.001, "Lambda": 10.0},
    "profile": {"family": "radial_table", "file": "radial_profile.csv"}
  })";
  const RunConfig c = parse_config(cfg, {}, CONFBARYO_TEST_DATA_DIR);
  CHECK(c.request.profile.radial_center.has_value());
  CHECK(c.canonical.find("\"r\":[0.0,0.5,1.0,1.5]") != std::string::npos);
  CHECK_THROWS_AS(parse_config(cfg, {}, "/nonexistent"), ConfigError);
}
