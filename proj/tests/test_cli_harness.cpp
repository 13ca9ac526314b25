#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fnls/cli_harness.hpp"
#include "fnls/errors.hpp"

using namespace fnls;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("fnls_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

Config small_conservation() {
  Config c;
  c.set("eps", "1");
  c.set("kinds", "N1,N3");
  c.set("grid.num_points", "64");
  c.set("horizon", "0.1");
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::parse("# comment\n; other\nseed_like = 3\n\n[grid]\nnum_points=256\n[ ]\ndt = 1e-3\n");
  CHECK(c.get_int("seed_like") == 3);
  CHECK(c.get_int("grid.num_points") == 256);
  CHECK(c.get_double("dt") == 1e-3);
  CHECK(Config::parse(c.serialize()).entries() == c.entries());
  CHECK_THROWS_AS(Config::parse("a=1\na=2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("=3\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x=1\n").get_int("missing"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x=abc\n").get_double("x"), ConfigError);
  CHECK(Config::parse("xs=1, 2,3\n").get_ints("xs") == std::vector<std::int64_t>{1, 2, 3});
  CHECK_THROWS_AS(Config::load("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("number formatting and CSV quoting") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0})
    CHECK(std::stod(format_number(x)) == x);
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  Table t{"t", {"a", "b"}, {}};
  t.add_row({"1", "x,y"});
  CHECK(t.to_csv() == "a,b\r\n1,\"x,y\"\r\n");
  CHECK_THROWS(t.add_row({"only one"}));
}

TEST_CASE("registry") {
  const std::set<std::string> expected{"simulate",       "conservation",    "strichartz-sweep", "sharpness",
                                       "necessity",      "bilinear-count",  "trilinear-count",  "resonance-count",
                                       "v-convexity",    "illposed",        "inflation",        "epsilon-continuity",
                                       "uniform-failure", "infinite-horizon", "holomorphy"};
  std::set<std::string> names;
  for (const auto& e : experiment_registry()) {
    names.insert(e.name);
    CHECK_FALSE(e.anchor.empty());
  }
  CHECK(names == expected);
  try {
    find_experiment("nope");
    FAIL("expected RegistryError");
  } catch (const RegistryError& e) {
    CHECK(std::string(e.what()).find("holomorphy") != std::string::npos);
  }
  Config bad;
  bad.set("no_such_key", "1");
  CHECK_THROWS_AS(evaluate_experiment("illposed", bad, {}), ConfigError);
}

TEST_CASE("run writes deterministic outputs") {
  const auto a = scratch("a"), b = scratch("b");
  const auto ra = run_experiment("conservation", small_conservation(), a, RunOptions{7, true, 1});
  const auto rb = run_experiment("conservation", small_conservation(), b, RunOptions{7, true, 2});
  CHECK(ra.verdict == Verdict::Pass);
  CHECK(ra.outputs == rb.outputs);
  CHECK(without_first_line(slurp(a / "conservation.csv")) == without_first_line(slurp(b / "conservation.csv")));
  CHECK(slurp(a / "conservation.csv").rfind("# generated ", 0) == 0);
  CHECK(std::filesystem::exists(a / "conservation.cfg"));

  const auto j = nlohmann::json::parse(slurp(a / "conservation_record.json"));
  CHECK(j["name"] == "conservation");
  CHECK(j["seed"] == 7);
  CHECK(j["verdict"] == "PASS");
  CHECK_FALSE(j["anchor"].get<std::string>().empty());
  CHECK(j["config"]["grid.num_points"] == "64");

  // The saved snapshot re-runs to the same outputs.
  const auto snap = Config::load(a / "conservation.cfg");
  CHECK(evaluate_experiment("conservation", snap, RunOptions{7, false, 1}).outputs == ra.outputs);

  CHECK_THROWS_AS(run_experiment("conservation", small_conservation(), "/proc/forbidden_dir"), ConfigError);
}

TEST_CASE("seeded experiments are reproducible across worker counts") {
  Config c;
  c.set("trials", "20");
  const auto r1 = evaluate_experiment("strichartz-sweep", c, RunOptions{3, false, 1});
  const auto r3 = evaluate_experiment("strichartz-sweep", c, RunOptions{3, false, 3});
  CHECK(r1.outputs == r3.outputs);
  const auto other = evaluate_experiment("strichartz-sweep", c, RunOptions{4, false, 1});
  CHECK(other.outputs != r1.outputs);

  Config h;
  h.set("count", "12");
  CHECK(evaluate_experiment("infinite-horizon", h, RunOptions{9, false, 1}).outputs ==
        evaluate_experiment("infinite-horizon", h, RunOptions{9, false, 2}).outputs);
}

TEST_CASE("fast experiments give their documented verdicts") {
  CHECK(evaluate_experiment("illposed", {}, {}).verdict == Verdict::Pass);
  CHECK(evaluate_experiment("uniform-failure", {}, {}).verdict == Verdict::Pass);
  Config s;
  s.set("grid.num_points", "32");
  s.set("horizon", "0.1");
  CHECK(evaluate_experiment("simulate", s, {}).verdict == Verdict::ReportOnly);
  s.set("datum", "pure");
  s.set("pure.modes", "0,3");
  CHECK(evaluate_experiment("simulate", s, {}).verdict == Verdict::Pass);
  s.set("nonlinearity", "N2");
  CHECK_THROWS_AS(evaluate_experiment("simulate", s, {}), ConfigError);
}

TEST_CASE("acceptance criteria table") {
  const auto& crit = acceptance_criteria();
  REQUIRE(crit.size() == 13);
  for (std::size_t i = 0; i < crit.size(); ++i) {
    CHECK(crit[i].id == static_cast<int>(i + 1));
    CHECK_FALSE(crit[i].steps.empty());
    // Every override names a declared key.
    for (const auto& step : crit[i].steps) {
      const auto& spec = find_experiment(step.experiment);
      CHECK_NOTHROW(effective_config(spec, step.smoke));
      CHECK_NOTHROW(effective_config(spec, step.full));
    }
  }
  CHECK_THROWS_AS(verify_all(Suite::Smoke, {{99, 2.0}}), ConfigError);
  CHECK_THROWS_AS(verify_all(Suite::Smoke, {{3, 0.0}}), ConfigError);
  CHECK_THROWS_AS(parse_suite("medium"), ConfigError);
}

TEST_CASE("tightening one criterion fails only that row") {
  const auto base = verify_all(Suite::Smoke, {}, 1, 1);
  const auto tight = verify_all(Suite::Smoke, {{3, 100.0}}, 1, 1);
  REQUIRE(base.size() == 13);
  REQUIRE(tight.size() == 13);
  CHECK(summary_table(base).rows.size() == 13);
  CHECK(base[2].verdict == Verdict::Pass);
  CHECK(tight[2].verdict == Verdict::Fail);
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i == 2) continue;
    CHECK(tight[i].verdict == base[i].verdict);
    CHECK(tight[i].detail == base[i].detail);
  }
}
