#include <doctest.h>

#include <string>

#include "qcd/cli/commands.hpp"
#include "qcd/cli/config.hpp"
#include "qcd/cli/report.hpp"
#include "qcd/rng.hpp"

using namespace qcd;
using namespace qcd::cli;

namespace {

CommandOutcome run(const std::string& command, const std::string& text, Overrides o = {}) {
  return run_command(command, parse_config_text(text), o);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config text must carry schema version 1") {
  CHECK_NOTHROW(parse_config_text(R"({"schema_version": "1"})"));
  CHECK_THROWS_AS(parse_config_text(R"({"schema_version": "2"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(R"({"L": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("complex values") {
  CHECK(parse_complex(Json(0.5), "x") == cplx(0.5));
  CHECK(parse_complex(Json::array({0.5, -1.0}), "x") == cplx(0.5, -1.0));
  CHECK_THROWS_AS(parse_complex(Json::array({0.5}), "x"), ConfigError);
  CHECK_THROWS_AS(parse_complex(Json("a"), "x"), ConfigError);
  CHECK(to_json(cplx(1.5, -2.0)).dump() == "[1.5,-2.0]");
  CHECK(multiset_to_json({cplx(1, 0), cplx(0, 2), cplx(0, -1)}).dump() == "[[0.0,-1.0],[0.0,2.0],[1.0,0.0]]");
}

TEST_CASE("sections reject unknown keys") {
  const Json j = Json::parse(R"({"a": 1, "b": 2})");
  Section s(j, "root");
  CHECK(s.integer("a", 0, 0, 10) == 1);
  CHECK_THROWS_AS(s.finish(), ConfigError);
  Section t(j, "root");
  CHECK_THROWS_AS(t.integer("a", 0, 2, 10), ConfigError);
}

TEST_CASE("chain parsing validates") {
  const Json ok = Json::parse(R"({"eta": 0.5, "h": [0.1, 0.0], "inhom": [0.0, 0.7]})");
  const auto chain = parse_chain(Section(ok, "chain"));
  CHECK(chain.L == 2);
  CHECK(chain.h == cplx(0.1, 0.0));
  const Json mismatch = Json::parse(R"({"L": 3, "eta": 0.5, "inhom": [0.0, 0.7]})");
  CHECK_THROWS_AS(parse_chain(Section(mismatch, "chain")), ConfigError);
  const Json coincident = Json::parse(R"({"eta": 0.5, "inhom": [0.3, 0.3]})");
  CHECK_THROWS_AS(parse_chain(Section(coincident, "chain")), GeneralPositionViolated);
  const Json extra = Json::parse(R"({"eta": 0.5, "inhom": [0.3], "typo": 1})");
  CHECK_THROWS_AS(parse_chain(Section(extra, "chain")), ConfigError);
}

TEST_CASE("report layout") {
  const auto out = run("verify-duality", R"({"schema_version": "1"})");
  REQUIRE(out.exit_code == kExitPass);
  std::vector<std::string> keys;
  for (auto it = out.report.begin(); it != out.report.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"schema_version", "command", "config", "results", "summary", "timestamp"});
  CHECK(out.report["schema_version"] == "1");
  CHECK(out.report["command"] == "verify-duality");
  CHECK(out.report["summary"]["tool_version"] == QCD_VERSION);
  CHECK(out.report["summary"]["rng"] == Rng::kName);
  CHECK(out.report["config"].contains("seed"));
  CHECK(out.report["config"].contains("chain"));
  CHECK(out.report["summary"]["worst_error"].get<double>() <= 1e-12);
  CHECK(payload(out.report).find("timestamp") == std::string::npos);
  CHECK_THROWS_AS(write_report(out.report, "/nonexistent/dir/report.json"), ConfigError);
}

TEST_CASE("verify-duality exit codes") {
  const auto random = run("verify-duality", R"({"schema_version": "1", "L": 4, "seed": 42, "trials": 10})");
  CHECK(random.exit_code == kExitPass);
  CHECK(random.report["summary"]["n_chains"] == 10);
  CHECK(random.report["summary"]["worst_error"].get<double>() <= 1e-8);

  const auto coincident =
      run("verify-duality", R"({"schema_version": "1", "chain": {"eta": 0.5, "h": 0.1, "inhom": [0.3, 0.3]}})");
  CHECK(coincident.exit_code == kExitConfigError);
  CHECK(coincident.message.find("GeneralPositionViolated") != std::string::npos);

  CHECK(run("verify-duality", R"({"schema_version": "1", "colour": 1})").exit_code == kExitConfigError);
  CHECK(run("verify-duality", R"({"schema_version": "1", "L": 11})").exit_code == kExitConfigError);
  CHECK(run("no-such-command", R"({"schema_version": "1"})").exit_code == kExitConfigError);

  Overrides tight;
  tight.tol = 1e-30;
  const auto strict = run("verify-duality", R"({"schema_version": "1", "L": 3, "seed": 1})", tight);
  CHECK(strict.exit_code == kExitVerificationFailed);
  CHECK(strict.report["config"]["tol"] == 1e-30);
  Overrides negative;
  negative.tol = -1.0;
  CHECK(run("verify-duality", R"({"schema_version": "1"})", negative).exit_code == kExitConfigError);
}

TEST_CASE("solve-bethe") {
  const auto vac = run("solve-bethe", R"({"schema_version": "1", "L": 3, "M2": 0})");
  REQUIRE(vac.exit_code == kExitPass);
  const auto& sector = vac.report["results"]["sectors"][0];
  CHECK(sector["solution_count"] == 1);
  CHECK(sector["solutions"][0]["roots"].empty());

  const auto full = run("solve-bethe", R"({"schema_version": "1", "L": 3, "seed": 5})");
  REQUIRE(full.exit_code == kExitPass);
  std::vector<int> counts;
  for (const auto& s : full.report["results"]["sectors"]) {
    counts.push_back(s["solution_count"].get<int>());
    CHECK(s["match_rate"] == 1.0);
  }
  CHECK(counts == std::vector<int>{1, 3, 3, 1});
}

TEST_CASE("rs-evolve") {
  const auto one = run("rs-evolve", R"({"schema_version": "1", "state": {"eta": 0.5, "x": [0.0], "p": [0.2]}})");
  REQUIRE(one.exit_code == kExitPass);
  CHECK(one.report["results"]["runs"][0]["linear_motion_error"].get<double>() <= 1e-12);

  const auto three = run("rs-evolve", R"({"schema_version": "1", "random": {"L": 3, "kind": "real"}, "seed": 3})");
  CHECK(three.exit_code == kExitPass);
  CHECK(three.report["summary"]["worst_spectral_drift"].get<double>() <= 1e-6);

  const auto collision = run(
      "rs-evolve", R"({"schema_version": "1", "state": {"eta": 0.5, "x": [0, 0.6], "p": [2.0, -2.0]}, "t_final": 5})");
  CHECK(collision.exit_code == kExitNumericalFailure);
  CHECK(collision.message.find("CollisionDetected") != std::string::npos);
  CHECK(collision.report["summary"]["passed"] == false);

  CHECK(run("rs-evolve", R"({"schema_version": "1", "random": {"L": 3, "kind": "elliptic"}})").exit_code ==
        kExitConfigError);
}

TEST_CASE("check-identities") {
  const auto seeded = run("check-identities", R"({"schema_version": "1", "seed": 7, "trials": 100})");
  CHECK(seeded.exit_code == kExitPass);
  CHECK(seeded.report["summary"]["n_pass"] == 100);

  const auto single = run("check-identities", R"({"schema_version": "1", "N": 1, "M": 0, "trials": 1})");
  REQUIRE(single.exit_code == kExitPass);
  CHECK(single.report["results"]["trials"][0]["residuals"]["lemma1"].get<double>() <= 1e-14);

  const auto corrupt = run("check-identities", R"({"schema_version": "1", "corrupt_g": true, "trials": 5})");
  CHECK(corrupt.exit_code == kExitVerificationFailed);
  CHECK(corrupt.report["summary"]["worst"]["lemma1"].get<double>() > 1e-3);

  CHECK(run("check-identities", R"({"schema_version": "1", "N": 2, "M": 3})").exit_code == kExitConfigError);
}

TEST_CASE("identical configs give identical payloads") {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"verify-duality", R"({"schema_version": "1", "L": 3, "seed": 9, "trials": 3})"},
      {"solve-bethe", R"({"schema_version": "1", "L": 3, "seed": 9})"},
      {"rs-evolve", R"({"schema_version": "1", "random": {"L": 2, "kind": "real"}, "seed": 9, "t_final": 0.5})"},
      {"check-identities", R"({"schema_version": "1", "seed": 9, "trials": 20})"},
  };
  for (const auto& [command, text] : cases) {
    const auto a = run(command, text);
    const auto b = run(command, text);
    CHECK(a.exit_code == b.exit_code);
    CHECK(payload(a.report) == payload(b.report));
  }
  const auto s1 = run("verify-duality", R"({"schema_version": "1", "L": 3, "seed": 9})");
  const auto s2 = run("verify-duality", R"({"schema_version": "1", "L": 3, "seed": 10})");
  CHECK(payload(s1.report) != payload(s2.report));
}

}  // TEST_SUITE
