#include <doctest.h>

#include <sstream>

#include "cninner/pipelines.hpp"

using namespace cninner;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::string& command, const json& config) {
  try {
    run_command(command, config);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

const CsvTable* table(const RunResult& r, const std::string& name) {
  for (const auto& t : r.tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("wep on the identity") {
  const RunResult r = run_command("wep", {{"expr", {{"kind", "identity"}}}, {"eps", {0.1}}});
  CHECK(r.ok());
  CHECK_FALSE(r.budget_exhausted);
  const json& last = r.report["results"]["trace"].back()["entries"][0];
  CHECK(last["eta"].get<double>() == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(r.report["status"] == "ok");
  CHECK(r.report["config"]["grid_quota"] == 16);
  REQUIRE(table(r, "wep"));
  CHECK(table(r, "wep")->text.rfind("refinement,eps,eta,", 0) == 0);
}

TEST_CASE("carleson on a symmetric pair") {
  const RunResult r = run_command("carleson", {{"zeros", {{0.5, 0.0}, {-0.5, 0.0}}}});
  CHECK(r.report["results"]["delta"].get<double>() == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(r.ok());
  // each delta_k equals rho(0.5, -0.5) = 0.8
  std::istringstream csv(table(r, "carleson")->text);
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    CHECK(std::stod(line.substr(line.rfind(',') + 1)) == doctest::Approx(0.8));
    ++rows;
  }
  CHECK(rows == 2);
}

TEST_CASE("area of the dyadic sector") {
  const RunResult r = run_command("area", {{"sector", {{"n", 64}, {"N", 1536}}}});
  const double v = r.report["results"]["value"];
  CHECK(v >= 1.043);
  CHECK(v <= 1.089);
  CHECK(code_of("area", {{"sector", {{"n", 64}}}}) == ErrorCode::invalid_argument);
}

TEST_CASE("level-solve writes every root") {
  json zeros = {{0.0, 0.0}, {0.5, 0.0}};
  const RunResult r = run_command("level-solve", {{"expr", {{"kind", "blaschke"}, {"zeros", zeros}}}, {"gamma", {0.1, 0.0}}});
  CHECK(r.ok());
  CHECK(r.report["results"]["roots"].size() == 2);
  CHECK(r.report["results"]["winding"] == 2);
}

TEST_CASE("reproduce targets") {
  const RunResult p3 = run_command("reproduce", {{"target", "prop3"}, {"kmax", 1}});
  CHECK(p3.ok());
  CHECK(p3.report["results"]["zero_count"] == 0);
  for (const auto& step : p3.report["results"]["wep_profiles"][0]["profile"]) {
    for (const auto& eta : step["eta"]) CHECK(eta.get<double>() == 1.0);
  }

  const RunResult p1 = run_command("reproduce", {{"target", "prop1-demo"}, {"n", 2}});
  CHECK(p1.ok());
  CHECK(p1.report["results"]["subsets"].size() == 2);
  CHECK(p1.report["results"]["triple_cluster"]["count"].get<int>() >= 3);

  const RunResult t = run_command("reproduce", {{"target", "thm1"}, {"kmax", 2}});
  CHECK(t.ok());
  const json& blocks = t.report["results"]["blocks"];
  CHECK(blocks[0]["mass"] == 0.5);
  CHECK(blocks[1]["mass"] == 0.25);
  CHECK(t.report["config"]["depth"] == 5);
}

TEST_CASE("reports are byte-stable") {
  const json cfg = {{"target", "thm1"}, {"kmax", 2}, {"seed", 7}};
  const std::string a = run_command("reproduce", cfg).report.dump(2);
  const std::string b = run_command("reproduce", cfg).report.dump(2);
  CHECK(a == b);
  CHECK(a.find("time") == std::string::npos);
  json threaded = cfg;
  threaded["threads"] = 3;
  CHECK(run_command("reproduce", threaded).report["results"] == run_command("reproduce", cfg).report["results"]);
}

TEST_CASE("config errors") {
  CHECK(code_of("bogus", json::object()) == ErrorCode::invalid_argument);
  CHECK(code_of("reproduce", {{"target", "nope"}}) == ErrorCode::invalid_argument);
  CHECK(code_of("wep", json::object()) == ErrorCode::invalid_argument);
  CHECK(code_of("wep", {{"expr", {{"kind", "identity"}}}, {"eps", {1.5}}}) == ErrorCode::invalid_argument);
  CHECK(code_of("wep", {{"expr", {{"kind", "nonsense"}}}}) == ErrorCode::parse);
  CHECK(code_of("reproduce", {{"target", "thm1"}, {"kmax", 5}}) == ErrorCode::invalid_argument);
  CHECK(code_of("reproduce", {{"target", "thm1"}, {"kmax", "two"}}) == ErrorCode::invalid_argument);
  CHECK(code_of("wep", json::array()) == ErrorCode::invalid_argument);
}

TEST_CASE("csv numbers round-trip") {
  const RunResult r = run_command("eval-grid", {{"expr", {{"kind", "identity"}}}, {"grid_quota", 4}, {"depth", 2}});
  std::istringstream csv(table(r, "samples")->text);
  std::string line;
  std::getline(csv, line);
  CHECK(line == "re,im,log_abs_f,rho");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string re, im, lf, rh;
    std::getline(row, re, ',');
    std::getline(row, im, ',');
    std::getline(row, lf, ',');
    std::getline(row, rh, ',');
    const double x = std::stod(re), y = std::stod(im);
    CHECK(std::stod(rh) == doctest::Approx(std::hypot(x, y)).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == r.report["results"]["points"].get<int>());
}
