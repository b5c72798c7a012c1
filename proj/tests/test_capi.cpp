#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include "cninner/cninner.h"

TEST_CASE("version") { CHECK(std::strlen(cn_version()) > 0); }

TEST_CASE("expression handles") {
  cn_expr* f = nullptr;
  REQUIRE(cn_expr_parse(R"({"kind": "blaschke", "zeros": [[0.5, 0]]})", &f) == CN_OK);
  double lm = 0, err = -1, re = 0, im = 0;
  int at_zero = -1;
  REQUIRE(cn_expr_log_modulus(f, 0.0, 0.0, &lm, &err, &at_zero) == CN_OK);
  CHECK(lm == doctest::Approx(std::log(0.5)));
  CHECK(at_zero == 0);
  REQUIRE(cn_expr_log_modulus(f, 0.5, 0.0, &lm, nullptr, &at_zero) == CN_OK);
  CHECK(at_zero == 1);
  REQUIRE(cn_expr_value(f, 0.0, 0.0, &re, &im) == CN_OK);
  CHECK(std::hypot(re, im) == doctest::Approx(0.5));
  CHECK(cn_expr_log_modulus(f, 1.5, 0.0, &lm, nullptr, nullptr) != CN_OK);
  CHECK(std::strlen(cn_last_error()) > 0);
  cn_expr_free(f);

  cn_expr* bad = nullptr;
  CHECK(cn_expr_parse("{not json", &bad) == CN_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(cn_expr_parse(R"({"kind": "nope"})", &bad) == CN_ERR_PARSE);
  CHECK(cn_expr_parse(nullptr, &bad) == CN_ERR_INVALID_ARGUMENT);
  cn_expr_free(nullptr);
}

TEST_CASE("run and inspect a result") {
  cn_result* r = nullptr;
  REQUIRE(cn_run("carleson", R"({"zeros": [[0.5, 0], [-0.5, 0]]})", &r) == CN_OK);
  CHECK(cn_result_ok(r) == 1);
  CHECK(cn_result_budget_exhausted(r) == 0);
  const auto report = nlohmann::json::parse(cn_result_report(r));
  CHECK(report["results"]["delta"].get<double>() == doctest::Approx(0.8));
  REQUIRE(cn_result_table_count(r) == 1);
  CHECK(std::string(cn_result_table_name(r, 0)) == "carleson");
  CHECK(std::string(cn_result_table_csv(r, 0)).rfind("index,", 0) == 0);
  CHECK(cn_result_table_name(r, 1) == nullptr);
  REQUIRE(cn_result_check_count(r) >= 1);
  CHECK(cn_result_check_passed(r, 0) == 1);
  CHECK(cn_result_check_name(r, 99) == nullptr);
  cn_result_free(r);
}

TEST_CASE("run errors carry codes") {
  cn_result* r = nullptr;
  CHECK(cn_run("bogus", "{}", &r) == CN_ERR_INVALID_ARGUMENT);
  CHECK(r == nullptr);
  CHECK(std::string(cn_last_error()).find("bogus") != std::string::npos);
  CHECK(cn_run("wep", "{oops", &r) == CN_ERR_PARSE);
  CHECK(cn_run(nullptr, "{}", &r) == CN_ERR_INVALID_ARGUMENT);
  CHECK(cn_run("reproduce", R"({"target": "prop3", "kmax": 1})", &r) == CN_OK);
  CHECK(std::string(cn_last_error()).empty());
  cn_result_free(r);
}
