#include "cninner/cninner.h"

#include <exception>
#include <new>
#include <string>

#include "cninner/expr_json.hpp"
#include "cninner/pipelines.hpp"

struct cn_expr {
  cninner::InnerExpr f;
};

struct cn_result {
  cninner::RunResult run;
  std::string report;
};

namespace {

thread_local std::string last_error;

template <class Fn>
cn_status guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return CN_OK;
  } catch (const cninner::Error& e) {
    last_error = e.what();
    return static_cast<cn_status>(e.code());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return CN_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CN_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return CN_ERR_INTERNAL;
  }
}

cn_status null_arg(const char* what) {
  last_error = std::string(what) + " is null";
  return CN_ERR_INVALID_ARGUMENT;
}

bool in_range(const cn_result* r, size_t i, size_t n) { return r && i < n; }

}  // namespace

extern "C" {

const char* cn_version(void) { return cninner::library_version(); }

const char* cn_last_error(void) { return last_error.c_str(); }

cn_status cn_expr_parse(const char* json, cn_expr** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] { *out = new cn_expr{cninner::expr_from_json(nlohmann::json::parse(json))}; });
}

void cn_expr_free(cn_expr* expr) { delete expr; }

cn_status cn_expr_log_modulus(const cn_expr* expr, double re, double im, double* log_modulus, double* error_bound,
                              int* at_zero) {
  if (!expr) return null_arg("expr");
  if (!log_modulus) return null_arg("log_modulus");
  return guard([&] {
    const auto v = cninner::eval_log_modulus(expr->f, cninner::DiscPoint(re, im));
    *log_modulus = v.log_modulus;
    if (error_bound) *error_bound = v.abs_error_bound;
    if (at_zero) *at_zero = v.at_zero ? 1 : 0;
  });
}

cn_status cn_expr_value(const cn_expr* expr, double re, double im, double* out_re, double* out_im) {
  if (!expr) return null_arg("expr");
  if (!out_re || !out_im) return null_arg("output");
  return guard([&] {
    const cninner::Complex w = cninner::eval_value(expr->f, cninner::DiscPoint(re, im));
    *out_re = w.real();
    *out_im = w.imag();
  });
}

cn_status cn_run(const char* command, const char* config_json, cn_result** out) {
  if (!command) return null_arg("command");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guard([&] {
    const nlohmann::json config =
        config_json && *config_json ? nlohmann::json::parse(config_json) : nlohmann::json::object();
    auto* r = new cn_result{cninner::run_command(command, config), {}};
    r->report = r->run.report.dump(2) + "\n";
    *out = r;
  });
}

void cn_result_free(cn_result* result) { delete result; }

const char* cn_result_report(const cn_result* r) { return r ? r->report.c_str() : ""; }

size_t cn_result_table_count(const cn_result* r) { return r ? r->run.tables.size() : 0; }

const char* cn_result_table_name(const cn_result* r, size_t i) {
  return in_range(r, i, cn_result_table_count(r)) ? r->run.tables[i].name.c_str() : nullptr;
}

const char* cn_result_table_csv(const cn_result* r, size_t i) {
  return in_range(r, i, cn_result_table_count(r)) ? r->run.tables[i].text.c_str() : nullptr;
}

size_t cn_result_check_count(const cn_result* r) { return r ? r->run.checks.size() : 0; }

const char* cn_result_check_name(const cn_result* r, size_t i) {
  return in_range(r, i, cn_result_check_count(r)) ? r->run.checks[i].name.c_str() : nullptr;
}

int cn_result_check_passed(const cn_result* r, size_t i) {
  return in_range(r, i, cn_result_check_count(r)) && r->run.checks[i].passed ? 1 : 0;
}

const char* cn_result_check_detail(const cn_result* r, size_t i) {
  return in_range(r, i, cn_result_check_count(r)) ? r->run.checks[i].detail.c_str() : nullptr;
}

int cn_result_ok(const cn_result* r) { return r && r->run.ok() ? 1 : 0; }

int cn_result_budget_exhausted(const cn_result* r) { return r && r->run.budget_exhausted ? 1 : 0; }

}  // extern "C"
