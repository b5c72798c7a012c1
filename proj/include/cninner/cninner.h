#ifndef CNINNER_H
#define CNINNER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CN_API __declspec(dllexport)
#else
#define CN_API __attribute__((visibility("default")))
#endif

typedef enum cn_status {
  CN_OK = 0,
  CN_ERR_INVALID_ARGUMENT = 1,
  CN_ERR_DOMAIN = 2,
  CN_ERR_PARSE = 3,
  CN_ERR_BUDGET = 4,
  CN_ERR_INVARIANT = 5,
  CN_ERR_UNSUPPORTED = 6,
  CN_ERR_INTERNAL = 7
} cn_status;

typedef struct cn_expr cn_expr;
typedef struct cn_result cn_result;

CN_API const char* cn_version(void);

/* Message of the last failing call on this thread; "" if none. */
CN_API const char* cn_last_error(void);

/* Expressions, in the JSON form used by --expr files. */
CN_API cn_status cn_expr_parse(const char* json, cn_expr** out);
CN_API void cn_expr_free(cn_expr* expr);

/* log|f(z)| and its error bound. *at_zero is set when z is a zero of f. */
CN_API cn_status cn_expr_log_modulus(const cn_expr* expr, double re, double im, double* log_modulus,
                                     double* error_bound, int* at_zero);

/* f(z); fails with CN_ERR_UNSUPPORTED when the phase is not tracked. */
CN_API cn_status cn_expr_value(const cn_expr* expr, double re, double im, double* out_re, double* out_im);

/* Runs a command (reproduce, eval-grid, wep, cn-fit, carleson, area,
   level-solve) with a JSON config object. */
CN_API cn_status cn_run(const char* command, const char* config_json, cn_result** out);
CN_API void cn_result_free(cn_result* result);

/* Strings returned below live as long as the result. */
CN_API const char* cn_result_report(const cn_result* result);
CN_API size_t cn_result_table_count(const cn_result* result);
CN_API const char* cn_result_table_name(const cn_result* result, size_t i);
CN_API const char* cn_result_table_csv(const cn_result* result, size_t i);
CN_API size_t cn_result_check_count(const cn_result* result);
CN_API const char* cn_result_check_name(const cn_result* result, size_t i);
CN_API int cn_result_check_passed(const cn_result* result, size_t i);
CN_API const char* cn_result_check_detail(const cn_result* result, size_t i);

/* 1 when every check passed. */
CN_API int cn_result_ok(const cn_result* result);
CN_API int cn_result_budget_exhausted(const cn_result* result);

#ifdef __cplusplus
}
#endif

#endif
