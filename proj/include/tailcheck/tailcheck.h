/* C interface to the tailcheck library.
 *
 * Every fallible call returns a tc_status; on failure tc_last_error() holds a
 * message for the calling thread until its next failing call. Objects are
 * opaque handles released with the matching *_free function. Strings
 * returned through char** are owned by the caller and freed with
 * tc_string_free. */
#ifndef TAILCHECK_H
#define TAILCHECK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef TAILCHECK_BUILDING_DLL
#    define TC_API __declspec(dllexport)
#  else
#    define TC_API __declspec(dllimport)
#  endif
#else
#  define TC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tc_status {
  TC_OK = 0,
  TC_ERR_ARGUMENT = 1,
  TC_ERR_SHAPE = 2,
  TC_ERR_FORMAT = 3,
  TC_ERR_TRUNCATED = 4,
  TC_ERR_OVERFLOW = 5,
  TC_ERR_IO = 6,
  TC_ERR_FIT = 7,
  TC_ERR_CONFIG = 8,
  TC_ERR_UNDEFINED_FRACTION = 9,
  TC_ERR_DATA = 10,
  TC_ERR_INTERNAL = 99
} tc_status;

TC_API const char* tc_version(void);
TC_API const char* tc_last_error(void);
/* Short machine name of a status, e.g. "truncated". */
TC_API const char* tc_status_name(tc_status status);
TC_API void tc_string_free(char* s);

/* ---- Distribution and scalar kernels ----------------------------------- */

typedef struct tc_gev_params {
  double location;
  double scale;
  double shape;
} tc_gev_params;

TC_API tc_status tc_gev_cdf(double x, const tc_gev_params* params, double* out);
TC_API tc_status tc_gev_quantile(double p, const tc_gev_params* params, double* out);
TC_API tc_status tc_gev_log_likelihood(const double* data, size_t n,
                                       const tc_gev_params* params, double* out);
TC_API tc_status tc_gev_lmoments_fit(const double* data, size_t n, tc_gev_params* out);
TC_API tc_status tc_gev_mle_fit(const double* data, size_t n,
                                const tc_gev_params* init, tc_gev_params* out);
TC_API tc_status tc_empirical_quantile(const double* data, size_t n, double p,
                                       double* out);
TC_API tc_status tc_area_weight(double latitude, double* out);

/* Confidence categories: 0 = VirtuallyCertain ... 7 = ExceptionallyUnlikely. */
TC_API tc_status tc_confidence_category(double probability, int* out);
TC_API const char* tc_confidence_category_name(int category);

TC_API tc_status tc_dewpoint_to_rh(double t2m_c, double dewpoint_c, double* out);
TC_API tc_status tc_heat_index(double t2m_c, double rh_percent, double* out);
/* Risk categories: 0 = Below, 1 = Caution, ..., 4 = ExtremeDanger. */
TC_API tc_status tc_risk_category(double heat_index_c, int* out);
TC_API const char* tc_risk_category_name(int category);

/* ---- Bayesian GEV posterior -------------------------------------------- */

typedef struct tc_mcmc_config {
  int chains;
  int iterations;
  int burn_in;
  int thin;
  int adapt_window;
  double target_acceptance;
  uint64_t seed;
} tc_mcmc_config;

TC_API void tc_mcmc_config_default(tc_mcmc_config* out);

typedef struct tc_posterior tc_posterior;

TC_API tc_status tc_bayes_fit(const double* data, size_t n,
                              const tc_mcmc_config* config, tc_posterior** out);
TC_API void tc_posterior_free(tc_posterior* post);
TC_API size_t tc_posterior_size(const tc_posterior* post);
TC_API tc_status tc_posterior_draw(const tc_posterior* post, size_t index,
                                   tc_gev_params* out);
/* R-hat for location, scale, shape. */
TC_API tc_status tc_posterior_rhat(const tc_posterior* post, double out[3]);
TC_API int tc_posterior_converged(const tc_posterior* post);
/* Fills out[0..n) with the p-quantile of each draw; n must equal the size. */
TC_API tc_status tc_posterior_quantile_draws(const tc_posterior* post, double p,
                                             double* out, size_t n);
TC_API tc_status tc_posterior_containment(const tc_posterior* post, double p,
                                          double target, double* out);

/* ---- Gridded ensemble blocks ------------------------------------------- */

typedef struct tc_block tc_block;

TC_API tc_status tc_block_read(const char* path, tc_block** out);
TC_API tc_status tc_block_write(const tc_block* block, const char* path);
TC_API void tc_block_free(tc_block* block);
TC_API tc_status tc_block_dims(const tc_block* block, size_t* nlat, size_t* nlon,
                               size_t* n_members, size_t* n_times);
TC_API const char* tc_block_variable(const tc_block* block);
/* Copies the layer of (time, member) into out[0..n), n = nlat * nlon. */
TC_API tc_status tc_block_layer(const tc_block* block, size_t time, size_t member,
                                float* out, size_t n);

/* ---- File-level operations --------------------------------------------- */

typedef struct tc_run_options {
  int has_seed;      /* nonzero: seed overrides the configuration */
  uint64_t seed;
  unsigned jobs;     /* 0: keep the configured value */
} tc_run_options;

/* Heat index of paired temperature/dewpoint blocks. */
TC_API tc_status tc_heat_index_files(const char* t2m_path, const char* dewpoint_path,
                                     const char* out_path, uint64_t* clamped);
/* Member maxima over the given blocks; config_path may be NULL for defaults. */
TC_API tc_status tc_extract_files(const char* const* block_paths, size_t n,
                                  const char* config_path, const char* out_path);
/* Bayesian fit of every non-missing cell of a maxima file. */
TC_API tc_status tc_fit_file(const char* maxima_path, const char* config_path,
                             const tc_run_options* options, const char* summary_out,
                             const char* draws_out, uint64_t* not_converged);
/* Containment of the huge ensemble's empirical threshold in the posterior. */
TC_API tc_status tc_compare_files(const char* draws_path, const char* huge_maxima_path,
                                  const char* config_path, const char* result_out,
                                  const char* table_out);

/* ---- Pipeline ---------------------------------------------------------- */

typedef struct tc_run tc_run;

/* Diagnostics as a JSON array of {path, message}; *count is their number.
 * Returns TC_OK whenever the file was examined, valid or not. */
TC_API tc_status tc_config_validate(const char* config_path, char** diagnostics_json,
                                    size_t* count);
TC_API tc_status tc_run_open(const char* config_path, const tc_run_options* options,
                             tc_run** out);
TC_API void tc_run_free(tc_run* run);
/* stage NULL runs every stage; the manifest JSON is returned when
 * manifest_json is not NULL. */
TC_API tc_status tc_run_execute(tc_run* run, const char* stage, char** manifest_json);
TC_API uint64_t tc_run_convergence_warnings(const tc_run* run);
TC_API int tc_run_warning_exit_code(const tc_run* run);

#ifdef __cplusplus
}
#endif

#endif /* TAILCHECK_H */
