#include "tailcheck/tailcheck.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tailcheck/bayes.hpp"
#include "tailcheck/compare.hpp"
#include "tailcheck/config.hpp"
#include "tailcheck/error.hpp"
#include "tailcheck/extremes.hpp"
#include "tailcheck/gev.hpp"
#include "tailcheck/heatindex.hpp"
#include "tailcheck/ingest.hpp"
#include "tailcheck/pipeline.hpp"
#include "tailcheck/report.hpp"
#include "tailcheck/rng.hpp"

using namespace tailcheck;

struct tc_posterior {
  PosteriorSamples samples;
};

struct tc_block {
  EnsembleBlock block;
};

struct tc_run {
  RunConfig config;
  std::uint64_t convergence_warnings = 0;
};

namespace {

thread_local std::string g_last_error;

tc_status set_error(tc_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
tc_status guarded(Fn&& fn) {
  try {
    fn();
    return TC_OK;
  } catch (const Error& e) {
    return set_error(static_cast<tc_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(TC_ERR_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(TC_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(TC_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::kArgument, std::string(what) + " is NULL");
}

GevParams from_c(const tc_gev_params* p) {
  need(p, "params");
  return {p->location, p->scale, p->shape};
}

tc_gev_params to_c(const GevParams& p) { return {p.location, p.scale, p.shape}; }

std::span<const double> data_span(const double* data, size_t n) {
  if (n > 0) need(data, "data");
  return {data, n};
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

RunConfig config_or_default(const char* config_path) {
  if (config_path == nullptr) return RunConfig{};
  return load_run_config(config_path);
}

void apply(RunConfig& cfg, const tc_run_options* options) {
  if (options == nullptr) return;
  if (options->has_seed) cfg.seed = options->seed;
  if (options->jobs > 0) cfg.jobs = options->jobs;
}

}  // namespace

extern "C" {

const char* tc_version(void) { return "0.1.0"; }
const char* tc_last_error(void) { return g_last_error.c_str(); }
void tc_string_free(char* s) { std::free(s); }

const char* tc_status_name(tc_status status) {
  if (status == TC_OK) return "ok";
  if (status == TC_ERR_INTERNAL) return "internal";
  if (status >= TC_ERR_ARGUMENT && status <= TC_ERR_DATA)
    return to_string(static_cast<ErrorCode>(static_cast<int>(status)));
  return "unknown";
}

tc_status tc_gev_cdf(double x, const tc_gev_params* params, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = gev_cdf(x, from_c(params));
  });
}

tc_status tc_gev_quantile(double p, const tc_gev_params* params, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = gev_quantile(p, from_c(params));
  });
}

tc_status tc_gev_log_likelihood(const double* data, size_t n,
                                const tc_gev_params* params, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = gev_log_likelihood(data_span(data, n), from_c(params));
  });
}

tc_status tc_gev_lmoments_fit(const double* data, size_t n, tc_gev_params* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(lmoments_estimate(data_span(data, n)));
  });
}

tc_status tc_gev_mle_fit(const double* data, size_t n, const tc_gev_params* init,
                         tc_gev_params* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(mle_fit(data_span(data, n), from_c(init)));
  });
}

tc_status tc_empirical_quantile(const double* data, size_t n, double p, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = empirical_quantile(data_span(data, n), p);
  });
}

tc_status tc_area_weight(double latitude, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = area_weight(latitude);
  });
}

tc_status tc_confidence_category(double probability, int* out) {
  return guarded([&] {
    need(out, "out");
    *out = static_cast<int>(confidence_category(probability));
  });
}

const char* tc_confidence_category_name(int category) {
  if (category < 0 || category >= kConfidenceCategoryCount) return "Missing";
  return to_string(static_cast<ConfidenceCategory>(category));
}

tc_status tc_dewpoint_to_rh(double t2m_c, double dewpoint_c, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = dewpoint_to_rh(t2m_c, dewpoint_c);
  });
}

tc_status tc_heat_index(double t2m_c, double rh_percent, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = heat_index(t2m_c, rh_percent);
  });
}

tc_status tc_risk_category(double heat_index_c, int* out) {
  return guarded([&] {
    need(out, "out");
    if (!std::isfinite(heat_index_c))
      fail(ErrorCode::kArgument, "heat index must be finite");
    *out = static_cast<int>(risk_category(heat_index_c));
  });
}

const char* tc_risk_category_name(int category) {
  if (category < 0 || category >= kRiskCategoryCount) return "Missing";
  return to_string(static_cast<RiskCategory>(category));
}

void tc_mcmc_config_default(tc_mcmc_config* out) {
  if (out == nullptr) return;
  const McmcConfig d;
  *out = {d.chains, d.iterations, d.burn_in, d.thin, d.adapt_window,
          d.target_acceptance, d.seed};
}

tc_status tc_bayes_fit(const double* data, size_t n, const tc_mcmc_config* config,
                       tc_posterior** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    McmcConfig cfg;
    if (config != nullptr) {
      cfg.chains = config->chains;
      cfg.iterations = config->iterations;
      cfg.burn_in = config->burn_in;
      cfg.thin = config->thin;
      cfg.adapt_window = config->adapt_window;
      cfg.target_acceptance = config->target_acceptance;
      cfg.seed = config->seed;
    }
    *out = new tc_posterior{bayes_fit(data_span(data, n), cfg)};
  });
}

void tc_posterior_free(tc_posterior* post) { delete post; }

size_t tc_posterior_size(const tc_posterior* post) {
  return post ? post->samples.draws.size() : 0;
}

tc_status tc_posterior_draw(const tc_posterior* post, size_t index, tc_gev_params* out) {
  return guarded([&] {
    need(post, "posterior");
    need(out, "out");
    if (index >= post->samples.draws.size())
      fail(ErrorCode::kArgument, "draw index out of range");
    *out = to_c(post->samples.draws[index]);
  });
}

tc_status tc_posterior_rhat(const tc_posterior* post, double out[3]) {
  return guarded([&] {
    need(post, "posterior");
    need(out, "out");
    for (int j = 0; j < 3; ++j) out[j] = post->samples.diagnostics.rhat[j];
  });
}

int tc_posterior_converged(const tc_posterior* post) {
  return post && post->samples.diagnostics.converged ? 1 : 0;
}

tc_status tc_posterior_quantile_draws(const tc_posterior* post, double p, double* out,
                                      size_t n) {
  return guarded([&] {
    need(post, "posterior");
    need(out, "out");
    if (n != post->samples.draws.size())
      fail(ErrorCode::kShape, "output length must equal the draw count");
    const auto z = posterior_quantile_draws(post->samples, p);
    std::copy(z.begin(), z.end(), out);
  });
}

tc_status tc_posterior_containment(const tc_posterior* post, double p, double target,
                                   double* out) {
  return guarded([&] {
    need(post, "posterior");
    need(out, "out");
    *out = containment_probability(post->samples, p, target);
  });
}

tc_status tc_block_read(const char* path, tc_block** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    *out = new tc_block{read_block(path)};
  });
}

tc_status tc_block_write(const tc_block* block, const char* path) {
  return guarded([&] {
    need(block, "block");
    need(path, "path");
    write_block(block->block, path);
  });
}

void tc_block_free(tc_block* block) { delete block; }

tc_status tc_block_dims(const tc_block* block, size_t* nlat, size_t* nlon,
                        size_t* n_members, size_t* n_times) {
  return guarded([&] {
    need(block, "block");
    const auto& b = block->block;
    if (nlat) *nlat = b.grid().nlat();
    if (nlon) *nlon = b.grid().nlon();
    if (n_members) *n_members = b.n_members();
    if (n_times) *n_times = b.times().size();
  });
}

const char* tc_block_variable(const tc_block* block) {
  return block ? block->block.variable().c_str() : "";
}

tc_status tc_block_layer(const tc_block* block, size_t time, size_t member, float* out,
                         size_t n) {
  return guarded([&] {
    need(block, "block");
    need(out, "out");
    const auto& b = block->block;
    if (time >= b.times().size() || member >= b.n_members())
      fail(ErrorCode::kArgument, "layer index out of range");
    if (n != b.grid().size()) fail(ErrorCode::kShape, "output length must equal cells");
    const auto layer = b.layer(time, member);
    std::copy(layer.begin(), layer.end(), out);
  });
}

tc_status tc_heat_index_files(const char* t2m_path, const char* dewpoint_path,
                              const char* out_path, uint64_t* clamped) {
  return guarded([&] {
    need(t2m_path, "t2m_path");
    need(dewpoint_path, "dewpoint_path");
    need(out_path, "out_path");
    auto r = heat_index_block(read_block(t2m_path), read_block(dewpoint_path));
    write_block(r.block, out_path);
    if (clamped) *clamped = r.clamped;
  });
}

tc_status tc_extract_files(const char* const* block_paths, size_t n,
                           const char* config_path, const char* out_path) {
  return guarded([&] {
    need(out_path, "out_path");
    if (n > 0) need(block_paths, "block_paths");
    if (n == 0) fail(ErrorCode::kArgument, "no block files given");
    const RunConfig cfg = config_or_default(config_path);
    std::vector<std::filesystem::path> files;
    for (size_t i = 0; i < n; ++i) {
      need(block_paths[i], "block path");
      files.emplace_back(block_paths[i]);
    }
    write_maxima(extract_member_maxima(files, cfg.analysis), out_path);
  });
}

tc_status tc_fit_file(const char* maxima_path, const char* config_path,
                      const tc_run_options* options, const char* summary_out,
                      const char* draws_out, uint64_t* not_converged) {
  return guarded([&] {
    need(maxima_path, "maxima_path");
    need(summary_out, "summary_out");
    need(draws_out, "draws_out");
    RunConfig cfg = config_or_default(config_path);
    apply(cfg, options);
    const MemberMaxima maxima = read_maxima(maxima_path);
    const CellMask all(maxima.grid.size(), 1);
    const FitOutcome fit = fit_cells(maxima, all, cfg.mcmc,
                                     mix_seed(cfg.seed, 0, kFitStage), cfg.jobs);
    write_fields(posterior_summary_fields(fit, cfg.analysis.extreme_probability,
                                          maxima.variable),
                 summary_out);
    write_container(posterior_draws_container(fit, cfg.fit, maxima.variable), draws_out);
    if (not_converged) *not_converged = fit.not_converged;
  });
}

tc_status tc_compare_files(const char* draws_path, const char* huge_maxima_path,
                           const char* config_path, const char* result_out,
                           const char* table_out) {
  return guarded([&] {
    need(draws_path, "draws_path");
    need(huge_maxima_path, "huge_maxima_path");
    need(result_out, "result_out");
    const RunConfig cfg = config_or_default(config_path);
    const double p = cfg.analysis.extreme_probability;
    const Container draws = read_container(draws_path);
    const MemberMaxima huge = read_maxima(huge_maxima_path);
    require_same_grid(draws.grid, huge.grid, "compare");
    const ComparisonResult result =
        compare_thresholds(threshold_draws_from(draws, p),
                           storyline_field(huge, p, cfg.jobs).field,
                           cfg.confidence_edges);
    write_fields(comparison_fields(result, huge.variable), result_out);
    if (table_out) {
      const CellMask all(result.grid.size(), 1);
      write_category_fractions_csv(category_fractions(result, all, result.grid),
                                   table_out);
    }
  });
}

tc_status tc_config_validate(const char* config_path, char** diagnostics_json_out,
                             size_t* count) {
  return guarded([&] {
    need(config_path, "config_path");
    const auto diags = validate_config(config_path);
    if (count) *count = diags.size();
    if (diagnostics_json_out) *diagnostics_json_out = dup_string(diagnostics_json(diags));
  });
}

tc_status tc_run_open(const char* config_path, const tc_run_options* options,
                      tc_run** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = nullptr;
    auto run = std::make_unique<tc_run>();
    run->config = load_run_config(config_path);
    apply(run->config, options);
    *out = run.release();
  });
}

void tc_run_free(tc_run* run) { delete run; }

tc_status tc_run_execute(tc_run* run, const char* stage, char** manifest_json) {
  return guarded([&] {
    need(run, "run");
    PipelineResult result;
    if (stage == nullptr) {
      result = run_pipeline(run->config);
    } else {
      const auto s = parse_stage(stage);
      if (!s) fail(ErrorCode::kArgument, std::string("unknown stage '") + stage + "'");
      result = run_single_stage(run->config, *s);
    }
    run->convergence_warnings += result.convergence_warnings;
    if (manifest_json) {
      std::ifstream in(result.manifest_path);
      std::stringstream ss;
      ss << in.rdbuf();
      *manifest_json = dup_string(ss.str());
    }
  });
}

uint64_t tc_run_convergence_warnings(const tc_run* run) {
  return run ? run->convergence_warnings : 0;
}

int tc_run_warning_exit_code(const tc_run* run) {
  return run ? run->config.warning_exit_code : 0;
}

}  // extern "C"
