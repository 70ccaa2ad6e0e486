#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "tailcheck/tailcheck.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int report_failure(tc_status status) {
  nlohmann::json err = {{"status", tc_status_name(status)}};
  const std::string message = tc_last_error();
  auto parsed = nlohmann::json::parse(message, nullptr, false);
  if (status == TC_ERR_CONFIG && parsed.is_array())
    err["diagnostics"] = parsed;
  else
    err["message"] = message;
  std::cerr << nlohmann::json{{"error", err}}.dump() << "\n";
  return status == TC_ERR_CONFIG ? kExitValidation : kExitRuntime;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  tc_string_free(s);
  return out;
}

struct Common {
  std::string config;
  uint64_t seed = 0;
  unsigned jobs = 0;
  CLI::Option* seed_opt = nullptr;

  tc_run_options options() const {
    tc_run_options o{};
    o.has_seed = seed_opt && seed_opt->count() > 0;
    o.seed = seed;
    o.jobs = jobs;
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration file");
  c.seed_opt = cmd->add_option("--seed", c.seed, "override the global seed");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
}

int run_stage(const Common& c, const char* stage) {
  if (c.config.empty()) {
    std::cerr << nlohmann::json{{"error", {{"status", "argument"},
                                           {"message", "--config is required"}}}}
                     .dump()
              << "\n";
    return kExitValidation;
  }
  const tc_run_options o = c.options();
  tc_run* run = nullptr;
  if (tc_status s = tc_run_open(c.config.c_str(), &o, &run); s != TC_OK)
    return report_failure(s);
  char* manifest = nullptr;
  const tc_status s = tc_run_execute(run, stage, &manifest);
  const uint64_t warnings = tc_run_convergence_warnings(run);
  const int warning_code = tc_run_warning_exit_code(run);
  tc_run_free(run);
  if (s != TC_OK) return report_failure(s);
  std::cout << take(manifest) << "\n";
  if (warnings > 0) {
    std::cerr << nlohmann::json{{"warning", {{"convergence", warnings}}}}.dump() << "\n";
    return warning_code;
  }
  return kExitOk;
}

int warning_exit_code(const Common& c) {
  constexpr int kDefaultWarningCode = 3;
  if (c.config.empty()) return kDefaultWarningCode;
  tc_run* run = nullptr;
  if (tc_run_open(c.config.c_str(), nullptr, &run) != TC_OK) return kDefaultWarningCode;
  const int code = tc_run_warning_exit_code(run);
  tc_run_free(run);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble tail-risk checks with GEV posteriors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tc_version());

  Common synth_c, hi_c, extract_c, fit_c, compare_c, report_c, run_c;

  auto* synth = app.add_subcommand("synth", "generate the synthetic ensembles");
  add_common(synth, synth_c);

  auto* hi = app.add_subcommand("heat-index", "heat index from t2m and dewpoint blocks");
  add_common(hi, hi_c);
  std::string hi_t2m, hi_dew, hi_out;
  hi->add_option("--t2m", hi_t2m, "2 m temperature block");
  hi->add_option("--dewpoint", hi_dew, "dewpoint block");
  hi->add_option("--out", hi_out, "output block");

  auto* extract = app.add_subcommand("extract", "per-member seasonal maxima");
  add_common(extract, extract_c);
  std::vector<std::string> extract_files;
  std::string extract_out;
  extract->add_option("files", extract_files, "ensemble blocks");
  extract->add_option("--out", extract_out, "output maxima file");

  auto* fit = app.add_subcommand("fit", "Bayesian GEV fit per cell");
  add_common(fit, fit_c);
  std::string fit_maxima, fit_summary, fit_draws;
  fit->add_option("--maxima", fit_maxima, "member maxima file");
  fit->add_option("--summary-out", fit_summary, "posterior summary fields");
  fit->add_option("--draws-out", fit_draws, "posterior draws");

  auto* compare = app.add_subcommand("compare", "containment of huge-ensemble storylines");
  add_common(compare, compare_c);
  std::string cmp_draws, cmp_huge, cmp_out, cmp_table;
  compare->add_option("--draws", cmp_draws, "posterior draws from fit");
  compare->add_option("--huge", cmp_huge, "huge-ensemble maxima");
  compare->add_option("--out", cmp_out, "comparison fields");
  compare->add_option("--table", cmp_table, "category fraction csv");

  auto* report = app.add_subcommand("report", "summary tables and maps");
  add_common(report, report_c);

  auto* run = app.add_subcommand("run", "run the full pipeline");
  add_common(run, run_c);
  std::string run_stage_name;
  run->add_option("--stage", run_stage_name, "run a single stage")
      ->check(CLI::IsMember({"synth", "heat-index", "extract", "fit", "compare", "report"}));

  auto* validate = app.add_subcommand("validate", "check a run configuration");
  std::string validate_path;
  validate->add_option("--config", validate_path, "run configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*synth) return run_stage(synth_c, "synth");
  if (*report) return run_stage(report_c, "report");
  if (*run)
    return run_stage(run_c, run_stage_name.empty() ? nullptr : run_stage_name.c_str());

  if (*validate) {
    char* json = nullptr;
    size_t count = 0;
    if (tc_status s = tc_config_validate(validate_path.c_str(), &json, &count); s != TC_OK)
      return report_failure(s);
    const std::string diags = take(json);
    if (count == 0) {
      std::cout << "ok\n";
      return kExitOk;
    }
    std::cerr << nlohmann::json{{"error", {{"status", "config"},
                                           {"diagnostics", nlohmann::json::parse(diags)}}}}
                     .dump(2)
              << "\n";
    return kExitValidation;
  }

  if (*hi) {
    if (hi_t2m.empty() && hi_dew.empty() && hi_out.empty()) return run_stage(hi_c, "heat-index");
    uint64_t clamped = 0;
    if (tc_status s = tc_heat_index_files(hi_t2m.c_str(), hi_dew.c_str(), hi_out.c_str(),
                                          &clamped);
        s != TC_OK)
      return report_failure(s);
    if (clamped > 0) std::cerr << nlohmann::json{{"warning", {{"clamped", clamped}}}}.dump() << "\n";
    return kExitOk;
  }

  if (*extract) {
    if (extract_files.empty() && extract_out.empty()) return run_stage(extract_c, "extract");
    std::vector<const char*> paths;
    for (const auto& f : extract_files) paths.push_back(f.c_str());
    if (tc_status s = tc_extract_files(paths.data(), paths.size(),
                                       extract_c.config.empty() ? nullptr
                                                                : extract_c.config.c_str(),
                                       extract_out.c_str());
        s != TC_OK)
      return report_failure(s);
    return kExitOk;
  }

  if (*fit) {
    if (fit_maxima.empty() && fit_summary.empty() && fit_draws.empty())
      return run_stage(fit_c, "fit");
    const tc_run_options o = fit_c.options();
    uint64_t not_converged = 0;
    if (tc_status s = tc_fit_file(fit_maxima.c_str(),
                                  fit_c.config.empty() ? nullptr : fit_c.config.c_str(), &o,
                                  fit_summary.c_str(), fit_draws.c_str(), &not_converged);
        s != TC_OK)
      return report_failure(s);
    if (not_converged > 0) {
      std::cerr << nlohmann::json{{"warning", {{"convergence", not_converged}}}}.dump() << "\n";
      return warning_exit_code(fit_c);
    }
    return kExitOk;
  }

  if (*compare) {
    if (cmp_draws.empty() && cmp_huge.empty() && cmp_out.empty())
      return run_stage(compare_c, "compare");
    if (tc_status s = tc_compare_files(
            cmp_draws.c_str(), cmp_huge.c_str(),
            compare_c.config.empty() ? nullptr : compare_c.config.c_str(), cmp_out.c_str(),
            cmp_table.empty() ? nullptr : cmp_table.c_str());
        s != TC_OK)
      return report_failure(s);
    return kExitOk;
  }
  return kExitRuntime;
}
