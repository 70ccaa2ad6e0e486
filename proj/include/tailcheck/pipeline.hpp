#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tailcheck/bayes.hpp"
#include "tailcheck/compare.hpp"
#include "tailcheck/config.hpp"
#include "tailcheck/grid.hpp"
#include "tailcheck/ingest.hpp"
#include "tailcheck/maxima.hpp"

namespace tailcheck {

enum class Stage { kSynth, kHeatIndex, kExtract, kFit, kCompare, kReport };
const char* to_string(Stage s);
std::optional<Stage> parse_stage(const std::string& name);

struct ManifestEntry {
  std::string path;  // relative to the workspace
  std::string sha256;
  std::uint64_t bytes = 0;
};

struct StageReport {
  Stage stage = Stage::kSynth;
  std::vector<ManifestEntry> files;
  std::map<std::string, std::uint64_t> warnings;
};

struct PipelineResult {
  std::vector<StageReport> stages;
  std::filesystem::path manifest_path;
  std::uint64_t convergence_warnings = 0;
};

/// Stages that apply to this configuration, in execution order.
std::vector<Stage> planned_stages(const RunConfig& config);

/// Runs every planned stage and writes <workspace>/manifest.json.
PipelineResult run_pipeline(const RunConfig& config);
/// Runs one stage from its persisted inputs and replaces that stage's
/// entries in the manifest.
PipelineResult run_single_stage(const RunConfig& config, Stage stage);

std::string sha256_file(const std::filesystem::path& path);

// Building blocks shared with the stand-alone subcommands ------------------

/// Per-cell Bayesian fit of member maxima. Cells not selected (or missing)
/// are skipped. Cell i is fitted with seed mix_seed(seed, i, kFitStage).
struct FitOutcome {
  Grid grid;
  std::string units;
  std::vector<std::optional<PosteriorSamples>> posteriors;
  std::size_t fitted = 0;
  std::size_t failed = 0;
  std::size_t not_converged = 0;
};
inline constexpr std::uint64_t kFitStage = 21;

FitOutcome fit_cells(const MemberMaxima& maxima,
                     const std::vector<std::uint8_t>& selector,
                     McmcConfig mcmc, std::uint64_t seed, unsigned jobs);

/// Layers: {location,scale,shape,threshold}_{q05,median,q95}, max_rhat,
/// acceptance, converged.
FieldSet posterior_summary_fields(const FitOutcome& fit, double p,
                                  const std::string& variable);
/// Draw container for the retained cells (others NaN).
Container posterior_draws_container(const FitOutcome& fit,
                                    const FitConfig& retain,
                                    const std::string& variable);
/// Threshold draws per cell from a draws container; empty when missing.
std::vector<std::vector<double>> threshold_draws_from(const Container& draws,
                                                      double p);

/// Layers: probability, category, difference, gev_threshold, reference.
FieldSet comparison_fields(const ComparisonResult& result,
                           const std::string& variable);
ComparisonResult comparison_from_fields(const FieldSet& set);

}  // namespace tailcheck
