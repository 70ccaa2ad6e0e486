#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tailcheck/bayes.hpp"
#include "tailcheck/compare.hpp"
#include "tailcheck/extremes.hpp"

namespace tailcheck {

/// Parametric description of the synthetic truth: per-cell GEV with
///   location = location_base + location_lat_slope * |latitude|
/// and constant scale/shape. The huge ensemble's location is shifted by
/// huge_location_shift * scale.
struct SyntheticConfig {
  std::size_t nlat = 10;
  std::size_t nlon = 20;
  double lat_first = 60.0;
  double lat_last = -30.0;
  double location_base = 30.0;
  double location_lat_slope = -0.1;
  double scale = 2.0;
  double shape = -0.1;
  std::size_t small_members = 50;
  std::size_t huge_members = 7424;
  double huge_location_shift = 0.0;
  std::vector<std::string> init_dates{"2023-06-01", "2023-07-15"};
  double depression_min = 2.0;
  double depression_max = 15.0;
  /// "all": every cell is land; "random": seeded uniform fractions.
  std::string land = "random";

  Grid grid() const;
  std::vector<GevParams> cell_params(double location_shift_in_scales) const;
};

/// Block files of one ensemble, per variable, listed in init-date order.
struct EnsembleInputs {
  std::vector<std::filesystem::path> t2m;
  std::vector<std::filesystem::path> dewpoint;
};

struct FitConfig {
  /// Cells whose posterior draws are persisted; empty with retain_all false
  /// keeps none.
  bool retain_all = true;
  std::vector<std::size_t> retain_cells;
};

struct ReportConfig {
  double hist_lo = 0.0;
  double hist_hi = 60.0;
  double hist_width = 1.0;
  double low_containment = 0.33;
  bool render_maps = true;
};

inline constexpr const char* kEnsembleSmall = "small";
inline constexpr const char* kEnsembleHuge = "huge";
inline constexpr const char* kEnsembleObserved = "observed";

struct RunConfig {
  std::filesystem::path config_dir;  // relative paths resolve against this
  std::filesystem::path workspace;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  AnalysisConfig analysis;
  McmcConfig mcmc;
  ConfidenceEdges confidence_edges;
  std::optional<SyntheticConfig> synthetic;
  std::map<std::string, EnsembleInputs> inputs;  // small / huge / observed
  std::optional<std::filesystem::path> land_mask;
  std::vector<std::string> variables{"t2m", "heat_index"};
  FitConfig fit;
  ReportConfig report;
  int warning_exit_code = 3;

  bool wants(const std::string& variable) const;
};

struct Diagnostic {
  std::string path;  // dotted field path, e.g. "mcmc.burn_in"
  std::string message;
};

/// Every violated invariant, with field paths. Also checks that referenced
/// input files exist. No side effects.
std::vector<Diagnostic> validate_config(const std::filesystem::path& path);
std::vector<Diagnostic> validate_config_text(const std::string& text,
                                             const std::filesystem::path& base);

/// Parses and validates; throws kConfig listing the diagnostics on failure.
/// TAILCHECK_WORKSPACE and TAILCHECK_JOBS override the workspace root and
/// parallelism when set.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text,
                           const std::filesystem::path& base);

std::string diagnostics_json(const std::vector<Diagnostic>& diags);

}  // namespace tailcheck
