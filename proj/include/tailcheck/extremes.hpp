#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "tailcheck/grid.hpp"
#include "tailcheck/ingest.hpp"
#include "tailcheck/maxima.hpp"

namespace tailcheck {

struct MonthDay {
  int month = 1;
  int day = 1;
  auto operator<=>(const MonthDay&) const = default;
};

/// Parses "MM-DD" or the month-day part of "YYYY-MM-DD".
MonthDay parse_month_day(const std::string& text);

struct AnalysisConfig {
  double extreme_probability = 0.999;
  std::vector<int> lead_hours{240, 246, 252, 258};
  /// Inclusive; a start after the end wraps across the new year.
  MonthDay season_start{6, 1};
  MonthDay season_end{8, 31};
  double land_threshold = kDefaultLandThreshold;

  void validate() const;
  bool in_season(const std::string& init_date) const;
};

/// Streaming per-member maximum over every in-season layer whose lead time
/// is configured. Memory stays at one running value per (cell, member).
class MaximaAccumulator {
 public:
  explicit MaximaAccumulator(AnalysisConfig config);

  void add(const EnsembleBlock& block);
  std::size_t layers_consumed() const { return layers_; }
  MemberMaxima finish() const;

 private:
  AnalysisConfig config_;
  bool started_ = false;
  Grid grid_;
  std::string variable_;
  std::string units_;
  std::size_t n_members_ = 0;
  std::size_t layers_ = 0;
  std::vector<float> running_;          // [cell][member]
  std::vector<std::uint8_t> missing_;  // per cell
};

MemberMaxima extract_member_maxima(std::span<const EnsembleBlock> blocks,
                                   const AnalysisConfig& config);
/// Reads and folds the files one at a time.
MemberMaxima extract_member_maxima(
    std::span<const std::filesystem::path> block_files,
    const AnalysisConfig& config);

/// Linear interpolation between order statistics at one-based rank
/// h = (n - 1) p + 1. Throws kArgument on empty input or p outside [0, 1],
/// kData on NaN.
double empirical_quantile(std::span<const double> values, double p);

struct StorylineResult {
  Field field;
  std::size_t missing_cells = 0;
};

/// Per-cell empirical quantile of the member maxima.
StorylineResult storyline_field(const MemberMaxima& maxima, double p,
                                unsigned jobs = 1);
Field ensemble_max_field(const MemberMaxima& maxima);

}  // namespace tailcheck
