#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tailcheck/bayes.hpp"
#include "tailcheck/grid.hpp"

namespace tailcheck {

/// Likelihood language for a probability, most to least likely.
enum class ConfidenceCategory : std::int8_t {
  kVirtuallyCertain = 0,
  kExtremelyLikely,
  kVeryLikely,
  kLikely,
  kAboutAsLikelyAsNot,
  kUnlikely,
  kVeryUnlikely,
  kExceptionallyUnlikely,
};
inline constexpr int kConfidenceCategoryCount = 8;
const char* to_string(ConfidenceCategory c);

/// Lower edges of the seven upper categories, left-closed. A probability
/// below the last edge is ExceptionallyUnlikely.
struct ConfidenceEdges {
  std::array<double, 7> lower{0.99, 0.95, 0.90, 0.66, 0.33, 0.10, 0.01};
  void validate() const;
};

ConfidenceCategory confidence_category(double prob,
                                       const ConfidenceEdges& edges = {});

/// Share of posterior draws whose p-quantile is >= target.
double containment_probability(const PosteriorSamples& post, double p,
                               double target);
/// Same from precomputed threshold draws.
double containment_probability(std::span<const double> threshold_draws,
                               double target);

/// Pointwise a - b. Missing in either input gives missing.
Field difference_field(const Field& a, const Field& b);

/// Per-cell comparison of GEV-extrapolated thresholds against a reference
/// (huge-ensemble) threshold. Missing cells hold NaN / category -1.
struct ComparisonResult {
  Grid grid;
  std::string units;                    // of the threshold layers
  std::vector<double> probability;
  std::vector<std::int8_t> category;
  std::vector<double> difference;       // posterior median minus reference
  std::vector<double> gev_threshold;    // posterior median threshold
  std::vector<double> reference;

  bool missing(std::size_t i) const { return category[i] < 0; }
};

/// threshold_draws[i] holds cell i's posterior threshold draws; an empty
/// entry marks the cell missing.
ComparisonResult compare_thresholds(
    const std::vector<std::vector<double>>& threshold_draws,
    const Field& reference, const ConfidenceEdges& edges = {});

struct CategoryFractions {
  std::array<double, kConfidenceCategoryCount> fraction{};
  double missing = 0.0;
};

/// Area-weighted share of the selected cells in each category; missing
/// cells are tallied separately so everything sums to one.
CategoryFractions category_fractions(const ComparisonResult& result,
                                     std::span<const std::uint8_t> selector,
                                     const Grid& grid);

}  // namespace tailcheck
