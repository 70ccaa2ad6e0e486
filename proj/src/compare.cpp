#include "tailcheck/compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tailcheck/error.hpp"
#include "tailcheck/extremes.hpp"

namespace tailcheck {

const char* to_string(ConfidenceCategory c) {
  switch (c) {
    case ConfidenceCategory::kVirtuallyCertain: return "VirtuallyCertain";
    case ConfidenceCategory::kExtremelyLikely: return "ExtremelyLikely";
    case ConfidenceCategory::kVeryLikely: return "VeryLikely";
    case ConfidenceCategory::kLikely: return "Likely";
    case ConfidenceCategory::kAboutAsLikelyAsNot: return "AboutAsLikelyAsNot";
    case ConfidenceCategory::kUnlikely: return "Unlikely";
    case ConfidenceCategory::kVeryUnlikely: return "VeryUnlikely";
    case ConfidenceCategory::kExceptionallyUnlikely:
      return "ExceptionallyUnlikely";
  }
  return "?";
}

void ConfidenceEdges::validate() const {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] > 0.0 && lower[i] <= 1.0))
      fail(ErrorCode::kConfig, "confidence edges must lie in (0, 1]");
    if (i > 0 && !(lower[i] < lower[i - 1]))
      fail(ErrorCode::kConfig, "confidence edges must be strictly decreasing");
  }
}

ConfidenceCategory confidence_category(double prob,
                                       const ConfidenceEdges& edges) {
  if (!(prob >= 0.0 && prob <= 1.0))
    fail(ErrorCode::kArgument, "probability outside [0, 1]");
  for (std::size_t i = 0; i < edges.lower.size(); ++i) {
    if (prob >= edges.lower[i]) return static_cast<ConfidenceCategory>(i);
  }
  return ConfidenceCategory::kExceptionallyUnlikely;
}

double containment_probability(std::span<const double> threshold_draws,
                               double target) {
  if (threshold_draws.empty())
    fail(ErrorCode::kArgument, "containment of an empty posterior");
  if (std::isnan(target)) fail(ErrorCode::kArgument, "target is NaN");
  std::size_t contained = 0;
  for (double z : threshold_draws)
    if (z >= target) ++contained;
  return double(contained) / double(threshold_draws.size());
}

double containment_probability(const PosteriorSamples& post, double p,
                               double target) {
  if (post.draws.empty())
    fail(ErrorCode::kArgument, "containment of an empty posterior");
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::kArgument, "probability outside (0, 1)");
  return containment_probability(posterior_quantile_draws(post, p), target);
}

Field difference_field(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "difference");
  if (a.units != b.units) fail(ErrorCode::kShape, "difference: unit mismatch");
  std::vector<double> out(a.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values[i] - b.values[i];
  return Field(a.grid, std::move(out), a.units);
}

ComparisonResult compare_thresholds(
    const std::vector<std::vector<double>>& threshold_draws,
    const Field& reference, const ConfidenceEdges& edges) {
  edges.validate();
  const std::size_t cells = reference.grid.size();
  if (threshold_draws.size() != cells)
    fail(ErrorCode::kShape, "one posterior per cell required");
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  ComparisonResult r;
  r.grid = reference.grid;
  r.units = reference.units;
  r.probability.assign(cells, kNaN);
  r.category.assign(cells, -1);
  r.difference.assign(cells, kNaN);
  r.gev_threshold.assign(cells, kNaN);
  r.reference = reference.values;
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& draws = threshold_draws[i];
    const double target = reference.values[i];
    if (draws.empty() || std::isnan(target)) continue;
    if (std::any_of(draws.begin(), draws.end(),
                    [](double v) { return std::isnan(v); }))
      continue;
    const double prob = containment_probability(draws, target);
    const double median = empirical_quantile(draws, 0.5);
    r.probability[i] = prob;
    r.category[i] = static_cast<std::int8_t>(confidence_category(prob, edges));
    r.gev_threshold[i] = median;
    r.difference[i] = median - target;
  }
  return r;
}

CategoryFractions category_fractions(const ComparisonResult& result,
                                     std::span<const std::uint8_t> selector,
                                     const Grid& grid) {
  require_same_grid(result.grid, grid, "category fractions");
  if (selector.size() != grid.size())
    fail(ErrorCode::kShape, "selector size does not match grid");
  std::array<CompensatedSum, kConfidenceCategoryCount> per;
  CompensatedSum missing;
  CompensatedSum total;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!selector[i]) continue;
    const double w = grid.weight(i);
    total.add(w);
    if (result.missing(i))
      missing.add(w);
    else
      per[std::size_t(result.category[i])].add(w);
  }
  if (!(total.value() > 0.0))
    fail(ErrorCode::kUndefinedFraction, "selector has no weighted cells");
  CategoryFractions out;
  for (int k = 0; k < kConfidenceCategoryCount; ++k)
    out.fraction[k] = per[k].value() / total.value();
  out.missing = missing.value() / total.value();
  return out;
}

}  // namespace tailcheck
