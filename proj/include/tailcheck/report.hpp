#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tailcheck/compare.hpp"
#include "tailcheck/grid.hpp"
#include "tailcheck/heatindex.hpp"

namespace tailcheck {

/// How often, and by how much, field a exceeds field b over the selected
/// cells with both values present. Means are area weighted; statistics of
/// an empty group are NaN.
struct ExceedanceSummary {
  double fraction_a_greater = 0.0;   // a > b
  double fraction_b_at_least = 0.0;  // b >= a
  double mean_a_minus_b = 0.0;       // over a > b
  double max_a_minus_b = 0.0;
  double mean_b_minus_a = 0.0;       // over b >= a
  double max_b_minus_a = 0.0;
  std::size_t cells = 0;
};

ExceedanceSummary exceedance_report(const Field& a, const Field& b,
                                    std::span<const std::uint8_t> selector,
                                    const Grid& grid);

/// Area-weighted 2-D histogram; weights[ix * ny + iy] with nx, ny the bin
/// counts. The first and last bins on each axis are open ended.
struct JointHistogram {
  std::vector<double> x_edges;
  std::vector<double> y_edges;
  std::vector<double> weights;
  double total_weight = 0.0;

  std::size_t nx() const { return x_edges.size() - 1; }
  std::size_t ny() const { return y_edges.size() - 1; }
  double at(std::size_t ix, std::size_t iy) const { return weights[ix * ny() + iy]; }
};

/// Edges lo, lo + width, ..., hi.
std::vector<double> uniform_edges(double lo, double hi, double width);

JointHistogram joint_histogram(const Field& x, const Field& y,
                               std::span<const std::uint8_t> selector,
                               std::span<const double> x_edges,
                               std::span<const double> y_edges);

/// Area-weighted share of (from, to) risk-category pairs over selected cells
/// present in both fields.
struct TransitionTable {
  std::array<std::array<double, kRiskCategoryCount>, kRiskCategoryCount> fraction{};
};
TransitionTable category_transition_table(const CategoryField& from,
                                          const CategoryField& to,
                                          std::span<const std::uint8_t> selector,
                                          const Grid& grid);

/// Area-weighted share of each risk category over selected present cells.
std::array<double, kRiskCategoryCount> risk_category_fractions(
    const CategoryField& field, std::span<const std::uint8_t> selector,
    const Grid& grid);

// Rendering -----------------------------------------------------------------

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kMissingColor{128, 128, 128};

/// Blue-white-red ramp between lo and hi; values outside are clamped.
struct LinearPalette {
  double lo = 0.0;
  double hi = 1.0;
  Rgb color(double v) const;
  /// Range from the finite values of a field (a degenerate range is widened).
  static LinearPalette fit(const Field& field);
};

/// Fixed colors for the risk categories, Below first.
const std::array<Rgb, kRiskCategoryCount>& risk_palette();
/// Fixed colors for the confidence categories, VirtuallyCertain first.
const std::array<Rgb, kConfidenceCategoryCount>& confidence_palette();

/// Binary PPM (P6), one pixel per cell, north up and longitude increasing
/// to the right.
void render_map(const Field& field, const LinearPalette& palette,
                const std::filesystem::path& path);
/// Category codes (-1 missing) painted with `colors`.
void render_categories(const Grid& grid, std::span<const std::int8_t> codes,
                       std::span<const Rgb> colors,
                       const std::filesystem::path& path);

// CSV -----------------------------------------------------------------------

/// %.6g formatting used in every table; NaN renders as "nan".
std::string format_number(double v);

void write_exceedance_csv(
    const std::vector<std::pair<std::string, ExceedanceSummary>>& rows,
    const std::filesystem::path& path);
void write_histogram_csv(const JointHistogram& h,
                         const std::filesystem::path& path);
void write_transition_csv(const TransitionTable& t,
                          const std::filesystem::path& path);
void write_category_fractions_csv(const CategoryFractions& f,
                                  const std::filesystem::path& path);

}  // namespace tailcheck
