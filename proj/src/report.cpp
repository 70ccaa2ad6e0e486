#include "tailcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "tailcheck/error.hpp"

namespace tailcheck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_selector(std::span<const std::uint8_t> selector, const Grid& grid) {
  if (selector.size() != grid.size())
    fail(ErrorCode::kShape, "selector size does not match grid");
}

void check_edges(std::span<const double> edges) {
  if (edges.size() < 2) fail(ErrorCode::kArgument, "need at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      fail(ErrorCode::kArgument, "histogram edges must be strictly increasing");
}

std::size_t bin_of(std::span<const double> edges, double v) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), v);
  const auto idx = std::ptrdiff_t(it - edges.begin()) - 1;
  const auto last = std::ptrdiff_t(edges.size()) - 2;
  return std::size_t(std::clamp<std::ptrdiff_t>(idx, 0, last));
}

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

ExceedanceSummary exceedance_report(const Field& a, const Field& b,
                                    std::span<const std::uint8_t> selector,
                                    const Grid& grid) {
  require_same_grid(a.grid, grid, "exceedance");
  require_same_grid(b.grid, grid, "exceedance");
  if (a.units != b.units) fail(ErrorCode::kShape, "exceedance: unit mismatch");
  check_selector(selector, grid);

  CompensatedSum total, above, above_diff, below, below_diff;
  double max_above = -std::numeric_limits<double>::infinity();
  double max_below = -std::numeric_limits<double>::infinity();
  ExceedanceSummary s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!selector[i]) continue;
    const double x = a.values[i], y = b.values[i];
    if (std::isnan(x) || std::isnan(y)) continue;
    const double w = grid.weight(i);
    ++s.cells;
    total.add(w);
    if (x > y) {
      above.add(w);
      above_diff.add(w * (x - y));
      max_above = std::max(max_above, x - y);
    } else {
      below.add(w);
      below_diff.add(w * (y - x));
      max_below = std::max(max_below, y - x);
    }
  }
  if (!(total.value() > 0.0))
    fail(ErrorCode::kUndefinedFraction, "selector has no weighted cells");
  s.fraction_a_greater = above.value() / total.value();
  s.fraction_b_at_least = below.value() / total.value();
  const bool any_above = above.value() > 0.0;
  const bool any_below = below.value() > 0.0;
  s.mean_a_minus_b = any_above ? above_diff.value() / above.value() : kNaN;
  s.max_a_minus_b = any_above ? max_above : kNaN;
  s.mean_b_minus_a = any_below ? below_diff.value() / below.value() : kNaN;
  s.max_b_minus_a = any_below ? max_below : kNaN;
  return s;
}

std::vector<double> uniform_edges(double lo, double hi, double width) {
  if (!(hi > lo) || !(width > 0.0))
    fail(ErrorCode::kArgument, "invalid histogram range");
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / width));
  std::vector<double> edges(n + 1);
  for (std::size_t i = 0; i <= n; ++i) edges[i] = lo + width * double(i);
  edges.back() = hi;
  return edges;
}

JointHistogram joint_histogram(const Field& x, const Field& y,
                               std::span<const std::uint8_t> selector,
                               std::span<const double> x_edges,
                               std::span<const double> y_edges) {
  require_same_grid(x.grid, y.grid, "joint histogram");
  check_selector(selector, x.grid);
  check_edges(x_edges);
  check_edges(y_edges);
  JointHistogram h;
  h.x_edges.assign(x_edges.begin(), x_edges.end());
  h.y_edges.assign(y_edges.begin(), y_edges.end());
  std::vector<CompensatedSum> bins(h.nx() * h.ny());
  CompensatedSum total;
  for (std::size_t i = 0; i < x.grid.size(); ++i) {
    if (!selector[i]) continue;
    const double xv = x.values[i], yv = y.values[i];
    if (std::isnan(xv) || std::isnan(yv)) continue;
    const double w = x.grid.weight(i);
    bins[bin_of(x_edges, xv) * h.ny() + bin_of(y_edges, yv)].add(w);
    total.add(w);
  }
  h.weights.reserve(bins.size());
  for (const auto& b : bins) h.weights.push_back(b.value());
  h.total_weight = total.value();
  return h;
}

TransitionTable category_transition_table(const CategoryField& from,
                                          const CategoryField& to,
                                          std::span<const std::uint8_t> selector,
                                          const Grid& grid) {
  require_same_grid(from.grid, grid, "transition table");
  require_same_grid(to.grid, grid, "transition table");
  check_selector(selector, grid);
  std::array<std::array<CompensatedSum, kRiskCategoryCount>, kRiskCategoryCount>
      sums;
  CompensatedSum total;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!selector[i] || from.codes[i] < 0 || to.codes[i] < 0) continue;
    const double w = grid.weight(i);
    sums[std::size_t(from.codes[i])][std::size_t(to.codes[i])].add(w);
    total.add(w);
  }
  if (!(total.value() > 0.0))
    fail(ErrorCode::kUndefinedFraction, "selector has no weighted cells");
  TransitionTable t;
  for (int r = 0; r < kRiskCategoryCount; ++r)
    for (int c = 0; c < kRiskCategoryCount; ++c)
      t.fraction[r][c] = sums[r][c].value() / total.value();
  return t;
}

std::array<double, kRiskCategoryCount> risk_category_fractions(
    const CategoryField& field, std::span<const std::uint8_t> selector,
    const Grid& grid) {
  require_same_grid(field.grid, grid, "risk fractions");
  check_selector(selector, grid);
  std::array<CompensatedSum, kRiskCategoryCount> sums;
  CompensatedSum total;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!selector[i] || field.codes[i] < 0) continue;
    const double w = grid.weight(i);
    sums[std::size_t(field.codes[i])].add(w);
    total.add(w);
  }
  if (!(total.value() > 0.0))
    fail(ErrorCode::kUndefinedFraction, "selector has no weighted cells");
  std::array<double, kRiskCategoryCount> out{};
  for (int k = 0; k < kRiskCategoryCount; ++k)
    out[k] = sums[k].value() / total.value();
  return out;
}

Rgb LinearPalette::color(double v) const {
  if (std::isnan(v)) return kMissingColor;
  double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  t = std::clamp(t, 0.0, 1.0);
  // Blue (0) -> white (0.5) -> red (1).
  auto channel = [](double x) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
  };
  if (t < 0.5) {
    const double s = t / 0.5;
    return {channel(s), channel(s), 255};
  }
  const double s = (1.0 - t) / 0.5;
  return {255, channel(s), channel(s)};
}

LinearPalette LinearPalette::fit(const Field& field) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : field.values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi >= lo)) return {0.0, 1.0};
  if (hi == lo) return {lo - 1.0, hi + 1.0};
  return {lo, hi};
}

const std::array<Rgb, kRiskCategoryCount>& risk_palette() {
  static const std::array<Rgb, kRiskCategoryCount> colors{{
      {230, 230, 230},  // below
      {255, 255, 128},  // caution
      {255, 204, 0},    // extreme caution
      {255, 102, 0},    // danger
      {204, 0, 0},      // extreme danger
  }};
  return colors;
}

const std::array<Rgb, kConfidenceCategoryCount>& confidence_palette() {
  // Dark for contained, light where the reference threshold is more extreme.
  static const std::array<Rgb, kConfidenceCategoryCount> colors{{
      {8, 48, 107},
      {8, 81, 156},
      {33, 113, 181},
      {66, 146, 198},
      {107, 174, 214},
      {158, 202, 225},
      {198, 219, 239},
      {239, 243, 255},
  }};
  return colors;
}

namespace {

// Rows are emitted north to south whatever the storage order.
std::vector<std::size_t> rows_north_first(const Grid& grid) {
  std::vector<std::size_t> rows(grid.nlat());
  std::iota(rows.begin(), rows.end(), 0);
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return grid.latitudes()[a] > grid.latitudes()[b];
  });
  return rows;
}

std::vector<std::size_t> columns_west_first(const Grid& grid) {
  std::vector<std::size_t> cols(grid.nlon());
  std::iota(cols.begin(), cols.end(), 0);
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return grid.longitudes()[a] < grid.longitudes()[b];
  });
  return cols;
}

template <typename ColorOf>
void write_ppm(const Grid& grid, ColorOf color_of,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out << "P6\n" << grid.nlon() << ' ' << grid.nlat() << "\n255\n";
  const auto cols = columns_west_first(grid);
  for (std::size_t r : rows_north_first(grid)) {
    for (std::size_t c : cols) {
      const Rgb px = color_of(r * grid.nlon() + c);
      const char bytes[3] = {char(px.r), char(px.g), char(px.b)};
      out.write(bytes, 3);
    }
  }
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

void render_map(const Field& field, const LinearPalette& palette,
                const std::filesystem::path& path) {
  write_ppm(field.grid, [&](std::size_t i) { return palette.color(field.values[i]); },
            path);
}

void render_categories(const Grid& grid, std::span<const std::int8_t> codes,
                       std::span<const Rgb> colors,
                       const std::filesystem::path& path) {
  if (codes.size() != grid.size())
    fail(ErrorCode::kShape, "category codes do not match grid");
  for (auto c : codes)
    if (c >= 0 && std::size_t(c) >= colors.size())
      fail(ErrorCode::kArgument, "category code without a palette color");
  write_ppm(grid,
            [&](std::size_t i) {
              return codes[i] < 0 ? kMissingColor : colors[std::size_t(codes[i])];
            },
            path);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_exceedance_csv(
    const std::vector<std::pair<std::string, ExceedanceSummary>>& rows,
    const std::filesystem::path& path) {
  auto out = open_text(path);
  out << "comparison,cells,fraction_a_gt_b,fraction_b_ge_a,mean_a_minus_b,"
         "max_a_minus_b,mean_b_minus_a,max_b_minus_a\n";
  for (const auto& [name, s] : rows) {
    out << name << ',' << s.cells << ',' << format_number(s.fraction_a_greater)
        << ',' << format_number(s.fraction_b_at_least) << ','
        << format_number(s.mean_a_minus_b) << ',' << format_number(s.max_a_minus_b)
        << ',' << format_number(s.mean_b_minus_a) << ','
        << format_number(s.max_b_minus_a) << '\n';
  }
  finish(out, path);
}

void write_histogram_csv(const JointHistogram& h,
                         const std::filesystem::path& path) {
  auto out = open_text(path);
  out << "x_lo,x_hi,y_lo,y_hi,weight,fraction\n";
  for (std::size_t ix = 0; ix < h.nx(); ++ix) {
    for (std::size_t iy = 0; iy < h.ny(); ++iy) {
      const double w = h.at(ix, iy);
      if (w == 0.0) continue;
      out << format_number(h.x_edges[ix]) << ',' << format_number(h.x_edges[ix + 1])
          << ',' << format_number(h.y_edges[iy]) << ','
          << format_number(h.y_edges[iy + 1]) << ',' << format_number(w) << ','
          << format_number(h.total_weight > 0 ? w / h.total_weight : kNaN) << '\n';
    }
  }
  finish(out, path);
}

void write_transition_csv(const TransitionTable& t,
                          const std::filesystem::path& path) {
  auto out = open_text(path);
  out << "from,to,fraction\n";
  for (int r = 0; r < kRiskCategoryCount; ++r)
    for (int c = 0; c < kRiskCategoryCount; ++c)
      out << to_string(RiskCategory(r)) << ',' << to_string(RiskCategory(c))
          << ',' << format_number(t.fraction[r][c]) << '\n';
  finish(out, path);
}

void write_category_fractions_csv(const CategoryFractions& f,
                                  const std::filesystem::path& path) {
  auto out = open_text(path);
  out << "category,fraction\n";
  for (int k = 0; k < kConfidenceCategoryCount; ++k)
    out << to_string(ConfidenceCategory(k)) << ',' << format_number(f.fraction[k])
        << '\n';
  out << "Missing," << format_number(f.missing) << '\n';
  finish(out, path);
}

}  // namespace tailcheck
