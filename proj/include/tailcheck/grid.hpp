#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tailcheck {

/// Regular latitude-longitude lattice. Cells are ordered row-major, latitude
/// first, so cell = row * nlon + column.
class Grid {
 public:
  Grid() = default;
  /// Latitudes must lie in [-90, 90] and longitudes in [0, 360); each axis
  /// must be strictly monotone (either direction).
  Grid(std::vector<double> latitudes, std::vector<double> longitudes);

  /// Evenly spaced axes: nlat latitudes from lat_first to lat_last inclusive,
  /// nlon longitudes starting at lon_first with spacing 360/nlon.
  static Grid uniform(std::size_t nlat, std::size_t nlon, double lat_first,
                      double lat_last, double lon_first = 0.0);

  std::size_t nlat() const { return latitudes_.size(); }
  std::size_t nlon() const { return longitudes_.size(); }
  std::size_t size() const { return nlat() * nlon(); }

  const std::vector<double>& latitudes() const { return latitudes_; }
  const std::vector<double>& longitudes() const { return longitudes_; }

  double latitude_of(std::size_t cell) const {
    return latitudes_[cell / nlon()];
  }
  /// cos(latitude) of the cell's row.
  double weight(std::size_t cell) const { return row_weights_[cell / nlon()]; }

  bool operator==(const Grid& other) const {
    return latitudes_ == other.latitudes_ && longitudes_ == other.longitudes_;
  }

 private:
  std::vector<double> latitudes_;
  std::vector<double> longitudes_;
  std::vector<double> row_weights_;
};

/// One real value per cell; NaN marks a missing cell.
struct Field {
  Field() = default;
  Field(Grid grid, std::vector<double> values, std::string units);

  Grid grid;
  std::vector<double> values;
  std::string units;
};

struct LandMask {
  LandMask() = default;
  LandMask(Grid grid, std::vector<double> land_fraction);

  Grid grid;
  std::vector<double> land_fraction;
};

/// Per-cell boolean layer (0 or 1). Kept as bytes so it can be viewed as a
/// span and shared with the C API.
using CellMask = std::vector<std::uint8_t>;

inline constexpr double kDefaultLandThreshold = 0.75;

/// Cosine of the latitude; zero at the poles.
double area_weight(double latitude_deg);

/// Selects cells with land fraction >= threshold.
CellMask land_selector(const LandMask& mask,
                       double threshold = kDefaultLandThreshold);
/// Same, but first checks that the mask lives on `context`.
CellMask land_selector(const LandMask& mask, const Grid& context,
                       double threshold = kDefaultLandThreshold);

/// Area-weighted share of selected cells where the indicator holds.
/// Throws kUndefinedFraction when nothing is selected.
double weighted_fraction(std::span<const std::uint8_t> indicator,
                         std::span<const std::uint8_t> selector,
                         const Grid& grid);

/// Selector restricted to cells whose value in every given field is present.
CellMask present_cells(std::span<const std::uint8_t> selector,
                       std::initializer_list<const Field*> fields);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace tailcheck
