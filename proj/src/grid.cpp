#include "tailcheck/grid.hpp"

#include <cmath>
#include <numbers>

#include "tailcheck/error.hpp"

namespace tailcheck {

namespace {

bool strictly_monotone(const std::vector<double>& axis) {
  if (axis.size() < 2) return true;
  const bool increasing = axis[1] > axis[0];
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (increasing ? !(axis[i] > axis[i - 1]) : !(axis[i] < axis[i - 1]))
      return false;
  }
  return true;
}

}  // namespace

Grid::Grid(std::vector<double> latitudes, std::vector<double> longitudes)
    : latitudes_(std::move(latitudes)), longitudes_(std::move(longitudes)) {
  if (latitudes_.empty() || longitudes_.empty())
    fail(ErrorCode::kArgument, "grid axes must be nonempty");
  for (double lat : latitudes_) {
    if (!(lat >= -90.0 && lat <= 90.0))
      fail(ErrorCode::kArgument, "latitude outside [-90, 90]");
  }
  for (double lon : longitudes_) {
    if (!(lon >= 0.0 && lon < 360.0))
      fail(ErrorCode::kArgument, "longitude outside [0, 360)");
  }
  if (!strictly_monotone(latitudes_) || !strictly_monotone(longitudes_))
    fail(ErrorCode::kArgument, "grid axes must be strictly monotone");
  row_weights_.reserve(latitudes_.size());
  for (double lat : latitudes_) row_weights_.push_back(area_weight(lat));
}

Grid Grid::uniform(std::size_t nlat, std::size_t nlon, double lat_first,
                   double lat_last, double lon_first) {
  if (nlat == 0 || nlon == 0)
    fail(ErrorCode::kArgument, "grid dimensions must be positive");
  std::vector<double> lats(nlat);
  const double dlat = nlat > 1 ? (lat_last - lat_first) / double(nlat - 1) : 0;
  for (std::size_t i = 0; i < nlat; ++i) lats[i] = lat_first + dlat * double(i);
  if (nlat > 1) lats.back() = lat_last;
  std::vector<double> lons(nlon);
  const double dlon = 360.0 / double(nlon);
  for (std::size_t j = 0; j < nlon; ++j)
    lons[j] = std::fmod(lon_first + dlon * double(j), 360.0);
  return Grid(std::move(lats), std::move(lons));
}

Field::Field(Grid g, std::vector<double> v, std::string u)
    : grid(std::move(g)), values(std::move(v)), units(std::move(u)) {
  if (values.size() != grid.size())
    fail(ErrorCode::kShape, "field value count does not match grid");
  for (double x : values) {
    if (std::isinf(x)) fail(ErrorCode::kData, "field contains infinite value");
  }
}

LandMask::LandMask(Grid g, std::vector<double> fraction)
    : grid(std::move(g)), land_fraction(std::move(fraction)) {
  if (land_fraction.size() != grid.size())
    fail(ErrorCode::kShape, "land mask size does not match grid");
  for (double f : land_fraction) {
    if (!(f >= 0.0 && f <= 1.0))
      fail(ErrorCode::kArgument, "land fraction outside [0, 1]");
  }
}

double area_weight(double latitude_deg) {
  if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0))
    fail(ErrorCode::kArgument, "latitude outside [-90, 90]");
  if (std::fabs(latitude_deg) == 90.0) return 0.0;
  return std::cos(latitude_deg * std::numbers::pi / 180.0);
}

CellMask land_selector(const LandMask& mask, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    fail(ErrorCode::kArgument, "land threshold outside [0, 1]");
  CellMask out(mask.land_fraction.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = mask.land_fraction[i] >= threshold ? 1 : 0;
  return out;
}

CellMask land_selector(const LandMask& mask, const Grid& context,
                       double threshold) {
  require_same_grid(mask.grid, context, "land mask");
  return land_selector(mask, threshold);
}

double weighted_fraction(std::span<const std::uint8_t> indicator,
                         std::span<const std::uint8_t> selector,
                         const Grid& grid) {
  if (indicator.size() != grid.size() || selector.size() != grid.size())
    fail(ErrorCode::kShape, "mask size does not match grid");
  CompensatedSum hit;
  CompensatedSum total;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!selector[i]) continue;
    const double w = grid.weight(i);
    total.add(w);
    if (indicator[i]) hit.add(w);
  }
  if (!(total.value() > 0.0))
    fail(ErrorCode::kUndefinedFraction, "selector has no weighted cells");
  return hit.value() / total.value();
}

CellMask present_cells(std::span<const std::uint8_t> selector,
                       std::initializer_list<const Field*> fields) {
  CellMask out(selector.begin(), selector.end());
  for (const Field* f : fields) {
    if (f->values.size() != out.size())
      fail(ErrorCode::kShape, "field size does not match selector");
    for (std::size_t i = 0; i < out.size(); ++i)
      if (std::isnan(f->values[i])) out[i] = 0;
  }
  return out;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b))
    fail(ErrorCode::kShape, std::string(what) + ": grid mismatch");
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

}  // namespace tailcheck
