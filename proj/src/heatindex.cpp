#include "tailcheck/heatindex.hpp"

#include <algorithm>
#include <cmath>

#include "tailcheck/error.hpp"

namespace tailcheck {

namespace {

constexpr double kMagnusA = 17.625;
constexpr double kMagnusB = 243.04;

double c_to_f(double c) { return c * 9.0 / 5.0 + 32.0; }
double f_to_c(double f) { return (f - 32.0) * 5.0 / 9.0; }

void check_physical(double c, const char* what) {
  if (!std::isfinite(c) || c < -100.0 || c > 70.0)
    fail(ErrorCode::kArgument, std::string(what) + " outside [-100, 70] degC");
}

// Scalar kernel without the dewpoint step, shared by the field paths.
double heat_index_pair(const HeatIndexKernel& kernel, double t, double td,
                       std::size_t& clamped) {
  if (std::isnan(t) || std::isnan(td)) return std::nan("");
  if (td > t) ++clamped;
  return kernel(t, dewpoint_to_rh(t, td));
}

}  // namespace

const char* to_string(RiskCategory c) {
  switch (c) {
    case RiskCategory::kBelow: return "Below";
    case RiskCategory::kCaution: return "Caution";
    case RiskCategory::kExtremeCaution: return "ExtremeCaution";
    case RiskCategory::kDanger: return "Danger";
    case RiskCategory::kExtremeDanger: return "ExtremeDanger";
  }
  return "?";
}

RiskCategory risk_category(double hi) {
  if (hi >= kRiskThresholdsC[3]) return RiskCategory::kExtremeDanger;
  if (hi >= kRiskThresholdsC[2]) return RiskCategory::kDanger;
  if (hi >= kRiskThresholdsC[1]) return RiskCategory::kExtremeCaution;
  if (hi >= kRiskThresholdsC[0]) return RiskCategory::kCaution;
  return RiskCategory::kBelow;
}

double dewpoint_to_rh(double t2m_c, double dewpoint_c) {
  check_physical(t2m_c, "temperature");
  check_physical(dewpoint_c, "dewpoint");
  const double td = std::min(dewpoint_c, t2m_c);
  return 100.0 * std::exp(kMagnusA * td / (kMagnusB + td) -
                          kMagnusA * t2m_c / (kMagnusB + t2m_c));
}

double RothfuszKernel::operator()(double t2m_c, double rh) const {
  if (!(rh >= 0.0 && rh <= 100.0))
    fail(ErrorCode::kArgument, "relative humidity outside [0, 100]");
  if (!std::isfinite(t2m_c)) fail(ErrorCode::kArgument, "temperature not finite");
  const double t = c_to_f(t2m_c);

  const double simple = 0.5 * (t + 61.0 + (t - 68.0) * 1.2 + rh * 0.094);
  if (0.5 * (simple + t) < 80.0) return f_to_c(simple);

  double hi = -42.379 + 2.04901523 * t + 10.14333127 * rh -
              0.22475541 * t * rh - 6.83783e-3 * t * t -
              5.481717e-2 * rh * rh + 1.22874e-3 * t * t * rh +
              8.5282e-4 * t * rh * rh - 1.99e-6 * t * t * rh * rh;
  if (rh < 13.0 && t >= 80.0 && t <= 112.0)
    hi -= (13.0 - rh) / 4.0 * std::sqrt((17.0 - std::fabs(t - 95.0)) / 17.0);
  else if (rh > 85.0 && t >= 80.0 && t <= 87.0)
    hi += (rh - 85.0) / 10.0 * ((87.0 - t) / 5.0);
  return f_to_c(hi);
}

double heat_index(double t2m_c, double rh_percent) {
  return RothfuszKernel{}(t2m_c, rh_percent);
}

HeatIndexFieldResult heat_index_field(const Field& t2m, const Field& dewpoint,
                                      const HeatIndexKernel& kernel) {
  require_same_grid(t2m.grid, dewpoint.grid, "heat index");
  HeatIndexFieldResult r;
  std::vector<double> out(t2m.values.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = heat_index_pair(kernel, t2m.values[i], dewpoint.values[i], r.clamped);
  r.field = Field(t2m.grid, std::move(out), "degC");
  return r;
}

HeatIndexBlockResult heat_index_block(const EnsembleBlock& t2m,
                                      const EnsembleBlock& dewpoint,
                                      const HeatIndexKernel& kernel) {
  require_same_grid(t2m.grid(), dewpoint.grid(), "heat index");
  if (t2m.n_members() != dewpoint.n_members() || t2m.times() != dewpoint.times())
    fail(ErrorCode::kShape, "temperature and dewpoint blocks are not paired");
  if (t2m.variable() != kVarT2m || dewpoint.variable() != kVarDewpoint)
    fail(ErrorCode::kArgument, "expected t2m and dewpoint blocks");
  std::size_t clamped = 0;
  const auto& tv = t2m.values();
  const auto& dv = dewpoint.values();
  std::vector<float> out(tv.size());
  for (std::size_t i = 0; i < tv.size(); ++i)
    out[i] = static_cast<float>(heat_index_pair(kernel, tv[i], dv[i], clamped));
  return {EnsembleBlock(t2m.grid(), kVarHeatIndex, "degC", t2m.n_members(),
                        t2m.times(), std::move(out)),
          clamped};
}

CategoryField risk_category_field(const Field& heat_index) {
  CategoryField out{heat_index.grid, {}};
  out.codes.reserve(heat_index.values.size());
  for (double v : heat_index.values)
    out.codes.push_back(std::isnan(v) ? std::int8_t(-1)
                                      : static_cast<std::int8_t>(risk_category(v)));
  return out;
}

}  // namespace tailcheck
