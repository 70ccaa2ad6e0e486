#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailcheck/grid.hpp"
#include "tailcheck/ingest.hpp"

namespace tailcheck {

/// NWS public-safety levels; thresholds 26, 32, 39, 51 degC, inclusive on
/// the hotter side.
enum class RiskCategory : std::int8_t {
  kBelow = 0,
  kCaution,
  kExtremeCaution,
  kDanger,
  kExtremeDanger,
};
inline constexpr int kRiskCategoryCount = 5;
inline constexpr double kRiskThresholdsC[4] = {26.0, 32.0, 39.0, 51.0};
const char* to_string(RiskCategory c);

RiskCategory risk_category(double heat_index_c);

/// Relative humidity (percent) from the Magnus ratio with a = 17.625,
/// b = 243.04 degC. A dewpoint above the temperature is clamped to it.
/// Inputs outside [-100, 70] degC are rejected.
double dewpoint_to_rh(double t2m_c, double dewpoint_c);

/// Pluggable humid-heat formula: temperature in degC, RH in percent.
class HeatIndexKernel {
 public:
  virtual ~HeatIndexKernel() = default;
  virtual double operator()(double t2m_c, double rh_percent) const = 0;
  virtual std::string name() const = 0;
};

/// NWS heat index: Steadman's simple form below 80 degF, otherwise the
/// Rothfusz regression with the low- and high-humidity adjustments.
class RothfuszKernel final : public HeatIndexKernel {
 public:
  double operator()(double t2m_c, double rh_percent) const override;
  std::string name() const override { return "nws-rothfusz"; }
};

/// Shorthand for RothfuszKernel{}(t2m_c, rh_percent).
double heat_index(double t2m_c, double rh_percent);

struct HeatIndexFieldResult {
  Field field;
  std::size_t clamped = 0;  // cells whose dewpoint exceeded the temperature
};

HeatIndexFieldResult heat_index_field(const Field& t2m, const Field& dewpoint,
                                      const HeatIndexKernel& kernel = RothfuszKernel{});

struct HeatIndexBlockResult {
  EnsembleBlock block;
  std::size_t clamped = 0;
};

/// Layer-by-layer heat index of paired temperature and dewpoint blocks.
HeatIndexBlockResult heat_index_block(const EnsembleBlock& t2m,
                                      const EnsembleBlock& dewpoint,
                                      const HeatIndexKernel& kernel = RothfuszKernel{});

/// Risk category per cell; -1 marks missing.
struct CategoryField {
  Grid grid;
  std::vector<std::int8_t> codes;
};
CategoryField risk_category_field(const Field& heat_index);

}  // namespace tailcheck
