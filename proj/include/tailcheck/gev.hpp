#pragma once

#include <span>
#include <string>

#include "tailcheck/error.hpp"

namespace tailcheck {

/// Generalized extreme value parameters: location and scale in data units,
/// shape dimensionless. shape > 0 is heavy tailed, shape < 0 has a finite
/// upper endpoint at location + scale / |shape|.
struct GevParams {
  double location = 0.0;
  double scale = 1.0;
  double shape = 0.0;

  bool operator==(const GevParams&) const = default;
};

/// Shapes with |shape| below this use the Gumbel (shape = 0) formulas.
inline constexpr double kGumbelShapeTolerance = 1e-8;

/// Throws kArgument unless all fields are finite and scale > 0.
void validate(const GevParams& params);

double gev_cdf(double x, const GevParams& params);
double gev_quantile(double p, const GevParams& params);
/// -infinity outside the support.
double gev_log_density(double x, const GevParams& params);
/// Sum of log densities; -infinity if any point is outside the support.
double gev_log_likelihood(std::span<const double> data,
                          const GevParams& params);
/// Closed-form mean; requires shape < 1.
double gev_mean(const GevParams& params);

/// Sample L-moments from unbiased probability-weighted moments.
struct LMoments {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;
  double t3 = 0.0;
};
LMoments sample_lmoments(std::span<const double> data);

/// Hosking's L-moment estimator with the rational approximation for the
/// shape. The shape is clipped to (-0.99, 0.99) so the result always has a
/// finite mean. Throws kFit on zero L-scale, kArgument when n < 4.
GevParams lmoments_estimate(std::span<const double> data);

struct MleOptions {
  /// Stop when every simplex vertex is within this distance of the best one,
  /// measured in (location / scale0, log scale, shape) coordinates.
  double tolerance = 1e-8;
  int max_evaluations = 20000;
};

/// Raised when the simplex search runs out of evaluations.
class FitError : public Error {
 public:
  FitError(const std::string& what, GevParams best)
      : Error(ErrorCode::kFit, what), best_(best) {}
  const GevParams& best() const { return best_; }

 private:
  GevParams best_;
};

/// Maximum-likelihood fit by Nelder-Mead over (location, log scale, shape)
/// with |shape| < 1. Starts from `init`; if `init` gives zero likelihood the
/// start is first pulled toward shape = 0 until every point is supported.
GevParams mle_fit(std::span<const double> data, const GevParams& init,
                  const MleOptions& options = {});

}  // namespace tailcheck
