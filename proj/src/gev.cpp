#include "tailcheck/gev.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace tailcheck {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMaxShape = 0.99;

bool is_gumbel(double shape) { return std::fabs(shape) < kGumbelShapeTolerance; }

}  // namespace

void validate(const GevParams& p) {
  if (!std::isfinite(p.location) || !std::isfinite(p.shape) ||
      !std::isfinite(p.scale))
    fail(ErrorCode::kArgument, "GEV parameters must be finite");
  if (!(p.scale > 0.0)) fail(ErrorCode::kArgument, "GEV scale must be > 0");
}

double gev_cdf(double x, const GevParams& params) {
  validate(params);
  if (!std::isfinite(x)) fail(ErrorCode::kArgument, "GEV cdf of non-finite x");
  const double z = (x - params.location) / params.scale;
  if (is_gumbel(params.shape)) return std::exp(-std::exp(-z));
  const double xz = params.shape * z;
  if (xz <= -1.0) return params.shape > 0.0 ? 0.0 : 1.0;
  const double t = std::exp(-std::log1p(xz) / params.shape);
  return std::exp(-t);
}

double gev_quantile(double p, const GevParams& params) {
  validate(params);
  if (!(p > 0.0 && p < 1.0))
    fail(ErrorCode::kArgument, "GEV quantile probability outside (0, 1)");
  const double log_t = std::log(-std::log(p));
  if (is_gumbel(params.shape)) return params.location - params.scale * log_t;
  return params.location +
         params.scale * std::expm1(-params.shape * log_t) / params.shape;
}

double gev_log_density(double x, const GevParams& params) {
  validate(params);
  const double z = (x - params.location) / params.scale;
  const double log_scale = std::log(params.scale);
  if (is_gumbel(params.shape)) return -log_scale - z - std::exp(-z);
  const double xz = params.shape * z;
  if (xz <= -1.0) return kNegInf;
  const double l = std::log1p(xz);
  return -log_scale - (1.0 + 1.0 / params.shape) * l -
         std::exp(-l / params.shape);
}

double gev_log_likelihood(std::span<const double> data,
                          const GevParams& params) {
  if (data.empty()) fail(ErrorCode::kArgument, "log-likelihood of empty data");
  validate(params);
  const double mu = params.location;
  const double inv_scale = 1.0 / params.scale;
  const double xi = params.shape;
  double sum = 0.0;
  if (is_gumbel(xi)) {
    for (double x : data) {
      const double z = (x - mu) * inv_scale;
      sum -= z + std::exp(-z);
    }
  } else {
    const double inv_xi = 1.0 / xi;
    for (double x : data) {
      const double xz = xi * (x - mu) * inv_scale;
      if (!(xz > -1.0)) return kNegInf;
      const double l = std::log1p(xz);
      sum -= (1.0 + inv_xi) * l + std::exp(-l * inv_xi);
    }
  }
  return sum - double(data.size()) * std::log(params.scale);
}

double gev_mean(const GevParams& params) {
  validate(params);
  if (!(params.shape < 1.0))
    fail(ErrorCode::kArgument, "GEV mean is infinite for shape >= 1");
  if (is_gumbel(params.shape))
    return params.location + params.scale * std::numbers::egamma;
  return params.location + params.scale *
                               (std::tgamma(1.0 - params.shape) - 1.0) /
                               params.shape;
}

LMoments sample_lmoments(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 3) fail(ErrorCode::kArgument, "L-moments need at least 3 values");
  std::vector<double> x(data.begin(), data.end());
  for (double v : x) {
    if (!std::isfinite(v)) fail(ErrorCode::kData, "non-finite value in data");
  }
  std::sort(x.begin(), x.end());
  const double dn = double(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double j = double(i);  // zero-based rank
    b0 += x[i];
    b1 += x[i] * j / (dn - 1.0);
    b2 += x[i] * j * (j - 1.0) / ((dn - 1.0) * (dn - 2.0));
  }
  b0 /= dn;
  b1 /= dn;
  b2 /= dn;
  LMoments m;
  m.l1 = b0;
  m.l2 = 2.0 * b1 - b0;
  m.l3 = 6.0 * b2 - 6.0 * b1 + b0;
  m.t3 = m.l2 > 0.0 ? m.l3 / m.l2 : 0.0;
  return m;
}

GevParams lmoments_estimate(std::span<const double> data) {
  if (data.size() < 4)
    fail(ErrorCode::kArgument, "L-moment fit needs at least 4 values");
  const LMoments m = sample_lmoments(data);
  if (!(m.l2 > 0.0) ||
      m.l2 <= 1e-12 * std::max(1.0, std::fabs(m.l1)))
    fail(ErrorCode::kFit, "zero L-scale: data are degenerate");

  const double c = 2.0 / (3.0 + m.t3) - std::numbers::ln2 / std::log(3.0);
  // Hosking's k is the negated shape.
  double k = 7.8590 * c + 2.9554 * c * c;
  k = std::clamp(k, -kMaxShape, kMaxShape);

  GevParams out;
  if (std::fabs(k) < kGumbelShapeTolerance) {
    out.scale = m.l2 / std::numbers::ln2;
    out.location = m.l1 - std::numbers::egamma * out.scale;
    out.shape = 0.0;
    return out;
  }
  const double g = std::tgamma(1.0 + k);
  out.scale = m.l2 * k / ((1.0 - std::exp2(-k)) * g);
  out.location = m.l1 - out.scale * (1.0 - g) / k;
  out.shape = -k;
  return out;
}

namespace {

using Point = std::array<double, 3>;

struct ScaledObjective {
  std::span<const double> data;
  GevParams origin;

  GevParams unpack(const Point& v) const {
    return {origin.location + v[0] * origin.scale,
            origin.scale * std::exp(v[1]), origin.shape + v[2]};
  }
  double operator()(const Point& v) const {
    const GevParams p = unpack(v);
    if (!(std::fabs(p.shape) < 1.0) || !std::isfinite(p.scale) ||
        !(p.scale > 0.0))
      return std::numeric_limits<double>::infinity();
    const double ll = gev_log_likelihood(data, p);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  }
};

struct SimplexResult {
  Point best;
  double value;
  bool converged;
  int evaluations;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2), minimizing.
SimplexResult nelder_mead(const ScaledObjective& f, const Point& start,
                          double step, double tolerance, int max_evals) {
  std::array<Point, 4> simplex;
  std::array<double, 4> values;
  simplex[0] = start;
  for (int i = 0; i < 3; ++i) {
    simplex[i + 1] = start;
    simplex[i + 1][i] += step;
  }
  int evals = 0;
  for (int i = 0; i < 4; ++i) {
    values[i] = f(simplex[i]);
    ++evals;
  }

  auto diameter = [&] {
    double d = 0.0;
    for (int i = 1; i < 4; ++i)
      for (int j = 0; j < 3; ++j)
        d = std::max(d, std::fabs(simplex[i][j] - simplex[0][j]));
    return d;
  };

  while (true) {
    std::array<int, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    std::array<Point, 4> s2;
    std::array<double, 4> v2;
    for (int i = 0; i < 4; ++i) {
      s2[i] = simplex[order[i]];
      v2[i] = values[order[i]];
    }
    simplex = s2;
    values = v2;

    if (diameter() < tolerance) return {simplex[0], values[0], true, evals};
    if (evals >= max_evals) return {simplex[0], values[0], false, evals};

    Point centroid{0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) centroid[j] += simplex[i][j] / 3.0;
    auto along = [&](double t) {
      Point p;
      for (int j = 0; j < 3; ++j)
        p[j] = centroid[j] + t * (simplex[3][j] - centroid[j]);
      return p;
    };

    const Point reflected = along(-1.0);
    const double fr = f(reflected);
    ++evals;
    if (fr < values[0]) {
      const Point expanded = along(-2.0);
      const double fe = f(expanded);
      ++evals;
      if (fe < fr) {
        simplex[3] = expanded;
        values[3] = fe;
      } else {
        simplex[3] = reflected;
        values[3] = fr;
      }
      continue;
    }
    if (fr < values[2]) {
      simplex[3] = reflected;
      values[3] = fr;
      continue;
    }
    const bool outside = fr < values[3];
    const Point contracted = along(outside ? -0.5 : 0.5);
    const double fc = f(contracted);
    ++evals;
    if (fc < (outside ? fr : values[3])) {
      simplex[3] = contracted;
      values[3] = fc;
      continue;
    }
    for (int i = 1; i < 4; ++i) {
      for (int j = 0; j < 3; ++j)
        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
      values[i] = f(simplex[i]);
      ++evals;
    }
  }
}

}  // namespace

GevParams mle_fit(std::span<const double> data, const GevParams& init,
                  const MleOptions& options) {
  validate(init);
  if (data.empty()) fail(ErrorCode::kArgument, "MLE of empty data");

  GevParams start = init;
  start.shape = std::clamp(start.shape, -kMaxShape, kMaxShape);
  for (int i = 0; i < 64 && !std::isfinite(gev_log_likelihood(data, start));
       ++i)
    start.shape *= 0.5;
  if (!std::isfinite(gev_log_likelihood(data, start))) start.shape = 0.0;

  const ScaledObjective objective{data, start};
  Point point{0.0, 0.0, 0.0};
  double value = objective(point);
  int budget = options.max_evaluations;
  // Restart from the optimum until a fresh simplex no longer improves it.
  for (int round = 0; round < 4; ++round) {
    const SimplexResult r = nelder_mead(
        objective, point, round == 0 ? 0.1 : 0.01, options.tolerance, budget);
    budget -= r.evaluations;
    const bool improved = r.value < value - 1e-12 * std::fabs(value);
    if (r.value <= value) {
      point = r.best;
      value = r.value;
    }
    if (!r.converged)
      throw FitError("GEV maximum-likelihood search did not converge",
                     objective.unpack(point));
    if (!improved && round > 0) break;
  }
  return objective.unpack(point);
}

}  // namespace tailcheck
