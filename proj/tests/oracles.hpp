#pragma once

// Straightforward reference implementations used to check the library.
// They favour obviousness over speed or numerical care.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

inline double cos_weight(double lat_deg) {
  if (std::fabs(lat_deg) == 90.0) return 0.0;
  return std::cos(lat_deg * std::numbers::pi / 180.0);
}

inline double gev_cdf(double x, double mu, double sigma, double xi) {
  const double z = (x - mu) / sigma;
  if (xi == 0.0) return std::exp(-std::exp(-z));
  const double t = 1.0 + xi * z;
  if (t <= 0.0) return xi > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::pow(t, -1.0 / xi));
}

inline double gev_quantile(double p, double mu, double sigma, double xi) {
  const double y = -std::log(p);
  if (xi == 0.0) return mu - sigma * std::log(y);
  return mu + sigma * (std::pow(y, -xi) - 1.0) / xi;
}

inline double gev_logpdf(double x, double mu, double sigma, double xi) {
  const double z = (x - mu) / sigma;
  if (xi == 0.0) return -std::log(sigma) - z - std::exp(-z);
  const double t = 1.0 + xi * z;
  if (t <= 0.0) return -INFINITY;
  return -std::log(sigma) - (1.0 + 1.0 / xi) * std::log(t) - std::pow(t, -1.0 / xi);
}

/// Analytic gradient of the summed log density in (mu, sigma, xi), xi != 0.
inline std::array<double, 3> gev_loglik_gradient(const std::vector<double>& xs,
                                                 double mu, double sigma,
                                                 double xi) {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (double x : xs) {
    const double z = (x - mu) / sigma;
    const double t = 1.0 + xi * z;
    const double tp = std::pow(t, -1.0 / xi);
    // d/dz of log density (without the -log sigma term)
    const double dz = -(1.0 + xi) / t + tp / t;
    g[0] += dz * (-1.0 / sigma);
    g[1] += -1.0 / sigma + dz * (-z / sigma);
    const double lt = std::log(t);
    g[2] += lt / (xi * xi) - (1.0 + 1.0 / xi) * z / t -
            tp * (lt / (xi * xi) - z / (xi * t));
  }
  return g;
}

inline double sorted_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = double(v.size() - 1) * p;
  const auto lo = std::size_t(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - double(lo)) * (v[lo + 1] - v[lo]);
}

/// Naive tallies over a lat/lon grid, cell = row * nlon + col.
struct MicroGrid {
  std::vector<double> lats;
  std::size_t nlon = 1;
  std::size_t size() const { return lats.size() * nlon; }
  double weight(std::size_t cell) const { return cos_weight(lats[cell / nlon]); }
};

struct Exceedance {
  double frac_a = 0, frac_b = 0, mean_a = NAN, max_a = NAN, mean_b = NAN, max_b = NAN;
  std::size_t cells = 0;
};

inline Exceedance exceedance(const MicroGrid& g, const std::vector<double>& a,
                             const std::vector<double>& b,
                             const std::vector<std::uint8_t>& sel) {
  double wa = 0, wb = 0, sa = 0, sb = 0;
  double ma = -INFINITY, mb = -INFINITY;
  Exceedance e;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sel[i] || std::isnan(a[i]) || std::isnan(b[i])) continue;
    const double w = g.weight(i);
    ++e.cells;
    if (a[i] > b[i]) {
      wa += w;
      sa += w * (a[i] - b[i]);
      ma = std::max(ma, a[i] - b[i]);
    } else {
      wb += w;
      sb += w * (b[i] - a[i]);
      mb = std::max(mb, b[i] - a[i]);
    }
  }
  e.frac_a = wa / (wa + wb);
  e.frac_b = wb / (wa + wb);
  if (wa > 0) e.mean_a = sa / wa, e.max_a = ma;
  if (wb > 0) e.mean_b = sb / wb, e.max_b = mb;
  return e;
}

inline std::size_t bin_of(double v, const std::vector<double>& edges) {
  const std::size_t n = edges.size() - 1;
  for (std::size_t k = 1; k < n; ++k)
    if (v < edges[k]) return k - 1;
  return n - 1;
}

inline std::vector<double> histogram(const MicroGrid& g, const std::vector<double>& x,
                                     const std::vector<double>& y,
                                     const std::vector<std::uint8_t>& sel,
                                     const std::vector<double>& xe,
                                     const std::vector<double>& ye) {
  const std::size_t ny = ye.size() - 1;
  std::vector<double> h((xe.size() - 1) * ny, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sel[i] || std::isnan(x[i]) || std::isnan(y[i])) continue;
    h[bin_of(x[i], xe) * ny + bin_of(y[i], ye)] += g.weight(i);
  }
  return h;
}

inline std::vector<double> category_shares(const MicroGrid& g,
                                           const std::vector<int>& codes,
                                           const std::vector<std::uint8_t>& sel,
                                           int n_categories, bool missing_in_total) {
  std::vector<double> s(std::size_t(n_categories) + 1, 0.0);
  double total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sel[i]) continue;
    if (codes[i] < 0) {
      if (!missing_in_total) continue;
      s[std::size_t(n_categories)] += g.weight(i);
    } else {
      s[std::size_t(codes[i])] += g.weight(i);
    }
    total += g.weight(i);
  }
  for (auto& v : s) v /= total;
  return s;
}

inline std::vector<double> transitions(const MicroGrid& g, const std::vector<int>& from,
                                       const std::vector<int>& to,
                                       const std::vector<std::uint8_t>& sel, int k) {
  std::vector<double> t(std::size_t(k * k), 0.0);
  double total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sel[i] || from[i] < 0 || to[i] < 0) continue;
    t[std::size_t(from[i] * k + to[i])] += g.weight(i);
    total += g.weight(i);
  }
  for (auto& v : t) v /= total;
  return t;
}

inline int risk_code(double hi) {
  if (std::isnan(hi)) return -1;
  if (hi >= 51) return 4;
  if (hi >= 39) return 3;
  if (hi >= 32) return 2;
  if (hi >= 26) return 1;
  return 0;
}

inline int confidence_code(double p) {
  const double edges[7] = {0.99, 0.95, 0.90, 0.66, 0.33, 0.10, 0.01};
  for (int k = 0; k < 7; ++k)
    if (p >= edges[k]) return k;
  return 7;
}

}  // namespace oracle
