#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tailcheck/gev.hpp"

namespace tailcheck {

struct McmcConfig {
  int chains = 4;
  int iterations = 10000;  // per chain, including burn-in
  int burn_in = 5000;
  int thin = 5;
  int adapt_window = 50;  // iterations between step-size updates
  double target_acceptance = 0.3;
  std::uint64_t seed = 0;

  /// Throws kConfig on violated invariants.
  void validate() const;
  int draws_per_chain() const { return (iterations - burn_in) / thin; }
};

/// Weakly informative priors centred on the sample:
///   location     ~ Normal(median, (10 * l2)^2)
///   log(scale)   ~ Normal(log(l2) + ln 2, 1)
///   shape        ~ Normal(0, 0.25^2) truncated to (-1, 1)
/// where l2 is the sample L-scale.
struct GevPrior {
  double location_mean = 0.0;
  double location_sd = 1.0;
  double log_scale_mean = 0.0;
  double log_scale_sd = 1.0;
  double shape_sd = 0.25;

  static GevPrior from_data(std::span<const double> data);
  /// Log prior density up to a constant in (location, log scale, shape);
  /// -infinity when |shape| >= 1.
  double log_density(double location, double log_scale, double shape) const;
};

struct McmcDiagnostics {
  std::vector<double> acceptance;      // per chain, after burn-in
  std::array<double, 3> rhat{};        // split-chain R-hat: location, scale, shape
  std::array<double, 3> step_size{};   // mean adapted step per coordinate
  bool converged = true;               // every R-hat <= 1.1
  std::string warning;
};

/// Pooled post-burn-in, thinned draws, chain-major
/// (chain 0's draws first).
struct PosteriorSamples {
  std::vector<GevParams> draws;
  int chains = 0;
  McmcDiagnostics diagnostics;

  std::size_t draws_per_chain() const {
    return chains > 0 ? draws.size() / std::size_t(chains) : 0;
  }
};

inline constexpr double kRhatThreshold = 1.1;

/// Adaptive random-walk Metropolis on (location, log scale, shape), updating
/// one coordinate at a time. Step sizes are tuned every adapt_window
/// iterations during burn-in toward target_acceptance and frozen afterward.
/// Chains start from jittered L-moment estimates; chain c uses the stream
/// mix_seed(config.seed, c, kMcmcStage).
///
/// Throws kArgument if n < 10, kFit for degenerate data. Non-convergence is
/// reported through diagnostics, never thrown.
PosteriorSamples bayes_fit(std::span<const double> data,
                           const McmcConfig& config);
PosteriorSamples bayes_fit(std::span<const double> data,
                           const McmcConfig& config, const GevPrior& prior);

inline constexpr std::uint64_t kMcmcStage = 11;

/// Split-chain potential scale reduction for one scalar quantity;
/// chains[c] holds chain c's draws in order.
double split_rhat(const std::vector<std::vector<double>>& chains);

/// gev_quantile(p, theta) for every draw.
std::vector<double> posterior_quantile_draws(const PosteriorSamples& post,
                                             double p);

/// Median and central 90% interval.
struct Interval {
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
};

struct PosteriorSummary {
  Interval location;
  Interval scale;
  Interval shape;
  Interval threshold;  // return level at the summary probability
  double max_rhat = 0.0;
  double mean_acceptance = 0.0;
  bool converged = true;
};

PosteriorSummary summarize(const PosteriorSamples& post, double p);

}  // namespace tailcheck
