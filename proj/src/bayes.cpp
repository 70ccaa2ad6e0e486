#include "tailcheck/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tailcheck/extremes.hpp"
#include "tailcheck/rng.hpp"

namespace tailcheck {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct State {
  std::array<double, 3> x;  // location, log scale, shape
  double log_post;
};

GevParams to_params(const std::array<double, 3>& x) {
  return {x[0], std::exp(x[1]), x[2]};
}

double log_posterior(std::span<const double> data, const GevPrior& prior,
                     const std::array<double, 3>& x) {
  const double lp = prior.log_density(x[0], x[1], x[2]);
  if (!std::isfinite(lp)) return kNegInf;
  const double scale = std::exp(x[1]);
  if (!(scale > 0.0) || !std::isfinite(scale)) return kNegInf;
  const double ll = gev_log_likelihood(data, {x[0], scale, x[2]});
  return std::isfinite(ll) ? ll + lp : kNegInf;
}

State starting_point(std::span<const double> data, const GevPrior& prior,
                     const GevParams& center, Xoshiro256& rng) {
  const double root_n = std::sqrt(double(data.size()));
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::array<double, 3> x{
        center.location + 2.0 * center.scale / root_n * rng.normal(),
        std::log(center.scale) + 2.0 / root_n * rng.normal(),
        center.shape + 1.0 / root_n * rng.normal()};
    const double lp = log_posterior(data, prior, x);
    if (std::isfinite(lp)) return {x, lp};
  }
  // Pull the centre's shape toward zero until every point is supported.
  std::array<double, 3> x{center.location, std::log(center.scale),
                          center.shape};
  for (int i = 0; i < 64; ++i) {
    const double lp = log_posterior(data, prior, x);
    if (std::isfinite(lp)) return {x, lp};
    x[2] *= 0.5;
  }
  x[2] = 0.0;
  const double lp = log_posterior(data, prior, x);
  if (!std::isfinite(lp))
    fail(ErrorCode::kFit, "no starting point with positive posterior density");
  return {x, lp};
}

double sample_median(std::span<const double> data) {
  return empirical_quantile(data, 0.5);
}

Interval interval_of(std::span<const double> v) {
  return {empirical_quantile(v, 0.05), empirical_quantile(v, 0.5),
          empirical_quantile(v, 0.95)};
}

}  // namespace

void McmcConfig::validate() const {
  if (chains < 1) fail(ErrorCode::kConfig, "mcmc.chains must be >= 1");
  if (iterations < 1) fail(ErrorCode::kConfig, "mcmc.iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations)
    fail(ErrorCode::kConfig, "mcmc.burn_in must be in [0, iterations)");
  if (thin < 1) fail(ErrorCode::kConfig, "mcmc.thin must be >= 1");
  if (adapt_window < 1) fail(ErrorCode::kConfig, "mcmc.adapt_window must be >= 1");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    fail(ErrorCode::kConfig, "mcmc.target_acceptance must be in (0, 1)");
  if (draws_per_chain() < 1)
    fail(ErrorCode::kConfig, "mcmc settings keep no draws");
}

GevPrior GevPrior::from_data(std::span<const double> data) {
  const LMoments m = sample_lmoments(data);
  if (!(m.l2 > 0.0)) fail(ErrorCode::kFit, "zero L-scale: data are degenerate");
  GevPrior prior;
  prior.location_mean = sample_median(data);
  prior.location_sd = 10.0 * m.l2;
  prior.log_scale_mean = std::log(m.l2) + std::numbers::ln2;
  prior.log_scale_sd = 1.0;
  prior.shape_sd = 0.25;
  return prior;
}

double GevPrior::log_density(double location, double log_scale,
                             double shape) const {
  if (!(std::fabs(shape) < 1.0)) return kNegInf;
  const double a = (location - location_mean) / location_sd;
  const double b = (log_scale - log_scale_mean) / log_scale_sd;
  const double c = shape / shape_sd;
  return -0.5 * (a * a + b * b + c * c);
}

PosteriorSamples bayes_fit(std::span<const double> data,
                           const McmcConfig& config) {
  if (data.size() < 10)
    fail(ErrorCode::kArgument, "Bayesian GEV fit needs at least 10 values");
  return bayes_fit(data, config, GevPrior::from_data(data));
}

PosteriorSamples bayes_fit(std::span<const double> data,
                           const McmcConfig& config, const GevPrior& prior) {
  config.validate();
  if (data.size() < 10)
    fail(ErrorCode::kArgument, "Bayesian GEV fit needs at least 10 values");
  const GevParams center = lmoments_estimate(data);
  const double root_n = std::sqrt(double(data.size()));

  PosteriorSamples post;
  post.chains = config.chains;
  const int keep = config.draws_per_chain();
  post.draws.reserve(std::size_t(config.chains) * std::size_t(keep));
  std::vector<std::array<std::vector<double>, 3>> traces(config.chains);
  std::array<double, 3> step_total{0, 0, 0};

  for (int c = 0; c < config.chains; ++c) {
    Xoshiro256 rng(mix_seed(config.seed, std::uint64_t(c), kMcmcStage));
    State state = starting_point(data, prior, center, rng);
    std::array<double, 3> log_step{std::log(1.5 * center.scale / root_n),
                                   std::log(1.5 / root_n),
                                   std::log(1.0 / root_n)};
    std::array<int, 3> window_accepts{0, 0, 0};
    long kept_accepts = 0;
    int batch = 0;

    for (auto& t : traces[c]) t.reserve(std::size_t(keep));

    for (int it = 0; it < config.iterations; ++it) {
      for (int j = 0; j < 3; ++j) {
        std::array<double, 3> proposal = state.x;
        proposal[j] += std::exp(log_step[j]) * rng.normal();
        const double lp = log_posterior(data, prior, proposal);
        const double u = rng.uniform();
        if (std::isfinite(lp) && std::log(u) < lp - state.log_post) {
          state = {proposal, lp};
          ++window_accepts[j];
          if (it >= config.burn_in) ++kept_accepts;
        }
      }

      if (it < config.burn_in && (it + 1) % config.adapt_window == 0) {
        ++batch;
        const double gain = std::min(1.0, 3.0 / std::sqrt(double(batch)));
        for (int j = 0; j < 3; ++j) {
          const double rate = double(window_accepts[j]) / config.adapt_window;
          log_step[j] += gain * (rate - config.target_acceptance);
          window_accepts[j] = 0;
        }
      }

      if (it >= config.burn_in && (it - config.burn_in) % config.thin == 0 &&
          int(traces[c][0].size()) < keep) {
        const GevParams p = to_params(state.x);
        post.draws.push_back(p);
        traces[c][0].push_back(p.location);
        traces[c][1].push_back(p.scale);
        traces[c][2].push_back(p.shape);
      }
    }

    const double kept_iterations = double(config.iterations - config.burn_in);
    post.diagnostics.acceptance.push_back(double(kept_accepts) /
                                          (3.0 * kept_iterations));
    for (int j = 0; j < 3; ++j) step_total[j] += std::exp(log_step[j]);
  }

  static constexpr const char* kNames[3] = {"location", "scale", "shape"};
  for (int j = 0; j < 3; ++j) {
    std::vector<std::vector<double>> per_chain;
    for (const auto& t : traces) per_chain.push_back(t[j]);
    post.diagnostics.rhat[j] = split_rhat(per_chain);
    post.diagnostics.step_size[j] = step_total[j] / config.chains;
    if (!(post.diagnostics.rhat[j] <= kRhatThreshold)) {
      post.diagnostics.converged = false;
      if (!post.diagnostics.warning.empty()) post.diagnostics.warning += "; ";
      post.diagnostics.warning += std::string("R-hat(") + kNames[j] + ") = " +
                                  std::to_string(post.diagnostics.rhat[j]);
    }
  }
  return post;
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
  std::vector<std::span<const double>> halves;
  for (const auto& c : chains) {
    const std::size_t half = c.size() / 2;
    if (half < 2) continue;
    // Drop the middle draw of odd-length chains.
    halves.emplace_back(c.data(), half);
    halves.emplace_back(c.data() + c.size() - half, half);
  }
  if (halves.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = halves.front().size();
  for (const auto& h : halves)
    if (h.size() != n) return std::numeric_limits<double>::quiet_NaN();

  const double m = double(halves.size());
  std::vector<double> means;
  double within = 0.0;
  for (const auto& h : halves) {
    double mean = 0.0;
    for (double v : h) mean += v;
    mean /= double(n);
    double ss = 0.0;
    for (double v : h) ss += (v - mean) * (v - mean);
    within += ss / double(n - 1);
    means.push_back(mean);
  }
  within /= m;
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= m;
  double between = 0.0;
  for (double v : means) between += (v - grand) * (v - grand);
  between *= double(n) / (m - 1.0);

  if (!(within > 0.0))
    return between > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  const double var_plus = (double(n) - 1.0) / double(n) * within + between / double(n);
  return std::sqrt(var_plus / within);
}

std::vector<double> posterior_quantile_draws(const PosteriorSamples& post,
                                             double p) {
  std::vector<double> out;
  out.reserve(post.draws.size());
  for (const auto& theta : post.draws) out.push_back(gev_quantile(p, theta));
  return out;
}

PosteriorSummary summarize(const PosteriorSamples& post, double p) {
  if (post.draws.empty())
    fail(ErrorCode::kArgument, "cannot summarize an empty posterior");
  std::vector<double> loc, scale, shape;
  for (const auto& d : post.draws) {
    loc.push_back(d.location);
    scale.push_back(d.scale);
    shape.push_back(d.shape);
  }
  const auto thresholds = posterior_quantile_draws(post, p);
  PosteriorSummary s;
  s.location = interval_of(loc);
  s.scale = interval_of(scale);
  s.shape = interval_of(shape);
  s.threshold = interval_of(thresholds);
  s.max_rhat = *std::max_element(post.diagnostics.rhat.begin(),
                                 post.diagnostics.rhat.end());
  double acc = 0.0;
  for (double a : post.diagnostics.acceptance) acc += a;
  s.mean_acceptance =
      post.diagnostics.acceptance.empty()
          ? 0.0
          : acc / double(post.diagnostics.acceptance.size());
  s.converged = post.diagnostics.converged;
  return s;
}

}  // namespace tailcheck
