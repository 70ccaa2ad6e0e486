#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oracles.hpp"
#include "tailcheck/bayes.hpp"
#include "tailcheck/compare.hpp"
#include "tailcheck/config.hpp"
#include "tailcheck/extremes.hpp"
#include "tailcheck/gev.hpp"
#include "tailcheck/heatindex.hpp"
#include "tailcheck/ingest.hpp"
#include "tailcheck/pipeline.hpp"
#include "tailcheck/report.hpp"
#include "tailcheck/rng.hpp"

using namespace tailcheck;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<double> kPGrid{0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6,
                                 0.7, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999};

Outcome round_trip() {
  double worst = 0;
  for (double mu : {-5.0, 0.0, 30.0})
    for (double sigma : {0.3, 1.0, 2.0, 10.0})
      for (double xi : {-0.4, -0.1, -1e-12, 0.0, 1e-12, 0.1, 0.4})
        for (double p : kPGrid) {
          const GevParams th{mu, sigma, xi};
          worst = std::max(worst, std::fabs(gev_cdf(gev_quantile(p, th), th) - p));
        }
  return {worst < 1e-10, fmt("max |cdf(quantile(p)) - p| = %.3g", worst)};
}

Outcome gumbel_continuity() {
  double worst = 0;
  for (double mu : {-5.0, 0.0, 30.0})
    for (double sigma : {0.3, 1.0, 2.0, 10.0})
      for (double p : kPGrid) {
        const double q0 = gev_quantile(p, {mu, sigma, 0.0});
        for (double xi : {-1e-9, 1e-9})
          worst = std::max(worst, std::fabs(gev_quantile(p, {mu, sigma, xi}) - q0) / sigma);
      }
  return {worst < 1e-6, fmt("max |q(xi=+-1e-9) - q(0)| / sigma = %.3g", worst)};
}

MemberMaxima draws_at(const GevParams& th, std::size_t n, std::uint64_t seed) {
  return synth_member_maxima({Grid::uniform(1, 1, 0, 0), {th}, n, seed, kVarT2m});
}

Outcome lmoments_recovery() {
  const MemberMaxima m = draws_at({30, 2, 0.1}, 10000, 303);
  const GevParams e = lmoments_estimate(m.values);
  const bool ok = std::fabs(e.location - 30) < 0.1 && std::fabs(e.scale - 2) < 0.1 &&
                  std::fabs(e.shape - 0.1) < 0.05;
  return {ok, fmt("estimate (%.4f, %.4f, %.4f) from n=10000", e.location, e.scale, e.shape)};
}

Outcome mle_ascent() {
  int ascents = 0, recovered = 0;
  double worst[3] = {0, 0, 0};
  for (std::uint64_t s = 0; s < 100; ++s) {
    const MemberMaxima m = draws_at({30, 2, 0.1}, 5000, mix_seed(404, s, 0));
    const GevParams init = lmoments_estimate(m.values);
    const GevParams fit = mle_fit(m.values, init);
    ascents += gev_log_likelihood(m.values, fit) >= gev_log_likelihood(m.values, init);
    const double err[3] = {std::fabs(fit.location - 30), std::fabs(fit.scale - 2),
                           std::fabs(fit.shape - 0.1)};
    recovered += err[0] < 0.15 && err[1] < 0.15 && err[2] < 0.08;
    for (int k = 0; k < 3; ++k) worst[k] = std::max(worst[k], err[k]);
  }
  return {ascents == 100 && recovered == 100,
          fmt("ascent %d/100, recovered %d/100 at n=5000, worst error (%.3f, %.3f, %.3f)",
              ascents, recovered, worst[0], worst[1], worst[2])};
}

Outcome bayes_calibration(unsigned jobs) {
  const GevParams truth{30, 2, 0.1};
  const double z = gev_quantile(0.999, truth);
  const std::size_t cells = 200;
  const MemberMaxima m = synth_member_maxima(
      {Grid::uniform(10, 20, 45, -45), std::vector<GevParams>(cells, truth), 50, 505, kVarT2m},
      jobs);
  const FitOutcome fit = fit_cells(m, CellMask(cells, 1), McmcConfig{}, 506, jobs);
  int covered = 0, converged = 0;
  for (const auto& post : fit.posteriors) {
    const Interval iv = summarize(*post, 0.999).threshold;
    covered += iv.q05 <= z && z <= iv.q95;
    converged += *std::max_element(post->diagnostics.rhat.begin(), post->diagnostics.rhat.end()) < 1.1;
  }
  const double coverage = covered / double(cells);
  const double conv = converged / double(cells);
  return {std::fabs(coverage - 0.9) <= 0.06 && conv >= 0.95 && fit.fitted == cells,
          fmt("90%% interval coverage %.3f over %zu cells, R-hat < 1.1 in %.3f", coverage,
              cells, conv)};
}

struct Containment {
  std::vector<double> probability;
  std::vector<std::int8_t> category;
};

Containment containment_run(const FitOutcome& fit, const std::vector<GevParams>& huge_params,
                            const Grid& grid, std::uint64_t seed, unsigned jobs) {
  const MemberMaxima huge = synth_member_maxima({grid, huge_params, 7424, seed, kVarT2m}, jobs);
  std::vector<std::vector<double>> draws;
  for (const auto& post : fit.posteriors) draws.push_back(posterior_quantile_draws(*post, 0.999));
  const ComparisonResult r = compare_thresholds(draws, storyline_field(huge, 0.999, jobs).field);
  return {r.probability, r.category};
}

struct ContainmentSetup {
  Grid grid = Grid::uniform(20, 25, 57, -57);
  std::vector<GevParams> params;
  FitOutcome fit;
};

const ContainmentSetup& containment_setup(unsigned jobs) {
  static ContainmentSetup s = [jobs] {
    ContainmentSetup c;
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      const double u = double(i % 25) / 24.0, v = double(i / 25) / 19.0;
      c.params.push_back({20 + 15 * v, 1 + 2 * u, -0.2 + 0.3 * double((i * 7) % 11) / 10.0});
    }
    const MemberMaxima small =
        synth_member_maxima({c.grid, c.params, 50, 606, kVarT2m}, jobs);
    c.fit = fit_cells(small, CellMask(c.grid.size(), 1), McmcConfig{}, 607, jobs);
    return c;
  }();
  return s;
}

std::array<int, kConfidenceCategoryCount> tally(const std::vector<std::int8_t>& codes) {
  std::array<int, kConfidenceCategoryCount> n{};
  for (auto c : codes) ++n[std::size_t(c)];
  return n;
}

Outcome containment_calibration(unsigned jobs) {
  const auto& s = containment_setup(jobs);
  const Containment c = containment_run(s.fit, s.params, s.grid, 608, jobs);
  const double median = oracle::sorted_quantile(c.probability, 0.5);
  const auto n = tally(c.category);
  const int about = n[std::size_t(ConfidenceCategory::kAboutAsLikelyAsNot)];
  const bool plurality = *std::max_element(n.begin(), n.end()) == about;
  return {std::fabs(median - 0.5) <= 0.1 && plurality,
          fmt("median containment %.3f over 500 cells; AboutAsLikelyAsNot %d cells, "
              "largest other %d",
              median, about,
              [&] {
                int best = 0;
                for (int k = 0; k < kConfidenceCategoryCount; ++k)
                  if (k != int(ConfidenceCategory::kAboutAsLikelyAsNot)) best = std::max(best, n[k]);
                return best;
              }())};
}

Outcome containment_sensitivity(unsigned jobs) {
  const auto& s = containment_setup(jobs);
  std::vector<GevParams> shifted = s.params;
  for (auto& th : shifted) th.location += 3 * th.scale;
  const Containment c = containment_run(s.fit, shifted, s.grid, 609, jobs);
  const auto n = tally(c.category);
  const int low = n[std::size_t(ConfidenceCategory::kUnlikely)] +
                  n[std::size_t(ConfidenceCategory::kVeryUnlikely)] +
                  n[std::size_t(ConfidenceCategory::kExceptionallyUnlikely)];
  const double share = low / double(c.category.size());
  return {share >= 0.9, fmt("%.3f of cells Unlikely or below after a +3 sigma shift, reusing the posteriors of criterion 6", share)};
}

Outcome heat_index_check() {
  struct Case {
    double t, rh, expected;
  };
  const Case cases[] = {{26.7, 40, 26.7}, {32.2, 50, 35.0}, {40, 10, 36.70530588031804},
                        {29, 95, 38.67396683155542}, {20, 50, 19.36111111111111}};
  double worst = 0;
  for (const auto& c : cases) worst = std::max(worst, std::fabs(heat_index(c.t, c.rh) - c.expected));
  double cool = 0;
  for (double rh = 40; rh <= 100; rh += 5) cool = std::max(cool, std::fabs(heat_index(20, rh) - 20));

  int mismatches = 0, checked = 0;
  std::vector<double> probes{-10, 0, 25.9, 55, 100};
  for (double edge : kRiskThresholdsC) {
    probes.push_back(edge);
    probes.push_back(std::nextafter(edge, -INFINITY));
    probes.push_back(std::nextafter(edge, INFINITY));
  }
  for (double v : probes) {
    ++checked;
    mismatches += int(risk_category(v)) != oracle::risk_code(v);
  }
  const bool named = risk_category(25.9) == RiskCategory::kBelow &&
                     risk_category(39.0) == RiskCategory::kDanger &&
                     risk_category(55) == RiskCategory::kExtremeDanger;
  return {worst <= 0.3 && cool <= 1.0 && mismatches == 0 && named,
          fmt("max kernel deviation %.3f C, T=20 C within %.3f C for RH 40-100, "
              "%d/%d threshold probes exact",
              worst, cool, checked - mismatches, checked)};
}

Outcome empirical_bracketing() {
  const std::size_t n = 7424;
  const double p = 0.999;
  const double h = double(n - 1) * p + 1;
  const auto lo = std::size_t(std::floor(h));
  Xoshiro256 rng(mix_seed(909, 0, 0));
  std::vector<double> v(n);
  for (auto& x : v) x = 20 + 10 * rng.uniform();
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const double a = sorted[lo - 1], b = sorted[lo];
  const double first = empirical_quantile(v, p);
  bool ok = a <= first && first <= b;
  for (int trial = 0; trial < 25; ++trial) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(v[i], v[std::size_t(rng.uniform() * double(i + 1))]);
    ok = ok && empirical_quantile(v, p) == first;
  }

  const MemberMaxima m = synth_member_maxima(
      {Grid::uniform(4, 6, 30, -30), std::vector<GevParams>(24, {30, 2, -0.1}), 7424, 910, kVarT2m});
  const Field story = storyline_field(m, 1.0).field;
  const Field maxf = ensemble_max_field(m);
  const bool exact = std::memcmp(story.values.data(), maxf.values.data(),
                                 story.values.size() * sizeof(double)) == 0;
  return {ok && exact,
          fmt("h = %.3f, estimate between order statistics %zu and %zu on 25 permutations; "
              "storyline(p=1) %s ensemble max",
              h, lo, lo + 1, exact ? "equals" : "differs from")};
}

Outcome desk_determinism(const fs::path& workspace, unsigned jobs) {
  const fs::path config = fs::path(TAILCHECK_SOURCE_DIR) / "configs/desk.json";
  std::vector<nlohmann::json> manifests;
  for (const char* run : {"desk_a", "desk_b"}) {
    RunConfig cfg = load_run_config(config);
    cfg.workspace = workspace / run;
    cfg.jobs = jobs;
    fs::remove_all(cfg.workspace);
    const PipelineResult r = run_pipeline(cfg);
    std::ifstream in(r.manifest_path);
    manifests.push_back(nlohmann::json::parse(in));
  }
  std::size_t files = 0, matching = 0;
  for (auto& [stage, entry] : manifests[0]["stages"].items()) {
    const auto& other = manifests[1]["stages"][stage]["files"];
    for (std::size_t k = 0; k < entry["files"].size(); ++k) {
      ++files;
      matching += k < other.size() && other[k] == entry["files"][k];
    }
  }
  const bool same = manifests[0] == manifests[1] && files > 0 && matching == files;
  return {same, fmt("%zu/%zu manifest entries identical across two runs", matching, files)};
}

struct MicroCase {
  std::vector<double> lats;
  std::size_t nlon;
  std::uint64_t seed;
};

Outcome report_brute_force() {
  const MicroCase cases[] = {{{60.0, 0.0}, 1, 1},
                             {{80, 40, 0, -40, -80}, 3, 2},
                             {{10, 5, 0}, 7, 3},
                             {{89.5, -89.5}, 4, 4},
                             {{75, 45, 15, -15, -45, -75}, 6, 5}};
  const std::vector<double> hx = uniform_edges(20, 40, 2.5), hy = uniform_edges(18, 44, 2);
  double worst = 0;
  int compared = 0;
  const auto diff = [&](double a, double b) {
    ++compared;
    if (std::isnan(a) && std::isnan(b)) return;
    worst = std::max(worst, std::isnan(a) != std::isnan(b) ? INFINITY : std::fabs(a - b));
  };
  for (const auto& mc : cases) {
    const Grid g(mc.lats, [&] {
      std::vector<double> lons(mc.nlon);
      for (std::size_t j = 0; j < mc.nlon; ++j) lons[j] = 360.0 * double(j) / double(mc.nlon);
      return lons;
    }());
    const oracle::MicroGrid og{mc.lats, mc.nlon};
    Xoshiro256 rng(mix_seed(1111, mc.seed, 0));
    std::vector<double> a(g.size()), b(g.size());
    CellMask sel(g.size());
    std::vector<std::vector<double>> draws(g.size());
    std::vector<double> reference(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = 15 + 30 * rng.uniform();
      b[i] = 15 + 30 * rng.uniform();
      if (rng.uniform() < 0.15) a[i] = NAN;
      if (rng.uniform() < 0.1) b[i] = NAN;
      sel[i] = rng.uniform() < 0.85;
      reference[i] = 30;
      if (rng.uniform() >= 0.15)
        for (int k = 0; k < 20; ++k) draws[i].push_back(20 + 20 * rng.uniform());
    }
    sel[0] = 1;
    a[0] = 31;
    b[0] = 29;

    const ExceedanceSummary e = exceedance_report(Field(g, a, "degC"), Field(g, b, "degC"), sel, g);
    const oracle::Exceedance oe = oracle::exceedance(og, a, b, sel);
    diff(e.fraction_a_greater, oe.frac_a);
    diff(e.fraction_b_at_least, oe.frac_b);
    diff(e.mean_a_minus_b, oe.mean_a);
    diff(e.max_a_minus_b, oe.max_a);
    diff(e.mean_b_minus_a, oe.mean_b);
    diff(e.max_b_minus_a, oe.max_b);
    diff(double(e.cells), double(oe.cells));

    const JointHistogram h = joint_histogram(Field(g, a, "degC"), Field(g, b, "degC"), sel, hx, hy);
    const auto oh = oracle::histogram(og, a, b, sel, hx, hy);
    for (std::size_t k = 0; k < oh.size(); ++k) diff(h.weights[k], oh[k]);

    const ComparisonResult r = compare_thresholds(draws, Field(g, reference, "degC"));
    const CategoryFractions f = category_fractions(r, sel, g);
    const auto of = oracle::category_shares(
        og, std::vector<int>(r.category.begin(), r.category.end()), sel, kConfidenceCategoryCount, true);
    for (int k = 0; k < kConfidenceCategoryCount; ++k) diff(f.fraction[std::size_t(k)], of[std::size_t(k)]);
    diff(f.missing, of[kConfidenceCategoryCount]);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!draws[i].empty()) diff(double(r.category[i]), double(oracle::confidence_code(r.probability[i])));

    const CategoryField ca = risk_category_field(Field(g, a, "degC"));
    const CategoryField cb = risk_category_field(Field(g, b, "degC"));
    const TransitionTable t = category_transition_table(ca, cb, sel, g);
    std::vector<int> ra, rb;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ra.push_back(oracle::risk_code(a[i]));
      rb.push_back(oracle::risk_code(b[i]));
    }
    const auto ot = oracle::transitions(og, ra, rb, sel, kRiskCategoryCount);
    for (std::size_t i = 0; i < std::size_t(kRiskCategoryCount); ++i)
      for (std::size_t j = 0; j < std::size_t(kRiskCategoryCount); ++j)
        diff(t.fraction[i][j], ot[i * kRiskCategoryCount + j]);
  }
  return {worst <= 1e-12, fmt("%d quantities on 5 micro-grids, max deviation %.3g", compared, worst)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  fs::path workspace = fs::temp_directory_path() / "tailcheck_acceptance";
  unsigned jobs = 1;
  app.add_option("--workspace", workspace, "Scratch directory for pipeline runs");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workspace);

  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "GEV round trip", 1, round_trip},
      {2, "Gumbel-limit continuity", 1, gumbel_continuity},
      {3, "L-moments recovery", 5, lmoments_recovery},
      {4, "MLE ascent and recovery", 30, mle_ascent},
      {5, "Bayesian calibration", 600, [jobs] { return bayes_calibration(jobs); }},
      {6, "Containment calibration", 1200, [jobs] { return containment_calibration(jobs); }},
      {7, "Containment sensitivity", 1200, [jobs] { return containment_sensitivity(jobs); }},
      {8, "Heat index", 0, heat_index_check},
      {9, "Empirical quantile", 0, empirical_bracketing},
      {10, "End-to-end determinism", 1800, [&] { return desk_determinism(workspace, jobs); }},
      {11, "Report correctness", 0, report_brute_force},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    if (!in_time) o.detail += fmt("; exceeded %.0f s", c.limit_seconds);
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
