#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "property.hpp"
#include "tailcheck/compare.hpp"

using namespace tailcheck;
using testing_util::code_of;

TEST_CASE("confidence category examples") {
  CHECK(confidence_category(1.0) == ConfidenceCategory::kVirtuallyCertain);
  CHECK(confidence_category(0.5) == ConfidenceCategory::kAboutAsLikelyAsNot);
  CHECK(confidence_category(0.005) == ConfidenceCategory::kExceptionallyUnlikely);
  CHECK(confidence_category(0.0) == ConfidenceCategory::kExceptionallyUnlikely);
  CHECK(std::string(to_string(ConfidenceCategory::kAboutAsLikelyAsNot)) == "AboutAsLikelyAsNot");
  CHECK(code_of([] { confidence_category(1.2); }) == ErrorCode::kArgument);
  CHECK(code_of([] { confidence_category(NAN); }) == ErrorCode::kArgument);
}

TEST_CASE("confidence bins are left closed") {
  const double edges[7] = {0.99, 0.95, 0.90, 0.66, 0.33, 0.10, 0.01};
  for (int k = 0; k < 7; ++k) {
    CHECK(int(confidence_category(edges[k])) == k);
    CHECK(int(confidence_category(std::nextafter(edges[k], 0.0))) == k + 1);
  }
}

TEST_CASE("confidence category is a monotone step function") {
  proptest::for_all(
      31, 2000, [](auto& rng) { return std::pair{rng.uniform(), rng.uniform()}; },
      [](const auto& s) {
        const auto [a, b] = s;
        CHECK(int(confidence_category(a)) == oracle::confidence_code(a));
        if (a <= b) CHECK(int(confidence_category(a)) >= int(confidence_category(b)));
      });
}

TEST_CASE("custom edges are validated") {
  ConfidenceEdges e;
  e.lower = {0.99, 0.95, 0.95, 0.66, 0.33, 0.10, 0.01};
  CHECK(code_of([&] { e.validate(); }) == ErrorCode::kConfig);
  e.lower = {0.98, 0.9, 0.8, 0.6, 0.4, 0.2, 0.05};
  CHECK(confidence_category(0.85, e) == ConfidenceCategory::kVeryLikely);
}

TEST_CASE("containment examples") {
  PosteriorSamples post;
  post.chains = 1;
  post.draws = {{30, 2, 0.1}, {31, 2, 0.1}, {29, 1, 0.0}, {30, 2.5, -0.1}};
  CHECK(containment_probability(post, 0.999, -1e9) == 1.0);
  CHECK(containment_probability(post, 0.999, 1e9) == 0.0);
  const std::vector<double> z{1, 2, 3, 4};
  CHECK(containment_probability(z, 2.0) == 0.75);
  CHECK(containment_probability(z, 2.5) == 0.5);
  CHECK(code_of([] { containment_probability(std::vector<double>{}, 1.0); }) ==
        ErrorCode::kArgument);
}

TEST_CASE("containment is monotone in target and in p") {
  proptest::for_all(
      32, 300,
      [](auto& rng) {
        PosteriorSamples post;
        post.chains = 1;
        for (int i = 0; i < 40; ++i)
          post.draws.push_back({proptest::uniform_in(rng, 25, 35), proptest::uniform_in(rng, 1, 3),
                                proptest::uniform_in(rng, -0.3, 0.3)});
        return std::tuple{post, proptest::uniform_in(rng, 30, 60), proptest::uniform_in(rng, 0, 5),
                          proptest::uniform_in(rng, 0.9, 0.999)};
      },
      [](const auto& s) {
        const auto& [post, target, delta, p] = s;
        CHECK(containment_probability(post, 0.999, target + delta) <=
              containment_probability(post, 0.999, target));
        CHECK(containment_probability(post, p, target) <=
              containment_probability(post, 0.999, target));
        const auto lo = posterior_quantile_draws(post, p);
        const auto hi = posterior_quantile_draws(post, 0.999);
        for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i] <= hi[i]);
      });
}

TEST_CASE("difference field") {
  const Grid g = Grid::uniform(1, 3, 0, 0);
  const Field a(g, {1.0, 5.0, NAN}, "degC");
  const Field b(g, {0.5, 7.0, 1.0}, "degC");
  const Field d = difference_field(a, b);
  CHECK(d.values[0] == 0.5);
  CHECK(d.values[1] == -2.0);
  CHECK(std::isnan(d.values[2]));
  const Field r = difference_field(b, a);
  CHECK(r.values[0] == -d.values[0]);
  CHECK(r.values[1] == -d.values[1]);
  const Field z = difference_field(a, a);
  CHECK(z.values[0] == 0.0);
  CHECK(code_of([&] { difference_field(a, Field(g, {1, 2, 3}, "K")); }) == ErrorCode::kShape);
  CHECK(code_of([&] { difference_field(a, Field(Grid::uniform(1, 3, 10, 10), {1, 2, 3}, "degC")); }) ==
        ErrorCode::kShape);
}

TEST_CASE("comparison of thresholds against a reference") {
  const Grid g = Grid::uniform(1, 3, 0, 0);
  const Field ref(g, {2.5, 10.0, NAN}, "degC");
  const auto r = compare_thresholds({{1, 2, 3, 4}, {1, 2, 3, 4}, {1, 2}}, ref);
  CHECK(r.probability[0] == 0.5);
  CHECK(r.category[0] == int(ConfidenceCategory::kAboutAsLikelyAsNot));
  CHECK(r.probability[1] == 0.0);
  CHECK(r.category[1] == int(ConfidenceCategory::kExceptionallyUnlikely));
  CHECK(r.missing(2));
  CHECK(r.gev_threshold[0] == 2.5);
  CHECK(r.difference[0] == 0.0);
  CHECK(r.difference[1] == -7.5);
  CHECK(r.units == "degC");
  const auto empty = compare_thresholds({{}, {1, 2}, {1}}, Field(g, {1, 1, 1}, "degC"));
  CHECK(empty.missing(0));
  CHECK_FALSE(empty.missing(1));
}

TEST_CASE("category fractions") {
  const Grid g = Grid::uniform(1, 2, 0, 0);
  const Field ref(g, {0.0, 0.0}, "degC");
  const auto one = compare_thresholds({{1, 2}, {3, 4}}, ref);
  const auto f = category_fractions(one, CellMask{1, 1}, g);
  CHECK(f.fraction[0] == 1.0);
  CHECK(f.missing == 0.0);

  const auto two = compare_thresholds({{1, 2}, {-1, -2}}, ref);
  const auto h = category_fractions(two, CellMask{1, 1}, g);
  CHECK(h.fraction[0] == 0.5);
  CHECK(h.fraction[7] == 0.5);

  const auto gap = compare_thresholds({{1, 2}, {}}, ref);
  const auto m = category_fractions(gap, CellMask{1, 1}, g);
  CHECK(m.missing == 0.5);
  CHECK(code_of([&] { category_fractions(gap, CellMask{0, 0}, g); }) ==
        ErrorCode::kUndefinedFraction);
}

TEST_CASE("category fractions partition the selection") {
  proptest::for_all(
      33, 200,
      [](auto& rng) {
        const std::size_t nlat = 1 + proptest::index_below(rng, 6), nlon = 1 + proptest::index_below(rng, 6);
        const Grid g = Grid::uniform(nlat, nlon, 70, nlat > 1 ? -70 : 70);
        std::vector<std::vector<double>> draws(g.size());
        std::vector<double> ref(g.size());
        CellMask sel(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (rng.uniform() > 0.2)
            for (int k = 0; k < 20; ++k) draws[i].push_back(rng.uniform());
          ref[i] = rng.uniform();
          sel[i] = rng.uniform() < 0.8;
        }
        sel[0] = 1;
        return std::tuple{g, draws, ref, sel};
      },
      [](const auto& s) {
        const auto& [g, draws, ref, sel] = s;
        const auto r = compare_thresholds(draws, Field(g, ref, "degC"));
        const auto f = category_fractions(r, sel, g);
        double total = f.missing;
        for (double v : f.fraction) total += v;
        CHECK(std::fabs(total - 1.0) < 1e-12);
        oracle::MicroGrid mg{g.latitudes(), g.nlon()};
        std::vector<int> codes(r.category.begin(), r.category.end());
        const auto expect = oracle::category_shares(mg, codes, sel, 8, true);
        for (int k = 0; k < 8; ++k) CHECK(std::fabs(f.fraction[std::size_t(k)] - expect[std::size_t(k)]) < 1e-12);
        CHECK(std::fabs(f.missing - expect[8]) < 1e-12);
      });
}
