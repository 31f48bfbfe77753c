#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mbdos/analysis.hpp"
#include "mbdos/generators.hpp"
#include "mbdos/oracle.hpp"

using namespace mbdos;
using namespace mbdos::analysis;

TEST_CASE("single level gives the kernel") {
  const WeightedSpectrum s({{1.5, 1}});
  const double g = 0.2;
  const auto grid = covering_grid(s, g, 401);
  CHECK(grid.lo == doctest::Approx(0.5));
  CHECK(grid.hi == doctest::Approx(2.5));
  const auto c = kde(s, g, grid, Normalization::Raw);
  for (int i = 0; i < grid.points; ++i) {
    const double x = (grid.at(i) - 1.5) / g;
    CHECK(c.values[i] == doctest::Approx(std::exp(-0.5 * x * x) / (g * std::sqrt(2 * M_PI))).epsilon(1e-12));
  }
  CHECK(kde_at(s, g, 1.5) == doctest::Approx(1.0 / (g * std::sqrt(2 * M_PI))));
  CHECK(kde_at(s, g, 1.5 + 9 * g) == 0.0);
}

TEST_CASE("probability curves integrate to one and stay non-negative") {
  const auto eps = gen::gaussian(10, 0.0, 1.0, 4);
  const auto s = oracle::exact_mbdos(10, 4, 4, eps);
  for (double g : {0.05, 0.3, 1.0}) {
    const auto c = kde(s, g, covering_grid(s, g, 4000));
    CHECK(std::abs(integrate(c) - 1.0) < 1e-6);
    for (double v : c.values) CHECK(v >= 0.0);
  }
  CHECK_THROWS(kde(s, 0.0, Grid{}));
}

TEST_CASE("shift equivariance on an aligned grid") {
  const auto s = oracle::exact_mbdos(6, 2, 1, gen::gaussian(6, 0.0, 1.0, 8));
  const Grid g{-6.0, 6.0, 1201};
  const double shift = 25 * g.step();
  const auto a = kde(s, 0.2, g);
  const auto b = kde(s.shifted(shift), 0.2, g);
  for (int i = 0; i + 25 < g.points; ++i) CHECK(std::abs(b.values[i + 25] - a.values[i]) < 1e-12);
}

TEST_CASE("raw kde agrees with kde_at") {
  const auto s = oracle::exact_mbdos(8, 3, 3, gen::gaussian(8, 0.0, 1.0, 2));
  const auto grid = covering_grid(s, 0.3, 200);
  const auto c = kde(s, 0.3, grid, Normalization::Raw);
  for (int i = 0; i < grid.points; i += 7) CHECK(c.values[i] == doctest::Approx(kde_at(s, 0.3, grid.at(i))).epsilon(1e-12));
}

TEST_CASE("lp distance") {
  const auto s = oracle::exact_mbdos(6, 3, 3, gen::gaussian(6, 0.0, 1.0, 1));
  const auto g = covering_grid(s, 0.3);
  const auto a = kde(s, 0.3, g);
  CHECK(lp_distance(a, a, 3.0) == 0.0);
  auto b = a;
  b.values[10] += 2.0;
  CHECK(lp_distance(a, b, 3.0) == doctest::Approx(2.0));
  CHECK(lp_distance(a, b, 1.0) == doctest::Approx(2.0));
  const auto other = kde(s, 0.3, Grid{g.lo, g.hi + 1.0, g.points});
  CHECK_THROWS(lp_distance(a, other, 3.0));
  CHECK_THROWS(lp_distance(a, b, 0.0));
}

TEST_CASE("gaussian curve: estimators agree") {
  const double mu = 1.0, sigma = 2.0;
  DensityCurve c{Grid{-7, 9, 801}, {}, 1.0, Normalization::Raw};
  for (int i = 0; i < c.grid.points; ++i) {
    const double x = (c.grid.at(i) - mu) / sigma;
    c.values.push_back(3.0 * std::exp(-0.5 * x * x));
  }
  const auto fit = fit_gaussian(c);
  CHECK(fit.mu == doctest::Approx(mu).epsilon(1e-9));
  CHECK(fit.sigma == doctest::Approx(sigma).epsilon(1e-9));
  CHECK(fit.amplitude == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r2 == doctest::Approx(1.0));
  const auto bz = beta_boltzmann(c);
  const auto bf = beta_boltzmann_fit(c, fit);
  CHECK_FALSE(bz.valid.front());
  CHECK_FALSE(bz.valid.back());
  for (int i = 1; i + 1 < c.grid.points; ++i) {
    REQUIRE(bz.valid[i]);
    CHECK(std::abs(bz.beta[i] - bf.beta[i]) < 1e-6);
  }
  // fit estimator is exactly linear
  const double slope = (bf.beta[1] - bf.beta[0]) / (bf.energies[1] - bf.energies[0]);
  for (std::size_t i = 0; i < bf.beta.size(); ++i)
    CHECK(std::abs(bf.beta[i] - (bf.beta[0] + slope * (bf.energies[i] - bf.energies[0]))) < 1e-12);
  CHECK(*interpolate(bz, mu) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("symmetric spectrum has beta zero at its centre") {
  const std::vector<double> eps = {-2, -1, 1, 2};
  const auto s = oracle::exact_mbdos(4, 2, 2, eps);
  const Grid g{-10, 10, 1001};
  const auto c = kde(s, 0.8, g);
  const auto bz = beta_boltzmann(c);
  CHECK(std::abs(*interpolate(bz, 0.0)) < 1e-9);
  CHECK(std::abs(fit_gaussian(c).beta(0.0)) < 1e-9);
}

TEST_CASE("boltzmann estimator is masked where the density vanishes") {
  DensityCurve c{Grid{0, 1, 5}, {0.0, 1.0, 2.0, 1.0, 0.0}, 1.0, Normalization::Raw};
  const auto b = beta_boltzmann(c);
  CHECK_FALSE(b.valid[1]);
  CHECK(b.valid[2]);
  CHECK_FALSE(b.valid[3]);
}

TEST_CASE("empirical fit recovers an exact Bose-Einstein occupation") {
  const double beta = 0.7, mu = -1.0;
  const std::vector<double> eps = {0.0, 0.4, 1.0, 1.3, 2.2, 3.0};
  std::vector<double> n;
  for (double e : eps) n.push_back(1.0 / (std::exp(beta * (e - mu)) - 1.0));
  const auto f = empirical_fit(eps, n);
  CHECK(f.slope == doctest::Approx(beta));
  CHECK(f.intercept == doctest::Approx(-beta * mu));
  CHECK(f.r2 == doctest::Approx(1.0));
  const std::vector<double> probes = {0.5};
  const auto b = beta_empirical(probes, eps, {n});
  CHECK(b.valid[0]);
  CHECK(b.beta[0] == doctest::Approx(beta));
}

TEST_CASE("occupancy: single particle in two levels") {
  const std::vector<double> eps = {-1.0, 1.0};
  const OccupancyModel m(eps, 1, 1, 0.01, {});
  CHECK(*m.occupancy(-1.0, 0) == doctest::Approx(1.0));
  CHECK(*m.occupancy(-1.0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(m.occupancy(50.0, 0).has_value());
}

TEST_CASE("occupancy: denominator identity and particle sum with exact sub-spectra") {
  const int L = 8, N = 3;
  const auto eps = gen::gaussian(L, 0.0, 1.0, 21);
  const auto full = oracle::exact_mbdos(L, N, N, eps);
  const double gamma = 0.25;
  OccupancyPolicy p;
  p.drop_top = 0;
  const OccupancyModel m(eps, N, N, gamma, p);
  for (int k = 0; k < L; ++k)
    for (int n = 0; n <= N; ++n) {
      std::vector<double> rest;
      for (int j = 0; j < L; ++j)
        if (j != k) rest.push_back(eps[j]);
      CHECK(compare_spectra(m.subspectrum(k, n), oracle::exact_mbdos(L - 1, n, N, rest)).ok(1e-9));
    }
  for (double E : {full.mean() - full.variance(), full.mean() - 0.5, full.mean()}) {
    const double ref = kde_at(full, gamma, E);
    double total = 0;
    for (int k = 0; k < L; ++k) {
      CHECK(std::abs(m.denominator(E, k) - ref) <= 1e-9 * ref);
      total += *m.occupancy(E, k);
    }
    CHECK(total == doctest::Approx(N).epsilon(1e-9));
  }
}
