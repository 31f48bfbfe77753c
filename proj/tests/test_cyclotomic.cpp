#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mbdos/cyclotomic.hpp"

using namespace mbdos::cyclo;

TEST_CASE("totient and moebius small values") {
  const std::int64_t phi[] = {1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4};
  for (int n = 1; n <= 12; ++n) CHECK(totient(n) == phi[n - 1]);
  CHECK(totient(20) == 8);
  CHECK_THROWS(totient(0));
  const int mu[] = {1, -1, -1, 0, -1, 1, -1, 0, 0, 1};
  for (int n = 1; n <= 10; ++n) CHECK(moebius(n) == mu[n - 1]);
  CHECK(divisors(12) == std::vector<int>{1, 2, 3, 4, 6, 12});
  CHECK(prime_factors(60) == std::vector<std::int64_t>{2, 3, 5});
}

TEST_CASE("sum of totients over divisors is n") {
  for (int n = 1; n <= 60; ++n) {
    std::int64_t s = 0;
    for (int d : divisors(n)) s += totient(d);
    CHECK(s == n);
  }
}

TEST_CASE("cyclotomic polynomials") {
  CHECK(cyclotomic_poly(1).coeffs == std::vector<std::int64_t>{-1, 1});
  CHECK(cyclotomic_poly(3).coeffs == std::vector<std::int64_t>{1, 1, 1});
  CHECK(cyclotomic_poly(6).coeffs == std::vector<std::int64_t>{1, -1, 1});
  CHECK(cyclotomic_poly(12).coeffs == std::vector<std::int64_t>{1, 0, -1, 0, 1});
  // Phi_105 is the first with a coefficient of magnitude 2.
  const auto p105 = cyclotomic_poly(105);
  CHECK(p105.degree() == 48);
  CHECK(std::any_of(p105.coeffs.begin(), p105.coeffs.end(), [](auto c) { return c == -2; }));
  for (int q = 1; q <= 40; ++q) {
    const auto p = cyclotomic_poly(q);
    CHECK(p.degree() == totient(q));
    // Vanishes at the primitive root.
    std::complex<double> v{};
    for (int i = p.degree(); i >= 0; --i) v = v * root_value(q, 1) + static_cast<double>(p.coeffs[i]);
    CHECK(std::abs(v) < 1e-9);
  }
}

TEST_CASE("printed transfer matrices") {
  const std::vector<std::vector<std::int64_t>> t6 = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  const std::vector<std::vector<std::int64_t>> t3 = {{1, 0}, {0, 1}, {-1, -1}};
  CHECK(TransferMatrix(6).rows() == t6);
  CHECK(TransferMatrix(3).rows() == t3);
  CHECK(TransferMatrix(1).rows() == std::vector<std::vector<std::int64_t>>{{1}});
  CHECK(TransferMatrix(2).rows() == std::vector<std::vector<std::int64_t>>{{1}, {-1}});
}

TEST_CASE("transfer matrix rows expand powers of the root") {
  for (int q = 1; q <= 60; ++q) {
    const TransferMatrix t(q);
    CHECK(t.phi() == totient(q));
    for (int k = 0; k < t.phi(); ++k)
      for (int j = 0; j < t.phi(); ++j) CHECK(t(k, j) == (k == j ? 1 : 0));
    for (int p = -q; p < 2 * q; ++p) {
      std::complex<double> s{};
      for (int k = 0; k < t.phi(); ++k) s += static_cast<double>(t(p, k)) * root_value(q, k);
      CHECK(std::abs(s - root_value(q, p)) < 1e-10);
    }
  }
}

TEST_CASE("frobenius permutes roots for units") {
  for (int q : {5, 6, 8, 9, 12, 15}) {
    const TransferMatrix t(q);
    for (int k = 1; k < q; ++k) {
      if (std::gcd(k, q) != 1) continue;
      std::set<std::vector<std::int64_t>> image;
      for (int p = 0; p < q; ++p) {
        const auto y = frobenius_apply(t, k, root_element(t, p));
        CHECK(y == root_element(t, static_cast<std::int64_t>(k) * p));
        CHECK(std::abs(y.value() - root_value(q, static_cast<std::int64_t>(k) * p)) < 1e-10);
        image.insert(y.coords);
      }
      CHECK(image.size() == static_cast<std::size_t>(q));
    }
  }
}

TEST_CASE("frobenius is linear on sums") {
  const TransferMatrix t(12);
  CycloElement x{12, {3, -1, 0, 2}};
  CycloElement y{12, {0, 4, 1, -1}};
  CycloElement s{12, {3, 3, 1, 1}};
  for (int k : {1, 5, 7, 11}) {
    const auto fx = frobenius_apply(t, k, x), fy = frobenius_apply(t, k, y), fs = frobenius_apply(t, k, s);
    for (int j = 0; j < 4; ++j) CHECK(fs.coords[j] == fx.coords[j] + fy.coords[j]);
  }
}
