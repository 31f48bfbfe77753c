#pragma once

// Exact integer arithmetic over roots of unity.
//
// A q-th cyclotomic number is stored by its integer coordinates in the basis
// {1, w, w^2, ..., w^(phi(q)-1)} with w = exp(2 pi i / q). Every power w^p
// expands in that basis through row p of the transfer matrix T_q, so all
// manipulations below stay in exact integer arithmetic.

#include <complex>
#include <cstdint>
#include <vector>

namespace mbdos::cyclo {

/// Euler totient by trial-division factorization. Throws on n == 0.
std::int64_t totient(std::int64_t n);

/// Distinct prime factors of n (ascending).
std::vector<std::int64_t> prime_factors(std::int64_t n);

/// Positive divisors of n (ascending).
std::vector<int> divisors(int n);

/// Moebius function.
int moebius(std::int64_t n);

/// Monic cyclotomic polynomial Phi_q; coeffs[i] is the coefficient of x^i.
struct CycloPoly {
  int q = 1;
  std::vector<std::int64_t> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

CycloPoly cyclotomic_poly(int q);

/// q x phi(q) integer matrix whose row p expands w_q^p in the power basis.
class TransferMatrix {
 public:
  explicit TransferMatrix(int q);

  int q() const { return q_; }
  int phi() const { return phi_; }
  /// Entry (p, k). Row index is reduced modulo q.
  std::int64_t operator()(std::int64_t p, int k) const {
    auto r = p % q_;
    if (r < 0) r += q_;
    return rows_[static_cast<std::size_t>(r) * phi_ + k];
  }
  /// Row p (reduced modulo q) as a contiguous slice of length phi().
  const std::int64_t* row(std::int64_t p) const {
    auto r = p % q_;
    if (r < 0) r += q_;
    return rows_.data() + static_cast<std::size_t>(r) * phi_;
  }
  std::vector<std::vector<std::int64_t>> rows() const;

 private:
  int q_;
  int phi_;
  std::vector<std::int64_t> rows_;  // row-major, q_ x phi_
};

/// Numeric value of w_q^p.
std::complex<double> root_value(int q, std::int64_t p);

/// Element of Q(w_q) with integer coordinates in the power basis.
struct CycloElement {
  int q = 1;
  std::vector<std::int64_t> coords;

  std::complex<double> value() const;
  friend bool operator==(const CycloElement&, const CycloElement&) = default;
};

/// Coordinates of w_q^p.
CycloElement root_element(const TransferMatrix& t, std::int64_t p);

/// sigma_k: w^j -> w^(k j), extended linearly over the coordinates.
/// A bijection on Q(w_q) exactly when gcd(k, q) == 1.
CycloElement frobenius_apply(const TransferMatrix& t, std::int64_t k, const CycloElement& x);
CycloElement frobenius_apply(int q, std::int64_t k, const CycloElement& x);

}  // namespace mbdos::cyclo
