#include "mbdos/cyclotomic.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace mbdos::cyclo {

std::vector<std::int64_t> prime_factors(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("prime_factors: n must be positive");
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::int64_t totient(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("totient: n must be positive, got " + std::to_string(n));
  std::int64_t result = n;
  for (auto p : prime_factors(n)) result = result / p * (p - 1);
  return result;
}

std::vector<int> divisors(int n) {
  if (n < 1) throw std::invalid_argument("divisors: n must be positive");
  std::vector<int> low, high;
  for (int d = 1; static_cast<long long>(d) * d <= n; ++d) {
    if (n % d == 0) {
      low.push_back(d);
      if (d != n / d) high.push_back(n / d);
    }
  }
  low.insert(low.end(), high.rbegin(), high.rend());
  return low;
}

int moebius(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("moebius: n must be positive");
  int sign = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      sign = -sign;
    }
  }
  if (n > 1) sign = -sign;
  return sign;
}

namespace {

using Poly = std::vector<std::int64_t>;

// p *= (x^d - 1)
void mul_xd_minus_one(Poly& p, int d) {
  Poly r(p.size() + d, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i + d] += p[i];
    r[i] -= p[i];
  }
  p = std::move(r);
}

// p /= (x^d - 1), exact division; q_i = q_{i-d} - p_i.
void div_xd_minus_one(Poly& p, int d) {
  if (p.size() <= static_cast<std::size_t>(d)) throw std::logic_error("cyclotomic: inexact division");
  const std::size_t n = p.size() - d;
  Poly q(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = (i >= static_cast<std::size_t>(d) ? q[i - d] : 0) - p[i];
  }
  // remainder check: x^d q - q must reproduce p exactly
  Poly back = q;
  mul_xd_minus_one(back, d);
  if (back != p) throw std::logic_error("cyclotomic: inexact division");
  p = std::move(q);
}

}  // namespace

CycloPoly cyclotomic_poly(int q) {
  if (q < 1) throw std::invalid_argument("cyclotomic_poly: q must be positive");
  // Phi_q = prod_{d | q} (x^d - 1)^mu(q/d); multiply first, then divide.
  Poly p{1};
  const auto divs = divisors(q);
  for (int d : divs)
    if (moebius(q / d) == 1) mul_xd_minus_one(p, d);
  for (int d : divs)
    if (moebius(q / d) == -1) div_xd_minus_one(p, d);
  return CycloPoly{q, std::move(p)};
}

TransferMatrix::TransferMatrix(int q) : q_(q) {
  if (q < 1) throw std::invalid_argument("transfer_matrix: q must be positive");
  phi_ = static_cast<int>(totient(q));
  const auto poly = cyclotomic_poly(q);
  rows_.assign(static_cast<std::size_t>(q_) * phi_, 0);
  for (int p = 0; p < phi_; ++p) rows_[static_cast<std::size_t>(p) * phi_ + p] = 1;
  // (T)_{p+1,0} = -c_0 (T)_{p,phi-1};  (T)_{p+1,k} = (T)_{p,k-1} - c_k (T)_{p,phi-1}
  for (int p = phi_ - 1; p + 1 < q_; ++p) {
    const std::int64_t* cur = rows_.data() + static_cast<std::size_t>(p) * phi_;
    std::int64_t* next = rows_.data() + static_cast<std::size_t>(p + 1) * phi_;
    const std::int64_t top = cur[phi_ - 1];
    next[0] = -poly.coeffs[0] * top;
    for (int k = 1; k < phi_; ++k) next[k] = cur[k - 1] - poly.coeffs[k] * top;
  }
}

std::vector<std::vector<std::int64_t>> TransferMatrix::rows() const {
  std::vector<std::vector<std::int64_t>> out(q_);
  for (int p = 0; p < q_; ++p) out[p].assign(row(p), row(p) + phi_);
  return out;
}

std::complex<double> root_value(int q, std::int64_t p) {
  auto r = p % q;
  if (r < 0) r += q;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
  return std::polar(1.0, angle);
}

std::complex<double> CycloElement::value() const {
  std::complex<double> z{};
  for (std::size_t k = 0; k < coords.size(); ++k)
    if (coords[k] != 0) z += static_cast<double>(coords[k]) * root_value(q, static_cast<std::int64_t>(k));
  return z;
}

CycloElement root_element(const TransferMatrix& t, std::int64_t p) {
  const auto* r = t.row(p);
  return CycloElement{t.q(), std::vector<std::int64_t>(r, r + t.phi())};
}

CycloElement frobenius_apply(const TransferMatrix& t, std::int64_t k, const CycloElement& x) {
  if (x.q != t.q() || static_cast<int>(x.coords.size()) != t.phi())
    throw std::invalid_argument("frobenius_apply: element does not belong to Q(w_" + std::to_string(t.q()) + ")");
  CycloElement out{t.q(), std::vector<std::int64_t>(t.phi(), 0)};
  for (int j = 0; j < t.phi(); ++j) {
    if (x.coords[j] == 0) continue;
    const auto* r = t.row(k * j);
    for (int m = 0; m < t.phi(); ++m) out.coords[m] += x.coords[j] * r[m];
  }
  return out;
}

CycloElement frobenius_apply(int q, std::int64_t k, const CycloElement& x) {
  return frobenius_apply(TransferMatrix(q), k, x);
}

}  // namespace mbdos::cyclo
