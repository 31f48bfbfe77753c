#pragma once

// Brute-force reference: enumerate every occupation vector of an (L, N, R)
// ensemble and evaluate Fourier values, invariants and energies directly.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mbdos/cyclotomic.hpp"
#include "mbdos/sectors.hpp"
#include "mbdos/spectrum.hpp"
#include "mbdos/types.hpp"

namespace mbdos::oracle {

/// C_R(L, N): number of length-L vectors with entries in [0, R] summing to N.
BigCount count_configs(int L, int N, int R);

/// Streams (L, N, R) occupation vectors in lexicographic order.
///
/// Ranks are lexicographic positions, so a rank interval [begin, end) is an
/// independent chunk that can be enumerated on its own.
class ConfigEnumerator {
 public:
  ConfigEnumerator(int L, int N, int R);
  /// Restrict to lexicographic ranks [begin, end).
  ConfigEnumerator(int L, int N, int R, std::uint64_t begin, std::uint64_t end);

  /// Advances and returns the next vector, or nullptr when exhausted.
  const OccupationVector* next();
  std::uint64_t total() const { return total_; }

  std::uint64_t rank_of(std::span<const int> n) const;
  OccupationVector unrank(std::uint64_t rank) const;

 private:
  std::uint64_t completions(int len, int sum) const;
  bool advance();

  int L_, N_, R_;
  std::vector<std::uint64_t> table_;  // completions(len, sum), saturating
  std::uint64_t total_ = 0;
  std::uint64_t pos_ = 0, end_ = 0;
  bool started_ = false;
  OccupationVector cur_;
};

/// Materializes the filling matrix (tests only; use ConfigEnumerator elsewhere).
std::vector<OccupationVector> enumerate_configs(int L, int N, int R);

/// U^L_ell(n) = sum_k n_k w_L^(k ell).
std::complex<double> u_value(std::span<const int> n, int ell);

/// I = T_q^T fold(n, q): coordinates of U^q_1(fold(n, q)).
std::vector<std::int64_t> invariants_of(std::span<const int> n, int q);
std::vector<std::int64_t> invariants_of(std::span<const int> n, const cyclo::TransferMatrix& t);

/// Exact Fourier value U^L_ell(n) as an element of Q(w_q), q = L / gcd(L, ell).
cyclo::CycloElement u_element(std::span<const int> n, int ell);

struct DegeneracyClass {
  int q = 1;
  std::vector<std::int64_t> invariants;
  std::uint64_t count = 0;
  OccupationVector witness;
};

/// Degeneracy classes of the q-sector, sorted by invariant vector.
std::vector<DegeneracyClass> degeneracy_classes(int L, int N, int R, int q);

/// Multiset {sum_k n_k eps_k}, energies merged at exact equality.
WeightedSpectrum exact_mbdos(int L, int N, int R, std::span<const double> eps);

}  // namespace mbdos::oracle
