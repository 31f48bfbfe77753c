#include "mbdos/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mbdos::oracle {

namespace {
constexpr auto kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

void check_params(int L, int N, int R) {
  if (L < 1) throw std::invalid_argument("ensemble: L must be positive");
  if (N < 0) throw std::invalid_argument("ensemble: N must be non-negative");
  if (R < 0) throw std::invalid_argument("ensemble: R must be non-negative");
}
}  // namespace

BigCount count_configs(int L, int N, int R) {
  check_params(L, N, R);
  // dp[s] = number of prefixes summing to s
  std::vector<BigCount> dp(N + 1, 0);
  dp[0] = 1;
  for (int k = 0; k < L; ++k) {
    std::vector<BigCount> next(N + 1, 0);
    for (int s = 0; s <= N; ++s) {
      if (dp[s] == 0) continue;
      for (int v = 0; v <= R && s + v <= N; ++v) next[s + v] += dp[s];
    }
    dp = std::move(next);
  }
  return dp[N];
}

ConfigEnumerator::ConfigEnumerator(int L, int N, int R) : L_(L), N_(N), R_(R) {
  check_params(L, N, R);
  table_.assign(static_cast<std::size_t>(L + 1) * (N + 1), 0);
  table_[0] = 1;  // empty vector, sum 0
  for (int len = 1; len <= L; ++len)
    for (int s = 0; s <= N; ++s) {
      std::uint64_t c = 0;
      for (int v = 0; v <= std::min(R, s); ++v) c = sat_add(c, table_[static_cast<std::size_t>(len - 1) * (N + 1) + (s - v)]);
      table_[static_cast<std::size_t>(len) * (N + 1) + s] = c;
    }
  total_ = completions(L, N);
  if (total_ == kSaturated) throw std::overflow_error("ConfigEnumerator: ensemble too large to enumerate");
  end_ = total_;
}

ConfigEnumerator::ConfigEnumerator(int L, int N, int R, std::uint64_t begin, std::uint64_t end)
    : ConfigEnumerator(L, N, R) {
  if (begin > end || end > total_) throw std::invalid_argument("ConfigEnumerator: rank range out of bounds");
  pos_ = begin;
  end_ = end;
}

std::uint64_t ConfigEnumerator::completions(int len, int sum) const {
  if (sum < 0 || sum > N_) return 0;
  return table_[static_cast<std::size_t>(len) * (N_ + 1) + sum];
}

OccupationVector ConfigEnumerator::unrank(std::uint64_t rank) const {
  if (rank >= total_) throw std::out_of_range("unrank: rank " + std::to_string(rank) + " out of range");
  OccupationVector n(L_, 0);
  int remaining = N_;
  for (int i = 0; i < L_; ++i) {
    for (int v = 0; v <= std::min(R_, remaining); ++v) {
      const auto c = completions(L_ - i - 1, remaining - v);
      if (rank < c) {
        n[i] = v;
        remaining -= v;
        break;
      }
      rank -= c;
    }
  }
  return n;
}

std::uint64_t ConfigEnumerator::rank_of(std::span<const int> n) const {
  if (static_cast<int>(n.size()) != L_) throw std::invalid_argument("rank_of: length mismatch");
  std::uint64_t rank = 0;
  int remaining = N_;
  for (int i = 0; i < L_; ++i) {
    if (n[i] < 0 || n[i] > R_ || n[i] > remaining) throw std::invalid_argument("rank_of: not a member of the ensemble");
    for (int v = 0; v < n[i]; ++v) rank += completions(L_ - i - 1, remaining - v);
    remaining -= n[i];
  }
  if (remaining != 0) throw std::invalid_argument("rank_of: particle number mismatch");
  return rank;
}

bool ConfigEnumerator::advance() {
  // Largest i < L-1 that can take one particle from its suffix.
  int suffix = 0;
  for (int i = L_ - 1; i >= 0; --i) {
    if (i < L_ - 1 && cur_[i] < R_ && suffix >= 1) {
      ++cur_[i];
      int rest = suffix - 1;
      for (int j = L_ - 1; j > i; --j) {
        cur_[j] = std::min(R_, rest);
        rest -= cur_[j];
      }
      return true;
    }
    suffix += cur_[i];
  }
  return false;
}

const OccupationVector* ConfigEnumerator::next() {
  if (pos_ >= end_) return nullptr;
  if (!started_) {
    cur_ = unrank(pos_);
    started_ = true;
  } else if (!advance()) {
    return nullptr;
  }
  ++pos_;
  return &cur_;
}

std::vector<OccupationVector> enumerate_configs(int L, int N, int R) {
  ConfigEnumerator e(L, N, R);
  std::vector<OccupationVector> out;
  out.reserve(e.total());
  while (const auto* n = e.next()) out.push_back(*n);
  return out;
}

std::complex<double> u_value(std::span<const int> n, int ell) {
  const int L = static_cast<int>(n.size());
  std::complex<double> z{};
  for (int k = 0; k < L; ++k)
    if (n[k] != 0) z += static_cast<double>(n[k]) * cyclo::root_value(L, static_cast<std::int64_t>(k) * ell);
  return z;
}

std::vector<std::int64_t> invariants_of(std::span<const int> n, const cyclo::TransferMatrix& t) {
  const auto folded = sectors::fold_config(n, t.q());
  std::vector<std::int64_t> inv(t.phi(), 0);
  for (int j = 0; j < t.q(); ++j) {
    if (folded.m[j] == 0) continue;
    const auto* row = t.row(j);
    for (int k = 0; k < t.phi(); ++k) inv[k] += folded.m[j] * row[k];
  }
  return inv;
}

std::vector<std::int64_t> invariants_of(std::span<const int> n, int q) {
  return invariants_of(n, cyclo::TransferMatrix(q));
}

cyclo::CycloElement u_element(std::span<const int> n, int ell) {
  const int L = static_cast<int>(n.size());
  ell %= L;
  if (ell < 0) ell += L;
  const int d = std::gcd(L, ell);
  const int q = ell == 0 ? 1 : L / d;
  const cyclo::TransferMatrix t(q);
  // w_L^(k ell) = w_q^(k ell / d)
  const std::int64_t step = ell == 0 ? 0 : ell / d;
  cyclo::CycloElement out{q, std::vector<std::int64_t>(t.phi(), 0)};
  for (int k = 0; k < L; ++k) {
    if (n[k] == 0) continue;
    const auto* row = t.row(static_cast<std::int64_t>(k) * step);
    for (int m = 0; m < t.phi(); ++m) out.coords[m] += n[k] * row[m];
  }
  return out;
}

std::vector<DegeneracyClass> degeneracy_classes(int L, int N, int R, int q) {
  if (q < 1 || L % q != 0) throw std::invalid_argument("degeneracy_classes: q must divide L");
  const cyclo::TransferMatrix t(q);
  std::map<std::vector<std::int64_t>, DegeneracyClass> classes;
  ConfigEnumerator e(L, N, R);
  while (const auto* n = e.next()) {
    auto inv = invariants_of(*n, t);
    auto [it, inserted] = classes.try_emplace(inv);
    if (inserted) it->second = DegeneracyClass{q, inv, 0, *n};
    ++it->second.count;
  }
  std::vector<DegeneracyClass> out;
  out.reserve(classes.size());
  for (auto& [_, c] : classes) out.push_back(std::move(c));
  return out;
}

WeightedSpectrum exact_mbdos(int L, int N, int R, std::span<const double> eps) {
  if (static_cast<int>(eps.size()) != L) throw std::invalid_argument("exact_mbdos: energies must have length L");
  ConfigEnumerator e(L, N, R);
  std::vector<double> energies;
  energies.reserve(e.total());
  while (const auto* n = e.next()) {
    double E = 0.0;
    for (int k = 0; k < L; ++k) E += (*n)[k] * eps[k];
    energies.push_back(E);
  }
  return WeightedSpectrum::from_energies(std::move(energies));
}

}  // namespace mbdos::oracle
