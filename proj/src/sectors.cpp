#include "mbdos/sectors.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mbdos/cyclotomic.hpp"

namespace mbdos::sectors {

SectorFlow::SectorFlow(int L) : L_(L) {
  if (L < 1) throw std::invalid_argument("sector_partition: L must be positive");
  auto divs = cyclo::divisors(L);
  std::sort(divs.rbegin(), divs.rend());
  for (int q : divs) {
    Sector s{q, {}};
    if (q == 1) {
      s.ells.push_back(0);
    } else {
      for (int ell = 1; ell < L; ++ell)
        if (L / std::gcd(L, ell) == q) s.ells.push_back(ell);
    }
    sectors_.push_back(std::move(s));
    if (q > 1)
      for (auto p : cyclo::prime_factors(q)) edges_.push_back({q, q / static_cast<int>(p), static_cast<int>(p)});
  }
}

const Sector& SectorFlow::sector(int q) const {
  for (const auto& s : sectors_)
    if (s.q == q) return s;
  throw std::invalid_argument("sector: " + std::to_string(q) + " does not divide L=" + std::to_string(L_));
}

int SectorFlow::sector_of(int ell) const {
  ell %= L_;
  if (ell < 0) ell += L_;
  return ell == 0 ? 1 : L_ / std::gcd(L_, ell);
}

std::vector<int> SectorFlow::nontrivial_sectors() const {
  std::vector<int> out;
  for (const auto& s : sectors_)
    if (s.q > 1) out.push_back(s.q);
  return out;
}

SectorFlow sector_partition(int L) { return SectorFlow(L); }

FoldedConfig fold_config(std::span<const int> n, int target_q) {
  const int L = static_cast<int>(n.size());
  if (target_q < 1 || L % target_q != 0)
    throw std::invalid_argument("fold_config: " + std::to_string(target_q) + " does not divide L=" + std::to_string(L));
  FoldedConfig out{target_q, std::vector<int>(target_q, 0)};
  for (int k = 0; k < L; ++k) out.m[k % target_q] += n[k];
  return out;
}

std::vector<int> galois_group(int q) {
  if (q < 1) throw std::invalid_argument("galois_group: q must be positive");
  if (q == 1) return {0};
  std::vector<int> out;
  for (int k = 1; k < q; ++k)
    if (std::gcd(k, q) == 1) out.push_back(k);
  return out;
}

}  // namespace mbdos::sectors
