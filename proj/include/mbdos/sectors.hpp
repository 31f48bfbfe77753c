#pragma once

// q-sectors of the L-point discrete Fourier index set and the folding maps
// between them.

#include <cstdint>
#include <span>
#include <vector>

namespace mbdos {

/// A run of occupation numbers n_0..n_{L-1}.
using OccupationVector = std::vector<int>;

namespace sectors {

struct Sector {
  int q = 1;
  std::vector<int> ells;  // ascending; {0} for q == 1
};

/// Fold map q_from -> q_from / prime.
struct FlowEdge {
  int from = 1;
  int to = 1;
  int prime = 1;
  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

class SectorFlow {
 public:
  explicit SectorFlow(int L);

  int L() const { return L_; }
  /// Sectors ordered by q descending.
  const std::vector<Sector>& sectors() const { return sectors_; }
  const std::vector<FlowEdge>& edges() const { return edges_; }
  const Sector& sector(int q) const;
  /// The q-sector that contains index ell, q = L / gcd(L, ell).
  int sector_of(int ell) const;
  /// Divisors of L greater than one, descending.
  std::vector<int> nontrivial_sectors() const;

 private:
  int L_;
  std::vector<Sector> sectors_;
  std::vector<FlowEdge> edges_;
};

SectorFlow sector_partition(int L);

/// Folded configuration m of length q; m_j = sum_p n_{p q + j}.
struct FoldedConfig {
  int q = 1;
  std::vector<int> m;
};

FoldedConfig fold_config(std::span<const int> n, int target_q);

/// Units k in [1, q) with gcd(k, q) == 1; {0} for q == 1.
std::vector<int> galois_group(int q);

}  // namespace sectors
}  // namespace mbdos
