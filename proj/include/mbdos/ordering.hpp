#pragma once

// Scoring and searching orderings of the single-body spectrum.
//
// Relabeling the levels leaves the exact many-body spectrum unchanged but
// moves spectral weight between q-sectors. The scores below measure how much
// weight sits in a sector; the annealer searches for orderings that empty the
// sectors that are going to be discarded.

#include <cstdint>
#include <span>
#include <vector>

namespace mbdos::ordering {

/// perm[i] is the index of the original level placed at position i.
using Permutation = std::vector<int>;

std::vector<double> permute(const Permutation& perm, std::span<const double> eps);
Permutation identity_permutation(int L);
Permutation sorted_ascending(std::span<const double> eps);

struct OrderingScore {
  int q = 1;
  double A = 0.0;  // sum_{ell in sector q} |f_ell|
  double P = 0.0;  // fraction of sum_k eps_k^2 carried by the sector
};

/// Scores for sector q (q | L), with f_ell = sum_k eps_k w_L^(-k ell) the plain
/// (unnormalized) transform, so that sum_k eps_k^2 = (1/L) sum_ell |f_ell|^2
/// and P = (1/L) sum_{ell in q} |f_ell|^2 / sum_k eps_k^2.
OrderingScore sector_scores(std::span<const double> eps, int q);

/// P_q over every sector of L (including q = 1); sums to 1.
std::vector<OrderingScore> all_sector_scores(std::span<const double> eps);

/// Mean level spacing of the sorted spectrum, (max - min) / (L - 1).
double mean_spacing(std::span<const double> eps);

struct MinEstimates {
  double A = 0.0;  // phi(q) * spacing
  double P = 0.0;  // phi(q) * spacing^2 / sum_k eps_k^2
};

MinEstimates min_estimates(int q, std::span<const double> eps);

enum class CostKind { A, P, Mix };

struct CostSpec {
  CostKind kind = CostKind::P;
  std::vector<int> sectors;  // target sectors to empty; each divides L, q > 1
  double weight_a = 1.0;     // Mix only
  double weight_p = 1.0;     // Mix only
};

/// Cost of an ordering: sum over target sectors of A_q, P_q or their weighted sum.
double cost(std::span<const double> eps, const CostSpec& spec);

/// Stop threshold: F times the cost built from min_estimates.
double stop_threshold(std::span<const double> eps, const CostSpec& spec, double stop_factor);

struct AnnealSchedule {
  double alpha = 0.995;             // geometric cooling factor
  int calibration_samples = 100;    // random permutations used to set T0
  double initial_temperature = 0.0; // <= 0: standard deviation of calibration costs
  double reheat_ratio = 1e-4;       // restart an epoch once T < ratio * T0
  std::uint64_t budget = 100000;    // cost evaluations, calibration included
  std::uint64_t trace_every = 0;    // 0: trace improvements only
};

struct TracePoint {
  std::uint64_t evaluation = 0;
  double temperature = 0.0;
  double current = 0.0;
  double best = 0.0;
};

struct AnnealResult {
  Permutation best;
  double best_cost = 0.0;
  std::uint64_t evaluations = 0;
  bool stopped = false;  // stop criterion reached
  std::vector<TracePoint> trace;
};

/// Simulated annealing over orderings with random-transposition moves.
/// `stop_factor` <= 0 disables the stop test (budget only).
AnnealResult anneal(std::span<const double> eps, const CostSpec& spec, const AnnealSchedule& schedule,
                    double stop_factor, std::uint64_t seed);

/// Lexicographically smallest member of the orbit of perm under cyclic shifts and reversal.
Permutation canonical(const Permutation& perm);

struct ExhaustiveResult {
  double min_cost = 0.0;
  std::vector<Permutation> optima;  // canonical representatives within tolerance of the minimum
};

/// Enumerates all L! orderings (small L only).
ExhaustiveResult exhaustive_minimum(std::span<const double> eps, const CostSpec& spec, double rel_tol = 1e-9);

}  // namespace mbdos::ordering
