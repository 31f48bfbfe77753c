#pragma once

// Post-processing of spectra: Gaussian kernel density estimates, L_p
// distances between them, single-level occupancies from sub-system spectra,
// and inverse-temperature estimators.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbdos/genfunc.hpp"
#include "mbdos/spectrum.hpp"

namespace mbdos::analysis {

/// Uniform grid of `points` energies spanning [lo, hi].
struct Grid {
  double lo = 0.0;
  double hi = 1.0;
  int points = 1000;

  double step() const { return points > 1 ? (hi - lo) / (points - 1) : 0.0; }
  double at(int i) const { return lo + i * step(); }
  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Grid covering [min E - 5 gamma, max E + 5 gamma] over all given spectra.
Grid covering_grid(std::span<const WeightedSpectrum* const> spectra, double gamma, int points = 1000);
Grid covering_grid(const WeightedSpectrum& s, double gamma, int points = 1000);

enum class Normalization { Raw, Probability };

struct DensityCurve {
  Grid grid;
  std::vector<double> values;
  double gamma = 0.0;
  Normalization normalization = Normalization::Raw;
};

/// Multiplicity-weighted sum of unit-area Gaussians of standard deviation gamma,
/// each truncated to a window of +-8 gamma. Probability normalization divides
/// by the total multiplicity.
DensityCurve kde(const WeightedSpectrum& s, double gamma, const Grid& grid,
                 Normalization norm = Normalization::Probability);

/// Raw (count-weighted) kernel sum at a single energy.
double kde_at(const WeightedSpectrum& s, double gamma, double energy);

/// Trapezoid integral of a curve over its grid.
double integrate(const DensityCurve& c);

/// (sum_i |a_i - b_i|^p)^(1/p) over the shared grid.
double lp_distance(const DensityCurve& a, const DensityCurve& b, double p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct GaussianFit {
  double mu = 0.0;
  double sigma = 0.0;
  double amplitude = 0.0;
  double r2 = 0.0;  // in log space
  /// d/dE ln of the fitted Gaussian: (mu - E) / sigma^2.
  double beta(double energy) const { return (mu - energy) / (sigma * sigma); }
};

/// Log-parabola least squares over grid points above rel_threshold * peak.
GaussianFit fit_gaussian(const DensityCurve& c, double rel_threshold = 1e-6);

enum class BetaMethod { Boltzmann, BoltzmannFit, Empirical };
std::string to_string(BetaMethod m);

struct BetaEstimate {
  BetaMethod method = BetaMethod::Boltzmann;
  std::vector<double> energies;
  std::vector<double> beta;
  std::vector<bool> valid;
  std::vector<double> r2;  // empirical: per-energy fit quality; fit: single log-space R^2
};

/// Central-difference derivative of ln(curve); masked where the curve is not positive.
BetaEstimate beta_boltzmann(const DensityCurve& c);

/// beta(E) = (mu - E) / sigma^2 from a Gaussian fit to the curve.
BetaEstimate beta_boltzmann_fit(const DensityCurve& c, const GaussianFit& fit);

/// Slope of ln(1/<n_k> + 1) against eps_k. Levels with <n_k> <= 0 are skipped.
LinearFit empirical_fit(std::span<const double> eps, std::span<const double> occupancies);

/// Empirical beta at each probe energy from the occupancies measured there.
BetaEstimate beta_empirical(std::span<const double> probe_energies, std::span<const double> eps,
                            const std::vector<std::vector<double>>& occupancies);

struct BetaEstimators {
  BetaEstimate boltzmann;
  BetaEstimate fit;
  BetaEstimate empirical;
  GaussianFit gaussian;
};

BetaEstimators beta_estimators(const DensityCurve& curve, std::span<const double> probe_energies,
                               std::span<const double> eps, const std::vector<std::vector<double>>& occupancies);

/// Truncation policy shared by a system and its (L-1)-level sub-systems.
struct OccupancyPolicy {
  int drop_top = 1;            // nontrivial sectors discarded from the top
  bool optimize_order = false; // anneal each sub-system ordering against its discarded sectors
  std::uint64_t anneal_budget = 20000;
  std::uint64_t seed = 0;
};

/// <n_k>(E) = sum_n n K(E - n eps_k; L-1, N-n) / sum_n K(E - n eps_k; L-1, N-n),
/// with K the raw kernel density of the sub-system that omits level k.
class OccupancyModel {
 public:
  OccupancyModel(std::vector<double> eps, int N, int R, double gamma, OccupancyPolicy policy);

  int L() const { return static_cast<int>(eps_.size()); }
  int N() const { return N_; }
  double gamma() const { return gamma_; }
  const std::vector<int>& sub_sectors() const { return sub_sectors_; }

  /// Spectrum of the sub-system without level k holding m particles.
  const WeightedSpectrum& subspectrum(int k, int m) const;
  /// Denominator sum_n K(E - n eps_k; L-1, N-n).
  double denominator(double energy, int k) const;
  /// nullopt where the denominator underflows (below 1e-300).
  std::optional<double> occupancy(double energy, int k) const;
  /// All L occupancies; undefined entries are NaN.
  std::vector<double> occupancies(double energy) const;

 private:
  std::vector<double> eps_;
  int N_;
  int R_;
  double gamma_;
  std::vector<int> sub_sectors_;
  std::vector<std::vector<WeightedSpectrum>> sub_;  // [k][m]
};

/// Linear interpolation of a masked estimator at energy E (nullopt outside the valid region).
std::optional<double> interpolate(const BetaEstimate& b, double energy);

}  // namespace mbdos::analysis
