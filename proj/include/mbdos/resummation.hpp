#pragma once

// Re-summation: couple invariant-indexed degeneracy tables to a concrete
// single-body spectrum through its Fourier coefficients.

#include <complex>
#include <span>
#include <vector>

#include "mbdos/genfunc.hpp"
#include "mbdos/sectors.hpp"
#include "mbdos/spectrum.hpp"

namespace mbdos::resum {

/// tilde[ell] = (1/L) sum_k eps_k w_L^(-k ell), so that sum_ell U_ell(n) tilde[ell] = sum_k n_k eps_k.
struct EffectiveEnergies {
  int L = 0;
  std::vector<std::complex<double>> tilde;
};

EffectiveEnergies effective_energies(std::span<const double> eps);

/// Energy of a key through the Galois-orbit formula, evaluated directly.
/// Throws std::logic_error if the imaginary residue exceeds 1e-9.
double energy_of_key(const genfunc::TermKey& key, const EffectiveEnergies& eff, const sectors::SectorFlow& flow,
                     const genfunc::KeyLayout& layout);

/// The same energy, folded into one real weight per invariant coordinate:
///   E = N tilde_0 + sum_{q, j} I_{q,j} w_{q,j},  w_{q,j} = sum_{n in G_q} w_q^(n j) tilde_{n L/q}.
class EnergyModel {
 public:
  EnergyModel(const EffectiveEnergies& eff, const genfunc::KeyLayout& layout);

  double energy(const genfunc::TermKey& key) const;
  const std::vector<double>& weights() const { return weights_; }

 private:
  double dc_;
  std::vector<double> weights_;
};

/// One (energy, count) per table key with `particles == N`, sorted by energy.
WeightedSpectrum truncated_spectrum(const genfunc::CoefficientTable& table, std::span<const double> eps, int N);

}  // namespace mbdos::resum
