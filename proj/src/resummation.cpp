#include "mbdos/resummation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mbdos/cyclotomic.hpp"

namespace mbdos::resum {

namespace {
constexpr double kImagTolerance = 1e-9;

void check_residue(std::complex<double> z, double scale) {
  if (std::abs(z.imag()) > kImagTolerance * std::max(1.0, scale))
    throw std::logic_error("resummation: imaginary residue " + std::to_string(z.imag()) + " exceeds tolerance");
}
}  // namespace

EffectiveEnergies effective_energies(std::span<const double> eps) {
  if (eps.empty()) throw std::invalid_argument("effective_energies: empty spectrum");
  const int L = static_cast<int>(eps.size());
  EffectiveEnergies out{L, std::vector<std::complex<double>>(L)};
  for (int ell = 0; ell < L; ++ell) {
    std::complex<double> s{};
    for (int k = 0; k < L; ++k) s += eps[k] * cyclo::root_value(L, -static_cast<std::int64_t>(k) * ell);
    out.tilde[ell] = s / static_cast<double>(L);
  }
  return out;
}

double energy_of_key(const genfunc::TermKey& key, const EffectiveEnergies& eff, const sectors::SectorFlow& flow,
                     const genfunc::KeyLayout& layout) {
  if (flow.L() != eff.L || layout.L() != eff.L)
    throw std::invalid_argument("energy_of_key: L mismatch between key layout, flow and energies");
  if (static_cast<int>(key.inv.size()) != layout.width())
    throw std::invalid_argument("energy_of_key: key does not match layout");
  const int L = eff.L;
  std::complex<double> total = static_cast<double>(key.particles) * eff.tilde[0];
  double scale = std::abs(total);
  for (std::size_t s = 0; s < layout.sectors().size(); ++s) {
    const int q = layout.sectors()[s];
    const int d = L / q;
    const int phi = layout.phis()[s];
    const auto* inv = key.inv.data() + layout.offsets()[s];
    (void)flow.sector(q);
    auto orbit_value = [&](int n) {  // U^q_n = sum_j I_j w_q^(n j)
      std::complex<double> u{};
      for (int j = 0; j < phi; ++j)
        if (inv[j] != 0) u += static_cast<double>(inv[j]) * cyclo::root_value(q, static_cast<std::int64_t>(n) * j);
      return u;
    };
    for (int n : sectors::galois_group(q)) {
      if (q - n < n) continue;  // paired below
      std::complex<double> z = orbit_value(n) * eff.tilde[(static_cast<std::int64_t>(n) * d) % L];
      if (q - n != n) z += orbit_value(q - n) * eff.tilde[(static_cast<std::int64_t>(q - n) * d) % L];
      scale += std::abs(z);
      check_residue(z, std::abs(z));
      total += z;
    }
  }
  check_residue(total, scale);
  return total.real();
}

EnergyModel::EnergyModel(const EffectiveEnergies& eff, const genfunc::KeyLayout& layout)
    : dc_(eff.tilde.at(0).real()), weights_(layout.width(), 0.0) {
  if (layout.L() != eff.L) throw std::invalid_argument("EnergyModel: L mismatch");
  const int L = eff.L;
  for (std::size_t s = 0; s < layout.sectors().size(); ++s) {
    const int q = layout.sectors()[s];
    const int d = L / q;
    for (int j = 0; j < layout.phis()[s]; ++j) {
      std::complex<double> w{};
      for (int n : sectors::galois_group(q))
        w += cyclo::root_value(q, static_cast<std::int64_t>(n) * j) * eff.tilde[(static_cast<std::int64_t>(n) * d) % L];
      check_residue(w, std::abs(w));
      weights_[layout.offsets()[s] + j] = w.real();
    }
  }
}

double EnergyModel::energy(const genfunc::TermKey& key) const {
  double e = key.particles * dc_;
  for (std::size_t j = 0; j < weights_.size(); ++j)
    if (key.inv[j] != 0) e += key.inv[j] * weights_[j];
  return e;
}

WeightedSpectrum truncated_spectrum(const genfunc::CoefficientTable& table, std::span<const double> eps, int N) {
  const auto& p = table.params();
  if (!p.complete()) throw std::invalid_argument("truncated_spectrum: table does not cover all levels");
  if (static_cast<int>(eps.size()) != p.L)
    throw std::invalid_argument("truncated_spectrum: energies must have length L=" + std::to_string(p.L));
  if (N < 0 || N > p.n_max)
    throw std::invalid_argument("truncated_spectrum: N=" + std::to_string(N) + " exceeds table N_max=" +
                                std::to_string(p.n_max));
  const EnergyModel model(effective_energies(eps), table.layout());
  std::vector<Level> levels;
  for (const auto& e : table.entries()) {
    if (e.key.particles != N) continue;
    if (e.count > std::numeric_limits<std::uint64_t>::max())
      throw std::overflow_error("truncated_spectrum: multiplicity exceeds 64 bits");
    levels.push_back({model.energy(e.key), e.count.convert_to<std::uint64_t>()});
  }
  return WeightedSpectrum(std::move(levels));
}

}  // namespace mbdos::resum
