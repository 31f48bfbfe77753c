#pragma once

// Weighted many-body spectra: sorted (energy, multiplicity) lists.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mbdos {

struct Level {
  double energy = 0.0;
  std::uint64_t multiplicity = 0;
  friend bool operator==(const Level&, const Level&) = default;
};

class WeightedSpectrum {
 public:
  WeightedSpectrum() = default;
  /// Sorts by energy; entries with zero multiplicity are rejected.
  explicit WeightedSpectrum(std::vector<Level> levels);

  /// Builds from raw energies, merging exactly equal values.
  static WeightedSpectrum from_energies(std::vector<double> energies);

  const std::vector<Level>& levels() const { return levels_; }
  bool empty() const { return levels_.empty(); }
  std::size_t size() const { return levels_.size(); }
  std::uint64_t total_multiplicity() const;
  double mean() const;
  double variance() const;
  double min_energy() const;
  double max_energy() const;
  /// Mean spacing between consecutive many-body states, (E_max - E_min) / (M - 1).
  double mean_level_spacing() const;
  /// The same spectrum translated by `shift`.
  WeightedSpectrum shifted(double shift) const;

  friend bool operator==(const WeightedSpectrum&, const WeightedSpectrum&) = default;

 private:
  std::vector<Level> levels_;
};

/// Result of walking two spectra as sorted state-by-state energy lists.
struct SpectrumMatch {
  bool multiplicities_equal = false;
  double max_abs_diff = 0.0;
  bool ok(double tol) const { return multiplicities_equal && max_abs_diff <= tol; }
};

SpectrumMatch compare_spectra(const WeightedSpectrum& a, const WeightedSpectrum& b);

void write_spectrum_csv(std::ostream& out, const WeightedSpectrum& s);
WeightedSpectrum read_spectrum_csv(std::istream& in);

/// Whitespace/comma separated reals; '#' starts a comment.
std::vector<double> read_energies(std::istream& in);
std::vector<double> read_energies_file(const std::string& path);
void write_energies(std::ostream& out, const std::vector<double>& eps);

}  // namespace mbdos
