#include "mbdos/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mbdos {

WeightedSpectrum::WeightedSpectrum(std::vector<Level> levels) : levels_(std::move(levels)) {
  for (const auto& l : levels_) {
    if (l.multiplicity == 0) throw std::invalid_argument("WeightedSpectrum: zero multiplicity");
    if (!std::isfinite(l.energy)) throw std::invalid_argument("WeightedSpectrum: non-finite energy");
  }
  std::stable_sort(levels_.begin(), levels_.end(),
                   [](const Level& a, const Level& b) { return a.energy < b.energy; });
}

WeightedSpectrum WeightedSpectrum::from_energies(std::vector<double> energies) {
  std::sort(energies.begin(), energies.end());
  std::vector<Level> out;
  for (double e : energies) {
    if (!out.empty() && out.back().energy == e)
      ++out.back().multiplicity;
    else
      out.push_back({e, 1});
  }
  WeightedSpectrum s;
  s.levels_ = std::move(out);
  return s;
}

std::uint64_t WeightedSpectrum::total_multiplicity() const {
  std::uint64_t n = 0;
  for (const auto& l : levels_) n += l.multiplicity;
  return n;
}

double WeightedSpectrum::mean() const {
  if (levels_.empty()) throw std::invalid_argument("mean of empty spectrum");
  long double sum = 0;
  for (const auto& l : levels_) sum += static_cast<long double>(l.energy) * l.multiplicity;
  return static_cast<double>(sum / total_multiplicity());
}

double WeightedSpectrum::variance() const {
  const double mu = mean();
  long double sum = 0;
  for (const auto& l : levels_) sum += (l.energy - mu) * (l.energy - mu) * static_cast<long double>(l.multiplicity);
  return static_cast<double>(sum / total_multiplicity());
}

double WeightedSpectrum::min_energy() const {
  if (levels_.empty()) throw std::invalid_argument("min of empty spectrum");
  return levels_.front().energy;
}

double WeightedSpectrum::max_energy() const {
  if (levels_.empty()) throw std::invalid_argument("max of empty spectrum");
  return levels_.back().energy;
}

double WeightedSpectrum::mean_level_spacing() const {
  const auto m = total_multiplicity();
  if (m < 2) throw std::invalid_argument("mean_level_spacing: fewer than two states");
  return (max_energy() - min_energy()) / static_cast<double>(m - 1);
}

WeightedSpectrum WeightedSpectrum::shifted(double shift) const {
  WeightedSpectrum s = *this;
  for (auto& l : s.levels_) l.energy += shift;
  return s;
}

SpectrumMatch compare_spectra(const WeightedSpectrum& a, const WeightedSpectrum& b) {
  SpectrumMatch r;
  r.multiplicities_equal = a.total_multiplicity() == b.total_multiplicity();
  if (!r.multiplicities_equal) {
    r.max_abs_diff = INFINITY;
    return r;
  }
  // Walk both lists state by state.
  std::size_t ia = 0, ib = 0;
  std::uint64_t ra = a.empty() ? 0 : a.levels()[0].multiplicity;
  std::uint64_t rb = b.empty() ? 0 : b.levels()[0].multiplicity;
  while (ia < a.size() && ib < b.size()) {
    const double d = std::abs(a.levels()[ia].energy - b.levels()[ib].energy);
    r.max_abs_diff = std::max(r.max_abs_diff, d);
    const auto step = std::min(ra, rb);
    ra -= step;
    rb -= step;
    if (ra == 0 && ++ia < a.size()) ra = a.levels()[ia].multiplicity;
    if (rb == 0 && ++ib < b.size()) rb = b.levels()[ib].multiplicity;
  }
  return r;
}

namespace {
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool skip_line(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}
}  // namespace

void write_spectrum_csv(std::ostream& out, const WeightedSpectrum& s) {
  out << "energy,multiplicity\n";
  for (const auto& l : s.levels()) out << fmt_double(l.energy) << ',' << l.multiplicity << '\n';
}

WeightedSpectrum read_spectrum_csv(std::istream& in) {
  std::vector<Level> levels;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("energy", 0) == 0) continue;
    }
    std::istringstream ls(line);
    Level l;
    char comma = 0;
    if (!(ls >> l.energy >> comma >> l.multiplicity) || comma != ',')
      throw std::runtime_error("spectrum csv: malformed line '" + line + "'");
    levels.push_back(l);
  }
  return WeightedSpectrum(std::move(levels));
}

std::vector<double> read_energies(std::istream& in) {
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw std::runtime_error("energies: cannot parse '" + tok + "'");
      out.push_back(v);
    }
  }
  return out;
}

std::vector<double> read_energies_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open energies file " + path);
  return read_energies(in);
}

void write_energies(std::ostream& out, const std::vector<double>& eps) {
  for (double e : eps) out << fmt_double(e) << '\n';
}

}  // namespace mbdos
