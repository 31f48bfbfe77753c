#pragma once

// Serializable description of one pipeline run. Defaults:
//   R mode boson, drop_top 1, energies seeded-gaussian(0, 1, seed 0),
//   gamma 1000 x mean many-body spacing, seed 0, threads 1.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace mbdos {

struct RunConfig {
  enum class RMode { Fermion, Boson, Cap };
  enum class EnergySource { File, Gaussian, Bimodal };
  enum class GammaMode { Absolute, DeltaMultiple };

  int L = 0;
  int N = 0;
  RMode r_mode = RMode::Boson;
  int cap = 1;  // RMode::Cap only

  std::optional<std::vector<int>> sectors;  // explicit S; otherwise drop_top applies
  int drop_top = 1;

  EnergySource energy_source = EnergySource::Gaussian;
  std::string energies_file;
  double mu = 0.0;
  double sigma = 1.0;
  std::uint64_t energy_seed = 0;

  GammaMode gamma_mode = GammaMode::DeltaMultiple;
  double gamma = 1000.0;

  std::string cache_dir;
  std::string output;
  std::uint64_t seed = 0;
  int threads = 1;

  /// Per-level occupancy cap implied by the R mode.
  int R() const;
  /// Normalized kept sector set.
  std::vector<int> kept_sectors() const;
  std::vector<double> energies() const;
  /// Absolute kernel width given the mean many-body spacing.
  double gamma_for(double delta) const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  /// Canonical text form (sorted keys, 2-space indent, trailing newline).
  std::string serialize() const;
  static RunConfig parse(const std::string& text);
};

std::string to_string(RunConfig::RMode m, int cap);

}  // namespace mbdos
