#include "mbdos/run_config.hpp"

#include <stdexcept>

#include "mbdos/generators.hpp"
#include "mbdos/genfunc.hpp"
#include "mbdos/spectrum.hpp"

namespace mbdos {

using nlohmann::json;

int RunConfig::R() const {
  switch (r_mode) {
    case RMode::Fermion: return 1;
    case RMode::Boson: return std::max(N, 1);
    case RMode::Cap: return cap;
  }
  return 1;
}

std::vector<int> RunConfig::kept_sectors() const {
  if (sectors) return genfunc::normalize_sectors(L, *sectors);
  return genfunc::drop_top_sectors(L, drop_top);
}

std::vector<double> RunConfig::energies() const {
  std::vector<double> eps;
  switch (energy_source) {
    case EnergySource::File: eps = read_energies_file(energies_file); break;
    case EnergySource::Gaussian: eps = gen::gaussian(L, mu, sigma, energy_seed); break;
    case EnergySource::Bimodal: eps = gen::bimodal(L, N, mu, sigma, energy_seed); break;
  }
  if (static_cast<int>(eps.size()) != L)
    throw std::invalid_argument("config: expected " + std::to_string(L) + " energies, got " + std::to_string(eps.size()));
  return eps;
}

double RunConfig::gamma_for(double delta) const { return gamma_mode == GammaMode::Absolute ? gamma : gamma * delta; }

std::string to_string(RunConfig::RMode m, int cap) {
  switch (m) {
    case RunConfig::RMode::Fermion: return "fermion";
    case RunConfig::RMode::Boson: return "boson";
    case RunConfig::RMode::Cap: return "cap:" + std::to_string(cap);
  }
  return "?";
}

json RunConfig::to_json() const {
  json j;
  j["L"] = L;
  j["N"] = N;
  j["r_mode"] = to_string(r_mode, cap);
  if (sectors)
    j["sectors"] = *sectors;
  else
    j["drop_top"] = drop_top;
  json e;
  switch (energy_source) {
    case EnergySource::File: e = {{"source", "file"}, {"path", energies_file}}; break;
    case EnergySource::Gaussian:
    case EnergySource::Bimodal:
      e = {{"source", energy_source == EnergySource::Gaussian ? "gaussian" : "bimodal"},
           {"mu", mu},
           {"sigma", sigma},
           {"seed", energy_seed}};
      break;
  }
  j["energies"] = e;
  j["gamma"] = {{"mode", gamma_mode == GammaMode::Absolute ? "absolute" : "delta"}, {"value", gamma}};
  j["cache_dir"] = cache_dir;
  j["output"] = output;
  j["seed"] = seed;
  j["threads"] = threads;
  return j;
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.L = j.at("L").get<int>();
  c.N = j.at("N").get<int>();
  const auto r = j.value("r_mode", std::string("boson"));
  if (r == "fermion")
    c.r_mode = RMode::Fermion;
  else if (r == "boson")
    c.r_mode = RMode::Boson;
  else if (r.rfind("cap:", 0) == 0) {
    c.r_mode = RMode::Cap;
    c.cap = std::stoi(r.substr(4));
    if (c.cap < 1) throw std::invalid_argument("config: cap must be positive");
  } else
    throw std::invalid_argument("config: unknown r_mode '" + r + "'");
  if (j.contains("sectors")) c.sectors = j.at("sectors").get<std::vector<int>>();
  c.drop_top = j.value("drop_top", 1);
  if (j.contains("energies")) {
    const auto& e = j.at("energies");
    const auto src = e.at("source").get<std::string>();
    if (src == "file") {
      c.energy_source = EnergySource::File;
      c.energies_file = e.at("path").get<std::string>();
    } else if (src == "gaussian" || src == "bimodal") {
      c.energy_source = src == "gaussian" ? EnergySource::Gaussian : EnergySource::Bimodal;
      c.mu = e.value("mu", 0.0);
      c.sigma = e.value("sigma", 1.0);
      c.energy_seed = e.value("seed", std::uint64_t{0});
    } else
      throw std::invalid_argument("config: unknown energy source '" + src + "'");
  }
  if (j.contains("gamma")) {
    const auto& g = j.at("gamma");
    const auto mode = g.value("mode", std::string("delta"));
    if (mode == "absolute")
      c.gamma_mode = GammaMode::Absolute;
    else if (mode == "delta")
      c.gamma_mode = GammaMode::DeltaMultiple;
    else
      throw std::invalid_argument("config: unknown gamma mode '" + mode + "'");
    c.gamma = g.value("value", 1000.0);
  }
  c.cache_dir = j.value("cache_dir", std::string());
  c.output = j.value("output", std::string());
  c.seed = j.value("seed", std::uint64_t{0});
  c.threads = j.value("threads", 1);
  if (c.L < 1 || c.N < 0) throw std::invalid_argument("config: need L >= 1 and N >= 0");
  return c;
}

std::string RunConfig::serialize() const { return to_json().dump(2) + "\n"; }

RunConfig RunConfig::parse(const std::string& text) { return from_json(json::parse(text)); }

}  // namespace mbdos
