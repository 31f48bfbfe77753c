#include "mbdos/generators.hpp"

#include <random>
#include <stdexcept>

namespace mbdos::gen {

std::vector<double> gaussian(int L, double mu, double sigma, std::uint64_t seed) {
  if (L < 1) throw std::invalid_argument("gaussian: L must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mu, sigma);
  std::vector<double> out(L);
  for (double& e : out) e = dist(rng);
  return out;
}

std::vector<double> bimodal(int L, int N, double mu, double sigma, std::uint64_t seed) {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("bimodal: L must be even and at least 2");
  if (N < 1) throw std::invalid_argument("bimodal: N must be positive");
  auto a = gaussian(L / 2, mu, sigma, seed);
  const auto b = gaussian(L / 2, mu + 2.0 * N * sigma, sigma, seed ^ 0x9e3779b97f4a7c15ULL);
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace mbdos::gen
