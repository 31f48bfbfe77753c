#pragma once

// Seeded single-body spectra used by the CLI presets and the tests.

#include <cstdint>
#include <vector>

namespace mbdos::gen {

/// L draws from N(mu, sigma^2) with a mt19937_64 seeded by `seed`.
std::vector<double> gaussian(int L, double mu, double sigma, std::uint64_t seed);

/// Two blocks of L/2 levels: N(mu, sigma^2) and N(mu + gap, sigma^2) with gap = 2 N sigma,
/// so the block centres sit further apart than N sigma.
std::vector<double> bimodal(int L, int N, double mu, double sigma, std::uint64_t seed);

}  // namespace mbdos::gen
