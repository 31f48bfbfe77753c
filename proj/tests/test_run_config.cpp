#include <doctest.h>

#include "mbdos/generators.hpp"
#include "mbdos/run_config.hpp"

using namespace mbdos;

TEST_CASE("defaults") {
  RunConfig c;
  c.L = 20;
  c.N = 6;
  CHECK(c.R() == 6);
  CHECK(c.kept_sectors() == std::vector<int>{10, 5, 4, 2});
  CHECK(c.energies() == gen::gaussian(20, 0.0, 1.0, 0));
  CHECK(c.gamma_for(0.01) == doctest::Approx(10.0));
}

TEST_CASE("serialized form round-trips byte for byte") {
  RunConfig c;
  c.L = 12;
  c.N = 4;
  c.r_mode = RunConfig::RMode::Cap;
  c.cap = 2;
  c.sectors = std::vector<int>{6, 3};
  c.energy_source = RunConfig::EnergySource::Bimodal;
  c.mu = -0.25;
  c.sigma = 0.1;
  c.energy_seed = 18446744073709551615ULL;
  c.gamma_mode = RunConfig::GammaMode::Absolute;
  c.gamma = 0.1 + 0.2;
  c.cache_dir = "/tmp/x";
  c.output = "out.csv";
  c.seed = 7;
  c.threads = 4;
  const auto text = c.serialize();
  const auto back = RunConfig::parse(text);
  CHECK(back.serialize() == text);
  CHECK(back.gamma == c.gamma);
  CHECK(back.energy_seed == c.energy_seed);
  CHECK(back.R() == 2);
  CHECK(back.kept_sectors() == std::vector<int>{6, 3});
  RunConfig d;
  d.L = 5;
  d.N = 2;
  CHECK(RunConfig::parse(d.serialize()).serialize() == d.serialize());
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS(RunConfig::parse(R"({"L": 6, "N": 2, "r_mode": "anyon"})"));
  CHECK_THROWS(RunConfig::parse(R"({"L": 0, "N": 2})"));
  CHECK_THROWS(RunConfig::parse(R"({"L": 6, "N": 2, "r_mode": "cap:0"})"));
  CHECK_THROWS(RunConfig::parse(R"({"N": 2})"));
}

TEST_CASE("bimodal preset separates the blocks") {
  const auto e = gen::bimodal(20, 6, 0.0, 1.0, 3);
  REQUIRE(e.size() == 20);
  double ma = 0, mb = 0;
  for (int i = 0; i < 10; ++i) ma += e[i] / 10, mb += e[10 + i] / 10;
  CHECK(mb - ma > 6.0);
  CHECK_THROWS(gen::bimodal(7, 2, 0.0, 1.0, 0));
}
