#include <doctest.h>

#include <numeric>

#include "mbdos/cyclotomic.hpp"
#include "mbdos/oracle.hpp"
#include "mbdos/sectors.hpp"

using namespace mbdos;
using namespace mbdos::sectors;

TEST_CASE("partition of L=12") {
  const SectorFlow f(12);
  std::vector<int> qs;
  for (const auto& s : f.sectors()) qs.push_back(s.q);
  CHECK(qs == std::vector<int>{12, 6, 4, 3, 2, 1});
  CHECK(f.sector(12).ells == std::vector<int>{1, 5, 7, 11});
  CHECK(f.sector(6).ells == std::vector<int>{2, 10});
  CHECK(f.sector(4).ells == std::vector<int>{3, 9});
  CHECK(f.sector(3).ells == std::vector<int>{4, 8});
  CHECK(f.sector(2).ells == std::vector<int>{6});
  CHECK(f.sector(1).ells == std::vector<int>{0});
  CHECK_THROWS(f.sector(5));
  CHECK(f.nontrivial_sectors() == std::vector<int>{12, 6, 4, 3, 2});
}

TEST_CASE("prime L has one nontrivial sector") {
  const SectorFlow f(7);
  REQUIRE(f.sectors().size() == 2);
  CHECK(f.sectors()[0].ells == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(f.edges() == std::vector<FlowEdge>{{7, 1, 7}});
}

TEST_CASE("sectors cover every index once with phi(q) members") {
  for (int L = 1; L <= 40; ++L) {
    const SectorFlow f(L);
    std::vector<int> seen(L, 0);
    for (const auto& s : f.sectors()) {
      CHECK(static_cast<std::int64_t>(s.ells.size()) == cyclo::totient(s.q));
      for (int ell : s.ells) {
        ++seen[ell];
        CHECK(f.sector_of(ell) == s.q);
      }
    }
    for (int c : seen) CHECK(c == 1);
    for (const auto& e : f.edges()) {
      CHECK(e.from == e.to * e.prime);
      CHECK(cyclo::prime_factors(e.prime).size() == 1);
    }
  }
}

TEST_CASE("edges of L=20") {
  const SectorFlow f(20);
  const std::vector<FlowEdge> want = {{20, 10, 2}, {20, 4, 5}, {10, 5, 2}, {10, 2, 5}, {5, 1, 5}, {4, 2, 2}, {2, 1, 2}};
  CHECK(f.edges() == want);
}

TEST_CASE("fold sums residues") {
  const std::vector<int> n = {1, 0, 2, 0, 1, 3};
  CHECK(fold_config(n, 3).m == std::vector<int>{1, 1, 5});
  CHECK(fold_config(n, 2).m == std::vector<int>{4, 3});
  CHECK(fold_config(n, 1).m == std::vector<int>{7});
  CHECK(fold_config(n, 6).m == n);
  CHECK_THROWS(fold_config(n, 4));
}

TEST_CASE("galois groups") {
  CHECK(galois_group(1) == std::vector<int>{0});
  CHECK(galois_group(12) == std::vector<int>{1, 5, 7, 11});
  CHECK(galois_group(7).size() == 6);
}

TEST_CASE("folding commutes with U") {
  for (int L : {6, 8, 9, 10, 12}) {
    const SectorFlow f(L);
    for (const auto& n : oracle::enumerate_configs(L, 3, 2)) {
      for (const auto& s : f.sectors()) {
        const auto folded = fold_config(n, s.q);
        for (int ell : s.ells) {
          const int ell_q = ell * s.q / L;
          CHECK(oracle::u_element(n, ell) == oracle::u_element(folded.m, ell_q));
        }
      }
    }
  }
}
