// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "mbdos/analysis.hpp"
#include "mbdos/cache.hpp"
#include "mbdos/cyclotomic.hpp"
#include "mbdos/generators.hpp"
#include "mbdos/genfunc.hpp"
#include "mbdos/oracle.hpp"
#include "mbdos/ordering.hpp"
#include "mbdos/resummation.hpp"
#include "mbdos/table_io.hpp"

using namespace mbdos;

namespace {

// Pinned tolerances.
constexpr double kSpectrumTol = 1e-9;       // 1: absolute energy difference
constexpr double kRootTol = 1e-10;          // 3: |w^p - sum_k T[p][k] w^k|
constexpr double kParsevalTol = 1e-12;      // 5: relative
constexpr double kCostRelTol = 1e-9;        // 6: annealed vs exhaustive minimum
constexpr double kDenominatorTol = 1e-6;    // 7a: relative
constexpr double kR2Min = 0.9;              // 7b
constexpr double kBetaRelTol = 0.15;        // 7c
constexpr double kGammaOverDelta = 1000.0;  // 5, 7
constexpr int kGridPoints = 1000;           // 5

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

BigCount c_r(int L, int N, int R) { return oracle::count_configs(L, N, R); }

// 1 -----------------------------------------------------------------------
Outcome oracle_equivalence() {
  int cases = 0, failures = 0;
  double worst = 0;
  for (int L = 2; L <= 10; ++L)
    for (int N = 0; N <= 5; ++N)
      for (int R : {1, std::max(N, 1)}) {
        const auto table = genfunc::expand(L, N, R, genfunc::drop_top_sectors(L, 0));
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const auto eps = gen::gaussian(L, 0.0, 1.0, 1000 * L + 10 * N + seed);
          const auto m = compare_spectra(resum::truncated_spectrum(table, eps, N), oracle::exact_mbdos(L, N, R, eps));
          ++cases;
          worst = std::max(worst, m.max_abs_diff);
          if (!m.ok(kSpectrumTol)) ++failures;
        }
      }
  return {failures == 0, fmt("%d cases, %d mismatches, max |dE| = %.3g", cases, failures, worst)};
}

// 2 -----------------------------------------------------------------------
Outcome worked_examples() {
  const auto f = genfunc::expand(6, 2, 1, {6});
  bool ok = f.count({2, {0, 0}}) == 3 && f.count({2, {1, 0}}) == 1;
  const auto b = genfunc::expand(6, 3, 3, {3});
  const std::vector<std::pair<std::vector<std::int32_t>, int>> terms = {
      {{3, 0}, 4},  {{0, 3}, 4},  {{2, 1}, 6}, {{1, 2}, 6},   {{-3, -3}, 4},
      {{1, -1}, 6}, {{-1, 1}, 6}, {{0, 0}, 8}, {{-1, -2}, 6}, {{-2, -1}, 6}};
  int matched = 0;
  for (const auto& [inv, c] : terms) matched += b.count({3, inv}) == c;
  ok = ok && matched == 10 && b.keys_with(3) == 10;
  return {ok, fmt("fermion (0,0)->%s (1,0)->%s; boson %d/10 terms, %zu keys at N=3",
                  f.count({2, {0, 0}}).str().c_str(), f.count({2, {1, 0}}).str().c_str(), matched, b.keys_with(3))};
}

// 3 -----------------------------------------------------------------------
Outcome transfer_matrices() {
  double worst = 0;
  for (int q : {2, 3, 4, 6, 12}) {
    const cyclo::TransferMatrix t(q);
    for (int p = 0; p < q; ++p) {
      std::complex<double> s{};
      for (int k = 0; k < t.phi(); ++k) s += static_cast<double>(t(p, k)) * cyclo::root_value(q, k);
      worst = std::max(worst, std::abs(s - cyclo::root_value(q, p)));
    }
  }
  const std::vector<std::vector<std::int64_t>> t6 = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  const std::vector<std::vector<std::int64_t>> t3 = {{1, 0}, {0, 1}, {-1, -1}};
  const bool printed = cyclo::TransferMatrix(6).rows() == t6 && cyclo::TransferMatrix(3).rows() == t3;
  return {worst < kRootTol && printed, fmt("max residual %.3g, printed T6/T3 %s", worst, printed ? "match" : "differ")};
}

// 4 -----------------------------------------------------------------------
Outcome truncation_ladder() {
  const int L = 20, N = 6, R = 6;
  const auto t0 = std::chrono::steady_clock::now();
  const auto nts = sectors::SectorFlow(L).nontrivial_sectors();
  bool ok = true;
  std::string detail;
  int dropped_phi = 0;
  for (int depth = 0; depth <= static_cast<int>(nts.size()); ++depth) {
    if (depth > 0) dropped_phi += static_cast<int>(cyclo::totient(nts[depth - 1]));
    const auto t = genfunc::expand(L, N, R, genfunc::drop_top_sectors(L, depth));
    const BigCount mass = t.total(N);
    const BigCount bound = c_r(L - dropped_phi, N, R);
    const bool rung = mass == 177100 && BigCount(t.keys_with(N)) <= bound;
    ok = ok && rung;
    const bool within = BigCount(t.keys_with(N)) <= bound;
    detail += fmt("%s[%zu%s%s]", depth ? " " : "", t.keys_with(N), within ? "<=" : ">", bound.str().c_str());
    if (mass != 177100) detail += " mass=" + mass.str();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && secs < 300, "keys per rung " + detail + fmt(", %.1fs", secs)};
}

// 5 -----------------------------------------------------------------------
Outcome parseval_and_ordering() {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int L = 2 + static_cast<int>(seed % 29);
    const auto eps = gen::gaussian(L, 0.0, 1.0, 50000 + seed);
    double e2 = 0, f2 = 0, frac = 0;
    for (double e : eps) e2 += e * e;
    const auto eff = resum::effective_energies(eps);
    for (const auto& z : eff.tilde) f2 += std::norm(z * static_cast<double>(L));
    for (const auto& s : ordering::all_sector_scores(eps)) frac += s.P;
    worst = std::max({worst, std::abs(f2 / L - e2) / e2, std::abs(frac - 1.0)});
  }
  bool ok = worst < kParsevalTol;
  std::string detail = fmt("Parseval max rel err %.2g; L3 mono/annealed:", worst);

  const int L = 20, N = 6;
  const auto keep = genfunc::normalize_sectors(L, {1, 2, 4, 5, 10});
  const auto table = genfunc::expand(L, N, N, keep);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto eps = gen::gaussian(L, 0.0, 1.0, seed);
    const auto exact = oracle::exact_mbdos(L, N, N, eps);
    const double gamma = kGammaOverDelta * exact.mean_level_spacing();
    const auto mono = ordering::permute(ordering::sorted_ascending(eps), eps);
    ordering::AnnealSchedule sched;
    sched.budget = 2'000'000;
    const auto ann = ordering::anneal(eps, {ordering::CostKind::P, {20}}, sched, 0.0, seed);
    const auto best = ordering::permute(ann.best, eps);
    const auto s_mono = resum::truncated_spectrum(table, mono, N);
    const auto s_ann = resum::truncated_spectrum(table, best, N);
    const WeightedSpectrum* all[] = {&exact, &s_mono, &s_ann};
    const auto grid = analysis::covering_grid(all, gamma, kGridPoints);
    const auto k_exact = analysis::kde(exact, gamma, grid);
    const double d_mono = analysis::lp_distance(k_exact, analysis::kde(s_mono, gamma, grid), 3.0);
    const double d_ann = analysis::lp_distance(k_exact, analysis::kde(s_ann, gamma, grid), 3.0);
    ok = ok && d_ann < d_mono && ann.best_cost < ordering::cost(mono, {ordering::CostKind::P, {20}});
    detail += fmt(" %.3g/%.3g", d_mono, d_ann);
  }
  return {ok, detail};
}

// 6 -----------------------------------------------------------------------
Outcome annealing_optimality() {
  int runs = 0, hits = 0;
  for (int L : {5, 6, 7})
    for (auto kind : {ordering::CostKind::A, ordering::CostKind::P})
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto eps = gen::gaussian(L, 0.0, 1.0, 700 + 10 * L + seed);
        const ordering::CostSpec spec{kind, {L}};
        const auto ex = ordering::exhaustive_minimum(eps, spec, kCostRelTol);
        ordering::AnnealSchedule sched;
        sched.budget = 100'000;
        const auto r = ordering::anneal(eps, spec, sched, 0.0, seed);
        const bool cost_ok = r.best_cost <= ex.min_cost + kCostRelTol * std::max(std::abs(ex.min_cost), 1e-12);
        const bool orbit_ok =
            std::find(ex.optima.begin(), ex.optima.end(), ordering::canonical(r.best)) != ex.optima.end();
        ++runs;
        hits += cost_ok && orbit_ok;
      }
  return {hits == runs, fmt("%d/%d runs reach the exhaustive minimum orbit", hits, runs)};
}

// 7 -----------------------------------------------------------------------
Outcome bose_einstein() {
  const auto t0 = std::chrono::steady_clock::now();
  const int L = 16, N = 8, R = 8;
  const std::uint64_t seed = 0;
  const auto raw = gen::gaussian(L, 0.0, 1.0, seed);
  const auto eps = ordering::permute(ordering::sorted_ascending(raw), raw);
  const auto exact = oracle::exact_mbdos(L, N, R, eps);
  const double gamma = kGammaOverDelta * exact.mean_level_spacing();
  const double mu = exact.mean(), sd = std::sqrt(exact.variance());

  // (a) exact sub-system spectra from the oracle
  std::vector<std::vector<WeightedSpectrum>> sub(L);
  for (int k = 0; k < L; ++k) {
    std::vector<double> rest;
    for (int j = 0; j < L; ++j)
      if (j != k) rest.push_back(eps[j]);
    for (int m = 0; m <= N; ++m) sub[k].push_back(oracle::exact_mbdos(L - 1, m, R, rest));
  }
  double worst_a = 0;
  for (int i = 0; i < 20; ++i) {
    const double E = mu + sd * (-2.0 + 4.0 * i / 19.0);
    const double ref = analysis::kde_at(exact, gamma, E);
    for (int k = 0; k < L; ++k) {
      double d = 0;
      for (int n = 0; n <= N; ++n) d += analysis::kde_at(sub[k][N - n], gamma, E - n * eps[k]);
      worst_a = std::max(worst_a, std::abs(d - ref) / ref);
    }
  }
  const bool ok_a = worst_a < kDenominatorTol;

  // (b)-(d) truncated sub-systems, top sector dropped
  analysis::OccupancyPolicy policy;
  policy.drop_top = 1;
  policy.optimize_order = true;
  policy.anneal_budget = 200'000;
  policy.seed = seed;
  const analysis::OccupancyModel model(eps, N, R, gamma, policy);

  const auto curve = analysis::kde(exact, gamma, analysis::covering_grid(exact, gamma, kGridPoints));
  const auto bz = analysis::beta_boltzmann(curve);
  const std::vector<double> mids = {mu - 1.5 * sd, mu - 1.25 * sd, mu - 1.0 * sd};
  // close to the ground state, where few configurations contribute
  const double lowest = exact.min_energy() + 0.05 * (mu - exact.min_energy());

  bool ok_b = true, ok_c = true;
  double min_mid_r2 = 1.0;
  std::string detail = fmt("(a) max rel %.2g;", worst_a);
  for (double E : mids) {
    const auto occ = model.occupancies(E);
    const auto fit = analysis::empirical_fit(eps, occ);
    const auto b = analysis::interpolate(bz, E);
    const double rel = b ? std::abs(fit.slope - *b) / std::abs(*b) : INFINITY;
    ok_b = ok_b && fit.r2 > kR2Min && fit.slope > 0;
    ok_c = ok_c && rel < kBetaRelTol;
    min_mid_r2 = std::min(min_mid_r2, fit.r2);
    detail += fmt(" E=%.2f R2=%.3f bE=%.3f bB=%.3f;", E, fit.r2, fit.slope, b ? *b : NAN);
  }
  const auto low_fit = analysis::empirical_fit(eps, model.occupancies(lowest));
  const bool ok_d = low_fit.r2 < min_mid_r2;
  detail += fmt(" low E=%.2f R2=%.3f", lowest, low_fit.r2);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail += fmt("; a%s b%s c%s d%s, %.0fs", ok_a ? "+" : "-", ok_b ? "+" : "-", ok_c ? "+" : "-", ok_d ? "+" : "-", secs);
  return {ok_a && ok_b && ok_c && ok_d && secs < 600, detail};
}

// 8 -----------------------------------------------------------------------
Outcome incremental_caching(const std::filesystem::path& tmp) {
  bool ok = true;
  std::string detail;
  for (int R : {1, 4}) {
    const auto S = genfunc::drop_top_sectors(12, 0);
    const auto cold = table_io::encode(genfunc::expand(12, 4, R, S));
    const auto dir = tmp / ("cache_R" + std::to_string(R));
    std::filesystem::remove_all(dir);
    {
      cache::Cache c(dir);
      cache::ExpandRequest req{12, 4, R, S};
      req.stop_after = 6;
      (void)c.expand(req);
    }
    cache::Cache c(dir);
    const auto resumed = table_io::encode(c.expand({12, 4, R, S}));
    const auto chunked = table_io::encode(genfunc::expand_chunked(12, 4, R, S, 4));
    const auto merged = table_io::encode(
        genfunc::merge(genfunc::expand_levels(12, 4, R, S, 0, 5), genfunc::expand_levels(12, 4, R, S, 5, 12)));
    const bool same = cold == resumed && cold == chunked && cold == merged && c.stats().resumed_from == 6;
    ok = ok && same;
    detail += fmt("%sR=%d %zu bytes %s", R == 1 ? "" : "; ", R, cold.size(), same ? "identical" : "DIFFER");
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path tmp = std::filesystem::temp_directory_path() / "mbdos_acceptance";
  std::vector<int> only;
  // Criteria listed with --known-fail still print FAIL but do not set the exit code.
  std::vector<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--tmp" && i + 1 < argc)
      tmp = argv[++i];
    else if (a == "--known-fail" && i + 1 < argc) {
      std::string list = argv[++i];
      for (std::size_t pos = 0; pos < list.size();) {
        const auto comma = std::min(list.find(',', pos), list.size());
        known.push_back(std::stoi(list.substr(pos, comma - pos)));
        pos = comma + 1;
      }
    } else
      only.push_back(std::stoi(a));
  }
  std::filesystem::create_directories(tmp);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"worked examples", worked_examples},
      {"transfer matrices", transfer_matrices},
      {"truncation mass and cost", truncation_ladder},
      {"Parseval and ordering", parseval_and_ordering},
      {"annealing optimality", annealing_optimality},
      {"Bose-Einstein recovery", bose_einstein},
      {"incremental caching", [&] { return incremental_caching(tmp); }},
  };
  int failed = 0, known_failed = 0, passed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool is_known = std::find(known.begin(), known.end(), id) != known.end();
    passed += o.pass;
    if (!o.pass) (is_known ? known_failed : failed) += 1;
    std::printf("%s %d %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str(),
                !o.pass && is_known ? " [known failure]" : "");
    std::fflush(stdout);
  }
  std::printf("summary: %d passed, %d failed, %d known failures\n", passed, failed, known_failed);
  return failed == 0 ? 0 : 1;
}
