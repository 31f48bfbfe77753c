#include "mbdos/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "mbdos/cyclotomic.hpp"
#include "mbdos/resummation.hpp"
#include "mbdos/sectors.hpp"

namespace mbdos::ordering {

std::vector<double> permute(const Permutation& perm, std::span<const double> eps) {
  if (perm.size() != eps.size()) throw std::invalid_argument("permute: permutation length mismatch");
  std::vector<double> out(eps.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = eps[perm[i]];
  return out;
}

Permutation identity_permutation(int L) {
  Permutation p(L);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation sorted_ascending(std::span<const double> eps) {
  auto p = identity_permutation(static_cast<int>(eps.size()));
  std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return eps[a] < eps[b]; });
  return p;
}

namespace {

double sum_squares(std::span<const double> eps) {
  double s = 0;
  for (double e : eps) s += e * e;
  return s;
}

void check_sector(int L, int q) {
  if (q < 1 || L % q != 0)
    throw std::invalid_argument("sector " + std::to_string(q) + " does not divide L=" + std::to_string(L));
}

}  // namespace

OrderingScore sector_scores(std::span<const double> eps, int q) {
  const int L = static_cast<int>(eps.size());
  if (L == 0) throw std::invalid_argument("sector_scores: empty spectrum");
  check_sector(L, q);
  const auto eff = resum::effective_energies(eps);
  const sectors::SectorFlow flow(L);
  OrderingScore s{q, 0.0, 0.0};
  double power = 0;
  // eff.tilde carries 1/L; the scores use the plain transform.
  for (int ell : flow.sector(q).ells) {
    s.A += L * std::abs(eff.tilde[ell]);
    power += std::norm(eff.tilde[ell]);
  }
  const double e2 = sum_squares(eps);
  s.P = e2 > 0 ? L * power / e2 : 0.0;
  return s;
}

std::vector<OrderingScore> all_sector_scores(std::span<const double> eps) {
  std::vector<OrderingScore> out;
  const sectors::SectorFlow flow(static_cast<int>(eps.size()));
  for (const auto& s : flow.sectors())
    out.push_back(sector_scores(eps, s.q));
  return out;
}

double mean_spacing(std::span<const double> eps) {
  if (eps.size() < 2) throw std::invalid_argument("mean_spacing: needs at least two levels");
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  return (*hi - *lo) / static_cast<double>(eps.size() - 1);
}

MinEstimates min_estimates(int q, std::span<const double> eps) {
  if (q < 2) throw std::invalid_argument("min_estimates: q must exceed 1");
  const double spacing = mean_spacing(eps);
  const double phi = static_cast<double>(cyclo::totient(q));
  const double e2 = sum_squares(eps);
  return {phi * spacing, e2 > 0 ? phi * spacing * spacing / e2 : 0.0};
}

namespace {

void validate(std::span<const double> eps, const CostSpec& spec) {
  const int L = static_cast<int>(eps.size());
  if (L == 0) throw std::invalid_argument("ordering: empty spectrum");
  if (spec.sectors.empty()) throw std::invalid_argument("ordering: cost needs at least one target sector");
  for (int q : spec.sectors) {
    check_sector(L, q);
    if (q == 1) throw std::invalid_argument("ordering: sector 1 is permutation invariant and cannot be targeted");
  }
}

double combine(const CostSpec& spec, double a, double p) {
  switch (spec.kind) {
    case CostKind::A: return a;
    case CostKind::P: return p;
    case CostKind::Mix: return spec.weight_a * a + spec.weight_p * p;
  }
  return 0.0;
}

// Fourier coefficients restricted to the target sectors, updated in O(|ells|) per transposition.
class IncrementalCost {
 public:
  IncrementalCost(std::span<const double> eps, const CostSpec& spec) : spec_(spec), L_(static_cast<int>(eps.size())) {
    const sectors::SectorFlow flow(L_);
    for (std::size_t s = 0; s < spec.sectors.size(); ++s)
      for (int ell : flow.sector(spec.sectors[s]).ells) ells_.push_back(ell);
    basis_.resize(ells_.size() * L_);
    for (std::size_t i = 0; i < ells_.size(); ++i)
      for (int k = 0; k < L_; ++k)
        basis_[i * L_ + k] = cyclo::root_value(L_, -static_cast<std::int64_t>(k) * ells_[i]);
    e2_ = sum_squares(eps);
    tilde_.resize(ells_.size());
    trial_.resize(ells_.size());
  }

  double reset(std::span<const double> values) {
    for (std::size_t i = 0; i < ells_.size(); ++i) {
      std::complex<double> s{};
      for (int k = 0; k < L_; ++k) s += values[k] * basis_[i * L_ + k];
      tilde_[i] = s;
    }
    return evaluate(tilde_);
  }

  // Cost after swapping positions i and j (values vi at i, vj at j).
  double propose(int i, int j, double vi, double vj) {
    const double dv = vj - vi;
    for (std::size_t m = 0; m < ells_.size(); ++m)
      trial_[m] = tilde_[m] + dv * (basis_[m * L_ + i] - basis_[m * L_ + j]);
    return evaluate(trial_);
  }

  void commit() { tilde_.swap(trial_); }

 private:
  double evaluate(const std::vector<std::complex<double>>& t) const {
    double a = 0, p = 0;
    for (std::size_t m = 0; m < t.size(); ++m) {
      a += std::abs(t[m]);
      p += std::norm(t[m]);
    }
    p = e2_ > 0 ? p / (L_ * e2_) : 0.0;
    return combine(spec_, a, p);
  }

  const CostSpec& spec_;
  int L_;
  std::vector<int> ells_;
  std::vector<std::complex<double>> basis_;
  std::vector<std::complex<double>> tilde_, trial_;
  double e2_ = 0;
};

}  // namespace

double cost(std::span<const double> eps, const CostSpec& spec) {
  validate(eps, spec);
  double a = 0, p = 0;
  for (int q : spec.sectors) {
    const auto s = sector_scores(eps, q);
    a += s.A;
    p += s.P;
  }
  return combine(spec, a, p);
}

double stop_threshold(std::span<const double> eps, const CostSpec& spec, double stop_factor) {
  validate(eps, spec);
  if (eps.size() < 2) return 0.0;
  double a = 0, p = 0;
  for (int q : spec.sectors) {
    const auto m = min_estimates(q, eps);
    a += m.A;
    p += m.P;
  }
  return stop_factor * combine(spec, a, p);
}

AnnealResult anneal(std::span<const double> eps, const CostSpec& spec, const AnnealSchedule& schedule,
                    double stop_factor, std::uint64_t seed) {
  validate(eps, spec);
  if (!(schedule.alpha > 0.0 && schedule.alpha < 1.0)) throw std::invalid_argument("anneal: alpha must lie in (0, 1)");
  if (!(schedule.initial_temperature >= 0.0))
    throw std::invalid_argument("anneal: initial temperature must be non-negative");
  if (!(schedule.reheat_ratio > 0.0 && schedule.reheat_ratio < 1.0))
    throw std::invalid_argument("anneal: reheat ratio must lie in (0, 1)");

  const int L = static_cast<int>(eps.size());
  const double threshold = stop_factor > 0 ? stop_threshold(eps, spec, stop_factor) : -INFINITY;
  std::mt19937_64 rng(seed);
  IncrementalCost inc(eps, spec);

  AnnealResult r;
  Permutation cur = identity_permutation(L);
  std::vector<double> values(eps.begin(), eps.end());
  double cur_cost = inc.reset(values);
  r.best = cur;
  r.best_cost = cur_cost;
  r.evaluations = 1;
  r.trace.push_back({r.evaluations, 0.0, cur_cost, cur_cost});
  auto stop_reached = [&] { return r.best_cost < threshold; };
  if (stop_reached() || L < 2) {
    r.stopped = stop_reached();
    return r;
  }

  // Calibrate T0 from random orderings.
  std::vector<double> samples;
  Permutation probe = cur;
  for (int s = 0; s < schedule.calibration_samples && r.evaluations < schedule.budget; ++s) {
    std::shuffle(probe.begin(), probe.end(), rng);
    const double c = inc.reset(permute(probe, eps));
    ++r.evaluations;
    samples.push_back(c);
    if (c < r.best_cost) {
      r.best = probe;
      r.best_cost = c;
      r.trace.push_back({r.evaluations, 0.0, c, c});
      if (stop_reached()) {
        r.stopped = true;
        return r;
      }
    }
  }
  double t0 = schedule.initial_temperature;
  if (t0 == 0.0 && samples.size() > 1) {
    const double mu = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
    double var = 0;
    for (double c : samples) var += (c - mu) * (c - mu);
    t0 = std::sqrt(var / static_cast<double>(samples.size() - 1));
  }
  if (!(t0 > 0.0)) return r;  // cost is flat over every sampled ordering

  cur_cost = inc.reset(values);
  double temperature = t0;
  std::uniform_int_distribution<int> pick(0, L - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uint64_t accepted = 0;
  int epoch = 0;
  while (r.evaluations < schedule.budget) {
    int i = pick(rng);
    int j = pick(rng);
    while (j == i) j = pick(rng);
    const double trial = inc.propose(i, j, values[i], values[j]);
    ++r.evaluations;
    const double delta = trial - cur_cost;
    if (delta <= 0.0 || unit(rng) < std::exp(-delta / temperature)) {
      inc.commit();
      std::swap(values[i], values[j]);
      std::swap(cur[i], cur[j]);
      cur_cost = trial;
      if (++accepted % 4096 == 0) cur_cost = inc.reset(values);  // shed accumulated rounding
      if (cur_cost < r.best_cost) {
        r.best = cur;
        r.best_cost = cur_cost;
        r.trace.push_back({r.evaluations, temperature, cur_cost, r.best_cost});
        if (stop_reached()) {
          r.stopped = true;
          break;
        }
      }
    }
    if (schedule.trace_every && r.evaluations % schedule.trace_every == 0)
      r.trace.push_back({r.evaluations, temperature, cur_cost, r.best_cost});
    temperature *= schedule.alpha;
    if (temperature < schedule.reheat_ratio * t0) {
      // New epoch: alternate between intensifying around the best and a fresh random start.
      temperature = t0;
      if (++epoch % 2 == 1) {
        cur = r.best;
      } else {
        std::shuffle(cur.begin(), cur.end(), rng);
      }
      values = permute(cur, eps);
      cur_cost = inc.reset(values);
    }
  }
  // Report the best ordering's cost from a fresh evaluation.
  r.best_cost = cost(permute(r.best, eps), spec);
  return r;
}

Permutation canonical(const Permutation& perm) {
  const std::size_t L = perm.size();
  Permutation best = perm;
  Permutation cand(L);
  for (int dir = 0; dir < 2; ++dir)
    for (std::size_t s = 0; s < L; ++s) {
      for (std::size_t i = 0; i < L; ++i) {
        const std::size_t src = dir == 0 ? (i + s) % L : (s + L - i) % L;
        cand[i] = perm[src];
      }
      if (cand < best) best = cand;
    }
  return best;
}

ExhaustiveResult exhaustive_minimum(std::span<const double> eps, const CostSpec& spec, double rel_tol) {
  validate(eps, spec);
  if (eps.size() > 10) throw std::invalid_argument("exhaustive_minimum: L too large");
  Permutation p = identity_permutation(static_cast<int>(eps.size()));
  std::vector<std::pair<double, Permutation>> all;
  do {
    all.emplace_back(cost(permute(p, eps), spec), p);
  } while (std::next_permutation(p.begin(), p.end()));
  ExhaustiveResult r;
  r.min_cost = std::min_element(all.begin(), all.end())->first;
  const double tol = rel_tol * std::max(std::abs(r.min_cost), 1e-12);
  for (const auto& [c, perm] : all)
    if (c <= r.min_cost + tol) r.optima.push_back(canonical(perm));
  std::sort(r.optima.begin(), r.optima.end());
  r.optima.erase(std::unique(r.optima.begin(), r.optima.end()), r.optima.end());
  return r;
}

}  // namespace mbdos::ordering
