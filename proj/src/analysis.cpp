#include "mbdos/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mbdos/ordering.hpp"
#include "mbdos/resummation.hpp"
#include "mbdos/sectors.hpp"

namespace mbdos::analysis {

namespace {
constexpr double kWindow = 8.0;
constexpr double kUnderflow = 1e-300;

double kernel(double x, double gamma) {
  const double z = x / gamma;
  return std::exp(-0.5 * z * z) / (gamma * std::sqrt(2.0 * std::numbers::pi));
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("kde: gamma must be positive and finite");
}
}  // namespace

Grid covering_grid(std::span<const WeightedSpectrum* const> spectra, double gamma, int points) {
  check_gamma(gamma);
  if (points < 2) throw std::invalid_argument("covering_grid: need at least 2 points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* s : spectra) {
    if (s->empty()) continue;
    lo = std::min(lo, s->min_energy());
    hi = std::max(hi, s->max_energy());
  }
  if (!std::isfinite(lo)) throw std::invalid_argument("covering_grid: all spectra are empty");
  return Grid{lo - 5.0 * gamma, hi + 5.0 * gamma, points};
}

Grid covering_grid(const WeightedSpectrum& s, double gamma, int points) {
  const WeightedSpectrum* one[] = {&s};
  return covering_grid(one, gamma, points);
}

DensityCurve kde(const WeightedSpectrum& s, double gamma, const Grid& grid, Normalization norm) {
  check_gamma(gamma);
  if (grid.points < 2 || !(grid.hi > grid.lo)) throw std::invalid_argument("kde: degenerate grid");
  DensityCurve c{grid, std::vector<double>(grid.points, 0.0), gamma, norm};
  const double h = grid.step();
  for (const auto& lv : s.levels()) {
    const int first = std::max(0, static_cast<int>(std::ceil((lv.energy - kWindow * gamma - grid.lo) / h)));
    const int last = std::min(grid.points - 1, static_cast<int>(std::floor((lv.energy + kWindow * gamma - grid.lo) / h)));
    const double w = static_cast<double>(lv.multiplicity);
    for (int i = first; i <= last; ++i) c.values[i] += w * kernel(grid.at(i) - lv.energy, gamma);
  }
  if (norm == Normalization::Probability && !s.empty()) {
    const double m = static_cast<double>(s.total_multiplicity());
    for (double& v : c.values) v /= m;
  }
  return c;
}

double kde_at(const WeightedSpectrum& s, double gamma, double energy) {
  check_gamma(gamma);
  const auto& lv = s.levels();
  auto it = std::lower_bound(lv.begin(), lv.end(), energy - kWindow * gamma,
                             [](const Level& l, double e) { return l.energy < e; });
  double sum = 0.0;
  for (; it != lv.end() && it->energy <= energy + kWindow * gamma; ++it)
    sum += static_cast<double>(it->multiplicity) * kernel(energy - it->energy, gamma);
  return sum;
}

double integrate(const DensityCurve& c) {
  double s = 0.0;
  for (std::size_t i = 1; i < c.values.size(); ++i) s += 0.5 * (c.values[i - 1] + c.values[i]);
  return s * c.grid.step();
}

double lp_distance(const DensityCurve& a, const DensityCurve& b, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_distance: p must be positive");
  if (a.grid.points != b.grid.points || a.values.size() != b.values.size() ||
      std::abs(a.grid.lo - b.grid.lo) > 1e-12 * std::max(1.0, std::abs(a.grid.lo)) ||
      std::abs(a.grid.hi - b.grid.hi) > 1e-12 * std::max(1.0, std::abs(a.grid.hi)))
    throw std::invalid_argument("lp_distance: curves are on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::pow(std::abs(a.values[i] - b.values[i]), p);
  return std::pow(s, 1.0 / p);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need at least 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

GaussianFit fit_gaussian(const DensityCurve& c, double rel_threshold) {
  const double peak = *std::max_element(c.values.begin(), c.values.end());
  if (!(peak > 0.0)) throw std::invalid_argument("fit_gaussian: curve has no positive values");
  std::vector<double> xs, ys;
  for (int i = 0; i < c.grid.points; ++i)
    if (c.values[i] > rel_threshold * peak) {
      xs.push_back(c.grid.at(i));
      ys.push_back(std::log(c.values[i]));
    }
  if (xs.size() < 3) throw std::invalid_argument("fit_gaussian: fewer than 3 points above threshold");
  // Centre and scale x for conditioning.
  double x0 = 0;
  for (double x : xs) x0 += x;
  x0 /= static_cast<double>(xs.size());
  double sx = 0;
  for (double x : xs) sx = std::max(sx, std::abs(x - x0));
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = (xs[i] - x0) / sx;
    A(i, 0) = 1.0;
    A(i, 1) = u;
    A(i, 2) = u * u;
    b(i) = ys[i];
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(b);
  const double a2 = coef(2) / (sx * sx);
  const double a1 = coef(1) / sx;
  if (!(a2 < 0.0)) throw std::runtime_error("fit_gaussian: log-density is not concave");
  GaussianFit g;
  g.sigma = std::sqrt(-0.5 / a2);
  g.mu = x0 - a1 / (2.0 * a2);
  g.amplitude = std::exp(coef(0) - a1 * a1 / (4.0 * a2));
  const Eigen::VectorXd resid = b - A * coef;
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  g.r2 = ss_tot > 0.0 ? 1.0 - resid.squaredNorm() / ss_tot : 1.0;
  return g;
}

std::string to_string(BetaMethod m) {
  switch (m) {
    case BetaMethod::Boltzmann: return "boltzmann";
    case BetaMethod::BoltzmannFit: return "boltzmann-fit";
    case BetaMethod::Empirical: return "empirical";
  }
  return "unknown";
}

BetaEstimate beta_boltzmann(const DensityCurve& c) {
  BetaEstimate b;
  b.method = BetaMethod::Boltzmann;
  const int n = c.grid.points;
  const double h = c.grid.step();
  b.energies.resize(n);
  b.beta.assign(n, std::numeric_limits<double>::quiet_NaN());
  b.valid.assign(n, false);
  for (int i = 0; i < n; ++i) b.energies[i] = c.grid.at(i);
  for (int i = 1; i + 1 < n; ++i) {
    if (!(c.values[i - 1] > kUnderflow) || !(c.values[i + 1] > kUnderflow) || !(c.values[i] > kUnderflow)) continue;
    b.beta[i] = (std::log(c.values[i + 1]) - std::log(c.values[i - 1])) / (2.0 * h);
    b.valid[i] = true;
  }
  return b;
}

BetaEstimate beta_boltzmann_fit(const DensityCurve& c, const GaussianFit& fit) {
  BetaEstimate b;
  b.method = BetaMethod::BoltzmannFit;
  for (int i = 0; i < c.grid.points; ++i) {
    b.energies.push_back(c.grid.at(i));
    b.beta.push_back(fit.beta(c.grid.at(i)));
    b.valid.push_back(true);
  }
  b.r2.assign(1, fit.r2);
  return b;
}

LinearFit empirical_fit(std::span<const double> eps, std::span<const double> occupancies) {
  if (eps.size() != occupancies.size()) throw std::invalid_argument("empirical_fit: size mismatch");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double n = occupancies[k];
    if (!(n > 0.0) || !std::isfinite(n)) continue;
    x.push_back(eps[k]);
    y.push_back(std::log(1.0 / n + 1.0));
  }
  return linear_fit(x, y);
}

BetaEstimate beta_empirical(std::span<const double> probe_energies, std::span<const double> eps,
                            const std::vector<std::vector<double>>& occupancies) {
  if (probe_energies.size() != occupancies.size())
    throw std::invalid_argument("beta_empirical: one occupancy vector per probe energy is required");
  BetaEstimate b;
  b.method = BetaMethod::Empirical;
  for (std::size_t i = 0; i < probe_energies.size(); ++i) {
    b.energies.push_back(probe_energies[i]);
    try {
      const auto f = empirical_fit(eps, occupancies[i]);
      b.beta.push_back(f.slope);
      b.r2.push_back(f.r2);
      b.valid.push_back(std::isfinite(f.slope));
    } catch (const std::invalid_argument&) {
      b.beta.push_back(std::numeric_limits<double>::quiet_NaN());
      b.r2.push_back(std::numeric_limits<double>::quiet_NaN());
      b.valid.push_back(false);
    }
  }
  return b;
}

BetaEstimators beta_estimators(const DensityCurve& curve, std::span<const double> probe_energies,
                               std::span<const double> eps, const std::vector<std::vector<double>>& occupancies) {
  BetaEstimators out;
  out.boltzmann = beta_boltzmann(curve);
  out.gaussian = fit_gaussian(curve);
  out.fit = beta_boltzmann_fit(curve, out.gaussian);
  out.empirical = beta_empirical(probe_energies, eps, occupancies);
  return out;
}

std::optional<double> interpolate(const BetaEstimate& b, double energy) {
  const auto& e = b.energies;
  if (e.empty()) return std::nullopt;
  auto it = std::lower_bound(e.begin(), e.end(), energy);
  if (it == e.end()) return std::nullopt;
  const std::size_t i = static_cast<std::size_t>(it - e.begin());
  if (*it == energy) return b.valid[i] ? std::optional<double>(b.beta[i]) : std::nullopt;
  if (i == 0 || !b.valid[i] || !b.valid[i - 1]) return std::nullopt;
  const double t = (energy - e[i - 1]) / (e[i] - e[i - 1]);
  return (1.0 - t) * b.beta[i - 1] + t * b.beta[i];
}

OccupancyModel::OccupancyModel(std::vector<double> eps, int N, int R, double gamma, OccupancyPolicy policy)
    : eps_(std::move(eps)), N_(N), R_(R), gamma_(gamma) {
  check_gamma(gamma);
  const int L = static_cast<int>(eps_.size());
  if (L < 2) throw std::invalid_argument("OccupancyModel: need at least 2 levels");
  if (N < 0 || R < 1) throw std::invalid_argument("OccupancyModel: need N >= 0 and R >= 1");
  const int Ls = L - 1;
  sub_sectors_ = genfunc::drop_top_sectors(Ls, policy.drop_top);
  // One table serves every removed level and every particle count.
  const auto table = genfunc::expand(Ls, N, R, sub_sectors_);

  std::vector<int> dropped;
  for (const auto& s : sectors::SectorFlow(Ls).nontrivial_sectors())
    if (std::find(sub_sectors_.begin(), sub_sectors_.end(), s) == sub_sectors_.end()) dropped.push_back(s);

  sub_.resize(L);
  for (int k = 0; k < L; ++k) {
    std::vector<double> e;
    for (int j = 0; j < L; ++j)
      if (j != k) e.push_back(eps_[j]);
    if (policy.optimize_order && !dropped.empty() && Ls > 2) {
      ordering::AnnealSchedule sched;
      sched.budget = policy.anneal_budget;
      const auto res = ordering::anneal(e, {ordering::CostKind::P, dropped}, sched, 0.0, policy.seed + k);
      e = ordering::permute(res.best, e);
    }
    for (int m = 0; m <= N; ++m) sub_[k].push_back(resum::truncated_spectrum(table, e, m));
  }
}

const WeightedSpectrum& OccupancyModel::subspectrum(int k, int m) const { return sub_.at(k).at(m); }

double OccupancyModel::denominator(double energy, int k) const {
  double d = 0.0;
  for (int n = 0; n <= std::min(N_, R_); ++n) d += kde_at(sub_.at(k)[N_ - n], gamma_, energy - n * eps_[k]);
  return d;
}

std::optional<double> OccupancyModel::occupancy(double energy, int k) const {
  double num = 0.0, den = 0.0;
  for (int n = 0; n <= std::min(N_, R_); ++n) {
    const double w = kde_at(sub_.at(k)[N_ - n], gamma_, energy - n * eps_[k]);
    num += n * w;
    den += w;
  }
  if (!(den > kUnderflow)) return std::nullopt;
  return num / den;
}

std::vector<double> OccupancyModel::occupancies(double energy) const {
  std::vector<double> out;
  for (int k = 0; k < L(); ++k) out.push_back(occupancy(energy, k).value_or(std::numeric_limits<double>::quiet_NaN()));
  return out;
}

}  // namespace mbdos::analysis
