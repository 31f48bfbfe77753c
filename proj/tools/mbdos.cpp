// mbdos: command-line front end for the density-of-states pipeline.
//
// Exit codes: 0 ok, 1 usage, 2 validation failure, 3 cache corruption.
// Errors go to stderr as one JSON line {"error": ..., "exit": ...}.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbdos/analysis.hpp"
#include "mbdos/cache.hpp"
#include "mbdos/cyclotomic.hpp"
#include "mbdos/generators.hpp"
#include "mbdos/genfunc.hpp"
#include "mbdos/oracle.hpp"
#include "mbdos/ordering.hpp"
#include "mbdos/resummation.hpp"
#include "mbdos/run_config.hpp"
#include "mbdos/sectors.hpp"
#include "mbdos/spectrum.hpp"
#include "mbdos/table_io.hpp"

using namespace mbdos;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kCorruption = 3 };

struct Failure : std::runtime_error {
  Failure(Exit c, const std::string& m) : std::runtime_error(m), code(c) {}
  Exit code;
};

[[noreturn]] void usage(const std::string& m) { throw Failure(kUsage, m); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      usage("not an integer list: '" + s + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      usage("not a number list: '" + s + "'");
    }
  }
  return out;
}

// Output goes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) usage("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

WeightedSpectrum load_spectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) usage("cannot read spectrum '" + path + "'");
  return read_spectrum_csv(in);
}

std::vector<double> load_energies(const std::string& path) {
  if (!std::ifstream(path)) usage("cannot read energies '" + path + "'");
  return read_energies_file(path);
}

// Flags that assemble a RunConfig. Later sources override earlier ones:
// defaults, then --config, then explicit flags.
struct ConfigFlags {
  std::string config_file;
  int L = 0, N = 0, cap = 0;
  bool fermion = false, boson = false;
  std::string sectors;
  int drop_top = 1;
  std::string energies;
  std::string preset;
  double mu = 0, sigma = 1;
  std::uint64_t energy_seed = 0;
  double gamma = 0, gamma_delta = 1000;
  std::string cache;
  std::uint64_t seed = 0;
  int threads = 1;

  CLI::Option *o_L{}, *o_N{}, *o_sectors{}, *o_drop{}, *o_energies{}, *o_mu{}, *o_sigma{}, *o_eseed{}, *o_gamma{},
      *o_gamma_delta{}, *o_cache{}, *o_seed{}, *o_threads{}, *o_cap{}, *o_preset{};

  void add_system(CLI::App* app) {
    app->add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
    o_L = app->add_option("--L", L, "number of single-body levels")->check(CLI::PositiveNumber);
    o_N = app->add_option("--N", N, "number of particles")->check(CLI::NonNegativeNumber);
    app->add_flag("--fermion", fermion, "at most one particle per level");
    app->add_flag("--boson", boson, "unbounded occupancy (default)");
    o_cap = app->add_option("--cap", cap, "at most CAP particles per level")->check(CLI::PositiveNumber);
  }
  void add_sectors(CLI::App* app) {
    o_sectors = app->add_option("--sectors", sectors, "kept sectors, comma separated (q = 1 is implied)");
    o_drop = app->add_option("--drop-top", drop_top, "discard the DEPTH largest nontrivial sectors");
  }
  void add_energies(CLI::App* app) {
    o_energies = app->add_option("--energies", energies, "single-body energies, one per line");
    o_preset = app->add_option("--preset", preset, "generated energies: gaussian or bimodal")
                   ->check(CLI::IsMember({"gaussian", "bimodal"}));
    o_mu = app->add_option("--mu", mu, "generator mean");
    o_sigma = app->add_option("--sigma", sigma, "generator standard deviation");
    o_eseed = app->add_option("--energy-seed", energy_seed, "generator seed");
  }
  void add_gamma(CLI::App* app) {
    o_gamma = app->add_option("--gamma", gamma, "absolute kernel width");
    o_gamma_delta = app->add_option("--gamma-delta", gamma_delta, "kernel width in units of the mean level spacing");
  }
  void add_cache(CLI::App* app) {
    o_cache = app->add_option("--cache", cache, "cache directory (default: $MBDOS_CACHE_DIR or .mbdos-cache)");
    o_threads = app->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  }
  void add_seed(CLI::App* app) { o_seed = app->add_option("--seed", seed, "random seed"); }

  static bool given(const CLI::Option* o) { return o && o->count() > 0; }

  RunConfig resolve() const {
    RunConfig c;
    bool have_L = false, have_N = false;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      std::stringstream ss;
      ss << in.rdbuf();
      try {
        c = RunConfig::parse(ss.str());
      } catch (const std::exception& e) {
        usage(std::string("bad config: ") + e.what());
      }
      have_L = have_N = true;
    }
    if (given(o_L)) c.L = L, have_L = true;
    if (given(o_N)) c.N = N, have_N = true;
    if (!have_L || !have_N) usage("--L and --N are required (or --config)");
    if (int(fermion) + int(boson) + int(given(o_cap)) > 1) usage("choose one of --fermion, --boson, --cap");
    if (fermion) c.r_mode = RunConfig::RMode::Fermion;
    if (boson) c.r_mode = RunConfig::RMode::Boson;
    if (given(o_cap)) c.r_mode = RunConfig::RMode::Cap, c.cap = cap;
    if (given(o_sectors) && given(o_drop)) usage("--sectors and --drop-top are exclusive");
    if (given(o_sectors)) c.sectors = parse_int_list(sectors);
    if (given(o_drop)) c.sectors.reset(), c.drop_top = drop_top;
    if (given(o_energies) && given(o_preset)) usage("--energies and --preset are exclusive");
    if (given(o_energies)) c.energy_source = RunConfig::EnergySource::File, c.energies_file = energies;
    if (given(o_preset))
      c.energy_source = preset == "bimodal" ? RunConfig::EnergySource::Bimodal : RunConfig::EnergySource::Gaussian;
    if (given(o_mu)) c.mu = mu;
    if (given(o_sigma)) c.sigma = sigma;
    if (given(o_eseed)) c.energy_seed = energy_seed;
    if (given(o_gamma) && given(o_gamma_delta)) usage("--gamma and --gamma-delta are exclusive");
    if (given(o_gamma)) c.gamma_mode = RunConfig::GammaMode::Absolute, c.gamma = gamma;
    if (given(o_gamma_delta)) c.gamma_mode = RunConfig::GammaMode::DeltaMultiple, c.gamma = gamma_delta;
    if (given(o_cache)) c.cache_dir = cache;
    if (given(o_seed)) c.seed = seed;
    if (given(o_threads)) c.threads = threads;
    if (c.L < 1 || c.N < 0) usage("need L >= 1 and N >= 0");
    if (c.gamma <= 0) usage("gamma must be positive");
    return c;
  }
};

std::string echo(const RunConfig& c) { return "# config " + c.to_json().dump() + "\n"; }

cache::Cache open_cache(const RunConfig& c) {
  return cache::Cache(c.cache_dir.empty() ? cache::Cache::default_dir() : std::filesystem::path(c.cache_dir));
}

genfunc::CoefficientTable cached_table(const RunConfig& c, cache::Cache& store) {
  cache::ExpandRequest req{c.L, c.N, c.R(), c.kept_sectors()};
  req.threads = c.threads;
  return store.expand(req);
}

WeightedSpectrum truncated(const RunConfig& c, const std::vector<double>& eps) {
  auto store = open_cache(c);
  return resum::truncated_spectrum(cached_table(c, store), eps, c.N);
}

std::vector<double> checked_energies(const RunConfig& c) {
  try {
    return c.energies();
  } catch (const std::exception& e) {
    usage(e.what());
  }
}

analysis::DensityCurve curve_of(const WeightedSpectrum& s, double gamma, int points, bool raw) {
  return analysis::kde(s, gamma, analysis::covering_grid(s, gamma, points),
                       raw ? analysis::Normalization::Raw : analysis::Normalization::Probability);
}

void write_curve(std::ostream& os, const analysis::DensityCurve& c) {
  os << "energy,value\n";
  for (int i = 0; i < c.grid.points; ++i) os << num(c.grid.at(i)) << ',' << num(c.values[i]) << '\n';
}

// ---------------------------------------------------------------- commands

int cmd_sectors(int L) {
  const sectors::SectorFlow flow(L);
  json out;
  out["L"] = L;
  out["sectors"] = json::array();
  for (const auto& s : flow.sectors())
    out["sectors"].push_back({{"q", s.q}, {"phi", cyclo::totient(s.q)}, {"ells", s.ells}});
  out["edges"] = json::array();
  for (const auto& e : flow.edges()) out["edges"].push_back({{"from", e.from}, {"to", e.to}, {"prime", e.prime}});
  std::cout << out.dump(2) << '\n';
  return kOk;
}

int cmd_tmatrix(int q, bool as_json) {
  const cyclo::TransferMatrix t(q);
  if (as_json) {
    std::cout << json{{"q", q}, {"phi", t.phi()}, {"rows", t.rows()}}.dump() << '\n';
    return kOk;
  }
  std::cout << "# T_" << q << ": " << q << " x " << t.phi() << ", row p holds the coordinates of w^p\n";
  for (const auto& row : t.rows()) {
    for (std::size_t k = 0; k < row.size(); ++k) std::cout << (k ? " " : "") << row[k];
    std::cout << '\n';
  }
  return kOk;
}

int cmd_expand(const RunConfig& c, const std::string& out, int checkpoint_every, int stop_after) {
  auto store = open_cache(c);
  cache::ExpandRequest req{c.L, c.N, c.R(), c.kept_sectors()};
  req.threads = c.threads;
  req.checkpoint_every = checkpoint_every;
  req.stop_after = stop_after;
  const auto t = store.expand(req);
  if (!out.empty()) table_io::write_file(out, t);
  const auto& st = store.stats();
  json j;
  j["key"] = cache::Cache::make_key(cache::Kind::CoeffTable, cache::table_params_json(t.params()));
  j["sectors"] = t.params().sectors;
  j["levels"] = {t.params().level_begin, t.params().level_end};
  j["keys"] = t.keys_with(c.N);
  j["states"] = t.total(c.N).str();
  j["hit"] = st.hits > 0;
  j["resumed_from"] = st.resumed_from;
  j["quarantined"] = st.quarantined;
  for (const auto& w : st.warnings) std::cerr << json{{"warning", w}}.dump() << '\n';
  std::cout << echo(c) << j.dump() << '\n';
  return kOk;
}

int cmd_spectrum(const RunConfig& c, const std::string& table, const std::string& out) {
  const auto eps = checked_energies(c);
  WeightedSpectrum s;
  if (!table.empty()) {
    genfunc::CoefficientTable t;
    try {
      t = table_io::read_file(table);
    } catch (const table_io::CorruptTable& e) {
      throw Failure(kCorruption, e.what());
    } catch (const table_io::VersionMismatch& e) {
      throw Failure(kCorruption, e.what());
    }
    if (t.params().L != c.L) usage("table has L=" + std::to_string(t.params().L));
    s = resum::truncated_spectrum(t, eps, c.N);
  } else {
    s = truncated(c, eps);
  }
  Sink sink(out);
  sink.os() << echo(c);
  write_spectrum_csv(sink.os(), s);
  return kOk;
}

int cmd_optimize(const std::vector<double>& eps, const std::vector<int>& targets, const std::string& cost_name,
                 std::uint64_t budget, std::uint64_t seed, double stop_factor, const std::string& trace_path,
                 const std::string& out_energies) {
  ordering::CostSpec spec;
  spec.kind = cost_name == "A" ? ordering::CostKind::A : cost_name == "P" ? ordering::CostKind::P : ordering::CostKind::Mix;
  spec.sectors = targets;
  const int L = static_cast<int>(eps.size());
  for (int q : targets)
    if (q < 2 || L % q != 0) usage("target sector " + std::to_string(q) + " does not divide L=" + std::to_string(L));
  ordering::AnnealSchedule sched;
  sched.budget = budget;
  const auto r = ordering::anneal(eps, spec, sched, stop_factor, seed);
  const auto permuted = ordering::permute(r.best, eps);

  json j;
  j["seed"] = seed;
  j["cost"] = cost_name;
  j["sectors"] = targets;
  j["budget"] = budget;
  j["F"] = stop_factor;
  j["permutation"] = r.best;
  j["initial_cost"] = ordering::cost(eps, spec);
  j["best_cost"] = r.best_cost;
  j["threshold"] = ordering::stop_threshold(eps, spec, stop_factor);
  j["evaluations"] = r.evaluations;
  j["stopped"] = r.stopped;
  std::cout << j.dump() << '\n';

  if (!trace_path.empty()) {
    Sink sink(trace_path);
    sink.os() << "# seed " << seed << "\nevaluation,temperature,current,best\n";
    for (const auto& p : r.trace)
      sink.os() << p.evaluation << ',' << num(p.temperature) << ',' << num(p.current) << ',' << num(p.best) << '\n';
  }
  if (!out_energies.empty()) {
    Sink sink(out_energies);
    write_energies(sink.os(), permuted);
  }
  return kOk;
}

double gamma_from(const CLI::Option* abs_opt, double gamma, double gamma_delta, const WeightedSpectrum& ref) {
  if (abs_opt->count()) {
    if (gamma <= 0) usage("gamma must be positive");
    return gamma;
  }
  if (gamma_delta <= 0) usage("gamma-delta must be positive");
  return gamma_delta * ref.mean_level_spacing();
}

std::vector<std::vector<double>> occupancy_rows(const analysis::OccupancyModel& m, const std::vector<double>& probes) {
  std::vector<std::vector<double>> occ;
  for (double E : probes) occ.push_back(m.occupancies(E));
  return occ;
}

analysis::OccupancyModel occupancy_model(const RunConfig& c, const std::vector<double>& eps, double gamma,
                                         bool optimize, std::uint64_t budget) {
  if (c.sectors) usage("occupancy sub-systems use --drop-top, not --sectors");
  analysis::OccupancyPolicy p;
  p.drop_top = c.drop_top;
  p.optimize_order = optimize;
  p.anneal_budget = budget;
  p.seed = c.seed;
  return analysis::OccupancyModel(eps, c.N, c.R(), gamma, p);
}

int cmd_oracle_spectrum(const RunConfig& c, const std::string& out) {
  const auto eps = checked_energies(c);
  Sink sink(out);
  sink.os() << echo(c);
  write_spectrum_csv(sink.os(), oracle::exact_mbdos(c.L, c.N, c.R(), eps));
  return kOk;
}

int cmd_oracle_udist(const RunConfig& c, int ell, const std::string& out) {
  std::map<std::vector<std::int64_t>, std::pair<std::complex<double>, std::uint64_t>> classes;
  oracle::ConfigEnumerator it(c.L, c.N, c.R());
  while (const auto* n = it.next()) {
    const auto e = oracle::u_element(*n, ell);
    auto& slot = classes[e.coords];
    if (slot.second == 0) slot.first = e.value();
    ++slot.second;
  }
  Sink sink(out);
  sink.os() << "# L " << c.L << " N " << c.N << " R " << c.R() << " l " << ell << "\nre,im,count\n";
  for (const auto& [coords, v] : classes)
    sink.os() << num(v.first.real()) << ',' << num(v.first.imag()) << ',' << v.second << '\n';
  return kOk;
}

// Oracle-equivalence suite for one small system.
int cmd_validate(const RunConfig& c) {
  const int L = c.L, N = c.N, R = c.R();
  const auto states = oracle::count_configs(L, N, R);
  if (states > BigCount(2'000'000)) usage("validate is meant for small systems (" + states.str() + " states)");
  const auto eps = checked_energies(c);
  const auto nts = sectors::SectorFlow(L).nontrivial_sectors();
  const auto configs = oracle::enumerate_configs(L, N, R);
  const auto exact = oracle::exact_mbdos(L, N, R, eps);

  bool ok = true;
  std::cout << echo(c) << "states " << states.str() << '\n';

  // every subset of the nontrivial sectors
  for (std::uint32_t mask = 0; mask < (1u << nts.size()); ++mask) {
    std::vector<int> S;
    for (std::size_t i = 0; i < nts.size(); ++i)
      if (mask >> i & 1u) S.push_back(nts[i]);
    const auto t = genfunc::expand(L, N, R, S);
    std::map<genfunc::TermKey, BigCount> ref;
    for (const auto& n : configs) {
      genfunc::TermKey key{N, {}};
      for (int q : t.params().sectors)
        for (auto v : oracle::invariants_of(n, q)) key.inv.push_back(static_cast<std::int32_t>(v));
      ref[key] += 1;
    }
    bool same = ref.size() == t.keys_with(N);
    for (const auto& [key, count] : ref) same = same && t.count(key) == count;
    ok = ok && same;
    if (mask + 1 == (1u << nts.size())) {
      bool all_one = true;
      for (const auto& e : t.entries())
        if (e.key.particles == N) all_one = all_one && e.count == 1;
      const auto match = compare_spectra(resum::truncated_spectrum(t, eps, N), exact);
      ok = ok && all_one && match.ok(1e-9);
      std::cout << "all-sector table: " << t.keys_with(N) << " keys, counts " << (all_one ? "all 1" : "NOT all 1")
                << '\n';
      std::cout << "spectrum match " << (match.ok(1e-9) ? "PASS" : "FAIL") << " (max |dE| " << num(match.max_abs_diff)
                << ")\n";
    }
    if (!same) {
      std::cout << "sector set {";
      for (std::size_t i = 0; i < S.size(); ++i) std::cout << (i ? "," : "") << S[i];
      std::cout << "}: table differs from oracle classes\n";
    }
  }
  std::cout << "sector subsets checked " << (1u << nts.size()) << '\n';
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  if (!ok) throw Failure(kValidation, "validation failed for L=" + std::to_string(L) + " N=" + std::to_string(N));
  return kOk;
}

json entry_json(const cache::ManifestEntry& e) {
  return {{"key", e.key},         {"kind", cache::to_string(e.kind)}, {"params", e.params},
          {"file", e.file},       {"checksum", e.checksum},           {"version", e.version},
          {"size", e.size},       {"pinned", e.pinned}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-body density of states from cyclotomic generating functions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  // sectors
  auto* sec = app.add_subcommand("sectors", "sector partition and flow edges of Z_L as JSON");
  int sec_L = 0;
  sec->add_option("L,--L", sec_L, "system size")->required()->check(CLI::PositiveNumber);

  // tmatrix
  auto* tm = app.add_subcommand("tmatrix", "transfer matrix of the q-th cyclotomic field");
  int tm_q = 0;
  bool tm_json = false;
  tm->add_option("--q", tm_q, "order of the root of unity")->required()->check(CLI::PositiveNumber);
  tm->add_flag("--json", tm_json, "emit JSON instead of rows");

  // expand
  auto* ex = app.add_subcommand("expand", "expand (or fetch from cache) a coefficient table");
  ConfigFlags exf;
  exf.add_system(ex);
  exf.add_sectors(ex);
  exf.add_cache(ex);
  std::string ex_out;
  int ex_every = 1, ex_stop = -1;
  ex->add_option("--out", ex_out, "also write the table to this file");
  ex->add_option("--checkpoint-every", ex_every, "levels between checkpoints (0 disables)");
  ex->add_option("--stop-after", ex_stop, "stop after this many levels, leaving checkpoints");

  // spectrum
  auto* sp = app.add_subcommand("spectrum", "truncated spectrum from a table and single-body energies");
  ConfigFlags spf;
  spf.add_system(sp);
  spf.add_sectors(sp);
  spf.add_energies(sp);
  spf.add_cache(sp);
  std::string sp_table, sp_out;
  sp->add_option("--table", sp_table, "table file (otherwise expanded through the cache)");
  sp->add_option("--out", sp_out, "output CSV (energy,multiplicity)");

  // optimize
  auto* op = app.add_subcommand("optimize", "anneal the single-body ordering to empty target sectors");
  std::string op_energies, op_sectors, op_cost = "P", op_trace, op_out;
  std::uint64_t op_budget = 100000, op_seed = 0;
  double op_F = 0.0;
  op->add_option("--energies", op_energies, "single-body energies")->required();
  op->add_option("--sectors", op_sectors, "target sectors to empty, comma separated")->required();
  op->add_option("--cost", op_cost, "A, P or mix")->check(CLI::IsMember({"A", "P", "mix"}));
  op->add_option("--budget", op_budget, "cost evaluations");
  op->add_option("--seed", op_seed, "random seed");
  op->add_option("--F", op_F, "stop once cost <= F times the minimum estimate (0: never)");
  op->add_option("--trace", op_trace, "cost trace CSV");
  op->add_option("--out", op_out, "write the permuted energies here");

  // kde
  auto* kd = app.add_subcommand("kde", "Gaussian kernel density of a spectrum");
  std::string kd_in, kd_out;
  double kd_gamma = 0, kd_gd = 1000;
  int kd_points = 1000;
  bool kd_raw = false;
  kd->add_option("--spectrum", kd_in, "spectrum CSV (energy,multiplicity)")->required();
  auto* kd_gopt = kd->add_option("--gamma", kd_gamma, "absolute kernel width");
  kd->add_option("--gamma-delta", kd_gd, "kernel width in units of the mean level spacing")->excludes(kd_gopt);
  kd->add_option("--points", kd_points, "grid points")->check(CLI::Range(2, 10'000'000));
  kd->add_flag("--raw", kd_raw, "count-weighted instead of probability normalized");
  kd->add_option("--out", kd_out, "output CSV (energy,value)");

  // compare
  auto* cmp = app.add_subcommand("compare", "L_p distance between the densities of two spectra");
  std::string cmp_a, cmp_b;
  double cmp_p = 3, cmp_gamma = 0, cmp_gd = 1000;
  int cmp_points = 1000;
  cmp->add_option("--reference", cmp_a, "reference spectrum CSV; its spacing sets gamma")->required();
  cmp->add_option("--approx", cmp_b, "approximate spectrum CSV")->required();
  cmp->add_option("--p", cmp_p, "norm exponent")->check(CLI::PositiveNumber);
  auto* cmp_gopt = cmp->add_option("--gamma", cmp_gamma, "absolute kernel width");
  cmp->add_option("--gamma-delta", cmp_gd, "kernel width in units of the reference spacing")->excludes(cmp_gopt);
  cmp->add_option("--points", cmp_points, "grid points")->check(CLI::Range(2, 10'000'000));

  // occupancy
  auto* oc = app.add_subcommand("occupancy", "single-level occupancies at probe energies");
  ConfigFlags ocf;
  ocf.add_system(oc);
  ocf.add_sectors(oc);
  ocf.add_energies(oc);
  ocf.add_gamma(oc);
  ocf.add_seed(oc);
  ocf.add_cache(oc);
  std::string oc_probes, oc_out;
  bool oc_opt = false, oc_exact = false;
  std::uint64_t oc_budget = 20000;
  oc->add_option("--at", oc_probes, "probe energies, comma separated")->required();
  oc->add_flag("--optimize", oc_opt, "anneal each sub-system ordering");
  oc->add_flag("--exact", oc_exact, "take the level spacing from the exact spectrum");
  oc->add_option("--budget", oc_budget, "annealing budget per sub-system");
  oc->add_option("--out", oc_out, "output CSV (energy,k,eps,occupancy)");

  // beta
  auto* be = app.add_subcommand("beta", "inverse-temperature estimators");
  ConfigFlags bef;
  bef.add_system(be);
  bef.add_sectors(be);
  bef.add_energies(be);
  bef.add_gamma(be);
  bef.add_seed(be);
  bef.add_cache(be);
  std::string be_probes, be_out;
  bool be_opt = false, be_exact = false;
  std::uint64_t be_budget = 20000;
  int be_points = 1000;
  be->add_option("--at", be_probes, "probe energies for the empirical estimator, comma separated");
  be->add_flag("--optimize", be_opt, "anneal each sub-system ordering");
  be->add_option("--budget", be_budget, "annealing budget per sub-system");
  be->add_flag("--exact", be_exact, "density from the exact spectrum instead of the truncated one");
  be->add_option("--points", be_points, "grid points")->check(CLI::Range(3, 10'000'000));
  be->add_option("--out", be_out, "output CSV (energy,value,method)");

  // oracle
  auto* orc = app.add_subcommand("oracle", "brute-force reference computations");
  orc->require_subcommand(1);
  auto* ors = orc->add_subcommand("spectrum", "exact spectrum by enumeration");
  ConfigFlags orsf;
  orsf.add_system(ors);
  orsf.add_energies(ors);
  std::string ors_out;
  ors->add_option("--out", ors_out, "output CSV (energy,multiplicity)");
  auto* oru = orc->add_subcommand("udist", "distribution of U_l over all configurations");
  ConfigFlags oruf;
  oruf.add_system(oru);
  int oru_l = 1;
  std::string oru_out;
  oru->add_option("--l", oru_l, "Fourier index")->required();
  oru->add_option("--out", oru_out, "output CSV (re,im,count)");

  // validate
  auto* va = app.add_subcommand("validate", "compare tables against the oracle for a small system");
  ConfigFlags vaf;
  vaf.add_system(va);
  vaf.add_energies(va);

  // cache
  auto* ca = app.add_subcommand("cache", "inspect and maintain the table cache");
  ca->require_subcommand(1);
  std::string ca_dir;
  ca->add_option("--cache", ca_dir, "cache directory (default: $MBDOS_CACHE_DIR or .mbdos-cache)");
  auto* ca_list = ca->add_subcommand("list", "manifest entries as JSON");
  auto* ca_verify = ca->add_subcommand("verify", "check every entry; exit 3 if any is corrupt");
  auto* ca_gc = ca->add_subcommand("gc", "remove entries by age or total size; pinned entries stay");
  std::optional<std::int64_t> gc_age;
  std::optional<std::uint64_t> gc_bytes;
  ca_gc->add_option("--max-age", gc_age, "seconds since last use");
  ca_gc->add_option("--max-bytes", gc_bytes, "total size budget");
  auto* ca_pin = ca->add_subcommand("pin", "protect an entry from gc");
  for (auto* sub : {ca_list, ca_verify, ca_gc, ca_pin}) sub->fallthrough();
  std::string pin_key;
  bool unpin = false;
  ca_pin->add_option("key", pin_key, "entry key")->required();
  ca_pin->add_flag("--unpin", unpin, "remove the pin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", e.what()}, {"exit", int(kUsage)}}.dump() << '\n';
    return kUsage;
  }

  try {
    if (*sec) return cmd_sectors(sec_L);
    if (*tm) return cmd_tmatrix(tm_q, tm_json);
    if (*ex) return cmd_expand(exf.resolve(), ex_out, ex_every, ex_stop);
    if (*sp) return cmd_spectrum(spf.resolve(), sp_table, sp_out);
    if (*op) return cmd_optimize(load_energies(op_energies), parse_int_list(op_sectors), op_cost, op_budget, op_seed,
                                 op_F, op_trace, op_out);
    if (*kd) {
      const auto s = load_spectrum(kd_in);
      const double g = gamma_from(kd_gopt, kd_gamma, kd_gd, s);
      Sink sink(kd_out);
      sink.os() << "# gamma " << num(g) << '\n';
      write_curve(sink.os(), curve_of(s, g, kd_points, kd_raw));
      return kOk;
    }
    if (*cmp) {
      const auto a = load_spectrum(cmp_a), b = load_spectrum(cmp_b);
      const double g = gamma_from(cmp_gopt, cmp_gamma, cmp_gd, a);
      const std::vector<const WeightedSpectrum*> both = {&a, &b};
      const auto grid = analysis::covering_grid(both, g, cmp_points);
      const auto d = analysis::lp_distance(analysis::kde(a, g, grid), analysis::kde(b, g, grid), cmp_p);
      std::cout << json{{"p", cmp_p}, {"gamma", g}, {"points", cmp_points}, {"distance", d}}.dump() << '\n';
      return kOk;
    }
    if (*oc) {
      const auto c = ocf.resolve();
      const auto eps = checked_energies(c);
      const auto probes = parse_double_list(oc_probes);
      const auto s = oc_exact ? oracle::exact_mbdos(c.L, c.N, c.R(), eps) : truncated(c, eps);
      const double gamma = c.gamma_for(s.mean_level_spacing());
      const auto model = occupancy_model(c, eps, gamma, oc_opt, oc_budget);
      Sink sink(oc_out);
      sink.os() << echo(c) << "energy,k,eps,occupancy\n";
      for (double E : probes) {
        const auto occ = model.occupancies(E);
        for (int k = 0; k < c.L; ++k)
          sink.os() << num(E) << ',' << k << ',' << num(eps[k]) << ',' << num(occ[k]) << '\n';
      }
      return kOk;
    }
    if (*be) {
      const auto c = bef.resolve();
      const auto eps = checked_energies(c);
      const auto s = be_exact ? oracle::exact_mbdos(c.L, c.N, c.R(), eps) : truncated(c, eps);
      const double gamma = c.gamma_for(s.mean_level_spacing());
      const auto curve = curve_of(s, gamma, be_points, false);
      const auto probes = parse_double_list(be_probes);
      std::vector<std::vector<double>> occ;
      if (!probes.empty()) occ = occupancy_rows(occupancy_model(c, eps, gamma, be_opt, be_budget), probes);
      const auto est = analysis::beta_estimators(curve, probes, eps, occ);
      Sink sink(be_out);
      sink.os() << echo(c) << "# gamma " << num(gamma) << " gaussian mu " << num(est.gaussian.mu) << " sigma "
                << num(est.gaussian.sigma) << "\nenergy,value,method\n";
      for (const auto* b : {&est.boltzmann, &est.fit, &est.empirical})
        for (std::size_t i = 0; i < b->energies.size(); ++i)
          if (b->valid[i])
            sink.os() << num(b->energies[i]) << ',' << num(b->beta[i]) << ',' << analysis::to_string(b->method)
                      << '\n';
      return kOk;
    }
    if (*ors) return cmd_oracle_spectrum(orsf.resolve(), ors_out);
    if (*oru) return cmd_oracle_udist(oruf.resolve(), oru_l, oru_out);
    if (*va) return cmd_validate(vaf.resolve());
    if (*ca) {
      cache::Cache store(ca_dir.empty() ? cache::Cache::default_dir() : std::filesystem::path(ca_dir));
      if (*ca_list) {
        json arr = json::array();
        for (const auto& [key, e] : store.entries()) arr.push_back(entry_json(e));
        std::cout << json{{"dir", store.dir().string()}, {"entries", arr}, {"bytes", store.total_bytes()}}.dump(2)
                  << '\n';
        return kOk;
      }
      if (*ca_verify) {
        const auto bad = store.verify();
        std::cout << json{{"checked", store.entries().size() + bad.size()}, {"quarantined", bad}}.dump() << '\n';
        if (!bad.empty()) throw Failure(kCorruption, std::to_string(bad.size()) + " corrupt cache entries quarantined");
        return kOk;
      }
      if (*ca_gc) {
        const auto r = store.gc({gc_age, gc_bytes, 0});
        std::cout << json{{"removed", r.removed},
                          {"quarantined", r.quarantined},
                          {"bytes_before", r.bytes_before},
                          {"bytes_after", r.bytes_after}}
                         .dump()
                  << '\n';
        return kOk;
      }
      if (*ca_pin) {
        if (!store.entries().count(pin_key)) usage("no cache entry '" + pin_key + "'");
        store.pin(pin_key, !unpin);
        return kOk;
      }
    }
  } catch (const Failure& f) {
    std::cerr << json{{"error", f.what()}, {"exit", int(f.code)}}.dump() << '\n';
    return f.code;
  } catch (const cache::CacheCorruption& e) {
    std::cerr << json{{"error", e.what()}, {"exit", int(kCorruption)}}.dump() << '\n';
    return kCorruption;
  } catch (const std::invalid_argument& e) {
    std::cerr << json{{"error", e.what()}, {"exit", int(kUsage)}}.dump() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"exit", int(kUsage)}}.dump() << '\n';
    return kUsage;
  }
  return kUsage;
}
