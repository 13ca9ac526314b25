#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fnls/cli_harness.hpp"
#include "fnls/counting_lab.hpp"
#include "fnls/epsilon_lab.hpp"
#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/parallel.hpp"
#include "fnls/restriction_norms.hpp"
#include "fnls/rng.hpp"

namespace fnls {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double x) { return format_number(x); }
std::string num(std::int64_t x) { return std::to_string(x); }

Verdict verdict_of(bool pass) { return pass ? Verdict::Pass : Verdict::Fail; }

std::string describe(const char* label, double value, const char* op, double bound) {
  std::ostringstream o;
  o << label << " " << num(value) << " " << op << " " << num(bound);
  return o.str();
}

// Seeded smooth datum with |u0|_{H^1} = target.
SpectralField smooth_datum(const TorusGrid& grid, std::uint64_t seed, int kmax, double target) {
  SplitMix64 rng(seed);
  SpectralField u(grid);
  for (std::int64_t k = -kmax; k <= kmax; ++k)
    u.at(k) = cplx(rng.normal(), rng.normal()) * std::exp(-std::abs(static_cast<double>(k)));
  u *= target / sobolev_norm(u, 1.0);
  return u;
}

DispersionParams params_from(const Config& c, const std::string& re, const std::string& im) {
  return DispersionParams::from_epsilon_squared(cplx(c.get_double(re), c.get_double(im)));
}

std::vector<DispersionParams> real_eps_list(const Config& c, const std::string& key) {
  std::vector<DispersionParams> out;
  for (double e : c.get_doubles(key)) {
    if (!(e > 0.0)) throw ConfigError("config: " + key + " entries must be positive");
    out.push_back(DispersionParams::real(e));
  }
  if (out.empty()) throw ConfigError("config: " + key + " is empty");
  return out;
}

SimulationConfig sim_config(const Config& c, NonlinearityKind kind, const DispersionParams& p) {
  SimulationConfig s;
  s.params = p;
  s.nonlinearity = {kind, static_cast<int>(c.get_int("mu"))};
  s.grid = TorusGrid(static_cast<std::size_t>(c.get_int("grid.num_points")));
  s.dt = c.get_double("dt");
  s.horizon = c.get_double("horizon");
  s.dealias_ratio = default_dealias(kind);
  s.record_every = static_cast<std::size_t>(c.get_int("record_every"));
  return s;
}

// ---------------------------------------------------------------- simulate

ExperimentOutput run_simulate(const Config& c, const ExperimentContext& ctx) {
  const auto p = params_from(c, "eps2", "eps2_imag");
  const auto kind = parse_nonlinearity(c.get("nonlinearity"));
  auto cfg = sim_config(c, kind, p);
  const double s = c.get_double("s");
  cfg.sobolev_orders = {0.0, s};
  ExperimentOutput out;
  const std::string datum = c.get("datum");
  if (datum == "smooth") {
    const auto u0 = smooth_datum(cfg.grid, ctx.seed, static_cast<int>(c.get_int("datum.kmax")),
                                 c.get_double("datum.h1_norm"));
    const Trajectory traj = integrate(u0, cfg);
    Table t{"trajectory", {"time", "mass", "energy", "hs"}, {}};
    Plot plot{"hs", "H^s norm along the run", "t", "|u|_{H^s}", false, false, {{"s = " + num(s), {}, {}}}};
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      t.add_row({num(traj.times[i]), num(traj.mass[i]), num(traj.energy[i]), num(traj.sobolev[i][1])});
      plot.series[0].x.push_back(traj.times[i]);
      plot.series[0].y.push_back(traj.sobolev[i][1]);
    }
    out.metrics["final_time"] = traj.times.back();
    out.metrics["final_hs"] = traj.sobolev.back()[1];
    out.metrics["diverged"] = traj.divergence ? 1.0 : 0.0;
    out.detail = traj.divergence ? "diverged at t = " + num(traj.divergence->time) : "completed";
    out.tables.push_back(std::move(t));
    out.plots.push_back(std::move(plot));
    return out;
  }
  if (datum != "pure") throw ConfigError("config: datum must be smooth or pure");
  if (kind != NonlinearityKind::N1 || cfg.nonlinearity.mu != -1)
    throw ConfigError("config: the closed form needs nonlinearity=N1, mu=-1");
  const double amp = c.get_double("pure.k");
  const double tol = c.get_double("closed_form_tol");
  Table t{"closed_form", {"n", "max_hs_error"}, {}};
  double worst = 0.0;
  const auto modes = c.get_ints("pure.modes");
  std::vector<double> errors(modes.size());
  parallel_for(modes.size(), ctx.workers, [&](std::size_t i) {
    const auto traj = integrate(exact_pure_frequency(cfg.grid, modes[i], amp, s, p, 0.0), cfg);
    if (traj.divergence) {
      errors[i] = std::numeric_limits<double>::infinity();
      return;
    }
    double e = 0.0;
    for (std::size_t j = 0; j < traj.times.size(); ++j)
      e = std::max(e, sobolev_norm(traj.states[j] - exact_pure_frequency(cfg.grid, modes[i], amp, s, p, traj.times[j]), s));
    errors[i] = e;
  });
  for (std::size_t i = 0; i < modes.size(); ++i) {
    t.add_row({num(modes[i]), num(errors[i])});
    worst = std::max(worst, errors[i]);
  }
  out.metrics["max_error"] = worst;
  out.verdict = verdict_of(worst <= tol);
  out.detail = describe("max C_t H^s error", worst, "<=", tol);
  out.tables.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------- conservation

ExperimentOutput run_conservation(const Config& c, const ExperimentContext& ctx) {
  std::vector<NonlinearityKind> kinds;
  {
    std::stringstream ss(c.get("kinds"));
    std::string k;
    while (std::getline(ss, k, ',')) kinds.push_back(parse_nonlinearity(k));
  }
  const auto eps = c.get_doubles("eps");
  const double mass_tol = c.get_double("mass_tol"), energy_tol = c.get_double("energy_tol");
  struct Job {
    NonlinearityKind kind;
    double eps;
    double mass_drift = 0, energy_drift = 0;
    bool diverged = false;
  };
  std::vector<Job> jobs;
  for (auto k : kinds)
    for (double e : eps) jobs.push_back({k, e});
  parallel_for(jobs.size(), ctx.workers, [&](std::size_t i) {
    Job& j = jobs[i];
    auto cfg = sim_config(c, j.kind, DispersionParams::real(j.eps));
    const auto u0 = smooth_datum(cfg.grid, ctx.seed, static_cast<int>(c.get_int("datum.kmax")),
                                 c.get_double("datum.h1_norm"));
    const auto traj = integrate(u0, cfg);
    j.diverged = traj.divergence.has_value();
    const double m0 = traj.mass.front();
    // The Hamiltonian of each flow; only N1 is asserted.
    std::vector<double> energies;
    for (const auto& st : traj.states) energies.push_back(hamiltonian(st, cfg.params, cfg.nonlinearity));
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      j.mass_drift = std::max(j.mass_drift, std::abs(traj.mass[k] - m0) / m0);
      j.energy_drift = std::max(j.energy_drift, std::abs(energies[k] - energies[0]) / std::abs(energies[0]));
    }
  });
  ExperimentOutput out;
  Table t{"conservation", {"nonlinearity", "eps", "mass_drift", "energy_drift", "diverged"}, {}};
  double worst_mass = 0, worst_energy = 0;
  bool pass = true;
  for (const auto& j : jobs) {
    t.add_row({to_string(j.kind), num(j.eps), num(j.mass_drift), num(j.energy_drift), j.diverged ? "1" : "0"});
    worst_mass = std::max(worst_mass, j.mass_drift);
    if (j.kind == NonlinearityKind::N1) worst_energy = std::max(worst_energy, j.energy_drift);
    pass = pass && !j.diverged;
  }
  pass = pass && worst_mass <= mass_tol && worst_energy <= energy_tol;
  out.metrics["max_mass_drift"] = worst_mass;
  out.metrics["max_energy_drift_n1"] = worst_energy;
  out.verdict = verdict_of(pass);
  out.detail = describe("mass drift", worst_mass, "<=", mass_tol) + "; " +
               describe("N1 energy drift", worst_energy, "<=", energy_tol);
  out.tables.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------- strichartz-sweep

ExperimentOutput run_strichartz(const Config& c, const ExperimentContext& ctx) {
  const auto eps = c.get_doubles("eps");
  const double factor = c.get_double("scaling_factor");
  RandomFieldSpec spec;
  spec.max_mode = static_cast<int>(c.get_int("max_mode"));
  spec.detuning = c.get_double("detuning");
  const auto trials = static_cast<std::size_t>(c.get_int("trials"));
  std::vector<EmbeddingSweep> sweeps;
  for (double e : eps) sweeps.push_back(embedding_sweep(DispersionParams::real(e), trials, ctx.seed, spec, ctx.workers));
  ExperimentOutput out;
  Table t{"strichartz", {"eps", "max_l4_ratio", "max_l6_ratio", "l4_growth", "l4_allowed", "l6_growth", "l6_allowed"}, {}};
  Plot plot{"scaling", "max embedding ratio", "eps", "max ratio", true, true, {{"L4/X^{0,5/16}", {}, {}}, {"L6/X^{0,5/12}", {}, {}}}};
  bool pass = true;
  double worst = 0.0;  // largest growth / allowed past the reference eps
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double g4 = sweeps[i].max_l4 / sweeps[0].max_l4, g6 = sweeps[i].max_l6 / sweeps[0].max_l6;
    const double a4 = factor * std::pow(eps[i] / eps[0], -1.0 / 8), a6 = factor * std::pow(eps[i] / eps[0], -1.0 / 6);
    pass = pass && g4 <= a4 && g6 <= a6;
    if (i > 0) worst = std::max({worst, g4 / a4, g6 / a6});
    t.add_row({num(eps[i]), num(sweeps[i].max_l4), num(sweeps[i].max_l6), num(g4), num(a4), num(g6), num(a6)});
    plot.series[0].x.push_back(eps[i]);
    plot.series[0].y.push_back(sweeps[i].max_l4);
    plot.series[1].x.push_back(eps[i]);
    plot.series[1].y.push_back(sweeps[i].max_l6);
  }
  out.metrics["worst_growth_over_allowed"] = worst;
  out.metrics["empirical_l4_constant"] = sweeps[0].max_l4;
  out.metrics["empirical_l6_constant"] = sweeps[0].max_l6;
  out.verdict = verdict_of(pass);
  out.detail = describe("worst growth / allowed", worst, "<=", 1.0);
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

// ---------------------------------------------------------------- sharpness

ExperimentOutput run_sharpness(const Config& c, const ExperimentContext& ctx) {
  const auto deltas = c.get_ints("delta");
  std::vector<int> Ns;
  for (auto n : c.get_ints("Ns")) Ns.push_back(static_cast<int>(n));
  const auto bs = c.get_doubles("bs");
  const double tol = c.get_double("slope_tol"), r2_min = c.get_double("r2_min");
  std::vector<SharpnessSlopes> res(deltas.size());
  parallel_for(deltas.size(), ctx.workers,
               [&](std::size_t i) { res[i] = sharpness_slopes(static_cast<int>(deltas[i]), Ns, bs); });
  ExperimentOutput out;
  Table t{"sharpness", {"delta", "quantity", "slope", "expected", "relative_error", "r2"}, {}};
  Plot plot{"norms", "sharpness family norms", "N", "norm", true, true, {}};
  double worst = 0.0, worst_r2 = 1.0;
  auto add = [&](int d, const std::string& q, const LinearFit& f, double expected) {
    const double rel = std::abs(f.slope / expected - 1.0);
    worst = std::max(worst, rel);
    worst_r2 = std::min(worst_r2, f.r2);
    t.add_row({std::to_string(d), q, num(f.slope), num(expected), num(rel), num(f.r2)});
  };
  for (const auto& r : res) {
    const double d = r.delta;
    add(r.delta, "L4", r.l4_fit, 0.75 * (1 + d));
    add(r.delta, "L6", r.l6_fit, 5.0 / 6.0 * (1 + d));
    for (std::size_t j = 0; j < bs.size(); ++j) add(r.delta, "X^{0," + num(bs[j]) + "}", r.xsb_fits[j], (1 + (2 * bs[j] + 1) * d) / 2);
    PlotSeries s{"L4, delta=" + std::to_string(r.delta), {}, {}};
    for (std::size_t i = 0; i < r.Ns.size(); ++i) {
      s.x.push_back(r.Ns[i]);
      s.y.push_back(r.l4[i]);
    }
    plot.series.push_back(std::move(s));
  }
  out.metrics["max_relative_error"] = worst;
  out.metrics["min_r2"] = worst_r2;
  out.verdict = verdict_of(worst <= tol && worst_r2 >= r2_min);
  out.detail = describe("max slope error", worst, "<=", tol) + "; " + describe("min R^2", worst_r2, ">=", r2_min);
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

// ---------------------------------------------------------------- necessity

ExperimentOutput run_necessity(const Config& c, const ExperimentContext& ctx) {
  std::vector<std::pair<int, int>> cases;
  {
    std::stringstream ss(c.get("cases"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw ConfigError("config: cases entries look like q:delta");
      cases.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
    }
  }
  const double spacing = c.get_double("b_spacing"), b_max = c.get_double("b_max"), tol = c.get_double("crossover_tol");
  if (!(spacing > 0.0)) throw ConfigError("config: b_spacing must be positive");
  std::vector<double> grid;
  for (int i = 0; (i + 0.5) * spacing < b_max; ++i) grid.push_back((i + 0.5) * spacing);
  std::vector<NecessityScan> scans(cases.size());
  parallel_for(cases.size(), ctx.workers,
               [&](std::size_t i) { scans[i] = necessity_scan(cases[i].first, cases[i].second, grid); });
  ExperimentOutput out;
  Table t{"necessity", {"q", "delta", "b_star", "crossover", "single_flip", "error"}, {}};
  Table slopes{"slopes", {"q", "delta", "b", "slope", "r2", "diverges"}, {}};
  bool pass = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& s = scans[i];
    const double err = std::abs(s.crossover - s.b_star);
    worst = std::max(worst, err);
    pass = pass && s.single_flip && err <= tol;
    t.add_row({std::to_string(cases[i].first), std::to_string(cases[i].second), num(s.b_star), num(s.crossover),
               s.single_flip ? "1" : "0", num(err)});
    for (const auto& v : s.verdicts)
      slopes.add_row({std::to_string(v.q), std::to_string(v.delta), num(v.b), num(v.slope), num(v.r2),
                      v.diverges ? "1" : "0"});
  }
  out.metrics["max_crossover_error"] = worst;
  out.verdict = verdict_of(pass);
  out.detail = describe("max |crossover - b*|", worst, "<=", tol);
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(slopes));
  return out;
}

// ---------------------------------------------------------------- counting

std::vector<std::int64_t> k_samples(const Config& c) {
  std::vector<std::int64_t> ks;
  const auto dense = c.get_int("k_dense");
  for (std::int64_t k = -dense; k <= dense; ++k) ks.push_back(k);
  for (auto k : c.get_ints("k_sparse")) {
    ks.push_back(k);
    ks.push_back(-k);
  }
  return ks;
}

ExperimentOutput run_bilinear(const Config& c, const ExperimentContext& ctx) {
  const auto eps = real_eps_list(c, "eps");
  const int lo = static_cast<int>(c.get_int("shell_low")), hi = static_cast<int>(c.get_int("shell_high"));
  const double tol = c.get_double("stability_tol");
  const auto ks = k_samples(c);
  ExperimentOutput out;
  Table t{"bilinear", {"eps", "constant_low", "constant_high", "stability", "growth_slope", "max_intervals"}, {}};
  Table shells{"shells", {"eps", "S", "sup_count", "ratio"}, {}};
  Plot plot{"ratio", "sup count / (eps^{-1/2} 2^{S/4})", "S", "ratio", false, false, {}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& p : eps) {
    const auto r = verify_bilinear_bound(p, lo, hi, ks, kBilinearConstant, ctx.workers);
    const double e = p.epsilon().real();
    worst = std::max(worst, r.stability);
    pass = pass && r.stability <= 1.0 + tol && r.max_intervals <= 2;
    t.add_row({num(e), num(r.constant_low), num(r.constant_high), num(r.stability), num(r.growth_slope),
               std::to_string(r.max_intervals)});
    PlotSeries s{"eps=" + num(e), {}, {}};
    for (std::size_t S = 0; S < r.ratio_by_shell.size(); ++S) {
      shells.add_row({num(e), std::to_string(S), num(r.sup_count_by_shell[S]), num(r.ratio_by_shell[S])});
      s.x.push_back(static_cast<double>(S));
      s.y.push_back(r.ratio_by_shell[S]);
    }
    plot.series.push_back(std::move(s));
  }
  // Oracle equivalence against exhaustive scans.
  const auto queries = c.get_int("oracle_queries");
  SplitMix64 rng = SplitMix64::stream(ctx.seed, 0xB1);
  std::int64_t mismatches = 0;
  for (std::int64_t i = 0; i < queries; ++i) {
    CountQuery q;
    q.params = eps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(eps.size()) - 1))];
    q.m = static_cast<int>(rng.integer(0, 6));
    q.n = static_cast<int>(rng.integer(0, 4));
    q.box.k1_bound = 300;
    const std::int64_t k = rng.integer(-40, 40);
    const double tau = -bilinear_level(std::floor(k / 2.0), k, q.params) - rng.uniform(-2.0, 6.0) * q.theta();
    if (count_bilinear(q, tau, k) != scan_bilinear(q, tau, k)) ++mismatches;
  }
  pass = pass && mismatches == 0;
  out.metrics["max_stability"] = worst;
  out.metrics["oracle_mismatches"] = static_cast<double>(mismatches);
  out.verdict = verdict_of(pass);
  out.detail = describe("max stability", worst, "<=", 1.0 + tol) + "; oracle mismatches " + std::to_string(mismatches) +
               "/" + std::to_string(queries);
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(shells));
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_trilinear(const Config& c, const ExperimentContext& ctx) {
  const auto eps = real_eps_list(c, "eps");
  const int lo = static_cast<int>(c.get_int("shell_low")), hi = static_cast<int>(c.get_int("shell_high"));
  const double tol = c.get_double("stability_tol");
  const auto ks = c.get_ints("k_samples");
  ExperimentOutput out;
  Table t{"trilinear", {"eps", "lower_bound_c", "constant_low", "constant_high", "stability", "growth_slope"}, {}};
  Table shells{"shells", {"eps", "S", "sup_count", "ratio"}, {}};
  bool pass = true;
  double worst = 0.0;
  for (const auto& p : eps) {
    const auto r = verify_trilinear_bound(p, lo, hi, ks, {}, ctx.workers);
    const double e = p.epsilon().real();
    worst = std::max(worst, r.stability);
    pass = pass && r.stability <= 1.0 + tol;
    t.add_row({num(e), num(verified_lower_bound_constant(p)), num(r.constant_low), num(r.constant_high),
               num(r.stability), num(r.growth_slope)});
    for (std::size_t S = 0; S < r.ratio_by_shell.size(); ++S)
      shells.add_row({num(e), std::to_string(S), num(r.sup_count_by_shell[S]), num(r.ratio_by_shell[S])});
  }
  const auto queries = c.get_int("oracle_queries");
  SplitMix64 rng = SplitMix64::stream(ctx.seed, 0x71);
  std::int64_t mismatches = 0;
  for (std::int64_t i = 0; i < queries; ++i) {
    const auto& p = eps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(eps.size()) - 1))];
    const std::int64_t k = rng.integer(-20, 20);
    const int m = static_cast<int>(rng.integer(0, 3)), n = static_cast<int>(rng.integer(0, 2)),
              l = static_cast<int>(rng.integer(0, 2));
    const double theta = kTrilinearConstant * std::exp2(m + n + l);
    const double tau = -radial_minimum(k, p) - rng.uniform(-2.0, 8.0) * theta;
    if (count_trilinear(tau, k, m, n, l, p) != scan_trilinear(tau, k, theta, p, 60)) ++mismatches;
  }
  pass = pass && mismatches == 0;
  out.metrics["max_stability"] = worst;
  out.metrics["oracle_mismatches"] = static_cast<double>(mismatches);
  out.verdict = verdict_of(pass);
  out.detail = describe("max stability", worst, "<=", 1.0 + tol) + "; oracle mismatches " + std::to_string(mismatches) +
               "/" + std::to_string(queries);
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(shells));
  return out;
}

ExperimentOutput run_resonance(const Config& c, const ExperimentContext& ctx) {
  const auto p = DispersionParams::from_epsilon_squared(c.get_double("eps2"));
  const auto Ns = c.get_ints("Ns");
  const auto ns = c.get_ints("ns");
  std::vector<ResonanceProfile> prof(Ns.size() * ns.size());
  parallel_for(prof.size(), ctx.workers,
               [&](std::size_t i) { prof[i] = resonance_profile(Ns[i % Ns.size()], ns[i / Ns.size()], p); });
  ExperimentOutput out;
  Table t{"resonance", {"n", "N", "max_count", "argmax_j", "distinct_levels", "wide_arithmetic"}, {}};
  Plot plot{"growth", "max_j r_{N,n,j}", "N", "max count", true, true, {}};
  bool pass = true;
  std::string detail;
  for (std::size_t a = 0; a < ns.size(); ++a) {
    bool increasing = true;
    PlotSeries s{"n=" + std::to_string(ns[a]), {}, {}};
    std::string seq;
    for (std::size_t b = 0; b < Ns.size(); ++b) {
      const auto& r = prof[a * Ns.size() + b];
      if (b > 0 && r.max_count <= prof[a * Ns.size() + b - 1].max_count) increasing = false;
      t.add_row({std::to_string(r.n), std::to_string(r.N), std::to_string(r.max_count), r.argmax_j,
                 std::to_string(r.distinct_levels), r.wide_arithmetic ? "1" : "0"});
      s.x.push_back(static_cast<double>(r.N));
      s.y.push_back(static_cast<double>(r.max_count));
      seq += (seq.empty() ? "" : " ") + std::to_string(r.max_count);
    }
    pass = pass && increasing;
    detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(ns[a]) + ": " + seq +
              (increasing ? " (strictly increasing)" : " (not strictly increasing)");
    out.metrics["strictly_increasing_n" + std::to_string(ns[a])] = increasing ? 1.0 : 0.0;
    plot.series.push_back(std::move(s));
  }
  out.verdict = verdict_of(pass);
  out.detail = detail;
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_v_convexity(const Config& c, const ExperimentContext& ctx) {
  const auto eps = real_eps_list(c, "eps");
  const auto samples = c.get_int("samples");
  const double id_tol = c.get_double("identity_tol"), cv_tol = c.get_double("convexity_tol");
  SplitMix64 rng = SplitMix64::stream(ctx.seed, 0x76);
  double worst_rel = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const auto& p = eps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(eps.size()) - 1))];
    const std::int64_t k1 = rng.integer(-60, 60), k2 = rng.integer(-60, 60), k = rng.integer(-60, 60);
    const double x = k1 - k / 3.0, y = k2 - k / 3.0;
    const double e2 = p.alpha();
    auto w = [&](double z) { return e2 * z * z * z * z + z * z; };
    const double direct = w(static_cast<double>(k1)) + w(static_cast<double>(k2)) + w(static_cast<double>(k - k1 - k2));
    const double v = radial_polynomial_v(std::hypot(x, y), std::atan2(y, x), k, p);
    worst_rel = std::max(worst_rel, std::abs(v - direct) / std::max(std::abs(direct), 1e-300));
  }
  ExperimentOutput out;
  Table t{"v_convexity", {"eps", "min_second_derivative", "lower_bound_constant", "samples"}, {}};
  double min_v2 = std::numeric_limits<double>::infinity();
  for (const auto& p : eps) {
    const auto r = verify_v_properties(p);
    min_v2 = std::min(min_v2, r.min_second_derivative);
    t.add_row({num(p.epsilon().real()), num(r.min_second_derivative), num(r.lower_bound_constant),
               std::to_string(r.samples)});
  }
  out.metrics["max_identity_relative_error"] = worst_rel;
  out.metrics["min_second_derivative"] = min_v2;
  out.verdict = verdict_of(worst_rel <= id_tol && min_v2 >= -cv_tol);
  out.detail = describe("identity relative error", worst_rel, "<=", id_tol) + "; " +
               describe("min v''", min_v2, ">=", -cv_tol);
  out.tables.push_back(std::move(t));
  return out;
}

// ---------------------------------------------------------------- epsilon lab

ExperimentOutput run_illposed(const Config& c, const ExperimentContext&) {
  const double k = c.get_double("k"), s = c.get_double("s"), t = c.get_double("t");
  const double gap_tol = c.get_double("gap_tol"), dist_tol = c.get_double("distance_tol");
  const auto scan = illposedness_scan(k, s, t, DispersionParams::real(c.get_double("eps")), gap_tol, c.get_int("n_max"));
  ExperimentOutput out;
  Table tab{"illposed", {"n", "k_n", "initial_distance", "phase_gap", "lower_bound", "distance"}, {}};
  Plot plot{"gaps", "initial and time-t distances", "n", "distance", true, true,
            {{"initial", {}, {}}, {"time t", {}, {}}}};
  bool pass = scan.n0 > 0;
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scan.rows.size(); ++i) {
    const auto& w = scan.rows[i];
    tab.add_row({num(w.n), num(w.k_n), num(w.initial_distance), num(w.phase_gap), num(w.lower_bound), num(w.distance)});
    min_dist = std::min(min_dist, w.distance);
    pass = pass && w.distance >= k * (1.0 - dist_tol) && w.distance >= w.lower_bound - 1e-12 &&
           w.initial_distance <= gap_tol && (i == 0 || w.initial_distance < scan.rows[i - 1].initial_distance);
    plot.series[0].x.push_back(static_cast<double>(w.n));
    plot.series[0].y.push_back(w.initial_distance);
    plot.series[1].x.push_back(static_cast<double>(w.n));
    plot.series[1].y.push_back(w.distance);
  }
  out.metrics["n0"] = static_cast<double>(scan.n0);
  out.metrics["min_distance"] = min_dist;
  out.metrics["last_initial_distance"] = scan.rows.empty() ? NAN : scan.rows.back().initial_distance;
  out.verdict = verdict_of(pass);
  out.detail = "n0 = " + std::to_string(scan.n0) + "; " + describe("min time-t distance", min_dist, ">=", k * (1 - dist_tol));
  out.tables.push_back(std::move(tab));
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_inflation(const Config& c, const ExperimentContext&) {
  const double beta = c.get_double("beta"), s = c.get_double("s");
  auto k_of_n = [](std::int64_t n) { return 1.0 / static_cast<double>(n); };
  const auto table = norm_inflation_table(beta, c.get_double("table_T"), s, k_of_n, 1, c.get_int("table_n"));
  ExperimentOutput out;
  Table t{"inflation", {"n", "k_n", "initial", "log_final"}, {}};
  for (const auto& r : table.rows) t.add_row({num(r.n), num(r.k_n), num(r.initial), num(r.log_final)});
  Table wt{"witness", {"delta", "T", "n", "initial", "log_final", "found"}, {}};
  bool pass = true;
  for (double d : c.get_doubles("deltas")) {
    const auto w = norm_inflation_witness(beta, d, s, k_of_n, c.get_int("n_max"));
    pass = pass && w.found;
    wt.add_row({num(d), num(w.T), num(w.n), num(w.initial), num(w.log_final), w.found ? "1" : "0"});
  }
  const auto check = norm_inflation_solver_check(c.get_double("solver.alpha"), c.get_double("solver.beta"),
                                                 c.get_double("solver.amplitude"), c.get_double("solver.T"), s,
                                                 c.get_double("solver.dt"));
  const double tol = c.get_double("solver_tol");
  pass = pass && check.relative_error <= tol;
  out.metrics["solver_relative_error"] = check.relative_error;
  out.verdict = verdict_of(pass);
  out.detail = std::string(pass ? "witnesses found" : "witness or cross-check failed") + "; " +
               describe("solver relative error", check.relative_error, "<=", tol);
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(wt));
  return out;
}

ExperimentOutput run_continuity(const Config& c, const ExperimentContext&) {
  EpsilonExperiment exp;
  const double eps0 = c.get_double("eps0");
  exp.epsilon0 = DispersionParams::real(eps0);
  exp.s = c.get_double("s");
  for (std::int64_t j = 1; j <= c.get_int("jmax"); ++j)
    exp.epsilon_sequence.push_back(DispersionParams::real(eps0 + std::ldexp(1.0, -static_cast<int>(j))));
  ContinuityOptions opt;
  opt.grid = TorusGrid(static_cast<std::size_t>(c.get_int("grid.num_points")));
  opt.dt = c.get_double("dt");
  opt.record_every = static_cast<std::size_t>(c.get_int("record_every"));
  const double T = c.get_double("horizon");
  const auto u0 = cubic_smoothed_datum(opt.grid, c.get_int("datum.K"), exp.s);
  const auto rep = continuity_experiment(exp, u0, T, opt);
  ExperimentOutput out;
  Table t{"continuity",
          {"j", "eps", "eps_gap", "distance", "linear", "I1", "I2", "I3", "I4", "identity_residual"},
          {}};
  Plot plot{"modulus", "sup_t distance against |eps_j - eps_0|", "|eps_j - eps_0|", "distance", true, true,
            {{"distance", {}, {}}}};
  for (std::size_t j = 0; j < rep.rows.size(); ++j) {
    const auto& r = rep.rows[j];
    const auto& d = r.diagnostics;
    t.add_row({std::to_string(j + 1), num(r.epsilon.epsilon().real()), num(r.epsilon_gap), num(r.distance),
               num(d.linear), num(d.I1), num(d.I2), num(d.I3), num(d.I4), num(d.identity_residual)});
    plot.series[0].x.push_back(r.epsilon_gap);
    plot.series[0].y.push_back(r.distance);
  }
  const double tol = c.get_double("distance_tol");
  const auto large = large_epsilon_limit(c.get_double("large_eps"), u0, T, exp.s, opt);
  const double large_tol = c.get_double("large_eps_tol");
  out.metrics["final_distance"] = rep.final_distance;
  out.metrics["monotone"] = rep.monotone ? 1.0 : 0.0;
  out.metrics["large_eps_distance"] = large.distance;
  out.verdict = verdict_of(rep.monotone && rep.final_distance < tol && large.distance <= large_tol);
  out.detail = std::string(rep.monotone ? "monotone" : "not monotone") + "; " +
               describe("final distance", rep.final_distance, "<", tol) + "; " +
               describe("large-eps distance", large.distance, "<=", large_tol);
  out.tables.push_back(std::move(t));
  out.plots.push_back(std::move(plot));
  return out;
}

ExperimentOutput run_uniform_failure(const Config& c, const ExperimentContext&) {
  std::vector<std::pair<double, double>> pairs;
  const double gap = c.get_double("gap");
  for (double R : c.get_doubles("Rs")) pairs.emplace_back(R, R + gap);
  const double T = c.get_double("T"), tol = c.get_double("sup_tol");
  const auto rows = uniform_failure_witness(T, pairs, c.get_int("n"));
  ExperimentOutput out;
  Table t{"uniform_failure", {"eps", "eps_prime", "sup_distance", "sup_squared", "first_maximizer", "reached"}, {}};
  double worst = 0.0;
  bool pass = true;
  for (const auto& r : rows) {
    t.add_row({num(r.epsilon), num(r.epsilon_prime), num(r.sup_distance), num(r.sup_squared), num(r.first_maximizer),
               r.maximizer_reached ? "1" : "0"});
    pass = pass && r.maximizer_reached;
    worst = std::max(worst, std::abs(r.sup_distance - 2.0));
  }
  const double R = c.get_double("solver.R");
  const auto check = uniform_failure_solver_check(R, R + gap, c.get_double("solver.T"), c.get_int("n"), c.get_double("s"),
                                                  c.get_double("solver.dt"));
  const double solver_tol = c.get_double("solver_tol");
  pass = pass && worst <= tol && check.max_abs_error <= solver_tol;
  out.metrics["max_sup_error"] = worst;
  out.metrics["solver_max_abs_error"] = check.max_abs_error;
  out.verdict = verdict_of(pass);
  out.detail = describe("max |sup - 2|", worst, "<=", tol) + "; " +
               describe("solver vs formula", check.max_abs_error, "<=", solver_tol);
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_infinite_horizon(const Config& c, const ExperimentContext& ctx) {
  EpsilonExperiment exp;
  exp.epsilon0 = DispersionParams::real(c.get_double("eps0"));
  exp.infinite_horizon = true;
  exp.tolerance = c.get_double("tolerance");
  exp.epsilon_sequence = seeded_horizon_sequence(exp.epsilon0, static_cast<std::size_t>(c.get_int("count")), ctx.seed);
  const double cc = c.get_double("c"), delta0 = c.get_double("delta0"), margin = c.get_double("bound_margin");
  const auto rep = infinite_horizon_discontinuity(exp, cc, delta0);
  ExperimentOutput out;
  Table t{"infinite_horizon", {"j", "eps2_re", "eps2_im", "alpha_gap", "beta", "case", "tau_extent", "sup", "lower_bound", "pass"}, {}};
  int seen[4] = {0, 0, 0, 0};
  for (std::size_t j = 0; j < rep.rows.size(); ++j) {
    const auto& r = rep.rows[j];
    ++seen[static_cast<int>(r.kind)];
    t.add_row({std::to_string(j + 1), num(r.epsilon.alpha()), num(r.epsilon.beta()), num(r.alpha_gap), num(r.beta),
               to_string(r.kind), num(r.tau_extent), num(r.sup), num(r.lower_bound), r.pass ? "1" : "0"});
  }
  const double floor = std::min(1.0 - std::exp(-kPi / 2.0), rep.c1 * cc * std::exp(-cc));
  const bool all_cases = seen[1] > 0 && seen[2] > 0 && seen[3] > 0;
  out.metrics["c1"] = rep.c1;
  out.metrics["min_sup"] = rep.min_sup;
  out.metrics["floor"] = floor;
  out.verdict = verdict_of(rep.pass && all_cases && rep.min_sup >= floor - margin);
  out.detail = "c1 = " + num(rep.c1) + "; " + describe("min sup", rep.min_sup, ">=", floor - margin) +
               (all_cases ? "; all three cases present" : "; a case is missing");
  out.tables.push_back(std::move(t));
  return out;
}

ExperimentOutput run_holomorphy(const Config& c, const ExperimentContext& ctx) {
  const auto pts = seeded_omega_points(static_cast<std::size_t>(c.get_int("points")), ctx.seed);
  const TorusGrid grid(16);
  const auto u0 = SpectralField::single_mode(grid, c.get_int("mode"), kTwoPi);
  const double h0 = c.get_double("h0"), delta = c.get_double("delta"), T = c.get_double("T"), s = c.get_double("s");
  const int halvings = static_cast<int>(c.get_int("halvings"));
  const double half = c.get_double("ratio_halfwidth");
  std::vector<HolomorphyStudy> st(pts.size());
  parallel_for(pts.size(), ctx.workers,
               [&](std::size_t i) { st[i] = holomorphy_study(pts[i], h0, halvings, delta, T, u0, s); });
  ExperimentOutput out;
  Table t{"holomorphy", {"point", "eps_re", "eps_im", "h", "residual", "ratio"}, {}};
  double worst = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i)
    for (std::size_t j = 0; j < st[i].h.size(); ++j) {
      const bool has_ratio = j < st[i].ratios.size();
      if (has_ratio) worst = std::max(worst, std::abs(st[i].ratios[j] - 4.0));
      t.add_row({std::to_string(i), num(pts[i].real()), num(pts[i].imag()), num(st[i].h[j]), num(st[i].residual[j]),
                 has_ratio ? num(st[i].ratios[j]) : ""});
    }
  out.metrics["max_ratio_deviation"] = worst;
  out.verdict = verdict_of(worst <= half);
  out.detail = describe("max |ratio - 4|", worst, "<=", half);
  out.tables.push_back(std::move(t));
  return out;
}

std::vector<ExperimentSpec> build_registry() {
  std::vector<ExperimentSpec> r;
  r.push_back({"simulate", "nonlinear flow and its explicit single-mode solutions",
               "Run the solver from a smooth seeded datum, or compare pure frequencies with the closed form.",
               {{"eps2", "1", "real part of eps^2"},
                {"eps2_imag", "0", "imaginary part of eps^2"},
                {"nonlinearity", "N1", "N1, N2 or N3"},
                {"mu", "-1", "sign of the nonlinearity (-1, 0, 1)"},
                {"grid.num_points", "64", "spatial grid size"},
                {"dt", "1e-3", "time step"},
                {"horizon", "1", "final time"},
                {"record_every", "10", "record stride"},
                {"s", "1", "Sobolev order reported"},
                {"datum", "smooth", "smooth or pure"},
                {"datum.kmax", "8", "largest mode of the smooth datum"},
                {"datum.h1_norm", "1", "H^1 norm of the smooth datum"},
                {"pure.modes", "0,1,2,3,4,5,6,7,8", "modes n for the closed-form check"},
                {"pure.k", "0.8", "amplitude k of k <n>^{-s} e^{inx}"},
                {"closed_form_tol", "1e-8", "tolerance on sup_t H^s error"}},
               run_simulate});
  r.push_back({"conservation", "mass and Hamiltonian conservation",
               "Mass and energy drift over [0, T] for each nonlinearity and eps.",
               {{"eps", "0.5,1,2", "real eps values"},
                {"kinds", "N1,N2,N3", "nonlinearities"},
                {"mu", "-1", "sign of the nonlinearity"},
                {"grid.num_points", "256", "spatial grid size"},
                {"dt", "1e-3", "time step"},
                {"horizon", "1", "final time"},
                {"record_every", "50", "record stride"},
                {"datum.kmax", "8", "largest mode of the datum"},
                {"datum.h1_norm", "1", "H^1 norm of the datum"},
                {"mass_tol", "1e-8", "relative mass drift bound"},
                {"energy_tol", "1e-6", "relative N1 energy drift bound"}},
               run_conservation});
  r.push_back({"strichartz-sweep", "modified Strichartz embeddings and their eps power",
               "Max L^4/X^{0,5/16} and L^6/X^{0,5/12} ratios over random fields, per eps.",
               {{"eps", "1,0.25,0.0625", "real eps values; the first is the reference"},
                {"trials", "500", "random fields per eps"},
                {"max_mode", "6", "largest active mode"},
                {"detuning", "4", "modulation offsets drawn from [-detuning, detuning]"},
                {"scaling_factor", "3", "allowed factor over eps^{-1/8} and eps^{-1/6}"}},
               run_strichartz});
  r.push_back({"sharpness", "sharpness family exponents",
               "Log-log slopes of the L^4, L^6 and X^{0,b} norms of the box family.",
               {{"delta", "2,3,4", "dispersion degrees"},
                {"Ns", "4,8,16,32,64", "family sizes"},
                {"bs", "0,0.3125,0.5", "X^{0,b} exponents"},
                {"slope_tol", "0.03", "relative slope tolerance"},
                {"r2_min", "0.99", "minimum regression R^2"}},
               run_sharpness});
  r.push_back({"necessity", "necessity of the X^{0,b} exponent",
               "Sign of the ratio growth across a b grid; the flip must sit at b*.",
               {{"cases", "2:4,3:4,2:2", "q:delta pairs"},
                {"b_spacing", "0.03125", "b grid spacing; points sit at half-offsets"},
                {"b_max", "1", "upper end of the b grid"},
                {"crossover_tol", "0.03125", "allowed |crossover - b*|"}},
               run_necessity});
  r.push_back({"bilinear-count", "bilinear counting bound",
               "Sup counts per shell normalized by eps^{-1/2} 2^{S/4}, plus oracle equivalence.",
               {{"eps", "1,0.5,0.25", "real eps values"},
                {"shell_low", "6", "reference shell range"},
                {"shell_high", "12", "full shell range"},
                {"stability_tol", "0.2", "allowed relative drift of the constant"},
                {"k_dense", "12", "all |k| <= k_dense are sampled"},
                {"k_sparse", "16,32,64", "extra +-k samples"},
                {"oracle_queries", "100", "random queries checked against scans"}},
               run_bilinear});
  r.push_back({"trilinear-count", "trilinear counting bound",
               "Sup counts per shell normalized by eps^{-1} 2^{S/2}, plus oracle equivalence.",
               {{"eps", "1,0.5,0.25", "real eps values"},
                {"shell_low", "6", "reference shell range"},
                {"shell_high", "12", "full shell range"},
                {"stability_tol", "0.2", "allowed relative drift of the constant"},
                {"k_samples", "0,1,-1,2,-2,3,-3,5,-5,8,-8", "k values"},
                {"oracle_queries", "100", "random queries checked against scans"}},
               run_trilinear});
  r.push_back({"resonance-count", "growth of the resonance counts",
               "max_j r_{N,n,j} along N with exact arithmetic.",
               {{"eps2", "1", "eps^2, must be an exact rational"},
                {"Ns", "10,20,40,80,160", "box sizes"},
                {"ns", "0,1,5", "total frequencies n"}},
               run_resonance});
  r.push_back({"v-convexity", "radial polynomial identity and convexity",
               "Printed polar form against direct substitution; sampled second derivative.",
               {{"eps", "1,0.5,0.25", "real eps values"},
                {"samples", "10000", "random identity points"},
                {"identity_tol", "1e-9", "relative identity tolerance"},
                {"convexity_tol", "1e-9", "allowed negative v''"}},
               run_v_convexity});
  r.push_back({"illposed", "ill-posedness below L^2",
               "Closed-form pairs whose data converge while the time-t solutions stay apart.",
               {{"eps", "1", "real eps"},
                {"k", "1", "amplitude"},
                {"s", "-0.5", "Sobolev order, negative"},
                {"t", "1", "time"},
                {"gap_tol", "1e-3", "initial gap defining n0"},
                {"distance_tol", "1e-3", "time-t distances must be >= k (1 - distance_tol)"},
                {"n_max", "1099511627776", "largest n scanned"}},
               run_illposed});
  r.push_back({"inflation", "norm inflation for beta > 0",
               "Pure-frequency table with k_n = 1/n, witnesses per delta, solver cross-check.",
               {{"beta", "0.1", "Im eps^2"},
                {"s", "0", "Sobolev order"},
                {"table_T", "0.5", "time for the table"},
                {"table_n", "10", "rows n = 1 .. table_n"},
                {"deltas", "0.1,0.01", "witness deltas"},
                {"n_max", "100000", "largest n searched"},
                {"solver.alpha", "1", "Re eps^2 for the solver run"},
                {"solver.beta", "0.1", "Im eps^2 for the solver run"},
                {"solver.amplitude", "1e-3", "datum amplitude"},
                {"solver.T", "0.5", "solver horizon"},
                {"solver.dt", "1e-4", "solver step"},
                {"solver_tol", "1e-4", "relative tolerance"}},
               run_inflation});
  r.push_back({"epsilon-continuity", "continuity of the flow in eps on finite intervals",
               "sup_t H^s distances along eps_j = eps0 + 2^{-j}, Duhamel pieces, large-eps limit.",
               {{"eps0", "1", "base eps"},
                {"jmax", "20", "sequence length"},
                {"s", "1", "Sobolev order"},
                {"horizon", "1", "final time"},
                {"grid.num_points", "32", "grid size"},
                {"dt", "1e-3", "time step"},
                {"record_every", "10", "record stride"},
                {"datum.K", "2", "largest mode of the cubic datum"},
                {"distance_tol", "1e-4", "final distance bound"},
                {"large_eps", "1000", "eps for the limiting comparison"},
                {"large_eps_tol", "1e-3", "limiting comparison tolerance"}},
               run_continuity});
  r.push_back({"uniform-failure", "failure of uniform continuity in eps",
               "sup_t |e^{-it eps^2 n^4} - e^{-it eps'^2 n^4}| for eps' = eps + gap, and a solver check.",
               {{"Rs", "10,100,1000", "eps values"},
                {"gap", "1", "eps' - eps"},
                {"T", "1", "horizon"},
                {"n", "1", "mode"},
                {"s", "1", "Sobolev order"},
                {"sup_tol", "1e-10", "tolerance on sup = 2"},
                {"solver.R", "100", "eps for the solver check"},
                {"solver.T", "0.05", "solver horizon"},
                {"solver.dt", "1e-4", "solver step"},
                {"solver_tol", "1e-8", "solver vs formula tolerance"}},
               run_uniform_failure});
  r.push_back({"infinite-horizon", "discontinuity on the infinite horizon",
               "Case lower bounds for sup_tau |e^{i(alpha_j - alpha) tau} - e^{beta_j tau}| on a seeded sequence.",
               {{"eps0", "1", "dispersive base eps"},
                {"count", "30", "sequence length"},
                {"c", "0.3", "damping case constant"},
                {"delta0", "0.5", "radius for the measured c1"},
                {"tolerance", "1e-6", "sup refinement tolerance"},
                {"bound_margin", "1e-6", "slack on the reported floor"}},
               run_infinite_horizon});
  r.push_back({"holomorphy", "analyticity of the linear map on Omega",
               "Cauchy-Riemann residual of eps -> S_eps(t) u0 under h halving.",
               {{"points", "20", "seeded points of Omega"},
                {"h0", "1e-3", "initial step"},
                {"halvings", "3", "number of halvings"},
                {"delta", "0.1", "start of the time interval"},
                {"T", "1", "end of the time interval"},
                {"s", "1", "Sobolev order"},
                {"mode", "1", "mode of the single-mode datum"},
                {"ratio_halfwidth", "0.5", "ratios must lie in 4 +- ratio_halfwidth"}},
               run_holomorphy});
  return r;
}

Config cfg(std::initializer_list<std::pair<const char*, const char*>> kv) {
  Config c;
  for (const auto& [k, v] : kv) c.set(k, v);
  return c;
}

std::vector<CriterionSpec> build_criteria() {
  std::vector<CriterionSpec> c;
  c.push_back({1, "conservation",
               {{"conservation", cfg({{"eps", "1"}, {"grid.num_points", "128"}}), cfg({})}},
               {"mass_tol", "energy_tol"}});
  c.push_back({2, "closed-form agreement",
               {{"simulate", cfg({{"datum", "pure"}, {"grid.num_points", "32"}, {"pure.modes", "0,1,4,8"}}),
                 cfg({{"datum", "pure"}, {"grid.num_points", "32"}, {"record_every", "1"}})}},
               {"closed_form_tol"}});
  c.push_back({3, "sharpness exponents",
               {{"sharpness", cfg({}), cfg({})}},
               {"slope_tol"}});
  c.push_back({4, "necessity crossover",
               {{"necessity", cfg({{"cases", "2:4,2:2"}}), cfg({})}},
               {"crossover_tol"}});
  c.push_back({5, "embedding eps-scaling",
               {{"strichartz-sweep", cfg({{"trials", "60"}}), cfg({})}},
               {"scaling_factor"}});
  c.push_back({6, "bilinear and trilinear counting",
               {{"bilinear-count", cfg({{"shell_low", "4"}, {"shell_high", "8"}, {"oracle_queries", "30"}}), cfg({})},
                {"trilinear-count", cfg({{"shell_low", "4"}, {"shell_high", "8"}, {"oracle_queries", "30"}}), cfg({})}},
               {"stability_tol"}});
  c.push_back({7, "radial polynomial algebra",
               {{"v-convexity", cfg({{"samples", "2000"}}), cfg({})}},
               {"identity_tol", "convexity_tol"}});
  c.push_back({8, "resonance growth",
               {{"resonance-count", cfg({{"Ns", "10,20,40"}}), cfg({})}},
               {}});
  c.push_back({9, "ill-posedness witness",
               {{"illposed", cfg({}), cfg({})}},
               {"gap_tol", "distance_tol"}});
  c.push_back({10, "norm inflation",
               {{"inflation", cfg({}), cfg({})}},
               {"solver_tol"}});
  c.push_back({11, "eps-continuity and its failure",
               {{"epsilon-continuity", cfg({}), cfg({})}, {"uniform-failure", cfg({}), cfg({})}},
               {"distance_tol", "sup_tol", "solver_tol"}});
  c.push_back({12, "infinite-horizon discontinuity",
               {{"infinite-horizon", cfg({}), cfg({})}},
               {"bound_margin"}});
  c.push_back({13, "holomorphy residual",
               {{"holomorphy", cfg({}), cfg({})}},
               {"ratio_halfwidth"}});
  return c;
}

}  // namespace

const std::vector<ExperimentSpec>& experiment_registry() {
  static const std::vector<ExperimentSpec> registry = build_registry();
  return registry;
}

const std::vector<CriterionSpec>& acceptance_criteria() {
  static const std::vector<CriterionSpec> criteria = build_criteria();
  return criteria;
}

}  // namespace fnls
