#include "fnls/epsilon_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fnls/errors.hpp"
#include "fnls/rng.hpp"

namespace fnls {

namespace {

constexpr double kPi = std::numbers::pi;

double quartic(std::int64_t n) {
  const double d = static_cast<double>(n);
  return d * d * d * d;
}

SimulationConfig n1_config(const DispersionParams& params, const TorusGrid& grid, double dt, double horizon,
                           std::size_t record_every, double s) {
  SimulationConfig config;
  config.params = params;
  config.nonlinearity = {NonlinearityKind::N1, -1};
  config.grid = grid;
  config.dt = dt;
  config.horizon = horizon;
  config.dealias_ratio = default_dealias(NonlinearityKind::N1);
  config.sobolev_orders = {s};
  config.record_every = record_every;
  return config;
}

Trajectory run_or_throw(const SpectralField& u0, const SimulationConfig& config) {
  Trajectory traj = integrate(u0, config);
  if (traj.divergence)
    throw DivergenceError("epsilon_lab: " + traj.divergence->message, traj.divergence->time,
                          traj.divergence->sup_modulus);
  return traj;
}

std::vector<cplx> physical(const SpectralField& u) { return inverse_transform(u); }

std::vector<cplx> modulus_squared(const std::vector<cplx>& a) {
  std::vector<cplx> r(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) r[j] = std::norm(a[j]);
  return r;
}

// Physical samples of J_params(rho).
std::vector<cplx> smoothed(const TorusGrid& grid, const std::vector<cplx>& rho, const DispersionParams& params) {
  return inverse_transform(apply_smoothing_J(forward_transform(grid, rho), params));
}

// Dealiased transform of f * g.
SpectralField masked_product(const TorusGrid& grid, const std::vector<cplx>& f, const std::vector<cplx>& g,
                             std::int64_t cutoff) {
  std::vector<cplx> p(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) p[j] = f[j] * g[j];
  return dealias(forward_transform(grid, p), cutoff);
}

void require_D(const DispersionParams& p, const char* where) {
  if (p.monomial_mode()) throw DomainError(std::string(where) + ": monomial symbols are not in D");
  require_non_resonant(p, where);
  if (!in_domain_D(p)) throw RegimeError(std::string(where) + ": eps " + p.describe() + " is not in D");
}

}  // namespace

double scaled_hs_norm(const SpectralField& u, double s) { return sobolev_norm(u, s) / std::sqrt(kTwoPi); }

double scaled_hs_distance(const SpectralField& a, const SpectralField& b, double s) {
  require_same_grid(a.grid(), b.grid(), "scaled_hs_distance");
  return scaled_hs_norm(a - b, s);
}

bool in_domain_D(const DispersionParams& params) {
  if (params.monomial_mode()) return false;
  const Regime r = params.regime();
  return r == Regime::Dispersive || r == Regime::Dissipative;
}

bool in_omega(cplx eps) { return eps.real() * eps.imag() < 0.0; }

void EpsilonExperiment::validate() const {
  require_non_resonant(epsilon0, "EpsilonExperiment");
  for (const auto& e : epsilon_sequence) require_non_resonant(e, "EpsilonExperiment");
  if (!std::isfinite(s)) throw DomainError("EpsilonExperiment: s must be finite");
  if (!infinite_horizon && !(horizon > 0.0)) throw DomainError("EpsilonExperiment: horizon must be positive");
  if (!(tolerance > 0.0)) throw DomainError("EpsilonExperiment: tolerance must be positive");
  if (!in_domain_D(epsilon0)) throw RegimeError("EpsilonExperiment: eps0 is not in D");
  for (const auto& e : epsilon_sequence)
    if (!in_domain_D(e)) throw RegimeError("EpsilonExperiment: eps_j " + e.describe() + " is not in D");
}

// ---------------------------------------------------------------- ill-posedness

IllposednessWitness illposedness_witness(std::int64_t n, double k, double s, double t, const DispersionParams& params) {
  if (!(s < 0.0)) throw DomainError("illposedness_witness: needs s < 0");
  if (!(t > 0.0)) throw DomainError("illposedness_witness: needs t > 0");
  if (!(k > 0.0)) throw DomainError("illposedness_witness: needs k > 0");
  if (n < 1) throw DomainError("illposedness_witness: needs n >= 1");
  if (!params.real_epsilon()) throw DomainError("illposedness_witness: needs real eps");
  const double jn = japanese(static_cast<double>(n));
  const double weight = std::pow(jn, 2.0 * s);  // <n>^{2s}
  IllposednessWitness w;
  w.n = n;
  w.k = k;
  w.k_n = std::sqrt(k * k + kPi * weight / t);
  const double gap_sq = kPi * weight / t;  // k_n^2 - k^2
  w.initial_distance = gap_sq / (w.k_n + k);
  w.phase_gap = t * gap_sq / weight;
  w.lower_bound = k * std::abs(std::exp(cplx(0.0, w.phase_gap)) - 1.0) - w.initial_distance;
  // Linear phases agree; the amplitude phases differ by phase_gap.
  w.distance = std::abs(w.k_n * std::exp(cplx(0.0, w.phase_gap)) - k);
  return w;
}

IllposednessScan illposedness_scan(double k, double s, double t, const DispersionParams& params, double gap_tolerance,
                                   std::int64_t n_max) {
  if (!(gap_tolerance > 0.0)) throw DomainError("illposedness_scan: gap tolerance must be positive");
  if (n_max < 1) throw DomainError("illposedness_scan: n_max must be >= 1");
  auto gap = [&](std::int64_t n) { return illposedness_witness(n, k, s, t, params).initial_distance; };
  IllposednessScan scan;
  if (gap(n_max) > gap_tolerance) return scan;
  std::int64_t lo = 0, hi = n_max;  // gap(hi) <= tol, lo fails or is 0
  if (gap(1) <= gap_tolerance) hi = 1;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (gap(mid) <= gap_tolerance) hi = mid;
    else lo = mid;
  }
  scan.n0 = hi;
  scan.pass = true;
  scan.min_distance = std::numeric_limits<double>::infinity();
  for (std::int64_t n = scan.n0;; n *= 2) {
    const auto w = illposedness_witness(n, k, s, t, params);
    scan.rows.push_back(w);
    scan.min_distance = std::min(scan.min_distance, w.distance);
    if (w.distance < k * (1.0 - 1e-3) || w.distance < w.lower_bound - 1e-12 || w.initial_distance > gap_tolerance)
      scan.pass = false;
    if (n > n_max / 2) break;
  }
  return scan;
}

// ---------------------------------------------------------------- norm inflation

InflationTable norm_inflation_table(double beta, double T, double s, const std::function<double(std::int64_t)>& k_of_n,
                                    std::int64_t n_lo, std::int64_t n_hi) {
  if (!(beta > 0.0)) throw DomainError("norm_inflation_table: needs beta > 0");
  if (!(T > 0.0)) throw DomainError("norm_inflation_table: needs T > 0");
  if (n_lo < 1 || n_hi < n_lo) throw DomainError("norm_inflation_table: bad n range");
  InflationTable table{beta, T, s, {}};
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    const double kn = k_of_n(n);
    if (!(kn > 0.0)) throw DomainError("norm_inflation_table: k_n must be positive");
    table.rows.push_back({n, kn, kn, std::log(kn) + beta * T * quartic(n)});
  }
  return table;
}

InflationWitness norm_inflation_witness(double beta, double delta, double s,
                                        const std::function<double(std::int64_t)>& k_of_n, std::int64_t n_max) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("norm_inflation_witness: needs 0 < delta < 1");
  if (!(beta > 0.0)) throw DomainError("norm_inflation_witness: needs beta > 0");
  InflationWitness w;
  w.delta = delta;
  w.T = delta / 2.0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double kn = k_of_n(n);
    if (!(kn > 0.0)) throw DomainError("norm_inflation_witness: k_n must be positive");
    const double lf = std::log(kn) + beta * w.T * quartic(n);
    if (kn < delta && lf > -std::log(delta)) {
      w.n = n;
      w.initial = kn;
      w.log_final = lf;
      w.found = true;
      return w;
    }
  }
  (void)s;
  return w;
}

InflationCrossCheck norm_inflation_solver_check(double alpha, double beta, double amplitude, double T, double s,
                                                double dt) {
  if (!(beta > 0.0)) throw DomainError("norm_inflation_solver_check: needs beta > 0");
  const auto params = DispersionParams::from_epsilon_squared(cplx(alpha, beta));
  const TorusGrid grid(16);
  const auto u0 = exact_pure_frequency(grid, 1, amplitude, s, params, 0.0);
  const auto config = n1_config(params, grid, dt, T, 1, s);
  const SpectralField uT = evolve(u0, config, T);
  InflationCrossCheck c;
  c.closed_form = amplitude * std::exp(beta * T);
  c.solver = scaled_hs_norm(uT, s);
  c.relative_error = std::abs(c.solver - c.closed_form) / c.closed_form;
  return c;
}

// ---------------------------------------------------------------- symbol gap

double symbol_gap(std::int64_t n, double t, const DispersionParams& eps, const DispersionParams& eps_prime) {
  const double n4 = quartic(n);
  const double b = eps.beta(), bp = eps_prime.beta();
  const double da = eps_prime.alpha() - eps.alpha();
  return std::exp(2.0 * bp * t * n4) + std::exp(2.0 * b * t * n4) -
         2.0 * std::exp((bp + b) * t * n4) * std::cos(da * t * n4);
}

double symbol_gap_bound(std::int64_t n, std::int64_t n0, double t, double T, const DispersionParams& eps,
                        const DispersionParams& eps_prime) {
  if (eps.beta() > 0.0 || eps_prime.beta() > 0.0) throw DomainError("symbol_gap_bound: needs beta, beta' <= 0");
  if (std::abs(n) > n0) throw DomainError("symbol_gap_bound: needs |n| <= n0");
  if (t < 0.0 || t > T) throw DomainError("symbol_gap_bound: needs 0 <= t <= T");
  const double db = eps_prime.beta() - eps.beta();
  const double n08 = quartic(n0) * quartic(n0);
  const double da = eps_prime.alpha() - eps.alpha();
  return std::min(4.0, db * db * T * T * n08 + 2.0 * (1.0 - std::cos(da * t * quartic(n))));
}

// ---------------------------------------------------------------- continuity

SpectralField cubic_smoothed_datum(const TorusGrid& grid, std::int64_t K, double s) {
  if (K < 0) throw DomainError("cubic_smoothed_datum: K must be >= 0");
  SpectralField u(grid);
  for (std::int64_t k = -K; k <= K; ++k) {
    if (!grid.contains(k)) throw DomainError("cubic_smoothed_datum: K exceeds the grid");
    u.at(k) = kTwoPi * std::pow(japanese(static_cast<double>(k)), -3.0) * std::exp(cplx(0.0, 0.7 * k));
  }
  u *= 1.0 / scaled_hs_norm(u, s);
  return u;
}

namespace {

DuhamelDiagnostics duhamel_diagnostics(const Trajectory& ref, const Trajectory& alt, const DispersionParams& p0,
                                       const DispersionParams& p1, double s) {
  const auto& grid = ref.states.front().grid();
  const std::int64_t cutoff = dealias_cutoff(grid, default_dealias(NonlinearityKind::N1));
  const std::size_t m = ref.states.size();
  const double T = ref.times.back();
  SpectralField I[4] = {SpectralField(grid), SpectralField(grid), SpectralField(grid), SpectralField(grid)};
  for (std::size_t i = 0; i < m; ++i) {
    double weight;
    if (m == 1) weight = 0.0;
    else if (i == 0) weight = 0.5 * (ref.times[1] - ref.times[0]);
    else if (i + 1 == m) weight = 0.5 * (ref.times[i] - ref.times[i - 1]);
    else weight = 0.5 * (ref.times[i + 1] - ref.times[i - 1]);
    const double lag = T - ref.times[i];
    const auto u = physical(ref.states[i]);
    const auto v = physical(alt.states[i]);
    const auto ru = modulus_squared(u);
    const auto rv = modulus_squared(v);
    std::vector<cplx> diff(u.size()), rdiff(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) {
      diff[j] = v[j] - u[j];
      rdiff[j] = rv[j] - ru[j];
    }
    const auto jv1 = smoothed(grid, rv, p1);
    const auto jd1 = smoothed(grid, rdiff, p1);
    const auto ju1 = smoothed(grid, ru, p1);
    const auto ju0 = smoothed(grid, ru, p0);
    std::vector<cplx> jgap(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) jgap[j] = ju1[j] - ju0[j];
    const SpectralField f1 = masked_product(grid, jv1, diff, cutoff);
    const SpectralField f2 = masked_product(grid, jd1, u, cutoff);
    const SpectralField f3 = masked_product(grid, jgap, u, cutoff);
    const SpectralField f4 = masked_product(grid, ju0, u, cutoff);
    I[0] += weight * apply_semigroup(f1, lag, p1);
    I[1] += weight * apply_semigroup(f2, lag, p1);
    I[2] += weight * apply_semigroup(f3, lag, p1);
    I[3] += weight * (apply_semigroup(f4, lag, p1) - apply_semigroup(f4, lag, p0));
  }
  DuhamelDiagnostics d;
  d.I1 = scaled_hs_norm(I[0], s);
  d.I2 = scaled_hs_norm(I[1], s);
  d.I3 = scaled_hs_norm(I[2], s);
  d.I4 = scaled_hs_norm(I[3], s);
  const SpectralField& u0 = ref.states.front();
  const SpectralField lin = apply_semigroup(u0, T, p1) - apply_semigroup(u0, T, p0);
  d.linear = scaled_hs_norm(lin, s);
  SpectralField total = I[0] + I[1] + I[2] + I[3];
  total *= cplx(0.0, 1.0);
  const SpectralField residual = (alt.states.back() - ref.states.back()) - lin - total;
  d.identity_residual = scaled_hs_norm(residual, s);
  return d;
}

}  // namespace

ContinuityReport continuity_experiment(const EpsilonExperiment& exp, const SpectralField& u0, double T,
                                       const ContinuityOptions& options) {
  exp.validate();
  require_D(exp.epsilon0, "continuity_experiment");
  if (!(T > 0.0)) throw DomainError("continuity_experiment: T must be positive");
  require_same_grid(u0.grid(), options.grid, "continuity_experiment");
  const auto cfg0 = n1_config(exp.epsilon0, options.grid, options.dt, T, options.record_every, exp.s);
  const Trajectory ref = run_or_throw(u0, cfg0);
  ContinuityReport report;
  report.monotone = true;
  for (const auto& e : exp.epsilon_sequence) {
    require_D(e, "continuity_experiment");
    auto cfg = cfg0;
    cfg.params = e;
    const Trajectory alt = run_or_throw(u0, cfg);
    ContinuityRow row;
    row.epsilon = e;
    row.epsilon_gap = std::abs(e.epsilon() - exp.epsilon0.epsilon());
    for (std::size_t i = 0; i < ref.states.size(); ++i)
      row.distance = std::max(row.distance, scaled_hs_distance(alt.states[i], ref.states[i], exp.s));
    row.diagnostics = duhamel_diagnostics(ref, alt, exp.epsilon0, e, exp.s);
    if (!report.rows.empty() && row.distance > report.rows.back().distance) report.monotone = false;
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) report.final_distance = report.rows.back().distance;
  return report;
}

LargeEpsilonCheck large_epsilon_limit(double epsilon, const SpectralField& u0, double T, double s,
                                      const ContinuityOptions& options) {
  if (!(epsilon > 0.0)) throw DomainError("large_epsilon_limit: needs eps > 0");
  require_same_grid(u0.grid(), options.grid, "large_epsilon_limit");
  const auto params = DispersionParams::real(epsilon);
  const auto config = n1_config(params, options.grid, options.dt, T, options.record_every, s);
  const Trajectory traj = run_or_throw(u0, config);
  LargeEpsilonCheck c;
  c.epsilon = epsilon;
  const SpectralField& base = traj.states.front();
  c.potential = mass(base) / kTwoPi;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    SpectralField v = apply_semigroup(base, traj.times[i], params);
    v *= std::exp(cplx(0.0, traj.times[i] * c.potential));
    c.distance = std::max(c.distance, scaled_hs_distance(traj.states[i], v, s));
  }
  return c;
}

// ---------------------------------------------------------------- uniform failure

std::vector<UniformFailureRow> uniform_failure_witness(double T, const std::vector<std::pair<double, double>>& eps_pairs,
                                                       std::int64_t n) {
  if (!(T > 0.0)) throw DomainError("uniform_failure_witness: T must be positive");
  std::vector<UniformFailureRow> rows;
  for (const auto& [e, ep] : eps_pairs) {
    UniformFailureRow r;
    r.epsilon = e;
    r.epsilon_prime = ep;
    const double rate = std::abs(e * e - ep * ep) * quartic(n);
    if (rate == 0.0) {
      r.first_maximizer = std::numeric_limits<double>::infinity();
    } else {
      r.first_maximizer = kPi / rate;
      r.maximizer_reached = r.first_maximizer <= T;
      r.sup_distance = r.maximizer_reached ? 2.0 : 2.0 * std::sin(rate * T / 2.0);
    }
    r.sup_squared = r.sup_distance * r.sup_distance;
    rows.push_back(r);
  }
  return rows;
}

UniformFailureSolverCheck uniform_failure_solver_check(double eps, double eps_prime, double T, std::int64_t n, double s,
                                                       double dt) {
  const TorusGrid grid(16);
  if (n < 1 || 3 * n > 8) throw DomainError("uniform_failure_solver_check: n must be in [1, 2]");
  const auto p = DispersionParams::real(eps);
  const auto pp = DispersionParams::real(eps_prime);
  const auto u0 = exact_pure_frequency(grid, n, 1.0, s, p, 0.0);
  const auto a = run_or_throw(u0, n1_config(p, grid, dt, T, 1, s));
  const auto b = run_or_throw(u0, n1_config(pp, grid, dt, T, 1, s));
  const double rate = std::abs(eps * eps - eps_prime * eps_prime) * quartic(n);
  UniformFailureSolverCheck c;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    const double f = 2.0 * std::abs(std::sin(rate * a.times[i] / 2.0));
    const double d = scaled_hs_distance(a.states[i], b.states[i], s);
    c.formula = std::max(c.formula, f);
    c.solver = std::max(c.solver, d);
    c.max_abs_error = std::max(c.max_abs_error, std::abs(f - d));
  }
  return c;
}

// ---------------------------------------------------------------- infinite horizon

double measured_c1(double delta0) {
  if (!(delta0 > 0.0)) throw DomainError("measured_c1: delta0 must be positive");
  constexpr int kPoints = 1 << 16;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kPoints; ++i) {
    const cplx z = std::polar(delta0, kTwoPi * i / kPoints);
    best = std::min(best, std::abs(std::exp(z) - 1.0) / delta0);
  }
  return best;
}

std::string to_string(HorizonCase c) {
  switch (c) {
    case HorizonCase::Identical: return "identical";
    case HorizonCase::PurePhase: return "pure_phase";
    case HorizonCase::DampingDominated: return "damping_dominated";
    case HorizonCase::PhaseDominated: return "phase_dominated";
  }
  return "?";
}

double horizon_sup(double alpha_gap, double beta, double extent, double tol) {
  if (beta > 0.0) throw DomainError("horizon_sup: needs beta <= 0");
  if (!(extent > 0.0)) throw DomainError("horizon_sup: extent must be positive");
  auto g = [&](double tau) { return std::abs(std::exp(cplx(0.0, alpha_gap * tau)) - std::exp(beta * tau)); };
  double scale = extent;
  if (alpha_gap != 0.0) scale = std::min(scale, kTwoPi / std::abs(alpha_gap));
  if (beta != 0.0) scale = std::min(scale, 1.0 / std::abs(beta));
  constexpr double kMaxPoints = 1 << 22;
  double h = std::max(scale / 64.0, extent / kMaxPoints);

  auto scan = [&](double step, double& arg) {
    double best = 0.0;
    for (double i = 0.0;; i += 1.0) {
      const double tau = std::min(i * step, extent);
      const double v = g(tau);
      if (v > best) {
        best = v;
        arg = tau;
      }
      if (tau >= extent) break;
      // |g| <= 1 + e^{beta tau}, non-increasing in tau.
      if (1.0 + std::exp(beta * tau) < best) break;
    }
    return best;
  };
  double arg = 0.0;
  double best = scan(h, arg);
  for (int it = 0; it < 8; ++it) {
    h /= 2.0;
    double a2 = 0.0;
    const double b2 = scan(h, a2);
    const bool stable = std::abs(b2 - best) < tol / 10.0;
    if (b2 >= best) {
      best = b2;
      arg = a2;
    }
    if (stable) break;
  }
  // Golden-section polish of -g on [arg - h, arg + h].
  double a = std::max(0.0, arg - 2.0 * h), b = std::min(extent, arg + 2.0 * h);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    }
  }
  return std::max({best, gc, gd});
}

HorizonReport infinite_horizon_discontinuity(const EpsilonExperiment& exp, double c, double delta0) {
  exp.validate();
  if (exp.epsilon0.beta() != 0.0) throw DomainError("infinite_horizon_discontinuity: eps0 must be dispersive");
  if (!(c > 0.0 && c < delta0)) throw DomainError("infinite_horizon_discontinuity: needs 0 < c < delta0");
  HorizonReport rep;
  rep.delta0 = delta0;
  rep.c = c;
  rep.c1 = measured_c1(delta0);
  rep.pass = true;
  rep.min_sup = std::numeric_limits<double>::infinity();
  const double damping_bound = std::min(1.0 - std::exp(-c), rep.c1 * c * std::exp(-c));
  const double phase_bound = std::min(1.0 - std::exp(-kPi / 2.0), 1.0);
  for (const auto& e : exp.epsilon_sequence) {
    HorizonRow row;
    row.epsilon = e;
    row.alpha_gap = e.alpha() - exp.epsilon0.alpha();
    row.beta = e.beta();
    const double da = std::abs(row.alpha_gap), b = std::abs(row.beta);
    if (b == 0.0 && da == 0.0) {
      row.kind = HorizonCase::Identical;
      row.pass = true;
      rep.rows.push_back(row);
      continue;
    }
    if (b == 0.0) {
      row.kind = HorizonCase::PurePhase;
      row.lower_bound = 2.0;
    } else if (da <= b) {
      row.kind = HorizonCase::DampingDominated;
      row.lower_bound = damping_bound;
    } else {
      row.kind = HorizonCase::PhaseDominated;
      row.lower_bound = phase_bound;
    }
    row.tau_extent = std::max(b > 0.0 ? 10.0 / b : 0.0, da > 0.0 ? 10.0 * kPi / da : 0.0);
    row.sup = horizon_sup(row.alpha_gap, row.beta, row.tau_extent, exp.tolerance);
    row.pass = row.sup >= row.lower_bound - 1e-6;
    rep.pass = rep.pass && row.pass;
    rep.min_sup = std::min(rep.min_sup, row.sup);
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<DispersionParams> seeded_horizon_sequence(const DispersionParams& eps0, std::size_t count,
                                                      std::uint64_t seed) {
  if (eps0.beta() != 0.0 || eps0.monomial_mode())
    throw DomainError("seeded_horizon_sequence: eps0 must be dispersive");
  SplitMix64 rng(seed);
  std::vector<DispersionParams> out;
  for (std::size_t j = 0; j < count; ++j) {
    const double r = std::ldexp(1.0, -static_cast<int>(j) - 2) * rng.uniform(0.5, 1.0);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double da = 0.0, beta = 0.0;
    switch (j % 3) {
      case 0:
        da = sign * r;
        break;
      case 1:
        beta = -r;
        da = sign * r * rng.uniform();
        break;
      default:
        da = sign * r;
        beta = -r * rng.uniform(0.05, 0.95);
        break;
    }
    auto e = DispersionParams::from_epsilon_squared(cplx(eps0.alpha() + da, beta));
    if (!in_domain_D(e)) throw RegimeError("seeded_horizon_sequence: drew a point outside D");
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- holomorphy

double holomorphy_residual(cplx eps, double h, double delta, double T, const SpectralField& u0, double s,
                           std::size_t time_samples) {
  if (!(h > 0.0)) throw DomainError("holomorphy_residual: h must be positive");
  if (!(delta > 0.0 && delta < T)) throw DomainError("holomorphy_residual: needs 0 < delta < T");
  if (time_samples < 2) throw DomainError("holomorphy_residual: needs >= 2 time samples");
  const cplx ih(0.0, h);
  const cplx stencil[4] = {eps + h, eps - h, eps + ih, eps - ih};
  for (const cplx& z : stencil)
    if (!in_omega(z)) throw DomainError("holomorphy_residual: stencil leaves Omega");
  DispersionParams p[4];
  for (int i = 0; i < 4; ++i) p[i] = DispersionParams::from_epsilon(stencil[i]);
  double worst = 0.0;
  for (std::size_t i = 0; i < time_samples; ++i) {
    const double t = delta + (T - delta) * static_cast<double>(i) / static_cast<double>(time_samples - 1);
    SpectralField dx = apply_semigroup(u0, t, p[0]) - apply_semigroup(u0, t, p[1]);
    dx *= 1.0 / (2.0 * h);
    SpectralField dy = apply_semigroup(u0, t, p[2]) - apply_semigroup(u0, t, p[3]);
    dy *= 1.0 / (2.0 * ih);
    worst = std::max(worst, scaled_hs_norm(dx - dy, s));
  }
  return worst;
}

HolomorphyStudy holomorphy_study(cplx eps, double h0, int halvings, double delta, double T, const SpectralField& u0,
                                 double s) {
  if (halvings < 1) throw DomainError("holomorphy_study: needs >= 1 halving");
  HolomorphyStudy st;
  st.epsilon = eps;
  double h = h0;
  for (int i = 0; i <= halvings; ++i, h /= 2.0) {
    st.h.push_back(h);
    st.residual.push_back(holomorphy_residual(eps, h, delta, T, u0, s));
  }
  st.pass = true;
  for (std::size_t i = 0; i + 1 < st.residual.size(); ++i) {
    const double ratio = st.residual[i] / st.residual[i + 1];
    st.ratios.push_back(ratio);
    if (!(ratio >= 3.5 && ratio <= 4.5)) st.pass = false;
  }
  return st;
}

std::vector<cplx> seeded_omega_points(std::size_t count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<cplx> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = rng.uniform(0.5, 1.5);
    double phi = rng.uniform(-kPi / 2.0 + 0.2, -0.2);
    if (i % 2 == 1) phi += kPi;
    out.push_back(std::polar(r, phi));
  }
  return out;
}

// ---------------------------------------------------------------- Gronwall

GronwallFit gronwall_fit(cplx eps, double r, std::size_t members, const SpectralField& u0, double T, double s,
                         const ContinuityOptions& options) {
  if (!(r > 0.0)) throw DomainError("gronwall_fit: r must be positive");
  if (members == 0) throw DomainError("gronwall_fit: needs members");
  require_same_grid(u0.grid(), options.grid, "gronwall_fit");
  GronwallFit fit;
  fit.R = scaled_hs_norm(dealias(u0, dealias_cutoff(u0.grid(), default_dealias(NonlinearityKind::N1))), s);
  fit.max_rate = -std::numeric_limits<double>::infinity();
  fit.min_rate = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < members; ++m) {
    const cplx e = eps + std::polar(r, kTwoPi * static_cast<double>(m) / static_cast<double>(members));
    const auto params = DispersionParams::from_epsilon(e);
    require_D(params, "gronwall_fit");
    const Trajectory traj = run_or_throw(u0, n1_config(params, options.grid, options.dt, T, options.record_every, s));
    double rate = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < traj.states.size(); ++i)
      rate = std::max(rate, std::log(scaled_hs_norm(traj.states[i], s) / fit.R) / traj.times[i]);
    fit.rates.push_back(rate);
    fit.max_rate = std::max(fit.max_rate, rate);
    fit.min_rate = std::min(fit.min_rate, rate);
  }
  return fit;
}

}  // namespace fnls
