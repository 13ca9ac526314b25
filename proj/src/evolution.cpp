#include "fnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fnls/errors.hpp"

namespace fnls {

std::string to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::N1: return "N1";
    case NonlinearityKind::N2: return "N2";
    case NonlinearityKind::N3: return "N3";
  }
  return "?";
}

NonlinearityKind parse_nonlinearity(const std::string& name) {
  if (name == "N1" || name == "n1") return NonlinearityKind::N1;
  if (name == "N2" || name == "n2") return NonlinearityKind::N2;
  if (name == "N3" || name == "n3") return NonlinearityKind::N3;
  throw ConfigError("unknown nonlinearity '" + name + "' (expected N1, N2 or N3)");
}

Rational default_dealias(NonlinearityKind kind) {
  return kind == NonlinearityKind::N3 ? Rational{1, 2} : Rational{2, 3};
}

void validate(const SimulationConfig& config) {
  if (!(config.dt > 0.0)) throw DomainError("SimulationConfig: dt must be positive");
  if (!(config.horizon > 0.0)) throw DomainError("SimulationConfig: horizon must be positive");
  if (config.dt > config.horizon * (1.0 + 1e-12)) throw DomainError("SimulationConfig: dt exceeds horizon");
  if (config.nonlinearity.mu < -1 || config.nonlinearity.mu > 1)
    throw DomainError("SimulationConfig: mu must be -1, 0 or 1");
  if (!(config.dealias_ratio == default_dealias(config.nonlinearity.kind)))
    throw DomainError("SimulationConfig: dealias ratio must be 2/3 for cubic and 1/2 for quintic terms");
  if (config.record_every == 0) throw DomainError("SimulationConfig: record_every must be >= 1");
  if (config.nonlinearity.kind == NonlinearityKind::N1 && config.nonlinearity.mu != 0)
    require_non_resonant(config.params, "SimulationConfig");
  if (config.params.monomial_mode() && config.nonlinearity.kind == NonlinearityKind::N1 &&
      config.nonlinearity.mu != 0)
    throw DomainError("SimulationConfig: N1 needs an eps, not a monomial symbol");
}

std::int64_t dealias_cutoff(const TorusGrid& grid, Rational ratio) {
  const auto half = static_cast<std::int64_t>(grid.num_points() / 2);
  const std::int64_t c = (ratio.num * half) / ratio.den;
  return std::min(c, half - 1);
}

SpectralField dealias(const SpectralField& u, std::int64_t cutoff) {
  SpectralField out = u;
  const auto& grid = u.grid();
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = grid.frequency(i);
    if (k > cutoff || k < -cutoff) c[i] = 0.0;
  }
  return out;
}

SpectralField eval_nonlinearity(const SpectralField& u, const NonlinearitySpec& spec,
                                const DispersionParams& params, std::int64_t cutoff) {
  const auto& grid = u.grid();
  if (spec.mu == 0) return SpectralField(grid);
  std::vector<cplx> phys = inverse_transform(u);
  std::vector<cplx> rho(phys.size());
  for (std::size_t j = 0; j < phys.size(); ++j) rho[j] = std::norm(phys[j]);

  switch (spec.kind) {
    case NonlinearityKind::N1: {
      require_non_resonant(params, "eval_nonlinearity");
      const SpectralField smoothed = apply_smoothing_J(forward_transform(grid, rho), params);
      rho = inverse_transform(smoothed);
      break;
    }
    case NonlinearityKind::N2:
      break;
    case NonlinearityKind::N3:
      for (auto& r : rho) r *= r;
      break;
  }
  const double mu = static_cast<double>(spec.mu);
  for (std::size_t j = 0; j < phys.size(); ++j) phys[j] *= mu * rho[j];
  return dealias(forward_transform(grid, phys), cutoff);
}

SpectralField eval_nonlinearity(const SpectralField& u, const NonlinearitySpec& spec,
                                const DispersionParams& params) {
  return eval_nonlinearity(u, spec, params, dealias_cutoff(u.grid(), default_dealias(spec.kind)));
}

namespace {

std::vector<cplx> linear_factors(const TorusGrid& grid, const DispersionParams& params, double t) {
  std::vector<cplx> f(grid.num_points());
  for (std::size_t i = 0; i < f.size(); ++i)
    f[i] = std::exp(cplx(0.0, -t) * dispersion_symbol(static_cast<double>(grid.frequency(i)), params));
  return f;
}

void check_time_direction(const DispersionParams& params, double t, const char* where) {
  if (t < 0.0 && !params.real_symbol())
    throw RegimeError(std::string(where) + ": backward time outside the dispersive regime");
}

}  // namespace

IntegratingFactorStepper::IntegratingFactorStepper(const SimulationConfig& config, double dt)
    : config_(config),
      dt_(dt),
      cutoff_(dealias_cutoff(config.grid, config.dealias_ratio)),
      full_(linear_factors(config.grid, config.params, dt)),
      half_(linear_factors(config.grid, config.params, 0.5 * dt)) {
  check_time_direction(config.params, dt, "IntegratingFactorStepper");
}

SpectralField IntegratingFactorStepper::rhs(const SpectralField& u) const {
  SpectralField n = eval_nonlinearity(u, config_.nonlinearity, config_.params, cutoff_);
  n *= cplx(0.0, -1.0);
  return n;
}

void IntegratingFactorStepper::apply(std::vector<cplx> const& factor, SpectralField& u) const {
  auto c = u.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= factor[i];
}

SpectralField IntegratingFactorStepper::step(const SpectralField& u) const {
  require_same_grid(u.grid(), config_.grid, "step_integrating_factor");
  const double h = dt_;
  const SpectralField a = rhs(u);

  SpectralField ua = u;
  auto uac = ua.coeffs();
  auto ac = a.coeffs();
  for (std::size_t i = 0; i < uac.size(); ++i) uac[i] = half_[i] * (uac[i] + 0.5 * h * ac[i]);
  const SpectralField b = rhs(ua);

  SpectralField eu_half = u;
  apply(half_, eu_half);
  SpectralField ub = eu_half;
  auto ubc = ub.coeffs();
  auto bc = b.coeffs();
  for (std::size_t i = 0; i < ubc.size(); ++i) ubc[i] += 0.5 * h * bc[i];
  const SpectralField c = rhs(ub);

  SpectralField eu_full = u;
  apply(full_, eu_full);
  SpectralField uc = eu_full;
  auto ucc = uc.coeffs();
  auto cc = c.coeffs();
  for (std::size_t i = 0; i < ucc.size(); ++i) ucc[i] += h * half_[i] * cc[i];
  const SpectralField d = rhs(uc);

  SpectralField out = eu_full;
  auto oc = out.coeffs();
  auto dc = d.coeffs();
  for (std::size_t i = 0; i < oc.size(); ++i)
    oc[i] += (h / 6.0) * (full_[i] * ac[i] + 2.0 * half_[i] * (bc[i] + cc[i]) + dc[i]);

  const double sup = out.sup_modulus();
  if (!out.finite() || !(sup <= config_.divergence_threshold))
    throw DivergenceError("coefficient modulus exceeded the divergence threshold", 0.0, sup);
  return out;
}

SpectralField step_integrating_factor(const SpectralField& state, double dt, const SimulationConfig& config) {
  return IntegratingFactorStepper(config, dt).step(state);
}

namespace {

std::size_t step_count(double span, double dt) {
  const double m = std::ceil(std::abs(span) / dt - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, m));
}

void record(Trajectory& traj, const SimulationConfig& config, double t, const SpectralField& u) {
  traj.times.push_back(t);
  traj.states.push_back(u);
  traj.mass.push_back(mass(u));
  double e = std::numeric_limits<double>::quiet_NaN();
  if (config.params.real_epsilon()) e = hamiltonian(u, config.params, config.nonlinearity);
  traj.energy.push_back(e);
  std::vector<double> norms;
  norms.reserve(config.sobolev_orders.size());
  for (double s : config.sobolev_orders) norms.push_back(sobolev_norm(u, s));
  traj.sobolev.push_back(std::move(norms));
}

Trajectory integrate_lawson(const SpectralField& u0, const SimulationConfig& config) {
  Trajectory traj;
  traj.sobolev_orders = config.sobolev_orders;
  const std::size_t steps = step_count(config.horizon, config.dt);
  const double h = config.horizon / static_cast<double>(steps);
  const IntegratingFactorStepper stepper(config, h);
  SpectralField u = dealias(u0, stepper.cutoff());
  record(traj, config, 0.0, u);
  for (std::size_t i = 1; i <= steps; ++i) {
    try {
      u = stepper.step(u);
    } catch (const DivergenceError& e) {
      traj.divergence = DivergenceReport{h * static_cast<double>(i), e.sup_modulus(), e.what()};
      return traj;
    }
    if (i % config.record_every == 0 || i == steps) record(traj, config, h * static_cast<double>(i), u);
  }
  return traj;
}

}  // namespace

Trajectory integrate(const SpectralField& u0, const SimulationConfig& config) {
  validate(config);
  require_same_grid(u0.grid(), config.grid, "integrate");
  if (config.integrator == Integrator::PicardDuhamel) return picard_iterate(u0, config, 1e-12, 200);
  return integrate_lawson(u0, config);
}

SpectralField evolve(const SpectralField& u0, const SimulationConfig& config, double t_final) {
  require_same_grid(u0.grid(), config.grid, "evolve");
  check_time_direction(config.params, t_final, "evolve");
  if (t_final == 0.0) return dealias(u0, dealias_cutoff(config.grid, config.dealias_ratio));
  const std::size_t steps = step_count(t_final, config.dt);
  const double h = t_final / static_cast<double>(steps);
  const IntegratingFactorStepper stepper(config, h);
  SpectralField u = dealias(u0, stepper.cutoff());
  for (std::size_t i = 0; i < steps; ++i) u = stepper.step(u);
  return u;
}

Trajectory picard_iterate(const SpectralField& u0, const SimulationConfig& config, double tol, int max_iter) {
  validate(config);
  require_same_grid(u0.grid(), config.grid, "picard_iterate");
  if (!(tol > 0.0)) throw DomainError("picard_iterate: tol must be positive");
  const auto& grid = config.grid;
  const std::size_t m = std::max<std::size_t>(3, step_count(config.horizon, config.dt));
  const double h = config.horizon / static_cast<double>(m);
  const std::int64_t cutoff = dealias_cutoff(grid, config.dealias_ratio);
  const std::size_t np = grid.num_points();

  // U(a h) for a = -2 .. 3.
  std::vector<std::vector<cplx>> shift;
  for (int a = -2; a <= 3; ++a) shift.push_back(linear_factors(grid, config.params, a * h));
  auto factor = [&](int a) -> const std::vector<cplx>& { return shift[static_cast<std::size_t>(a + 2)]; };

  std::vector<SpectralField> free;
  free.reserve(m + 1);
  const SpectralField base = dealias(u0, cutoff);
  for (std::size_t i = 0; i <= m; ++i) free.push_back(apply_semigroup(base, h * static_cast<double>(i), config.params));

  std::vector<SpectralField> cur = free;
  std::vector<SpectralField> nl(m + 1, SpectralField(grid));
  double prev_diff = -1.0;
  double worst_ratio = 0.0;
  int growth_streak = 0;

  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i <= m; ++i) nl[i] = eval_nonlinearity(cur[i], config.nonlinearity, config.params, cutoff);

    std::vector<SpectralField> next;
    next.reserve(m + 1);
    std::vector<cplx> duhamel(np, 0.0);
    next.push_back(free[0]);
    for (std::size_t i = 0; i < m; ++i) {
      // Nodes and weights (in units of h/24) for the interval [t_i, t_{i+1}].
      std::size_t first;
      double w[4];
      if (i == 0) {
        first = 0;
        w[0] = 9; w[1] = 19; w[2] = -5; w[3] = 1;
      } else if (i + 1 == m) {
        first = m - 3;
        w[0] = 1; w[1] = -5; w[2] = 19; w[3] = 9;
      } else {
        first = i - 1;
        w[0] = -1; w[1] = 13; w[2] = 13; w[3] = -1;
      }
      const auto& eh = factor(1);
      for (std::size_t p = 0; p < np; ++p) duhamel[p] *= eh[p];
      for (int q = 0; q < 4; ++q) {
        const std::size_t j = first + static_cast<std::size_t>(q);
        const int offset = static_cast<int>(i + 1) - static_cast<int>(j);
        const auto& f = factor(offset);
        auto nc = nl[j].coeffs();
        const double wq = w[q] * h / 24.0;
        for (std::size_t p = 0; p < np; ++p) duhamel[p] += wq * f[p] * nc[p];
      }
      SpectralField u = free[i + 1];
      auto uc = u.coeffs();
      for (std::size_t p = 0; p < np; ++p) uc[p] -= cplx(0.0, 1.0) * duhamel[p];
      next.push_back(std::move(u));
    }

    double diff = 0.0;
    for (std::size_t i = 0; i <= m && std::isfinite(diff); ++i) {
      const double d = next[i].finite() ? sobolev_norm(next[i] - cur[i], config.contraction_order)
                                        : std::numeric_limits<double>::infinity();
      diff = std::isfinite(d) ? std::max(diff, d) : d;
    }
    cur = std::move(next);

    if (!std::isfinite(diff))
      throw NonContractiveError("picard_iterate: iterates became non-finite", std::numeric_limits<double>::infinity(), it);
    double ratio = 0.0;
    if (prev_diff > 0.0) {
      ratio = diff / prev_diff;
      worst_ratio = std::max(worst_ratio, ratio);
      growth_streak = ratio >= 1.0 ? growth_streak + 1 : 0;
    }
    if (diff < tol) {
      Trajectory traj;
      traj.sobolev_orders = config.sobolev_orders;
      for (std::size_t i = 0; i <= m; ++i)
        if (i % config.record_every == 0 || i == m) record(traj, config, h * static_cast<double>(i), cur[i]);
      traj.picard = PicardReport{it, worst_ratio, diff};
      return traj;
    }
    if (growth_streak >= 3)
      throw NonContractiveError("picard_iterate: successive differences grow", ratio, it);
    prev_diff = diff;
  }
  throw NonContractiveError("picard_iterate: no convergence within max_iter", worst_ratio, max_iter);
}

double choose_picard_horizon(const SpectralField& u0, const SimulationConfig& config, double s) {
  double t = std::min(1.0, 0.1 * std::pow(1.0 + sobolev_norm(u0, s), -2.0));
  SimulationConfig trial = config;
  trial.contraction_order = s;
  for (int attempt = 0; attempt < 60; ++attempt) {
    trial.horizon = t;
    const double steps = std::max(3.0, std::ceil(t / config.dt - 1e-9));
    trial.dt = t / steps;
    double ratio = 1.0;
    try {
      const Trajectory traj = picard_iterate(u0, trial, 1e-13, 12);
      ratio = traj.picard->contraction_ratio;
    } catch (const NonContractiveError& e) {
      ratio = e.ratio();
      // Converging but slowly: still a contraction if the ratio is small.
      if (!std::isfinite(ratio)) ratio = 1.0;
    }
    if (ratio < 0.9) return t;
    t *= 0.5;
  }
  throw NonContractiveError("choose_picard_horizon: no contracting horizon found", 1.0, 0);
}

double mass(const SpectralField& u) {
  const double n = sobolev_norm(u, 0.0);
  return n * n;
}

double hamiltonian(const SpectralField& u, const DispersionParams& params, const NonlinearitySpec& spec) {
  if (!params.real_epsilon())
    throw DomainError("energy: the Hamiltonian is only defined for real eps");
  const auto& grid = u.grid();
  const double eps2 = params.alpha();
  auto c = u.coeffs();
  double kinetic = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = static_cast<double>(grid.frequency(i));
    const double k2 = k * k;
    kinetic += (0.5 * eps2 * k2 * k2 + 0.5 * k2) * std::norm(c[i]);
  }
  kinetic /= kTwoPi;

  const std::vector<cplx> phys = inverse_transform(u);
  std::vector<cplx> rho(phys.size());
  for (std::size_t j = 0; j < phys.size(); ++j) rho[j] = std::norm(phys[j]);
  double integral = 0.0;
  double coeff = 0.0;
  switch (spec.kind) {
    case NonlinearityKind::N1: {
      const std::vector<cplx> smooth = inverse_transform(apply_smoothing_J(forward_transform(grid, rho), params));
      for (std::size_t j = 0; j < rho.size(); ++j) integral += smooth[j].real() * rho[j].real();
      coeff = 0.25;
      break;
    }
    case NonlinearityKind::N2:
      for (const auto& r : rho) integral += r.real() * r.real();
      coeff = 0.25;
      break;
    case NonlinearityKind::N3:
      for (const auto& r : rho) integral += r.real() * r.real() * r.real();
      coeff = 1.0 / 6.0;
      break;
  }
  integral *= grid.spacing();
  return kinetic + coeff * static_cast<double>(spec.mu) * integral;
}

double energy(const SpectralField& u, const DispersionParams& params) {
  return hamiltonian(u, params, NonlinearitySpec{NonlinearityKind::N1, -1});
}

SpectralField exact_pure_frequency(const TorusGrid& grid, std::int64_t n, double k, double s,
                                   const DispersionParams& params, double t) {
  check_time_direction(params, t, "exact_pure_frequency");
  require_non_resonant(params, "exact_pure_frequency");
  const double nd = static_cast<double>(n);
  const double r0 = k * std::pow(japanese(nd), -s);
  const cplx w = dispersion_symbol(nd, params);
  const double growth = w.imag();  // beta n^4
  // Phase from the nonlinearity: r0^2 int_0^t e^{2 growth t'} dt'.
  const double nl_phase = growth == 0.0 ? r0 * r0 * t : r0 * r0 * std::expm1(2.0 * growth * t) / (2.0 * growth);
  const cplx amp = r0 * std::exp(cplx(0.0, -t) * w) * std::exp(cplx(0.0, nl_phase));
  return SpectralField::single_mode(grid, n, kTwoPi * amp);
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "time,mass,energy";
  for (double s : sobolev_orders) {
    char buf[64];
    std::snprintf(buf, sizeof buf, ",hs_%g", s);
    os << buf;
  }
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", times[i]);
    os << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", mass[i]);
    os << buf;
    std::snprintf(buf, sizeof buf, ",%.17g", energy[i]);
    os << buf;
    for (double v : sobolev[i]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace fnls
