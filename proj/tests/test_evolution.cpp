#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fnls/errors.hpp"
#include "fnls/evolution.hpp"
#include "fnls/rng.hpp"

using namespace fnls;

namespace {

// Smooth datum with |u|_{H^1} = target.
SpectralField smooth_datum(const TorusGrid& grid, std::uint64_t seed, double target, int kmax = 8) {
  SplitMix64 rng(seed);
  SpectralField f(grid);
  for (std::int64_t k = -kmax; k <= kmax; ++k)
    f.at(k) = cplx(rng.normal(), rng.normal()) * std::exp(-0.5 * std::abs(static_cast<double>(k)));
  f *= target / sobolev_norm(f, 1.0);
  return f;
}

double sup_distance(const SpectralField& a, const SpectralField& b, double s) { return sobolev_norm(a - b, s); }

SimulationConfig make_config(NonlinearityKind kind, int mu, double eps, std::size_t n, double dt, double T) {
  SimulationConfig c;
  c.params = DispersionParams::real(eps);
  c.nonlinearity = {kind, mu};
  c.grid = TorusGrid(n);
  c.dt = dt;
  c.horizon = T;
  c.dealias_ratio = default_dealias(kind);
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  auto c = make_config(NonlinearityKind::N1, -1, 1.0, 64, 1e-2, 1.0);
  CHECK_NOTHROW(validate(c));
  c.dealias_ratio = {1, 2};
  CHECK_THROWS_AS(validate(c), DomainError);
  c = make_config(NonlinearityKind::N3, 1, 1.0, 64, 1e-2, 1.0);
  CHECK_NOTHROW(validate(c));
  c.dt = 2.0;
  CHECK_THROWS_AS(validate(c), DomainError);
  c = make_config(NonlinearityKind::N1, -1, 1.0, 64, 1e-2, 1.0);
  c.params = DispersionParams::from_epsilon(cplx(0.0, 1.0 / 3.0));
  CHECK_THROWS_AS(validate(c), SingularOperatorError);
}

TEST_CASE("dealias cutoffs") {
  CHECK(dealias_cutoff(TorusGrid(256), {2, 3}) == 85);
  CHECK(dealias_cutoff(TorusGrid(256), {1, 2}) == 64);
  CHECK(dealias_cutoff(TorusGrid(4), {2, 3}) == 1);
}

TEST_CASE("nonlinearity examples") {
  TorusGrid g(32);
  const auto p = DispersionParams::real(1.3);
  CHECK(eval_nonlinearity(SpectralField(g), {NonlinearityKind::N1, -1}, p).sup_modulus() == 0.0);

  const cplx c(0.3, -0.7);
  const auto constant = SpectralField::single_mode(g, 0, kTwoPi * c);
  const auto n2 = eval_nonlinearity(constant, {NonlinearityKind::N2, 1}, p);
  CHECK(std::abs(n2.at(0) - kTwoPi * std::norm(c) * c) < 1e-14);

  const cplx a(0.4, 0.2);
  const auto wave = SpectralField::single_mode(g, 3, kTwoPi * a);
  const auto n1 = eval_nonlinearity(wave, {NonlinearityKind::N1, -1}, p);
  CHECK(std::abs(n1.at(3) + kTwoPi * std::norm(a) * a) < 1e-14);
  n1.sup_modulus();
  double rest = 0.0;
  for (auto k : g.frequencies())
    if (k != 3) rest = std::max(rest, std::abs(n1.at(k)));
  CHECK(rest < 1e-15);

  const auto n3 = eval_nonlinearity(wave, {NonlinearityKind::N3, 1}, p);
  CHECK(std::abs(n3.at(3) - kTwoPi * std::norm(a) * std::norm(a) * a) < 1e-14);
  CHECK_THROWS_AS(eval_nonlinearity(wave, {NonlinearityKind::N1, -1}, DispersionParams::from_epsilon(cplx(0, 0.5))),
                  SingularOperatorError);
}

TEST_CASE("nonlinearity leaves the Nyquist mode and aliased band empty") {
  TorusGrid g(32);
  const auto u = smooth_datum(g, 3, 2.0, 10);
  const auto n = eval_nonlinearity(u, {NonlinearityKind::N2, 1}, DispersionParams::real(1.0));
  const auto cut = dealias_cutoff(g, {2, 3});
  for (auto k : g.frequencies())
    if (std::abs(k) > cut) CHECK(n.at(k) == cplx(0.0));
}

TEST_CASE("linear step equals the semigroup") {
  auto c = make_config(NonlinearityKind::N1, 0, 0.8, 64, 0.05, 1.0);
  const auto u = dealias(smooth_datum(c.grid, 4, 1.0), dealias_cutoff(c.grid, c.dealias_ratio));
  const auto stepped = step_integrating_factor(u, 0.05, c);
  CHECK(sup_distance(stepped, apply_semigroup(u, 0.05, c.params), 0.0) <= 1e-12 * sobolev_norm(u, 0.0));
}

TEST_CASE("pure frequency data follow the closed form") {
  for (double eps : {0.5, 1.0}) {
    for (std::int64_t n : {0, 1, 3, 8}) {
      auto c = make_config(NonlinearityKind::N1, -1, eps, 64, 1e-3, 1.0);
      c.record_every = 50;
      const double k = 0.8, s = 0.5;
      const auto traj = integrate(exact_pure_frequency(c.grid, n, k, s, c.params, 0.0), c);
      double err = 0.0;
      for (std::size_t i = 0; i < traj.times.size(); ++i)
        err = std::max(err, sup_distance(traj.states[i], exact_pure_frequency(c.grid, n, k, s, c.params, traj.times[i]), s));
      CHECK(err <= 1e-8);
    }
  }
  // Dissipative: modulus decays as e^{beta n^4 t}.
  auto c = make_config(NonlinearityKind::N1, -1, 1.0, 32, 1e-3, 1.0);
  c.params = DispersionParams::from_epsilon_squared(cplx(1.0, -0.01));
  const auto traj = integrate(exact_pure_frequency(c.grid, 3, 1.0, 0.0, c.params, 0.0), c);
  const auto exact = exact_pure_frequency(c.grid, 3, 1.0, 0.0, c.params, 1.0);
  CHECK(sup_distance(traj.states.back(), exact, 0.0) <= 1e-8);
  CHECK(std::abs(std::abs(exact.at(3)) - kTwoPi * std::exp(-0.01 * 81.0)) < 1e-12);
}

TEST_CASE("exact pure frequency basics") {
  TorusGrid g(32);
  const auto p = DispersionParams::real(1.0);
  const auto u0 = exact_pure_frequency(g, 4, 0.7, 1.0, p, 0.0);
  CHECK(std::abs(u0.at(4) - kTwoPi * 0.7 / japanese(4.0)) < 1e-14);
  const auto ut = exact_pure_frequency(g, 4, 0.7, 1.0, p, 2.5);
  CHECK(std::abs(std::abs(ut.at(4)) - std::abs(u0.at(4))) < 1e-14);
  const auto blow = DispersionParams::from_epsilon_squared(cplx(1.0, 0.05));
  const auto ub = exact_pure_frequency(g, 2, 0.7, 0.0, blow, 0.5);
  CHECK(std::abs(std::abs(ub.at(2)) - kTwoPi * 0.7 * std::exp(0.05 * 0.5 * 16)) < 1e-12);
  CHECK_THROWS_AS(exact_pure_frequency(g, 2, 0.7, 0.0, blow, -0.5), RegimeError);
}

TEST_CASE("fourth-order convergence under step halving") {
  // Every retained mode has |w| dt < 1, so the asymptotic regime is reached.
  auto c = make_config(NonlinearityKind::N1, -1, 0.25, 16, 0.0125, 1.0);
  const auto u0 = smooth_datum(c.grid, 5, 1.5, 3);
  c.dt = 0.1 / 256;
  const auto ref = evolve(u0, c, 1.0);
  double errs[2];
  for (int i = 0; i < 2; ++i) {
    c.dt = 0.0125 / (1 << i);
    errs[i] = sup_distance(evolve(u0, c, 1.0), ref, 0.0);
  }
  const double ratio = errs[0] / errs[1];
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("gauge invariance and time reversal") {
  auto c = make_config(NonlinearityKind::N2, 1, 1.0, 64, 1e-3, 0.5);
  const auto u0 = dealias(smooth_datum(c.grid, 6, 1.0), dealias_cutoff(c.grid, c.dealias_ratio));
  const cplx phase = std::polar(1.0, 0.9);
  const auto a = evolve(phase * u0, c, 0.5);
  const auto b = phase * evolve(u0, c, 0.5);
  CHECK(sup_distance(a, b, 0.0) <= 1e-13 * sobolev_norm(u0, 0.0));

  const auto forward = evolve(u0, c, 0.5);
  const auto back = evolve(forward, c, -0.5);
  CHECK(sup_distance(back, u0, 0.0) <= 1e-7);
  c.params = DispersionParams::from_epsilon_squared(cplx(1.0, -0.1));
  CHECK_THROWS_AS(evolve(u0, c, -0.5), RegimeError);
}

TEST_CASE("mass and energy") {
  TorusGrid g(32);
  CHECK(mass(SpectralField(g)) == 0.0);
  CHECK(std::abs(mass(SpectralField::single_mode(g, 2, kTwoPi)) - kTwoPi) < 1e-13);
  const auto p = DispersionParams::real(1.0);
  CHECK(energy(SpectralField(g), p) == 0.0);
  const cplx c(0.6, 0.3);
  const double expected = -0.25 * kTwoPi * std::pow(std::norm(c), 2);
  CHECK(std::abs(energy(SpectralField::single_mode(g, 0, kTwoPi * c), p) - expected) < 1e-14);
  CHECK_THROWS_AS(energy(SpectralField(g), DispersionParams::from_epsilon_squared(cplx(1.0, 0.1))), DomainError);
}

TEST_CASE("conservation over T=1") {
  for (auto kind : {NonlinearityKind::N1, NonlinearityKind::N2, NonlinearityKind::N3}) {
    auto c = make_config(kind, -1, 1.0, 256, 1e-3, 1.0);
    c.record_every = 100;
    SplitMix64 rng(7);
    SpectralField u0(c.grid);
    for (std::int64_t k = -8; k <= 8; ++k)
      u0.at(k) = cplx(rng.normal(), rng.normal()) * std::exp(-std::abs(static_cast<double>(k)));
    u0 *= 1.0 / sobolev_norm(u0, 1.0);
    const auto traj = integrate(u0, c);
    REQUIRE(!traj.divergence);
    const double m0 = traj.mass.front(), e0 = traj.energy.front();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      CHECK(std::abs(traj.mass[i] - m0) <= 1e-8 * m0);
      if (kind == NonlinearityKind::N1) CHECK(std::abs(traj.energy[i] - e0) <= 1e-6 * std::abs(e0));
    }
  }
}

TEST_CASE("blow-up regime reports divergence instead of crashing") {
  auto c = make_config(NonlinearityKind::N1, -1, 1.0, 64, 1e-2, 5.0);
  c.params = DispersionParams::from_epsilon_squared(cplx(1.0, 0.5));
  const auto traj = integrate(smooth_datum(c.grid, 8, 0.1, 20), c);
  REQUIRE(traj.divergence.has_value());
  CHECK(traj.divergence->sup_modulus > 1e12);
  CHECK(traj.divergence->time < 5.0);
}

TEST_CASE("Picard iteration") {
  auto c = make_config(NonlinearityKind::N1, -1, 1.0, 64, 1e-3, 0.1);
  const auto zero = picard_iterate(SpectralField(c.grid), c, 1e-12, 10);
  REQUIRE(zero.picard.has_value());
  CHECK(zero.picard->iterations == 1);
  CHECK(zero.states.back().sup_modulus() == 0.0);

  auto u0 = smooth_datum(c.grid, 9, 1.0);
  u0 *= 1e-3 / sobolev_norm(u0, 0.0);
  const auto pic = picard_iterate(u0, c, 1e-14, 50);
  CHECK(pic.picard->contraction_ratio < 1.0);
  CHECK(sup_distance(pic.states.back(), evolve(u0, c, 0.1), 0.0) <= 1e-7);

  const auto wave = exact_pure_frequency(c.grid, 2, 1.0, 0.0, c.params, 0.0);
  const auto pw = picard_iterate(wave, c, 1e-13, 80);
  CHECK(sup_distance(pw.states.back(), exact_pure_frequency(c.grid, 2, 1.0, 0.0, c.params, 0.1), 0.0) <= 1e-8);
}

TEST_CASE("Picard and integrating factor agree at moderate amplitude") {
  auto c = make_config(NonlinearityKind::N2, 1, 0.7, 64, 1e-3, 1.0);
  const auto u0 = smooth_datum(c.grid, 10, 1.0);
  const double T = choose_picard_horizon(u0, c, 0.0);
  CHECK(T > 0.0);
  CHECK(T <= 0.1);
  c.horizon = T;
  c.dt = T / 100;
  const auto pic = picard_iterate(u0, c, 1e-13, 100);
  CHECK(pic.picard->contraction_ratio < 0.9);
  CHECK(sup_distance(pic.states.back(), evolve(u0, c, T), 0.0) <= 1e-6);
}

TEST_CASE("Picard reports non-contraction") {
  auto c = make_config(NonlinearityKind::N3, 1, 1.0, 32, 1e-2, 1.0);
  const auto u0 = smooth_datum(c.grid, 11, 30.0, 4);
  CHECK_THROWS_AS(picard_iterate(u0, c, 1e-12, 30), NonContractiveError);
}
