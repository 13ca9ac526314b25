#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fnls/errors.hpp"
#include "fnls/restriction_norms.hpp"

using namespace fnls;

namespace {

// Spectral mass of the k row within |l - l0| <= width, as a fraction of the total.
double concentration(const SpaceTimeField& f, std::int64_t k, std::int64_t l0, std::int64_t width) {
  double inside = 0.0, total = 0.0;
  const auto M = static_cast<std::int64_t>(f.num_time_samples());
  for (auto kk : f.grid().frequencies())
    for (std::int64_t l = -M / 2; l < M / 2; ++l) {
      const double e = std::norm(f.at(kk, l));
      total += e;
      if (kk == k && std::abs(l - l0) <= width) inside += e;
    }
  return inside / total;
}

double trapezoid_l2(const SpaceTimeField& f) {
  const auto u = physical_values(f, 2);
  double acc = 0.0;
  for (const auto& v : u) acc += std::norm(v);
  const double cell = (kTwoPi / (2.0 * f.grid().num_points())) * (f.time_window() / (2.0 * f.num_time_samples()));
  return std::sqrt(acc * cell);
}

SpaceTimeField random_field(std::uint64_t seed, const DispersionParams& p, int max_mode = 4) {
  SplitMix64 rng(seed);
  RandomFieldSpec spec;
  spec.max_mode = max_mode;
  spec.detuning = 40.0;
  return random_dispersive_field(spec, p, rng);
}

}  // namespace

TEST_CASE("window shape") {
  TimeWindow w;
  CHECK(w.weight(0.0) == 0.0);
  CHECK(w.weight(0.5) == 1.0);
  CHECK(w.weight(1.0 / 1024) < 1e-14);
  CHECK(TimeWindow{WindowKind::None, 0}.weight(0.0) == 1.0);
}

TEST_CASE("plane wave concentrates at (n, -lambda)") {
  TorusGrid g(16);
  const double Tw = 2.0;
  const std::size_t M = 256;
  const std::int64_t l0 = -37;
  const double lambda = -kTwoPi * l0 / Tw;
  const auto f = sample_spacetime(g, 0.0, Tw, M, TimeWindow{}, [&](double x, double t) {
    return std::exp(cplx(0.0, 3.0 * x - lambda * t));
  });
  CHECK(concentration(f, 3, l0, 12) > 1.0 - 1e-10);
  CHECK(concentration(f, 3, l0, 4) > 0.999);

  const auto zero = sample_spacetime(g, 0.0, Tw, M, TimeWindow{}, [](double, double) { return cplx(0.0); });
  CHECK(l2_norm(zero) == 0.0);
}

TEST_CASE("linear flow sits on the characteristic") {
  const auto p = DispersionParams::real(0.5);
  TorusGrid g(16);
  SpectralField u0(g);
  for (std::int64_t k = -4; k <= 4; ++k) u0.at(k) = std::exp(-0.3 * k * k);
  const double Tw = 1.0;
  const std::size_t M = required_time_samples(g, p, Tw, 200.0);
  std::vector<SpectralField> slices;
  std::vector<double> times;
  for (std::size_t m = 0; m < M; ++m) {
    times.push_back(Tw * m / M);
    slices.push_back(apply_semigroup(u0, times.back(), p));
  }
  const auto f = spacetime_transform(slices, times, TimeWindow{});
  for (std::int64_t k = -4; k <= 4; ++k) {
    double near = 0.0, row = 0.0;
    const double wk = real_dispersion(k, p);
    for (std::int64_t l = -static_cast<std::int64_t>(M / 2); l < static_cast<std::int64_t>(M / 2); ++l) {
      const double e = std::norm(f.at(k, l));
      row += e;
      if (std::abs(kTwoPi * l / Tw + wk) <= 12 * kTwoPi / Tw) near += e;
    }
    CHECK(near >= row * (1.0 - 1e-10));
  }
}

TEST_CASE("space-time Plancherel and inversion") {
  const auto p = DispersionParams::real(1.0);
  const auto f = random_field(21, p);
  CHECK(std::abs(l2_norm(f) - trapezoid_l2(f)) <= 1e-10 * l2_norm(f));
  CHECK(std::abs(xsb_norm(f, 0.0, 0.0, p) - l2_norm(f)) <= 1e-14 * l2_norm(f));

  // Interior inversion.
  TorusGrid g(16);
  const double Tw = 1.5;
  const std::size_t M = 64;
  auto u = [](double x, double t) { return cplx(std::cos(2 * x), std::sin(x - 3 * t)) * (1.0 + 0.5 * std::cos(t)); };
  std::vector<SpectralField> slices;
  std::vector<double> times;
  for (std::size_t m = 0; m < M; ++m) {
    times.push_back(0.25 + Tw * m / M);
    std::vector<cplx> row(16);
    for (std::size_t j = 0; j < 16; ++j) row[j] = u(g.point(j), times.back());
    slices.push_back(forward_transform(g, row));
  }
  const TimeWindow w{};
  const auto back = inverse_spacetime(spacetime_transform(slices, times, w));
  for (std::size_t m = 0; m < M; ++m) {
    const double weight = w.weight(static_cast<double>(m) / M);
    if (weight < 1e-3) continue;
    for (std::size_t i = 0; i < 16; ++i)
      CHECK(std::abs(back[m].coeffs()[i] / weight - slices[m].coeffs()[i]) <= 1e-10 * (1 + std::abs(slices[m].coeffs()[i])));
  }
  times[5] += 1e-4;
  CHECK_THROWS_AS(spacetime_transform(slices, times, w), DomainError);
}

TEST_CASE("xsb weights") {
  const auto p = DispersionParams::monomial(2);
  TorusGrid g(16);
  SpaceTimeField f(g, kTwoPi, 64, TimeWindow{WindowKind::None, 0});
  f.at(3, -9) = 1.0;  // tau = -9 = -w(3)
  for (double s : {0.0, 1.0, -0.5})
    for (double b : {0.3, 0.7})
      CHECK(std::abs(xsb_norm(f, s, b, p) - std::pow(japanese(3), s) * l2_norm(f)) < 1e-14);
  CHECK_THROWS_AS(xsb_norm(f, 0, 0.5, DispersionParams::from_epsilon_squared(cplx(1, 0.1))), DomainError);
}

TEST_CASE("dyadic shells") {
  const auto p = DispersionParams::monomial(2);
  TorusGrid g(16);
  SpaceTimeField f(g, kTwoPi, 512, TimeWindow{WindowKind::None, 0});
  f.at(3, -9) = 1.0;
  CHECK(l2_norm(dyadic_project(f, 0, p).field) == doctest::Approx(l2_norm(f)));
  CHECK(shell_index(japanese(100.0)) == 6);
  SpaceTimeField h(g, kTwoPi, 512, TimeWindow{WindowKind::None, 0});
  h.at(3, -9 + 100) = 1.0;
  CHECK(l2_norm(dyadic_project(h, 6, p).field) == doctest::Approx(l2_norm(h)));
  CHECK(l2_norm(dyadic_project(h, 5, p).field) == 0.0);

  const auto q = DispersionParams::real(1.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = random_field(seed, q);
    const int top = max_shell(r, q);
    double total = 0.0;
    std::vector<double> pieces;
    for (int m = 0; m <= top; ++m) {
      const double e = l2_norm(dyadic_project(r, m, q).field);
      pieces.push_back(e * e);
      total += e * e;
    }
    CHECK(std::abs(total - l2_norm(r) * l2_norm(r)) <= 1e-10 * total);
    for (double b : {5.0 / 16, 5.0 / 12, 0.5}) {
      double sum = 0.0;
      for (int m = 0; m <= top; ++m) sum += std::pow(2.0, 2 * b * m) * pieces[m];
      const double x = std::pow(xsb_norm(r, 0, b, q), 2);
      CHECK(sum >= x * std::pow(2.0, -2 * b) * (1 - 1e-12));
      CHECK(sum <= x * std::pow(2.0, 2 * b) * (1 + 1e-12));
    }
  }
}

TEST_CASE("Lebesgue norms") {
  TorusGrid g(8);
  SpaceTimeField one(g, 1.0, 8, TimeWindow{WindowKind::None, 0});
  one.at(0, 0) = kTwoPi;  // u == 1 on T x [0, 1)
  for (double p : {2.0, 4.0, 6.0, 8.0}) CHECK(std::abs(lebesgue_norm(one, p) - std::pow(kTwoPi, 1 / p)) < 1e-13);
  SpaceTimeField zero(g, 1.0, 8, TimeWindow{});
  CHECK(lebesgue_norm(zero, 4) == 0.0);

  const auto q = DispersionParams::real(1.0);
  const auto f = random_field(5, q);
  CHECK(std::abs(lebesgue_norm(f, 2) - l2_norm(f)) <= 1e-8 * l2_norm(f));

  // Holder consistency |f|_{L4}^2 = |f^2|_{L2}.
  auto sq = physical_values(f, 2);
  for (auto& v : sq) v *= v;
  const auto f2 = from_physical(TorusGrid(2 * f.grid().num_points()), f.time_window(), 2 * f.num_time_samples(),
                                f.window(), std::move(sq));
  CHECK(std::abs(std::pow(lebesgue_norm(f, 4), 2) - l2_norm(f2)) <= 1e-8 * l2_norm(f2));
}

TEST_CASE("modulation leaves Lebesgue norms fixed and moves only the X weight") {
  const auto q = DispersionParams::real(1.0);
  const auto f = random_field(6, q, 3);
  const auto M = static_cast<std::int64_t>(f.num_time_samples());
  const std::int64_t n0 = 2, l0 = 5;
  SpaceTimeField g(f.grid(), f.time_window(), f.num_time_samples(), f.window());
  for (std::int64_t k = -3; k <= 3; ++k)
    for (std::int64_t l = -M / 2; l < M / 2; ++l) {
      const std::int64_t lt = ((l + l0 + M / 2) % M + M) % M - M / 2;
      g.at(k + n0, lt) = f.at(k, l);
    }
  for (double p : {4.0, 6.0}) CHECK(std::abs(lebesgue_norm(g, p) - lebesgue_norm(f, p)) <= 1e-10 * lebesgue_norm(f, p));
  // Direct recomputation of the shifted weight.
  const double b = 5.0 / 16;
  double acc = 0.0;
  for (std::int64_t k = -3; k <= 3; ++k)
    for (std::int64_t l = -M / 2; l < M / 2; ++l) {
      const std::int64_t lt = ((l + l0 + M / 2) % M + M) % M - M / 2;
      const double x = kTwoPi * lt / f.time_window() + real_dispersion(k + n0, q);
      acc += std::pow(1 + x * x, b) * std::norm(f.at(k, l));
    }
  CHECK(std::abs(xsb_norm(g, 0, b, q) - std::sqrt(acc / (kTwoPi * f.time_window()))) <= 1e-12 * xsb_norm(g, 0, b, q));
}

TEST_CASE("embedding ratio on a characteristic plane wave") {
  const auto p = DispersionParams::monomial(2);
  TorusGrid g(16);
  SpaceTimeField f(g, kTwoPi, 64, TimeWindow{WindowKind::None, 0});
  f.at(3, -9) = 1.0;
  CHECK(std::abs(embedding_ratio(f, 4, 5.0 / 16, p) - lebesgue_norm(f, 4) / l2_norm(f)) < 1e-13);
  SpaceTimeField zero(g, kTwoPi, 64, TimeWindow{});
  CHECK_THROWS_AS(embedding_ratio(zero, 4, 0.3, p), DomainError);
}

TEST_CASE("sharpness family exponents") {
  const int Ns[] = {4, 8, 16, 32, 64};
  const double bs[] = {0.0, 5.0 / 16, 0.5};
  for (int delta : {2, 3, 4}) {
    const auto r = sharpness_slopes(delta, Ns, bs);
    CHECK(std::abs(r.l4_fit.slope / (0.75 * (1 + delta)) - 1) <= 0.03);
    CHECK(std::abs(r.l6_fit.slope / (5.0 / 6.0 * (1 + delta)) - 1) <= 0.03);
    CHECK(r.l4_fit.r2 >= 0.99);
    for (std::size_t j = 0; j < 3; ++j) {
      const double expected = (1 + (2 * bs[j] + 1) * delta) / 2;
      CHECK(std::abs(r.xsb_fits[j].slope / expected - 1) <= 0.03);
      CHECK(r.xsb_fits[j].r2 >= 0.99);
    }
  }
  CHECK_THROWS_AS(sharpness_family(64, 2, 128, 32), DimensionError);
}

TEST_CASE("necessity threshold") {
  CHECK(necessity_threshold(2, 4) == doctest::Approx(5.0 / 16));
  CHECK(necessity_threshold(3, 4) == doctest::Approx(5.0 / 12));
  CHECK(necessity_threshold(2, 2) == doctest::Approx(3.0 / 8));
  CHECK(necessity_check(2, 2, 0.3).diverges);
  CHECK_FALSE(necessity_check(2, 2, 0.4).diverges);
}

TEST_CASE("trilinear probe") {
  const auto p = DispersionParams::real(1.0);
  TorusGrid g(16);
  auto single = [&](std::int64_t k) {
    SpaceTimeField f(g, 1.0, 4096, TimeWindow{});
    const double w = real_dispersion(k, p);
    return sample_spacetime(g, 0.0, 1.0, 4096, TimeWindow{}, [&](double x, double t) {
      return std::exp(cplx(0.0, k * x - w * t));
    });
  };
  const double r = trilinear_inequality_probe(single(1), single(2), single(-1), 0.0, p);
  CHECK(std::isfinite(r));
  CHECK(r > 0.0);

  RandomFieldSpec spec;
  spec.max_mode = 3;
  spec.grid_points = 16;
  double worst = 0.0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    double vals[2];
    for (std::size_t refine : {1u, 2u}) {
      SplitMix64 rng = SplitMix64::stream(77, t);
      const auto f = random_dispersive_field(spec, p, rng, refine);
      const auto gg = random_dispersive_field(spec, p, rng, refine);
      const auto h = random_dispersive_field(spec, p, rng, refine);
      vals[refine - 1] = trilinear_inequality_probe(f, gg, h, 0.0, p);
    }
    CHECK(std::abs(vals[1] - vals[0]) <= 1e-6 * vals[0]);
    worst = std::max(worst, vals[0]);
  }
  CHECK(std::isfinite(worst));
  MESSAGE("empirical trilinear constant " << worst);
}

TEST_CASE("embedding sweep is the max over seeded streams") {
  const auto p = DispersionParams::real(0.5);
  RandomFieldSpec spec;
  spec.max_mode = 3;
  const auto one = embedding_sweep(p, 12, 42, spec, 1);
  const auto many = embedding_sweep(p, 12, 42, spec, 4);
  CHECK(one.max_l4 == many.max_l4);
  CHECK(one.max_l6 == many.max_l6);
  double l4 = 0.0, l6 = 0.0;
  for (std::size_t i = 0; i < 12; ++i) {
    SplitMix64 rng = SplitMix64::stream(42, i);
    const auto f = random_dispersive_field(spec, p, rng);
    l4 = std::max(l4, lebesgue_norm(f, 4.0) / xsb_norm(f, 0.0, 5.0 / 16, p));
    l6 = std::max(l6, lebesgue_norm(f, 6.0) / xsb_norm(f, 0.0, 5.0 / 12, p));
  }
  CHECK(one.max_l4 == doctest::Approx(l4).epsilon(1e-12));
  CHECK(one.max_l6 == doctest::Approx(l6).epsilon(1e-12));
  CHECK(one.trials == 12);
}
