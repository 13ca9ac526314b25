#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/tools/minima.hpp>

#include "doctest.h"
#include "fnls/counting_lab.hpp"
#include "fnls/errors.hpp"
#include "fnls/rng.hpp"

using namespace fnls;

namespace {

double wq(double x, double e2) { return e2 * x * x * x * x + x * x; }

// Max of the scan count over every breakpoint tau = -(L +- Theta).
std::int64_t brute_bilinear_sup(const CountQuery& q, std::int64_t k) {
  const double theta = q.theta();
  std::int64_t best = 0;
  for (std::int64_t x = -q.box.k1_bound; x <= q.box.k1_bound; ++x) {
    const double L = bilinear_level(static_cast<double>(x), k, q.params);
    for (const double tau : {-(L + theta), -(L - theta)}) best = std::max(best, scan_bilinear(q, tau, k));
  }
  return best;
}

CountQuery query(const DispersionParams& p, int S, std::int64_t box) {
  CountQuery q;
  q.m = S;
  q.params = p;
  q.box.k1_bound = box;
  return q;
}

}  // namespace

TEST_CASE("bilinear count is empty below the level minimum") {
  // L_min at k = 10, eps = 1 is 100 * 104 / 8 = 1300.
  CHECK(count_bilinear(query(DispersionParams::real(1.0), 0, 1000), 0.0, 10) == 0);
}

TEST_CASE("bilinear count at k = 0 matches a full scan") {
  const auto q = query(DispersionParams::real(1.0), 0, 200);
  const double tau = -bilinear_level(0.0, 0, q.params);
  CHECK(count_bilinear(q, tau, 0) == scan_bilinear(q, tau, 0));
  CHECK(count_bilinear(q, tau, 0) == 3);
}

TEST_CASE("bilinear oracle equivalence on random queries") {
  SplitMix64 rng(20240611);
  const std::vector<DispersionParams> ps{DispersionParams::real(1.0),    DispersionParams::real(0.5),
                                         DispersionParams::real(0.25),   DispersionParams::real(0.3),
                                         DispersionParams::monomial(2),  DispersionParams::monomial(3),
                                         DispersionParams::monomial(4)};
  int conclusive = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& p = ps[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(ps.size()) - 1))];
    auto q = query(p, static_cast<int>(rng.integer(0, 6)), 300);
    q.n = static_cast<int>(rng.integer(0, 4));
    std::int64_t k = rng.integer(-40, 40);
    if (p.monomial_mode() && p.delta() % 2 == 1 && k == 0) k = 1;
    const double base = bilinear_level(std::floor(k / 2.0), k, p);
    const double tau = -base - rng.uniform(-2.0, 6.0) * q.theta();
    const auto fast = count_bilinear(q, tau, k);
    CHECK(fast == scan_bilinear(q, tau, k));
    ++conclusive;
  }
  CHECK(conclusive == 100);
}

TEST_CASE("completed square rewrite matches direct evaluation") {
  SplitMix64 rng(77);
  for (int i = 0; i < 10000; ++i) {
    const double eps = rng.uniform(0.05, 3.0);
    const auto p = DispersionParams::real(eps);
    const std::int64_t k = rng.integer(-60, 60);
    const double y = rng.uniform(-80.0, 80.0);
    const double direct = wq(y + k / 2.0, eps * eps) + wq(k / 2.0 - y, eps * eps);
    const double cs = completed_square_level(y, k, p);
    CHECK(std::abs(cs - direct) <= 1e-9 * std::abs(direct));
  }
}

TEST_CASE("sup over tau is exact and sits at the completed-square minimum") {
  for (const double eps : {1.0, 0.5, 0.25}) {
    const auto p = DispersionParams::real(eps);
    for (const std::int64_t k : {0, 1, 2, 7, -3, 12}) {
      for (const int S : {0, 3, 6}) {
        const auto q = query(p, S, 120);
        const auto sup = bilinear_sup(q, k);
        CHECK(sup.count == brute_bilinear_sup(q, k));
        // The completed square puts the minimum at y = 0 (even k) or y = 1/2 (odd k).
        const double y0 = (k % 2 == 0) ? 0.0 : 0.5;
        const double tau = -(completed_square_level(y0, k, p) + q.theta());
        CHECK(count_bilinear(q, tau, k) >= sup.count - 1);
        if (k % 2 != 0) CHECK(count_bilinear(q, tau, k) == sup.count);
      }
    }
  }
}

TEST_CASE("bilinear symmetry and monotonicity") {
  SplitMix64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = DispersionParams::real(rng.uniform(0.1, 2.0));
    const std::int64_t k = rng.integer(-50, 50);
    auto q = query(p, static_cast<int>(rng.integer(0, 8)), 1 << 20);
    const double tau = -bilinear_level(std::floor(k / 2.0), k, p) - rng.uniform(-1.0, 4.0) * q.theta();
    const auto c = count_bilinear(q, tau, k);
    CHECK(c == count_bilinear(q, tau, -k));
    auto wider = q;
    wider.n += 1;
    CHECK(count_bilinear(wider, tau, k) >= c);
  }
  auto q = query(DispersionParams::real(0.5), 4, 0);
  std::int64_t prev = 0;
  for (std::int64_t b = 0; b <= 40; b += 4) {
    q.box.k1_bound = b;
    const auto c = scan_bilinear(q, -40.0, 3);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("small search box is inconclusive with the required bound") {
  const auto q = query(DispersionParams::real(0.25), 8, 3);
  const double tau = -bilinear_level(0.0, 0, q.params) - q.theta();
  try {
    count_bilinear(q, tau, 0);
    FAIL("expected InconclusiveError");
  } catch (const InconclusiveError& e) {
    auto big = q;
    big.box.k1_bound = e.required_bound();
    CHECK(e.required_bound() > 3);
    CHECK(count_bilinear(big, tau, 0) == scan_bilinear(big, tau, 0));
  }
  CHECK_THROWS_AS(count_bilinear(query(DispersionParams::monomial(3), 0, 10), 0.0, 0), InconclusiveError);
  CHECK_THROWS_AS(count_bilinear(query(DispersionParams::from_epsilon(cplx(1.0, 0.5)), 0, 10), 0.0, 0),
                  DomainError);
}

TEST_CASE("interval count of the quartic level set is at most two") {
  const auto p = DispersionParams::real(1.0);
  const auto q = query(p, 3, 1 << 20);
  for (std::int64_t k = -10; k <= 10; ++k)
    for (double tau = -5000.0; tau < 0.0; tau += 7.0) CHECK(bilinear_interval_count(q, tau, k) <= 2);
  // A window away from the minimum splits into two runs.
  CHECK(bilinear_interval_count(q, -(bilinear_level(10.0, 0, p)), 0) == 2);
}

TEST_CASE("bilinear bound: explicit small case, eps scaling, stability") {
  std::vector<std::int64_t> ks;
  for (std::int64_t k = -12; k <= 12; ++k) ks.push_back(k);
  for (const std::int64_t k : {16, 32, 64}) {
    ks.push_back(k);
    ks.push_back(-k);
  }
  const auto r1 = verify_bilinear_bound(DispersionParams::real(1.0), 0, 0, {0, 1});
  // k = 0: levels 0, 4, 40 -> window [0, 8] holds k1 in {-1, 0, 1}.
  CHECK(r1.sup_count_by_shell[0] == 3);
  CHECK(r1.ratio_by_shell[0] == doctest::Approx(3.0));

  double lo = 1e300, hi = 0.0;
  for (const double eps : {1.0, 0.25, 1.0 / 16}) {
    const auto r = verify_bilinear_bound(DispersionParams::real(eps), 6, 12, ks);
    lo = std::min(lo, r.constant_high);
    hi = std::max(hi, r.constant_high);
  }
  CHECK(hi / lo <= 3.0);
  for (const double eps : {1.0, 0.5, 0.25}) {
    const auto r = verify_bilinear_bound(DispersionParams::real(eps), 6, 12, ks);
    CHECK(r.pass);
    CHECK(r.growth_slope == doctest::Approx(0.25).epsilon(0.1));
  }
  const auto mono = verify_bilinear_bound(DispersionParams::monomial(2), 6, 12, ks);
  CHECK(mono.growth_slope == doctest::Approx(0.5).epsilon(0.05));
  CHECK(mono.pass);
}

TEST_CASE("minimizer of w(x) + w(k - x) is k/2") {
  const auto v0 = verify_minimizer(0, DispersionParams::real(1.0));
  CHECK(v0.pass);
  CHECK(std::abs(v0.golden_argmin) <= 1e-10);
  const auto v5 = verify_minimizer(5, DispersionParams::real(1.0));
  CHECK(v5.pass);
  CHECK(std::abs(v5.golden_argmin - 2.5) <= 1e-10);
  const auto m4 = verify_minimizer(3, DispersionParams::monomial(4));
  CHECK(m4.inequality_checked);
  CHECK(m4.inequality_holds);
  CHECK(m4.pass);
  for (const std::int64_t k : {-17, -4, 1, 8, 33, 250}) {
    for (const auto& p : {DispersionParams::real(0.3), DispersionParams::real(2.0), DispersionParams::monomial(2),
                          DispersionParams::monomial(6)}) {
      const auto v = verify_minimizer(k, p, 200);
      CHECK(v.pass);
      // Independent optimizer on f itself; its precision is limited by rounding in f.
      const auto f = [&](double x) { return bilinear_level(x, k, p); };
      const auto br = boost::math::tools::brent_find_minima(f, k / 2.0 - 7.0, k / 2.0 + 5.0, 40);
      CHECK(std::abs(br.first - v.golden_argmin) <= 1e-5 * std::max(1.0, std::abs(k / 2.0)));
    }
  }
  CHECK_THROWS_AS(verify_minimizer(3, DispersionParams::monomial(3)), DomainError);
}

TEST_CASE("radial polynomial matches direct substitution") {
  SplitMix64 rng(606);
  const auto p0 = DispersionParams::real(0.7);
  CHECK(radial_polynomial_v(0.0, 1.3, 6, p0) == doctest::Approx(36.0 * (0.49 * 36.0 + 9.0) / 27.0));
  for (int i = 0; i < 10000; ++i) {
    const double eps = rng.uniform(0.05, 3.0);
    const auto p = DispersionParams::real(eps);
    const std::int64_t k1 = rng.integer(-60, 60), k2 = rng.integer(-60, 60), k = rng.integer(-60, 60);
    const double x = k1 - k / 3.0, y = k2 - k / 3.0;
    const double r = std::hypot(x, y), t = std::atan2(y, x);
    const double e2 = eps * eps;
    const double direct = wq(static_cast<double>(k1), e2) + wq(static_cast<double>(k2), e2) +
                          wq(static_cast<double>(k - k1 - k2), e2);
    CHECK(std::abs(radial_polynomial_v(r, t, k, p) - direct) <= 1e-9 * std::abs(direct));
    CHECK(trilinear_level(k1, k2, k, p) == doctest::Approx(direct).epsilon(1e-14));
  }
  // v'(0) = 0: v(h) - v(-h) is odd in h and vanishes to third order.
  for (double t = 0.0; t < kTwoPi; t += 0.37) {
    const double h = 1e-4;
    const double d = (radial_polynomial_v(h, t, 7, p0) - radial_polynomial_v(-h, t, 7, p0)) / (2.0 * h);
    CHECK(std::abs(d) <= 1e-6);
  }
}

TEST_CASE("printed v'' agrees with differentiating v") {
  const auto p = DispersionParams::real(1.0);
  for (const double r : {0.5, 2.0, 9.0})
    CHECK(radial_polynomial_v2(r, 0.0, 0, p) == doctest::Approx(24.0 * r * r + 4.0));
  SplitMix64 rng(31);
  for (int i = 0; i < 500; ++i) {
    const auto q = DispersionParams::real(rng.uniform(0.1, 2.0));
    const double r = rng.uniform(0.5, 30.0), t = rng.uniform(0.0, kTwoPi);
    const std::int64_t k = rng.integer(-20, 20);
    const double h = 1e-3 * r;
    const double fd = (radial_polynomial_v(r + h, t, k, q) - 2.0 * radial_polynomial_v(r, t, k, q) +
                       radial_polynomial_v(r - h, t, k, q)) /
                      (h * h);
    const double exact = radial_polynomial_v2(r, t, k, q);
    CHECK(std::abs(fd - exact) <= 1e-4 * std::max(1.0, radial_polynomial_v(r, t, k, q) / (r * r)));
  }
}

TEST_CASE("v properties: convexity and the measured lower-bound constant") {
  const auto p = DispersionParams::real(1.0);
  const auto coarse = verify_v_properties(p, VGrid{256, 20, 50.0, 400});
  const auto fine = verify_v_properties(p, VGrid{512, 20, 50.0, 800});
  CHECK(coarse.pass);
  CHECK(coarse.min_second_derivative >= 0.0);
  CHECK(fine.lower_bound_constant == doctest::Approx(coarse.lower_bound_constant).epsilon(0.01));
  // Infimum over real k of (v - v(0)) / (eps^2 r^4), dropping the positive r^-2 term.
  double inf = 1e300;
  for (int i = 0; i < 200000; ++i) {
    const double t = kTwoPi * i / 200000.0;
    const double C = std::sin(2.0 * t) + 2.0;
    const double B = std::cos(t) - std::cos(3.0 * t) + std::sin(t) + std::sin(3.0 * t);
    inf = std::min(inf, (6.0 * C * C - 4.5 * B * B / C) / 12.0);
  }
  CHECK(coarse.lower_bound_constant >= inf - 1e-12);
  CHECK(coarse.lower_bound_constant <= 1.05 * inf);
}

TEST_CASE("trilinear count matches exhaustive scans") {
  const auto p = DispersionParams::real(1.0);
  // Theta = 4 * 2^2 = 16 at k = 0.
  TrilinearOptions opt;
  opt.threshold_constant = 4.0;
  for (double tau = -60.0; tau <= 10.0; tau += 5.0)
    CHECK(count_trilinear(tau, 0, 2, 0, 0, p, opt) == scan_trilinear(tau, 0, 16.0, p, 50));
  CHECK(count_trilinear(0.0, 30, 0, 0, 0, p) == 0);

  SplitMix64 rng(9090);
  for (int i = 0; i < 100; ++i) {
    const double eps = std::vector<double>{1.0, 0.5, 0.25}[static_cast<std::size_t>(rng.integer(0, 2))];
    const auto q = DispersionParams::real(eps);
    const std::int64_t k = rng.integer(-20, 20);
    const int m = static_cast<int>(rng.integer(0, 3)), n = static_cast<int>(rng.integer(0, 2)),
              l = static_cast<int>(rng.integer(0, 2));
    const double theta = 6.0 * std::exp2(m + n + l);
    const double tau = -radial_minimum(k, q) - rng.uniform(-2.0, 8.0) * theta;
    CHECK(count_trilinear(tau, k, m, n, l, q) == scan_trilinear(tau, k, theta, q, 60));
  }
  TrilinearOptions bad;
  bad.lower_bound_c = 0.0;
  CHECK_THROWS_AS(count_trilinear(-10.0, 0, 0, 0, 0, p, bad), InconclusiveError);
  bad.lower_bound_c = 50.0;  // far too optimistic: the boundary check rejects it
  CHECK_THROWS_AS(count_trilinear(-5000.0, 0, 6, 0, 0, p, bad), InconclusiveError);
}

TEST_CASE("trilinear sup equals the brute-force breakpoint maximum") {
  for (const double eps : {1.0, 0.5}) {
    const auto p = DispersionParams::real(eps);
    for (const std::int64_t k : {0, 1, 4, -5}) {
      const auto sup = trilinear_sup(k, 1, 0, 0, p);
      const double theta = 12.0;
      std::int64_t best = 0;
      for (std::int64_t a = -12; a <= 12; ++a)
        for (std::int64_t b = -12; b <= 12; ++b) {
          const double L = trilinear_level(a, b, k, p);
          if (L > radial_minimum(k, p) + 12.0 * theta) continue;
          best = std::max(best, scan_trilinear(-(L + theta), k, theta, p, 40));
        }
      CHECK(sup.count == best);
    }
  }
}

TEST_CASE("trilinear bound is stable across shells and eps") {
  const std::vector<std::int64_t> ks{0, 1, -1, 2, -2, 3, -3, 5, -5, 8, -8};
  double lo = 1e300, hi = 0.0;
  for (const double eps : {1.0, 0.5, 0.25}) {
    const auto r = verify_trilinear_bound(DispersionParams::real(eps), 6, 12, ks);
    CHECK(r.pass);
    CHECK(r.growth_slope == doctest::Approx(0.5).epsilon(0.1));
    lo = std::min(lo, r.constant_high);
    hi = std::max(hi, r.constant_high);
  }
  CHECK(hi / lo <= 3.0);
}

TEST_CASE("odd delta: expansion form, branches, exponents") {
  // Even-part expansion equals (y + k/2)^d - (y - k/2)^d.
  for (const int d : {3, 5, 7})
    for (double y = -6.5; y <= 6.5; y += 0.5)
      for (const std::int64_t k : {-9, -2, 1, 4, 11}) {
        const double h = k / 2.0;
        CHECK(odd_delta_level(y, k, d) == doctest::Approx(std::pow(y + h, d) - std::pow(y - h, d)));
      }
  const auto low = count_odd_delta(0.0, 0, 2, 2, 3);
  CHECK_FALSE(low.high_branch);
  CHECK(low.low_count_bound == doctest::Approx(std::exp2(4.0 / 3.0 + 2.0)));

  CountQuery q;
  q.m = 2;
  q.n = 2;
  q.params = DispersionParams::monomial(3);
  q.box.k1_bound = 400;
  for (double tau = -1200.0; tau <= -900.0; tau += 3.5) {
    const auto c = count_odd_delta(tau, 16, 2, 2, 3);
    CHECK(c.high_branch);
    CHECK(c.high_count == scan_bilinear(q, tau, 16));
  }
  for (double tau = 900.0; tau <= 1200.0; tau += 3.5)
    CHECK(count_odd_delta(tau, -16, 2, 2, 3).high_count == scan_bilinear(q, tau, -16));

  const auto e = odd_delta_exponents(3, 2, 12);
  CHECK(e.high_slope == doctest::Approx(0.5).epsilon(0.05));
  CHECK(e.m_exponent == doctest::Approx(2.0 / 3.0).epsilon(0.03));
  CHECK(e.n_exponent == doctest::Approx(1.0 / 6.0).epsilon(0.06));
  CHECK_THROWS_AS(count_odd_delta(0.0, 5, 0, 0, 4), DomainError);
}

TEST_CASE("resonance counts: exactness, table, enumeration orders") {
  const auto one = DispersionParams::real(1.0);
  CHECK(resonance_count(10, 0, 1, one) == 0);
  CHECK(resonance_count(10, 0, 0, one) == 1);

  std::map<std::int64_t, std::int64_t> oracle;
  for (std::int64_t a = -10; a <= 10; ++a)
    for (std::int64_t b = -10; b <= 10; ++b) {
      const std::int64_t c = -a - b;
      ++oracle[a * a * a * a + b * b * b * b + c * c * c * c + a * a + b * b + c * c];
    }
  const auto table = resonance_table(10, 0, one);
  CHECK(table == oracle);
  for (const auto& [j, c] : std::vector<std::pair<std::int64_t, std::int64_t>>(oracle.begin(), std::next(oracle.begin(), 12)))
    CHECK(resonance_count(10, 0, j, one) == c);
  std::int64_t mx = 0;
  for (const auto& [j, c] : oracle) mx = std::max(mx, c);
  CHECK(resonance_profile(10, 0, one).max_count == mx);

  const auto third = exact_epsilon_squared(DispersionParams::from_epsilon_squared(1.0 / 3.0));
  CHECK(third.num == 1);
  CHECK(third.den == 3);
  CHECK_THROWS_AS(exact_epsilon_squared(DispersionParams::real(std::sqrt(std::sqrt(2.0)))), ExactnessError);
  CHECK_THROWS_AS(resonance_count(5, 0, 3, DispersionParams::monomial(4)), ExactnessError);

  // Rational eps^2 = 1/3: 3 j = k^4 terms + 3 k^2 terms.
  const auto p13 = DispersionParams::from_epsilon_squared(1.0 / 3.0);
  std::map<std::int64_t, std::int64_t> o13;
  for (std::int64_t a = -8; a <= 8; ++a)
    for (std::int64_t b = -8; b <= 8; ++b) {
      const std::int64_t c = 2 - a - b;
      const std::int64_t v = a * a * a * a + b * b * b * b + c * c * c * c + 3 * (a * a + b * b + c * c);
      if (v % 3 == 0) ++o13[v / 3];
    }
  CHECK(resonance_table(8, 2, p13) == o13);

  // Wide path: eps^2 = 2^40 overflows 64-bit levels already at N = 20.
  const auto wide = resonance_profile(20, 3, DispersionParams::from_epsilon_squared(std::exp2(40.0)));
  CHECK(wide.wide_arithmetic);
  std::map<__int128, std::int64_t> o128;
  for (std::int64_t a = -20; a <= 20; ++a)
    for (std::int64_t b = -20; b <= 20; ++b) {
      const __int128 A = a, B = b, C = 3 - a - b;
      ++o128[(__int128{1} << 40) * (A * A * A * A + B * B * B * B + C * C * C * C) + A * A + B * B + C * C];
    }
  std::int64_t m128 = 0;
  for (const auto& [j, c] : o128) m128 = std::max(m128, c);
  CHECK(wide.max_count == m128);
}

TEST_CASE("max resonance count grows with N at n = 0") {
  const auto one = DispersionParams::real(1.0);
  std::int64_t prev = 0;
  for (const std::int64_t N : {10, 20, 40, 80, 160}) {
    const auto p = resonance_profile(N, 0, one);
    CHECK(p.max_count > prev);
    prev = p.max_count;
  }
  // Non-decreasing for every n: the level sets only gain points.
  for (const std::int64_t n : {1, 5}) {
    std::int64_t last = 0;
    for (const std::int64_t N : {10, 20, 40}) {
      const auto c = resonance_profile(N, n, one).max_count;
      CHECK(c >= last);
      last = c;
    }
  }
}
