#include "fnls/counting_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "fnls/errors.hpp"
#include "fnls/parallel.hpp"
#include "fnls/stats.hpp"

namespace fnls {

namespace {

using boost::multiprecision::cpp_int;

constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

// Matches dispersion_symbol for real eps^2 and monomial mode.
double w(double x, const DispersionParams& params) {
  if (params.monomial_mode()) return ipow(x, params.delta());
  const double x2 = x * x;
  return params.alpha() * (x2 * x2) + x2;
}

// (w(x) - w(y)) / (x - y)
double difference_quotient(double x, double y, const DispersionParams& params) {
  if (params.monomial_mode()) {
    const int d = params.delta();
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += ipow(x, i) * ipow(y, d - 1 - i);
    return s;
  }
  return params.alpha() * (x + y) * (x * x + y * y) + (x + y);
}

std::int64_t ceil_half(std::int64_t k) { return k >= 0 ? (k + 1) / 2 : k / 2; }

void require_counting_params(const DispersionParams& params, const char* where) {
  if (params.monomial_mode() || params.real_epsilon()) return;
  throw DomainError(std::string(where) + ": needs real eps or monomial mode");
}

// +1: level increases away from k/2, -1: decreases, 0: constant.
int level_direction(std::int64_t k, const DispersionParams& params) {
  if (params.monomial_mode() && params.delta() % 2 == 1) return k > 0 ? 1 : (k < 0 ? -1 : 0);
  return 1;
}

struct Run {
  std::int64_t first = 0;  // offset of the first solution
  std::int64_t count = 0;
};

// s(j) nondecreasing in j >= 0 and unbounded; returns the run of j with |s(j)| <= theta.
template <class S>
Run monotone_run(S&& s, double theta) {
  auto above = [&](std::int64_t j) { return s(j) > theta; };
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t step = 1;
  while (!above(hi)) {
    if (step > (std::int64_t{1} << 61)) throw InconclusiveError("level function does not leave the window", kUnbounded);
    lo = hi;
    hi += step;
    step *= 2;
  }
  // First above in (lo, hi] (or hi == 0).
  auto first_true = [](std::int64_t a, std::int64_t b, auto&& pred) {
    while (a < b) {
      const std::int64_t mid = a + (b - a) / 2;
      if (pred(mid)) b = mid;
      else a = mid + 1;
    }
    return a;
  };
  const std::int64_t end = hi == 0 ? 0 : first_true(lo, hi, above);
  const std::int64_t begin = first_true(0, end, [&](std::int64_t j) { return s(j) >= -theta; });
  return {begin, end - begin};
}

struct TwoSided {
  Run right;  // k1 = start + j
  Run left;   // k1 = start - 1 - j
  std::int64_t start = 0;
  std::int64_t total() const { return right.count + left.count; }
  std::int64_t max_abs() const {
    std::int64_t m = 0;
    if (right.count > 0) m = std::max(m, std::abs(start + right.first + right.count - 1));
    if (left.count > 0) m = std::max(m, std::abs(start - 1 - (left.first + left.count - 1)));
    return m;
  }
  int intervals() const {
    const int nonempty = (right.count > 0) + (left.count > 0);
    const bool joined = right.count > 0 && left.count > 0 && right.first == 0 && left.first == 0;
    return nonempty - (joined ? 1 : 0);
  }
};

// f(x) is the signed residual tau + level(x) in the direction dir; the level is symmetric
// about center/2 and monotone in |x - center/2|.
template <class F>
TwoSided two_sided_count(std::int64_t center2, int dir, double theta, F&& f) {
  TwoSided out;
  out.start = ceil_half(center2);
  const double d = static_cast<double>(dir);
  out.right = monotone_run([&](std::int64_t j) { return d * f(out.start + j); }, theta);
  out.left = monotone_run([&](std::int64_t j) { return d * f(out.start - 1 - j); }, theta);
  return out;
}

// Largest number of values in [u_i, u_i + 2 theta] over starts u_i <= start_limit.
std::pair<std::int64_t, double> best_window(std::vector<double> u, double theta, double start_limit) {
  std::sort(u.begin(), u.end());
  std::int64_t best = 0;
  double best_start = u.empty() ? 0.0 : u.front();
  std::size_t e = 0;
  for (std::size_t i = 0; i < u.size() && u[i] <= start_limit; ++i) {
    if (e < i) e = i;
    while (e < u.size() && u[e] <= u[i] + 2.0 * theta) ++e;
    const auto c = static_cast<std::int64_t>(e - i);
    if (c > best) {
      best = c;
      best_start = u[i];
    }
  }
  return {best, best_start};
}

// Collects dir * level(x) on both sides of center/2. An optimal window starts at one of the two
// innermost points of a side or within 2 theta of the extreme; *start_limit bounds those starts and
// every level up to *start_limit + 2 theta is collected.
template <class L>
std::vector<double> collect_levels(std::int64_t center2, int dir, double theta, L&& level, double* start_limit) {
  const std::int64_t start = ceil_half(center2);
  const double d = static_cast<double>(dir);
  const double u0 = std::min(d * level(start), d * level(start - 1));
  double limit = u0 + 2.0 * theta;
  for (const std::int64_t x : {start, start + 1, start - 1, start - 2}) limit = std::max(limit, d * level(x));
  const double cap = limit + 2.0 * theta;
  std::vector<double> u;
  for (std::int64_t j = 0;; ++j) {
    const double v = d * level(start + j);
    if (v > cap) break;
    u.push_back(v);
  }
  for (std::int64_t j = 0;; ++j) {
    const double v = d * level(start - 1 - j);
    if (v > cap) break;
    u.push_back(v);
  }
  *start_limit = limit;
  return u;
}

double norm_bilinear(const DispersionParams& params, int S) {
  if (params.monomial_mode()) return std::exp2(static_cast<double>(S) / params.delta());
  return std::exp2(S / 4.0) / std::sqrt(std::sqrt(params.alpha()));
}

double trilinear_norm(const DispersionParams& params, int S) {
  return std::exp2(S / 2.0) / std::sqrt(params.alpha());
}

double slope_upper_half(const std::vector<std::int64_t>& counts, int shell_high) {
  std::vector<double> xs, ys;
  for (int S = shell_high / 2; S <= shell_high; ++S) {
    if (counts[static_cast<std::size_t>(S)] <= 0) continue;
    xs.push_back(S);
    ys.push_back(std::log2(static_cast<double>(counts[static_cast<std::size_t>(S)])));
  }
  if (xs.size() < 2) return 0.0;
  return fit_line(xs, ys).slope;
}

void require_trilinear_params(const DispersionParams& params, const char* where) {
  if (!params.real_epsilon() || params.alpha() <= 0.0)
    throw DomainError(std::string(where) + ": needs real eps > 0");
}

// (v(r) - v(0)) / r^2
double radial_excess(double r, double t, std::int64_t k, const DispersionParams& params) {
  const double e2 = params.alpha();
  const double kk = static_cast<double>(k);
  const double a = 3.0 * e2 * (9.0 - std::cos(4.0 * t) + 8.0 * std::sin(2.0 * t));
  const double b = 12.0 * e2 * kk * (std::cos(t) - std::cos(3.0 * t) + std::sin(t) + std::sin(3.0 * t));
  const double c = (8.0 * e2 * kk * kk + 12.0) * (std::sin(2.0 * t) + 2.0);
  return (a * r * r - b * r + c) / 12.0;
}

// min over real k2 of W(x, k2), attained at k2 = (k - x)/2.
double row_minimum(double x, std::int64_t k, const DispersionParams& params) {
  return w(x, params) + 2.0 * w((static_cast<double>(k) - x) / 2.0, params);
}

struct TrilinearBox {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
};

// k1 range holding every pair with W <= level.
TrilinearBox trilinear_box(double level, std::int64_t k, const DispersionParams& params,
                           const TrilinearOptions& options) {
  const double c = options.lower_bound_c ? *options.lower_bound_c : verified_lower_bound_constant(params);
  if (!(c > 0.0) || !(options.safety > 0.0))
    throw InconclusiveError("trilinear search box needs a verified positive lower-bound constant", 0);
  const double excess = level - radial_minimum(k, params);
  if (excess < 0.0) return {};
  const double R = std::sqrt(std::sqrt(excess / (options.safety * c * params.alpha())));
  const double center = static_cast<double>(k) / 3.0;
  TrilinearBox box{static_cast<std::int64_t>(std::ceil(center - R)), static_cast<std::int64_t>(std::floor(center + R))};
  for (const std::int64_t edge : {box.lo - 1, box.hi + 1}) {
    if (!(row_minimum(static_cast<double>(edge), k, params) > level))
      throw InconclusiveError("trilinear search box failed its boundary check",
                              std::max(std::abs(box.lo), std::abs(box.hi)) + 1);
  }
  return box;
}

template <class Int>
struct ResonanceEnumerator {
  std::int64_t N, n;
  Int p, q;

  Int value(std::int64_t a, std::int64_t b, std::int64_t c) const {
    const Int A = a, B = b, C = c;
    const Int A2 = A * A, B2 = B * B, C2 = C * C;
    return p * (A2 * A2 + B2 * B2 + C2 * C2) + q * (A2 + B2 + C2);
  }

  // Levels j = value / q over (k1 outer, k2 inner).
  std::vector<Int> by_k1() const {
    std::vector<Int> out;
    out.reserve(static_cast<std::size_t>((2 * N + 1) * (2 * N + 1)));
    for (std::int64_t a = -N; a <= N; ++a)
      for (std::int64_t b = -N; b <= N; ++b) {
        const Int v = value(a, b, n - a - b);
        if (v % q == 0) out.push_back(v / q);
      }
    return out;
  }

  // Levels over (k3 outer, k1 inner).
  std::vector<Int> by_k3() const {
    std::vector<Int> out;
    out.reserve(static_cast<std::size_t>((2 * N + 1) * (2 * N + 1)));
    for (std::int64_t c = n - 2 * N; c <= n + 2 * N; ++c)
      for (std::int64_t a = -N; a <= N; ++a) {
        const std::int64_t b = n - a - c;
        if (b < -N || b > N) continue;
        const Int v = value(a, b, c);
        if (v % q == 0) out.push_back(v / q);
      }
    return out;
  }

  std::int64_t count(const Int& j) const {
    const Int target = q * j;
    std::int64_t c = 0;
    for (std::int64_t a = -N; a <= N; ++a)
      for (std::int64_t b = -N; b <= N; ++b)
        if (value(a, b, n - a - b) == target) ++c;
    return c;
  }
};

bool needs_wide(std::int64_t N, std::int64_t n, const ExactRational& r) {
  if (N > (std::int64_t{1} << 15)) return true;
  const long double K = static_cast<long double>(std::abs(n) + 2 * N);
  const long double bound = 3.0L * std::abs(static_cast<long double>(r.num)) * K * K * K * K +
                            3.0L * static_cast<long double>(r.den) * K * K;
  return bound > 4.0e18L;
}

template <class Int>
ResonanceProfile profile_with(std::int64_t N, std::int64_t n, const ExactRational& r) {
  const ResonanceEnumerator<Int> e{N, n, Int(r.num), Int(r.den)};
  auto a = e.by_k1();
  auto b = e.by_k3();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw ExactnessError("resonance enumeration orders disagree");
  ResonanceProfile out;
  out.N = N;
  out.n = n;
  for (std::size_t i = 0; i < a.size();) {
    std::size_t e2 = i;
    while (e2 < a.size() && a[e2] == a[i]) ++e2;
    ++out.distinct_levels;
    const auto c = static_cast<std::int64_t>(e2 - i);
    if (c > out.max_count) {
      out.max_count = c;
      std::ostringstream os;
      os << a[i];
      out.argmax_j = os.str();
    }
    i = e2;
  }
  return out;
}

}  // namespace

double CountQuery::theta() const {
  const int S = m + n + (l ? *l : 0);
  return threshold_constant * std::exp2(static_cast<double>(S));
}

void CountQuery::validate() const {
  if (!(threshold_constant > 0.0)) throw DomainError("threshold constant must be positive");
  if (m < 0 || n < 0 || (l && *l < 0)) throw DomainError("shell indices must be >= 0");
  if (box.k1_bound < 0 || box.k2_bound < 0) throw DomainError("search box bounds must be >= 0");
  require_counting_params(params, "CountQuery");
}

double bilinear_level(double x, std::int64_t k, const DispersionParams& params) {
  return w(x, params) + w(static_cast<double>(k) - x, params);
}

double completed_square_level(double y, std::int64_t k, const DispersionParams& params) {
  if (!params.real_epsilon() || params.alpha() <= 0.0) throw DomainError("completed square needs real eps > 0");
  const double e2 = params.alpha();
  const double kk = static_cast<double>(k);
  const double s = y * y + 0.5 * (1.0 / e2 + 1.5 * kk * kk);
  return 2.0 * e2 * s * s - (e2 * kk * kk * kk * kk + kk * kk + 1.0 / (2.0 * e2));
}

std::int64_t count_bilinear(const CountQuery& query, double tau, std::int64_t k) {
  query.validate();
  const double theta = query.theta();
  const int dir = level_direction(k, query.params);
  if (dir == 0) {
    if (std::abs(tau) <= theta) throw InconclusiveError("constant level function: every k1 solves", kUnbounded);
    return 0;
  }
  const auto sides = two_sided_count(k, dir, theta, [&](std::int64_t x) {
    return tau + bilinear_level(static_cast<double>(x), k, query.params);
  });
  if (const auto m = sides.max_abs(); m > query.box.k1_bound)
    throw InconclusiveError("bilinear level set leaves the search box", m);
  return sides.total();
}

std::int64_t scan_bilinear(const CountQuery& query, double tau, std::int64_t k) {
  query.validate();
  const double theta = query.theta();
  std::int64_t c = 0;
  for (std::int64_t x = -query.box.k1_bound; x <= query.box.k1_bound; ++x)
    if (std::abs(tau + bilinear_level(static_cast<double>(x), k, query.params)) <= theta) ++c;
  return c;
}

int bilinear_interval_count(const CountQuery& query, double tau, std::int64_t k) {
  query.validate();
  const int dir = level_direction(k, query.params);
  if (dir == 0) return std::abs(tau) <= query.theta() ? 1 : 0;
  const auto sides = two_sided_count(k, dir, query.theta(), [&](std::int64_t x) {
    return tau + bilinear_level(static_cast<double>(x), k, query.params);
  });
  return sides.intervals();
}

BilinearSup bilinear_sup(const CountQuery& query, std::int64_t k) {
  query.validate();
  const double theta = query.theta();
  const int dir = level_direction(k, query.params);
  if (dir == 0) throw InconclusiveError("constant level function: sup over tau is infinite", kUnbounded);
  double limit = 0.0;
  const auto u = collect_levels(k, dir, theta,
                                [&](std::int64_t x) { return bilinear_level(static_cast<double>(x), k, query.params); },
                                &limit);
  const auto [best, start] = best_window(u, theta, limit);
  BilinearSup out;
  out.tau = -static_cast<double>(dir) * (start + theta);
  out.count = count_bilinear(query, out.tau, k);
  out.intervals = bilinear_interval_count(query, out.tau, k);
  if (out.count < best) throw InconclusiveError("sup window count not reproduced at its tau", out.count);
  return out;
}

BilinearBoundReport verify_bilinear_bound(const DispersionParams& params, int shell_low, int shell_high,
                                          const std::vector<std::int64_t>& k_samples, double threshold_constant,
                                          std::size_t threads) {
  if (params.monomial_mode() && params.delta() % 2 == 1)
    throw DomainError("verify_bilinear_bound: odd delta has no uniform bilinear bound, use count_odd_delta");
  require_counting_params(params, "verify_bilinear_bound");
  if (shell_low < 0 || shell_high < shell_low) throw DomainError("verify_bilinear_bound: bad shell range");
  if (k_samples.empty()) throw DomainError("verify_bilinear_bound: empty k sample set");
  const auto shells = static_cast<std::size_t>(shell_high + 1);
  std::vector<std::int64_t> counts(shells * k_samples.size());
  std::vector<int> intervals(counts.size());
  parallel_for(counts.size(), threads, [&](std::size_t i) {
    CountQuery q;
    q.m = static_cast<int>(i / k_samples.size());
    q.params = params;
    q.threshold_constant = threshold_constant;
    const auto s = bilinear_sup(q, k_samples[i % k_samples.size()]);
    counts[i] = s.count;
    intervals[i] = s.intervals;
  });
  BilinearBoundReport out;
  out.ratio_by_shell.assign(shells, 0.0);
  out.sup_count_by_shell.assign(shells, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t S = i / k_samples.size();
    out.sup_count_by_shell[S] = std::max(out.sup_count_by_shell[S], counts[i]);
    out.max_intervals = std::max(out.max_intervals, intervals[i]);
  }
  for (std::size_t S = 0; S < shells; ++S) {
    out.ratio_by_shell[S] =
        static_cast<double>(out.sup_count_by_shell[S]) / norm_bilinear(params, static_cast<int>(S));
    if (static_cast<int>(S) <= shell_low) out.constant_low = std::max(out.constant_low, out.ratio_by_shell[S]);
    out.constant_high = std::max(out.constant_high, out.ratio_by_shell[S]);
  }
  out.stability = out.constant_high / out.constant_low;
  out.growth_slope = slope_upper_half(out.sup_count_by_shell, shell_high);
  out.pass = std::isfinite(out.stability) && out.stability <= 1.2 && out.stability >= 1.0 / 1.2;
  return out;
}

MinimizerVerdict verify_minimizer(std::int64_t k, const DispersionParams& params, std::int64_t inequality_range) {
  const bool even_monomial = params.monomial_mode() && params.delta() % 2 == 0;
  if (!params.real_epsilon() && !even_monomial)
    throw DomainError("verify_minimizer: needs real eps or an even-delta monomial");
  MinimizerVerdict out;
  const double kk = static_cast<double>(k);
  out.expected = kk / 2.0;
  auto f = [&](double x) { return bilinear_level(x, k, params); };
  const double span = std::abs(kk) / 2.0 + 4.0;
  const double lo = out.expected - span;
  const double h = 1e-3;
  const auto steps = static_cast<std::int64_t>(std::ceil(2.0 * span / h));

  double best = std::numeric_limits<double>::infinity();
  bool sign_found = false;
  double prev_d = -1.0;
  for (std::int64_t i = 0; i <= steps; ++i) {
    const double x = lo + h * static_cast<double>(i);
    const double v = f(x);
    if (v < best) {
      best = v;
      out.scan_argmin = x;
    }
    // Central difference via the factored quotient so it stays accurate near the minimum.
    const double a = x - h / 2.0;
    const double b = x + h / 2.0;
    const double d = difference_quotient(b, a, params) - difference_quotient(kk - a, kk - b, params);
    if (i > 0 && !sign_found && prev_d < 0.0 && d >= 0.0) {
      out.sign_change = x - h / 2.0;
      sign_found = true;
    }
    prev_d = d;
  }

  // f(x) < f(y), decided from the factored difference.
  auto less = [&](double x, double y) {
    const double diff = (x - y) * (difference_quotient(x, y, params) - difference_quotient(kk - x, kk - y, params));
    return diff < 0.0;
  };
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo;
  double b = lo + 2.0 * span;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  while (b - a > 1e-12) {
    if (less(c, d)) b = d;
    else a = c;
    c = b - kInvPhi * (b - a);
    d = a + kInvPhi * (b - a);
  }
  out.golden_argmin = (a + b) / 2.0;

  if (even_monomial) {
    // Scaled by 2^delta: (2x + k)^d + (k - 2x)^d - 2 k^d >= (2x)^d.
    out.inequality_checked = true;
    const int dl = params.delta();
    for (std::int64_t x = -inequality_range; x <= inequality_range; ++x) {
      const cpp_int K = k, X = 2 * x;
      const cpp_int lhs = boost::multiprecision::pow(X + K, dl) + boost::multiprecision::pow(K - X, dl) -
                          2 * boost::multiprecision::pow(K, dl);
      if (lhs < boost::multiprecision::pow(X, dl)) {
        out.inequality_holds = false;
        out.inequality_worst_k1 = x;
        break;
      }
    }
  }
  const double tol = 1e-10 * std::max(1.0, std::abs(kk));
  out.pass = std::abs(out.scan_argmin - out.expected) <= h && sign_found &&
             std::abs(out.sign_change - out.expected) <= h && std::abs(out.golden_argmin - out.expected) <= tol &&
             out.inequality_holds;
  return out;
}

double radial_polynomial_v(double r, double theta, std::int64_t k, const DispersionParams& params) {
  require_trilinear_params(params, "radial_polynomial_v");
  return r * r * radial_excess(r, theta, k, params) + radial_minimum(k, params);
}

double radial_polynomial_v2(double r, double t, std::int64_t k, const DispersionParams& params) {
  require_trilinear_params(params, "radial_polynomial_v2");
  const double e2 = params.alpha();
  const double kk = static_cast<double>(k);
  const double s2 = std::sin(2.0 * t) + 2.0;
  return 6.0 * e2 * s2 * s2 * r * r +
         6.0 * e2 * kk * (std::cos(3.0 * t) - (std::sin(t) + std::sin(3.0 * t) + std::cos(t))) * r +
         (4.0 / 3.0 * e2 * kk * kk + 2.0) * s2;
}

double radial_minimum(std::int64_t k, const DispersionParams& params) {
  const double kk = static_cast<double>(k);
  return kk * kk * (params.alpha() * kk * kk + 9.0) / 27.0;
}

double trilinear_level(std::int64_t k1, std::int64_t k2, std::int64_t k, const DispersionParams& params) {
  return w(static_cast<double>(k1), params) + w(static_cast<double>(k2), params) +
         w(static_cast<double>(k - k1 - k2), params);
}

VPropertyReport verify_v_properties(const DispersionParams& params, const VGrid& grid) {
  require_trilinear_params(params, "verify_v_properties");
  if (grid.theta_points == 0 || grid.r_points == 0 || !(grid.r_max > 0.0) || grid.k_max < 0)
    throw DomainError("verify_v_properties: empty sample grid");
  VPropertyReport out;
  out.min_second_derivative = std::numeric_limits<double>::infinity();
  out.lower_bound_constant = std::numeric_limits<double>::infinity();
  const double e2 = params.alpha();
  for (std::size_t i = 0; i < grid.theta_points; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(grid.theta_points);
    for (std::int64_t k = -grid.k_max; k <= grid.k_max; ++k)
      for (std::size_t j = 1; j <= grid.r_points; ++j) {
        const double r = grid.r_max * static_cast<double>(j) / static_cast<double>(grid.r_points);
        out.min_second_derivative = std::min(out.min_second_derivative, radial_polynomial_v2(r, t, k, params));
        out.lower_bound_constant =
            std::min(out.lower_bound_constant, radial_excess(r, t, k, params) / (e2 * r * r));
        ++out.samples;
      }
  }
  out.pass = out.min_second_derivative >= -1e-9 && out.lower_bound_constant > 0.0;
  return out;
}

double verified_lower_bound_constant(const DispersionParams& params) {
  require_trilinear_params(params, "verified_lower_bound_constant");
  static std::mutex mutex;
  static std::vector<std::pair<double, double>> cache;
  {
    std::lock_guard lock(mutex);
    for (const auto& [a, c] : cache)
      if (a == params.alpha()) return c;
  }
  const auto report = verify_v_properties(params);
  const double c = report.pass ? report.lower_bound_constant : 0.0;
  std::lock_guard lock(mutex);
  cache.emplace_back(params.alpha(), c);
  return c;
}

std::int64_t count_trilinear(double tau, std::int64_t k, int m, int n, int l, const DispersionParams& params,
                             const TrilinearOptions& options) {
  require_trilinear_params(params, "count_trilinear");
  if (m < 0 || n < 0 || l < 0) throw DomainError("count_trilinear: shell indices must be >= 0");
  const double theta = options.threshold_constant * std::exp2(static_cast<double>(m + n + l));
  const auto box = trilinear_box(theta - tau, k, params, options);
  std::int64_t total = 0;
  for (std::int64_t k1 = box.lo; k1 <= box.hi; ++k1) {
    const auto sides = two_sided_count(k - k1, 1, theta,
                                       [&](std::int64_t k2) { return tau + trilinear_level(k1, k2, k, params); });
    total += sides.total();
  }
  return total;
}

std::int64_t scan_trilinear(double tau, std::int64_t k, double theta, const DispersionParams& params,
                            std::int64_t bound) {
  std::int64_t c = 0;
  for (std::int64_t k1 = -bound; k1 <= bound; ++k1)
    for (std::int64_t k2 = -bound; k2 <= bound; ++k2)
      if (std::abs(tau + trilinear_level(k1, k2, k, params)) <= theta) ++c;
  return c;
}

TrilinearSup trilinear_sup(std::int64_t k, int m, int n, int l, const DispersionParams& params,
                           const TrilinearOptions& options) {
  require_trilinear_params(params, "trilinear_sup");
  const double theta = options.threshold_constant * std::exp2(static_cast<double>(m + n + l));
  const std::int64_t c3 = static_cast<std::int64_t>(std::llround(static_cast<double>(k) / 3.0));
  const double cap = trilinear_level(c3, c3, k, params) + 10.0 * theta;
  const auto box = trilinear_box(cap, k, params, options);
  std::vector<double> values;
  for (std::int64_t k1 = box.lo; k1 <= box.hi; ++k1) {
    auto level = [&](std::int64_t k2) { return trilinear_level(k1, k2, k, params); };
    if (row_minimum(static_cast<double>(k1), k, params) > cap) continue;
    const std::int64_t start = ceil_half(k - k1);
    for (std::int64_t k2 = start;; ++k2) {
      const double v = level(k2);
      if (v > cap) break;
      values.push_back(v);
    }
    for (std::int64_t k2 = start - 1;; --k2) {
      const double v = level(k2);
      if (v > cap) break;
      values.push_back(v);
    }
  }
  if (values.empty()) throw InconclusiveError("trilinear sup found no lattice levels", 0);
  const double lowest = *std::min_element(values.begin(), values.end());
  const auto [best, start] = best_window(std::move(values), theta, lowest + 8.0 * theta);
  TrilinearSup out;
  out.tau = -(start + theta);
  out.count = count_trilinear(out.tau, k, m, n, l, params, options);
  if (out.count < best) throw InconclusiveError("trilinear sup window not reproduced at its tau", out.count);
  return out;
}

TrilinearBoundReport verify_trilinear_bound(const DispersionParams& params, int shell_low, int shell_high,
                                            const std::vector<std::int64_t>& k_samples,
                                            const TrilinearOptions& options, std::size_t threads) {
  require_trilinear_params(params, "verify_trilinear_bound");
  if (shell_low < 0 || shell_high < shell_low) throw DomainError("verify_trilinear_bound: bad shell range");
  if (k_samples.empty()) throw DomainError("verify_trilinear_bound: empty k sample set");
  verified_lower_bound_constant(params);
  const auto shells = static_cast<std::size_t>(shell_high + 1);
  std::vector<std::int64_t> counts(shells * k_samples.size());
  parallel_for(counts.size(), threads, [&](std::size_t i) {
    const int S = static_cast<int>(i / k_samples.size());
    counts[i] = trilinear_sup(k_samples[i % k_samples.size()], S, 0, 0, params, options).count;
  });
  TrilinearBoundReport out;
  out.ratio_by_shell.assign(shells, 0.0);
  out.sup_count_by_shell.assign(shells, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::size_t S = i / k_samples.size();
    out.sup_count_by_shell[S] = std::max(out.sup_count_by_shell[S], counts[i]);
  }
  for (std::size_t S = 0; S < shells; ++S) {
    out.ratio_by_shell[S] =
        static_cast<double>(out.sup_count_by_shell[S]) / trilinear_norm(params, static_cast<int>(S));
    if (static_cast<int>(S) <= shell_low) out.constant_low = std::max(out.constant_low, out.ratio_by_shell[S]);
    out.constant_high = std::max(out.constant_high, out.ratio_by_shell[S]);
  }
  out.stability = out.constant_high / out.constant_low;
  out.growth_slope = slope_upper_half(out.sup_count_by_shell, shell_high);
  out.pass = std::isfinite(out.stability) && out.stability <= 1.2 && out.stability >= 1.0 / 1.2;
  return out;
}

double odd_delta_level(double y, std::int64_t k, int delta) {
  const double h = static_cast<double>(k) / 2.0;
  double s = 0.0;
  double binom = 1.0;  // binom(delta, j)
  for (int j = 0; j <= delta; ++j) {
    if (j % 2 == 0) s += binom * ipow(y, j) * ipow(h, delta - j);
    binom = binom * static_cast<double>(delta - j) / static_cast<double>(j + 1);
  }
  return 2.0 * s;
}

OddDeltaCount count_odd_delta(double tau, std::int64_t k, int m, int n, int delta, std::optional<double> split_a,
                              double threshold_constant) {
  if (delta < 3 || delta % 2 == 0) throw DomainError("count_odd_delta: delta must be odd and >= 3");
  if (m < 0 || n < 0) throw DomainError("count_odd_delta: shell indices must be >= 0");
  if (!(threshold_constant > 0.0)) throw DomainError("count_odd_delta: threshold constant must be positive");
  OddDeltaCount out;
  const double S = static_cast<double>(m + n);
  out.split_a = split_a ? *split_a : S / delta;
  out.low_count_bound = std::exp2(out.split_a + m);
  out.high_bound = std::exp2((S - out.split_a) / (delta - 1));
  out.high_branch = static_cast<double>(std::abs(k)) > std::exp2(out.split_a);
  if (!out.high_branch) return out;
  const double theta = threshold_constant * std::exp2(S);
  const double half = static_cast<double>(k) / 2.0;
  const auto sides = two_sided_count(k, k > 0 ? 1 : -1, theta, [&](std::int64_t x) {
    return tau + odd_delta_level(static_cast<double>(x) - half, k, delta);
  });
  out.high_count = sides.total();
  return out;
}

std::int64_t odd_delta_sup(std::int64_t k, int m, int n, int delta, double threshold_constant) {
  if (delta < 3 || delta % 2 == 0) throw DomainError("odd_delta_sup: delta must be odd and >= 3");
  if (k == 0) throw InconclusiveError("odd_delta_sup: level is constant at k = 0", kUnbounded);
  const double theta = threshold_constant * std::exp2(static_cast<double>(m + n));
  const int dir = k > 0 ? 1 : -1;
  const double half = static_cast<double>(k) / 2.0;
  double limit = 0.0;
  const auto u = collect_levels(
      k, dir, theta, [&](std::int64_t x) { return odd_delta_level(static_cast<double>(x) - half, k, delta); },
      &limit);
  const auto [best, start] = best_window(u, theta, limit);
  const double tau = -static_cast<double>(dir) * (start + theta);
  const auto c = count_odd_delta(tau, k, m, n, delta, -1.0, threshold_constant);
  if (c.high_count < best) throw InconclusiveError("odd-delta sup window not reproduced at its tau", c.high_count);
  return c.high_count;
}

OddDeltaExponents odd_delta_exponents(int delta, int shell_min, int shell_max, double threshold_constant) {
  if (delta < 3 || delta % 2 == 0) throw DomainError("odd_delta_exponents: delta must be odd and >= 3");
  if (shell_min < 0 || shell_max <= shell_min) throw DomainError("odd_delta_exponents: bad shell range");
  std::vector<double> hx, hy, ms, ns, es;
  for (int m = shell_min; m <= shell_max; ++m)
    for (int n = shell_min; n <= shell_max; ++n) {
      const double a = static_cast<double>(m + n) / delta;
      const auto k_star = static_cast<std::int64_t>(std::floor(std::exp2(a))) + 1;
      std::int64_t sup = 0;
      for (std::int64_t k = k_star; k < k_star + 4; ++k)
        sup = std::max({sup, odd_delta_sup(k, m, n, delta, threshold_constant),
                        odd_delta_sup(-k, m, n, delta, threshold_constant)});
      hx.push_back(static_cast<double>(m + n) - std::log2(static_cast<double>(k_star)));
      hy.push_back(std::log2(static_cast<double>(sup)));
      ms.push_back(m);
      ns.push_back(n);
      es.push_back(0.5 * (m + std::log2(std::max(std::exp2(a), static_cast<double>(sup)))));
    }
  OddDeltaExponents out;
  out.high_slope = fit_line(hx, hy).slope;
  const auto plane = fit_plane(ms, ns, es);
  out.m_exponent = plane.a;
  out.n_exponent = plane.b;
  out.r2 = plane.r2;
  return out;
}

ExactRational exact_epsilon_squared(const DispersionParams& params) {
  if (params.monomial_mode() || params.beta() != 0.0)
    throw ExactnessError("resonance counts need a real rational eps^2");
  const double x = params.alpha();
  if (!std::isfinite(x)) throw ExactnessError("eps^2 is not finite");
  // Continued-fraction convergents h/q of x.
  std::int64_t h0 = 1, h1 = 0, q0 = 0, q1 = 1;
  double rest = x;
  for (int i = 0; i < 64; ++i) {
    const double a = std::floor(rest);
    if (std::abs(a) > 1e15) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t h = ai * h0 + h1;
    const std::int64_t q = ai * q0 + q1;
    if (q > (std::int64_t{1} << 20)) break;
    if (static_cast<double>(h) / static_cast<double>(q) == x) return {h, q};
    h1 = h0;
    h0 = h;
    q1 = q0;
    q0 = q;
    const double frac = rest - a;
    if (frac == 0.0) break;
    rest = 1.0 / frac;
  }
  throw ExactnessError("eps^2 = " + std::to_string(x) + " is not p/q with q <= 2^20");
}

std::int64_t resonance_count(std::int64_t N, std::int64_t n, std::int64_t j, const DispersionParams& params) {
  if (N < 0) throw DomainError("resonance_count: N must be >= 0");
  const auto r = exact_epsilon_squared(params);
  if (needs_wide(N, n, r)) return ResonanceEnumerator<cpp_int>{N, n, cpp_int(r.num), cpp_int(r.den)}.count(cpp_int(j));
  const long double target = static_cast<long double>(r.den) * static_cast<long double>(j);
  if (std::abs(target) > 9.0e18L) return 0;
  return ResonanceEnumerator<std::int64_t>{N, n, r.num, r.den}.count(j);
}

ResonanceProfile resonance_profile(std::int64_t N, std::int64_t n, const DispersionParams& params) {
  if (N < 0) throw DomainError("resonance_profile: N must be >= 0");
  const auto r = exact_epsilon_squared(params);
  if (needs_wide(N, n, r)) {
    auto out = profile_with<cpp_int>(N, n, r);
    out.wide_arithmetic = true;
    return out;
  }
  return profile_with<std::int64_t>(N, n, r);
}

std::map<std::int64_t, std::int64_t> resonance_table(std::int64_t N, std::int64_t n, const DispersionParams& params) {
  if (N < 0) throw DomainError("resonance_table: N must be >= 0");
  const auto r = exact_epsilon_squared(params);
  if (needs_wide(N, n, r)) throw ExactnessError("resonance_table: levels exceed 64 bits, use resonance_profile");
  std::map<std::int64_t, std::int64_t> table;
  for (const auto j : ResonanceEnumerator<std::int64_t>{N, n, r.num, r.den}.by_k1()) ++table[j];
  return table;
}

}  // namespace fnls
