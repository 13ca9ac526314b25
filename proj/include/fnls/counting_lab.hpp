#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fnls/spectral_core.hpp"

namespace fnls {

inline constexpr double kBilinearConstant = 4.0;
inline constexpr double kTrilinearConstant = 6.0;

struct SearchBox {
  // |k1| <= k1_bound, |k2| <= k2_bound.
  std::int64_t k1_bound = std::int64_t{1} << 40;
  std::int64_t k2_bound = std::int64_t{1} << 40;
  // Optional tau grid for sampled sweeps; sup over tau is computed exactly elsewhere.
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::size_t tau_points = 0;
};

struct CountQuery {
  int m = 0;
  int n = 0;
  std::optional<int> l;
  DispersionParams params;
  double threshold_constant = kBilinearConstant;
  SearchBox box;

  // C 2^{m+n} or C 2^{m+n+l}.
  double theta() const;
  void validate() const;
};

// w(x) + w(k - x)
double bilinear_level(double x, std::int64_t k, const DispersionParams& params);
// 2 eps^2 (y^2 + (eps^-2 + 3k^2/2)/2)^2 - (eps^2 k^4 + k^2 + 1/(2 eps^2)) at y = x - k/2. Real eps > 0.
double completed_square_level(double y, std::int64_t k, const DispersionParams& params);

// |{k1 : |tau + w(k1) + w(k - k1)| <= Theta}| by monotone search on each side of k/2.
// Throws InconclusiveError if a solution lies outside the query box.
std::int64_t count_bilinear(const CountQuery& query, double tau, std::int64_t k);
// Exhaustive scan over |k1| <= box.k1_bound.
std::int64_t scan_bilinear(const CountQuery& query, double tau, std::int64_t k);

struct BilinearSup {
  std::int64_t count = 0;
  // A maximizing tau.
  double tau = 0.0;
  // Maximal runs of consecutive k1 in the level set at that tau.
  int intervals = 0;
};

// sup over tau of count_bilinear, from the exact breakpoints of the count.
BilinearSup bilinear_sup(const CountQuery& query, std::int64_t k);

// Number of maximal runs of consecutive k1 in the level set.
int bilinear_interval_count(const CountQuery& query, double tau, std::int64_t k);

struct BilinearBoundReport {
  // Index S = m + n.
  std::vector<double> ratio_by_shell;
  std::vector<std::int64_t> sup_count_by_shell;
  double constant_low = 0.0;   // sup over S <= shell_low
  double constant_high = 0.0;  // sup over S <= shell_high
  double stability = 0.0;      // constant_high / constant_low
  double growth_slope = 0.0;   // d log2(sup count) / dS over the upper half
  int max_intervals = 0;
  bool pass = false;
};

// sup over k samples and tau of count / (eps^{-1/2} 2^{S/4}), or / 2^{S/delta} in monomial mode.
// PASS when the constant over S <= shell_high is within 20% of that over S <= shell_low.
BilinearBoundReport verify_bilinear_bound(const DispersionParams& params, int shell_low, int shell_high,
                                          const std::vector<std::int64_t>& k_samples,
                                          double threshold_constant = kBilinearConstant, std::size_t threads = 1);

struct MinimizerVerdict {
  double expected = 0.0;       // k / 2
  double scan_argmin = 0.0;
  double sign_change = 0.0;    // midpoint of the bracket where the derivative turns positive
  double golden_argmin = 0.0;
  bool inequality_checked = false;
  bool inequality_holds = true;
  std::int64_t inequality_worst_k1 = 0;
  bool pass = false;
};

// Checks that x -> w(x) + w(k - x) is minimized at k/2; for even delta also that
// w(k1 + k/2) + w(k/2 - k1) - 2 (k/2)^delta >= k1^delta for |k1| <= inequality_range.
MinimizerVerdict verify_minimizer(std::int64_t k, const DispersionParams& params,
                                  std::int64_t inequality_range = 1000);

// Shifted polar form of w(k1) + w(k2) + w(k - k1 - k2) about (k/3, k/3), as printed.
double radial_polynomial_v(double r, double theta, std::int64_t k, const DispersionParams& params);
// Its second r-derivative, as printed.
double radial_polynomial_v2(double r, double theta, std::int64_t k, const DispersionParams& params);
// k^2 (eps^2 k^2 + 9) / 27
double radial_minimum(std::int64_t k, const DispersionParams& params);

double trilinear_level(std::int64_t k1, std::int64_t k2, std::int64_t k, const DispersionParams& params);

struct VGrid {
  std::size_t theta_points = 256;
  std::int64_t k_max = 20;
  double r_max = 50.0;
  std::size_t r_points = 400;
};

struct VPropertyReport {
  double min_second_derivative = 0.0;
  // Largest c with (v(r) - v(0)) / r^2 >= c eps^2 r^2 on the sample.
  double lower_bound_constant = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

VPropertyReport verify_v_properties(const DispersionParams& params, const VGrid& grid = {});

// Measured lower-bound constant for params on the default grid, cached.
double verified_lower_bound_constant(const DispersionParams& params);

struct TrilinearOptions {
  double threshold_constant = kTrilinearConstant;
  // Overrides the measured constant; must be > 0.
  std::optional<double> lower_bound_c;
  double safety = 0.5;
};

// |{(k1, k2) : |tau + W(k1, k2)| <= C 2^{m+n+l}}| with W = w(k1) + w(k2) + w(k - k1 - k2).
// k1 ranges over the disc r <= ((Theta - tau - v(0)) / (safety c eps^2))^{1/4}; each k1 row is counted exactly.
std::int64_t count_trilinear(double tau, std::int64_t k, int m, int n, int l, const DispersionParams& params,
                             const TrilinearOptions& options = {});
std::int64_t scan_trilinear(double tau, std::int64_t k, double theta, const DispersionParams& params,
                            std::int64_t bound);

struct TrilinearSup {
  std::int64_t count = 0;
  double tau = 0.0;
};

// Window starts up to the lattice minimum plus 8 Theta.
TrilinearSup trilinear_sup(std::int64_t k, int m, int n, int l, const DispersionParams& params,
                           const TrilinearOptions& options = {});

struct TrilinearBoundReport {
  std::vector<double> ratio_by_shell;  // index S = m + n + l
  std::vector<std::int64_t> sup_count_by_shell;
  double constant_low = 0.0;
  double constant_high = 0.0;
  double stability = 0.0;
  double growth_slope = 0.0;
  bool pass = false;
};

// sup over k samples and tau of count / (eps^{-1} 2^{S/2}).
TrilinearBoundReport verify_trilinear_bound(const DispersionParams& params, int shell_low, int shell_high,
                                            const std::vector<std::int64_t>& k_samples,
                                            const TrilinearOptions& options = {}, std::size_t threads = 1);

// 2 sum_{j even} binom(delta, j) y^j (k/2)^{delta - j}, the even part of (y + k/2)^delta - (y - k/2)^delta.
double odd_delta_level(double y, std::int64_t k, int delta);

struct OddDeltaCount {
  double split_a = 0.0;
  bool high_branch = false;
  // 2^{a + m}: the squared low-frequency constant, used when |k| <= 2^a.
  double low_count_bound = 0.0;
  std::int64_t high_count = 0;
  // 2^{(m + n - a)/(delta - 1)}, for |k| > 2^a.
  double high_bound = 0.0;
};

// Monomial k^delta with delta odd >= 3. Default split a = (m + n) / delta.
OddDeltaCount count_odd_delta(double tau, std::int64_t k, int m, int n, int delta,
                              std::optional<double> split_a = std::nullopt,
                              double threshold_constant = kBilinearConstant);

// sup over tau of the high-frequency count (expansion form) at fixed k.
std::int64_t odd_delta_sup(std::int64_t k, int m, int n, int delta, double threshold_constant = kBilinearConstant);

struct OddDeltaExponents {
  // log2 sup_{|k| > 2^a} high count against (m + n - log2 k*); expect 1/(delta - 1).
  double high_slope = 0.0;
  // Plane fit of (1/2) log2(2^m max(2^a, high sup)) in (m, n); expect ((delta+1)/(2 delta), 1/(2 delta)).
  double m_exponent = 0.0;
  double n_exponent = 0.0;
  double r2 = 0.0;
};

OddDeltaExponents odd_delta_exponents(int delta, int shell_min, int shell_max,
                                      double threshold_constant = kBilinearConstant);

struct ExactRational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// eps^2 = p / q exactly in double with q <= 2^20; ExactnessError otherwise.
ExactRational exact_epsilon_squared(const DispersionParams& params);

// |{(k1, k2) : |k1|, |k2| <= N, eps^2 (k1^4 + k2^4 + k3^4) + k1^2 + k2^2 + k3^2 = j}|, k3 = n - k1 - k2.
std::int64_t resonance_count(std::int64_t N, std::int64_t n, std::int64_t j, const DispersionParams& params);

struct ResonanceProfile {
  std::int64_t N = 0;
  std::int64_t n = 0;
  std::int64_t max_count = 0;
  // Smallest j attaining the max; decimal since it may exceed 64 bits.
  std::string argmax_j;
  std::size_t distinct_levels = 0;
  bool wide_arithmetic = false;
};

// max_j r_{N,n,j} over integer j. Two enumeration orders must agree, else ExactnessError.
ResonanceProfile resonance_profile(std::int64_t N, std::int64_t n, const DispersionParams& params);

// j -> r_{N,n,j} for all attained integer j; 64-bit only (N <= 2^15).
std::map<std::int64_t, std::int64_t> resonance_table(std::int64_t N, std::int64_t n, const DispersionParams& params);

}  // namespace fnls
