#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnls/evolution.hpp"
#include "fnls/spectral_core.hpp"

namespace fnls {

// Distances in this module use the H^s norm scaled by (2 pi)^{-1/2}, so that
// |k <n>^{-s} e^{inx}| = k exactly.
double scaled_hs_norm(const SpectralField& u, double s);
double scaled_hs_distance(const SpectralField& a, const SpectralField& b, double s);

// eps in D: dispersive or dissipative, not resonant.
bool in_domain_D(const DispersionParams& params);
// Re(eps) Im(eps) < 0.
bool in_omega(cplx eps);

struct EpsilonExperiment {
  DispersionParams epsilon0;
  std::vector<DispersionParams> epsilon_sequence;
  double s = 1.0;
  std::int64_t n = 1;
  double horizon = 1.0;
  bool infinite_horizon = false;
  double tolerance = 1e-6;

  // Throws RegimeError / SingularOperatorError for members outside D.
  void validate() const;
};

struct IllposednessWitness {
  std::int64_t n = 0;
  double k = 0.0;
  double k_n = 0.0;
  double initial_distance = 0.0;  // |k_n - k|
  double phase_gap = 0.0;         // t <n>^{-2s} (k_n^2 - k^2), pi by construction
  double lower_bound = 0.0;       // k |e^{i phase_gap} - 1| - |k_n - k|
  double distance = 0.0;          // exact time-t distance
};

// Closed-form pair u_{n,k}, u_{n,k_n} with k_n = (k^2 + pi <n>^{2s} / t)^{1/2}. s < 0.
IllposednessWitness illposedness_witness(std::int64_t n, double k, double s, double t, const DispersionParams& params);

struct IllposednessScan {
  // Smallest n with |k_n - k| <= gap_tolerance.
  std::int64_t n0 = 0;
  std::vector<IllposednessWitness> rows;
  double min_distance = 0.0;  // over rows with n >= n0
  bool pass = false;          // distance >= k (1 - 1e-3) and >= lower bound on every row
};

// Rows at n0 * 2^i up to n_max; the initial gap is monotone in n so n0 comes from bisection.
IllposednessScan illposedness_scan(double k, double s, double t, const DispersionParams& params,
                                   double gap_tolerance = 1e-3, std::int64_t n_max = std::int64_t{1} << 40);

struct InflationRow {
  std::int64_t n = 0;
  double k_n = 0.0;
  double initial = 0.0;      // scaled H^s norm of the datum, = k_n
  double log_final = 0.0;    // log(k_n) + beta T n^4
};

struct InflationTable {
  double beta = 0.0;
  double T = 0.0;
  double s = 0.0;
  std::vector<InflationRow> rows;
};

// Pure-frequency rows with amplitude k_n for n in [n_lo, n_hi].
InflationTable norm_inflation_table(double beta, double T, double s, const std::function<double(std::int64_t)>& k_of_n,
                                    std::int64_t n_lo, std::int64_t n_hi);

struct InflationWitness {
  double delta = 0.0;
  double T = 0.0;  // delta / 2
  std::int64_t n = 0;
  double initial = 0.0;
  double log_final = 0.0;
  bool found = false;
};

// Smallest n <= n_max with initial < delta and final > 1/delta at T = delta/2.
InflationWitness norm_inflation_witness(double beta, double delta, double s,
                                        const std::function<double(std::int64_t)>& k_of_n,
                                        std::int64_t n_max = 100000);

struct InflationCrossCheck {
  double closed_form = 0.0;
  double solver = 0.0;
  double relative_error = 0.0;
};

// N1 (mu = -1) solver against k e^{beta T n^4} at n = 1 for eps^2 = alpha + i beta.
InflationCrossCheck norm_inflation_solver_check(double alpha, double beta, double amplitude, double T, double s,
                                                double dt = 1e-4);

// |m(n)|^2 for the symbol of S_{eps'}(t) - S_eps(t), from the printed expansion.
double symbol_gap(std::int64_t n, double t, const DispersionParams& eps, const DispersionParams& eps_prime);
// min(4, |beta' - beta|^2 T^2 n0^8 + 2 (1 - cos((alpha' - alpha) t n^4))), valid for |n| <= n0, t <= T, beta, beta' <= 0.
double symbol_gap_bound(std::int64_t n, std::int64_t n0, double t, double T, const DispersionParams& eps,
                        const DispersionParams& eps_prime);

struct ContinuityOptions {
  TorusGrid grid{32};
  double dt = 1e-3;
  std::size_t record_every = 10;
};

struct DuhamelDiagnostics {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I4 = 0.0;
  double linear = 0.0;             // |(S_{eps'}(t) - S_eps(t)) u0|
  // |u'(t) - u(t) - (S' - S) u0 - i (I1 + ... + I4)|, trapezoid quadrature error.
  double identity_residual = 0.0;
};

struct ContinuityRow {
  DispersionParams epsilon;
  double epsilon_gap = 0.0;  // |eps_j - eps_0|
  double distance = 0.0;     // sup over recorded t in [0, T]
  DuhamelDiagnostics diagnostics;  // at t = T
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  // The distance table is non-increasing along the sequence.
  bool monotone = false;
  double final_distance = 0.0;
};

// N1 (mu = -1) runs for eps_0 and each eps_j from u0 over [0, T].
ContinuityReport continuity_experiment(const EpsilonExperiment& exp, const SpectralField& u0, double T,
                                       const ContinuityOptions& options = {});

// Datum sum_{|k| <= K} a <k>^{-3} e^{ikx}, scaled to unit H^s norm.
SpectralField cubic_smoothed_datum(const TorusGrid& grid, std::int64_t K, double s);

struct LargeEpsilonCheck {
  double epsilon = 0.0;
  double potential = 0.0;  // |u0|_{L^2}^2 / 2 pi
  double distance = 0.0;   // sup over recorded t of |u^eps - v|_{H^s}
};

// Solver at real eps against v_hat(k, t) = e^{-i t w(k) + i t potential} u0_hat(k).
LargeEpsilonCheck large_epsilon_limit(double epsilon, const SpectralField& u0, double T, double s,
                                      const ContinuityOptions& options = {});

struct UniformFailureRow {
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  double sup_distance = 0.0;     // sup_t |e^{-it eps^2 n^4} - e^{-it eps'^2 n^4}|
  double sup_squared = 0.0;      // sup_t 2 - 2 cos(t (eps^2 - eps'^2) n^4)
  double first_maximizer = 0.0;  // pi / |eps^2 - eps'^2| n^{-4}
  bool maximizer_reached = false;
};

std::vector<UniformFailureRow> uniform_failure_witness(double T, const std::vector<std::pair<double, double>>& eps_pairs,
                                                       std::int64_t n = 1);

struct UniformFailureSolverCheck {
  double formula = 0.0;  // sup over recorded times of the closed-form distance
  double solver = 0.0;   // same sup from two solver runs
  double max_abs_error = 0.0;
};

// Pure-frequency datum <n>^{-s} e^{inx} through the solver at eps and eps'.
UniformFailureSolverCheck uniform_failure_solver_check(double eps, double eps_prime, double T, std::int64_t n,
                                                       double s, double dt = 1e-4);

// min over |z| <= delta0 of |e^z - 1| / |z|, from the boundary circle.
double measured_c1(double delta0 = 0.5);

enum class HorizonCase { Identical, PurePhase, DampingDominated, PhaseDominated };
std::string to_string(HorizonCase c);

struct HorizonRow {
  DispersionParams epsilon;
  double alpha_gap = 0.0;  // alpha_j - alpha
  double beta = 0.0;       // beta_j
  HorizonCase kind = HorizonCase::Identical;
  double tau_extent = 0.0;
  double sup = 0.0;
  double lower_bound = 0.0;
  bool pass = false;
};

struct HorizonReport {
  double delta0 = 0.5;
  double c = 0.3;
  double c1 = 0.0;
  std::vector<HorizonRow> rows;
  double min_sup = 0.0;  // over rows other than Identical
  bool pass = false;
};

// g_j(tau) = |e^{i (alpha_j - alpha) tau} - e^{beta_j tau}| over tau in [0, max(10/|beta_j|, 10 pi/|alpha_j - alpha|)].
HorizonReport infinite_horizon_discontinuity(const EpsilonExperiment& exp, double c = 0.3, double delta0 = 0.5);

// sup of g over [0, extent], grid doubling until stable to tol, then a local golden-section polish.
double horizon_sup(double alpha_gap, double beta, double extent, double tol = 1e-6);

// Seeded eps_j -> eps0 cycling through the three cases, |eps_j^2 - eps0^2| ~ 2^{-j}.
std::vector<DispersionParams> seeded_horizon_sequence(const DispersionParams& eps0, std::size_t count,
                                                      std::uint64_t seed);

// sup over t in [delta, T] of |(F(eps+h) - F(eps-h))/2h - (F(eps+ih) - F(eps-ih))/2ih|_{H^s},
// F(eps)(t) = S_eps(t) u0, sampled at time_samples points.
double holomorphy_residual(cplx eps, double h, double delta, double T, const SpectralField& u0, double s,
                           std::size_t time_samples = 64);

struct HolomorphyStudy {
  cplx epsilon;
  std::vector<double> h;
  std::vector<double> residual;
  std::vector<double> ratios;  // residual[i] / residual[i + 1]
  bool pass = false;           // every ratio in [3.5, 4.5]
};

HolomorphyStudy holomorphy_study(cplx eps, double h0, int halvings, double delta, double T, const SpectralField& u0,
                                 double s);

// Seeded points of Omega with |eps| in [0.5, 1.5], alternating fourth and second quadrant.
std::vector<cplx> seeded_omega_points(std::size_t count, std::uint64_t seed);

struct GronwallFit {
  std::vector<double> rates;  // per eps' in the ball: max_t log(|u(t)| / R) / t
  double max_rate = 0.0;
  double min_rate = 0.0;
  double R = 0.0;
};

// N1 (mu = -1) runs over eps' on a circle of radius r about eps (all in D).
GronwallFit gronwall_fit(cplx eps, double r, std::size_t members, const SpectralField& u0, double T, double s,
                         const ContinuityOptions& options = {});

}  // namespace fnls
