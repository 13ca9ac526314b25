#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fnls/spectral_core.hpp"

namespace fnls {

enum class NonlinearityKind { N1, N2, N3 };

std::string to_string(NonlinearityKind k);
NonlinearityKind parse_nonlinearity(const std::string& name);

// N1 = mu J_eps(|u|^2) u, N2 = mu |u|^2 u, N3 = mu |u|^4 u. mu = 0 gives the linear flow.
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::N1;
  int mu = -1;
};

enum class Integrator { IntegratingFactor, PicardDuhamel };

struct Rational {
  std::int64_t num = 2;
  std::int64_t den = 3;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Rational default_dealias(NonlinearityKind kind);

struct SimulationConfig {
  DispersionParams params;
  NonlinearitySpec nonlinearity;
  TorusGrid grid{256};
  double dt = 1e-3;
  double horizon = 1.0;
  Integrator integrator = Integrator::IntegratingFactor;
  Rational dealias_ratio{2, 3};
  std::vector<double> sobolev_orders{0.0, 1.0};
  std::size_t record_every = 1;
  double divergence_threshold = 1e12;
  // Norm used for Picard differences.
  double contraction_order = 0.0;
};

void validate(const SimulationConfig& config);

// Modes with |k| <= cutoff are kept; the Nyquist mode never is.
std::int64_t dealias_cutoff(const TorusGrid& grid, Rational ratio);
SpectralField dealias(const SpectralField& u, std::int64_t cutoff);

SpectralField eval_nonlinearity(const SpectralField& u, const NonlinearitySpec& spec,
                                const DispersionParams& params, std::int64_t cutoff);
SpectralField eval_nonlinearity(const SpectralField& u, const NonlinearitySpec& spec,
                                const DispersionParams& params);

struct DivergenceReport {
  double time = 0.0;
  double sup_modulus = 0.0;
  std::string message;
};

struct PicardReport {
  int iterations = 0;
  double contraction_ratio = 0.0;
  double final_difference = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<double> mass;
  // NaN where the Hamiltonian is not defined (complex eps, monomial mode).
  std::vector<double> energy;
  std::vector<double> sobolev_orders;
  std::vector<std::vector<double>> sobolev;
  std::optional<DivergenceReport> divergence;
  std::optional<PicardReport> picard;

  void write_csv(std::ostream& os) const;
};

// Lawson RK4 with exact linear factors.
class IntegratingFactorStepper {
 public:
  IntegratingFactorStepper(const SimulationConfig& config, double dt);

  // Throws DivergenceError when the result is non-finite or above the threshold.
  SpectralField step(const SpectralField& u) const;
  double dt() const { return dt_; }
  std::int64_t cutoff() const { return cutoff_; }

 private:
  SpectralField rhs(const SpectralField& u) const;
  void apply(std::vector<cplx> const& factor, SpectralField& u) const;

  SimulationConfig config_;
  double dt_;
  std::int64_t cutoff_;
  std::vector<cplx> full_;
  std::vector<cplx> half_;
};

SpectralField step_integrating_factor(const SpectralField& state, double dt, const SimulationConfig& config);

// Recorded run over [0, horizon]; dispatches on config.integrator.
Trajectory integrate(const SpectralField& u0, const SimulationConfig& config);

// Final state at t_final (negative allowed for real symbols).
SpectralField evolve(const SpectralField& u0, const SimulationConfig& config, double t_final);

Trajectory picard_iterate(const SpectralField& u0, const SimulationConfig& config, double tol, int max_iter);

// Halves min(1, 0.1 (1 + |u0|_{H^s})^{-2}) until the observed ratio is below 0.9.
double choose_picard_horizon(const SpectralField& u0, const SimulationConfig& config, double s);

double mass(const SpectralField& u);

// (1/2)|u_x|^2 + (eps^2/2)|u_xx|^2 + potential, with potential
// (mu/4) J(|u|^2)|u|^2, (mu/4)|u|^4 or (mu/6)|u|^6 integrated on the grid.
double hamiltonian(const SpectralField& u, const DispersionParams& params, const NonlinearitySpec& spec);

// N1 with mu = -1.
double energy(const SpectralField& u, const DispersionParams& params);

// Single-mode solution of the N1, mu = -1 flow with u(0) = k <n>^{-s} e^{inx}.
SpectralField exact_pure_frequency(const TorusGrid& grid, std::int64_t n, double k, double s,
                                   const DispersionParams& params, double t);

}  // namespace fnls
