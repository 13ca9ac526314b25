#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fnls/rng.hpp"
#include "fnls/spectral_core.hpp"
#include "fnls/stats.hpp"

namespace fnls {

enum class WindowKind { None, PolynomialBump };

// (1 - s^2)^order with s = 2 (t - t0) / T_w - 1; vanishes at the window ends.
struct TimeWindow {
  WindowKind kind = WindowKind::PolynomialBump;
  int order = 8;

  // fraction = (t - t0) / T_w in [0, 1).
  double weight(double fraction) const;
};

// Coefficients u_hat(k, tau_l) = dx dt sum u(x_j, t_m) e^{-i (k x_j + tau_l (t_m - t0))},
// stored row-major with the k slot outer and the tau slot inner, both in FFT order.
// tau_l = 2 pi l / T_w. Plancherel: int int |u|^2 = (1 / (2 pi T_w)) sum |u_hat|^2.
class SpaceTimeField {
 public:
  SpaceTimeField(TorusGrid grid, double time_window, std::size_t num_time_samples, TimeWindow window);

  const TorusGrid& grid() const { return grid_; }
  double time_window() const { return time_window_; }
  std::size_t num_time_samples() const { return m_; }
  const TimeWindow& window() const { return window_; }

  double time_step() const { return time_window_ / static_cast<double>(m_); }
  std::int64_t tau_index(std::size_t slot) const {
    const auto i = static_cast<std::int64_t>(slot);
    const auto m = static_cast<std::int64_t>(m_);
    return i < m / 2 ? i : i - m;
  }
  double tau(std::size_t slot) const { return kTwoPi * static_cast<double>(tau_index(slot)) / time_window_; }
  double tau_spacing() const { return kTwoPi / time_window_; }
  std::size_t tau_slot(std::int64_t l) const;

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  cplx at(std::int64_t k, std::int64_t l) const { return coeffs_[grid_.slot(k) * m_ + tau_slot(l)]; }
  cplx& at(std::int64_t k, std::int64_t l) { return coeffs_[grid_.slot(k) * m_ + tau_slot(l)]; }

 private:
  TorusGrid grid_;
  double time_window_;
  std::size_t m_;
  TimeWindow window_;
  std::vector<cplx> coeffs_;
};

// Slices at uniform times; the window spans [t_0, t_0 + M dt).
SpaceTimeField spacetime_transform(std::span<const SpectralField> slices, std::span<const double> times,
                                   TimeWindow window);

// Samples u(x, t) on the (grid x [t0, t0 + T_w)) lattice, applies the window, transforms.
SpaceTimeField sample_spacetime(const TorusGrid& grid, double t0, double time_window, std::size_t num_time_samples,
                                TimeWindow window, const std::function<cplx(double, double)>& u);

// Windowed slices u(., t_m) psi(t_m), m = 0 .. M-1.
std::vector<SpectralField> inverse_spacetime(const SpaceTimeField& f);

// Physical values on a grid refined by `oversample` in both directions, row-major (x outer).
std::vector<cplx> physical_values(const SpaceTimeField& f, std::size_t oversample);

// Forward transform of physical values given on f's own lattice.
SpaceTimeField from_physical(const TorusGrid& grid, double time_window, std::size_t num_time_samples,
                             TimeWindow window, std::vector<cplx> values);

double l2_norm(const SpaceTimeField& f);

// (1/(2 pi T_w)) sum <k>^{2s} <tau + w(k)>^{2b} |u_hat|^2, square-rooted. Real symbols only.
double xsb_norm(const SpaceTimeField& f, double s, double b, const DispersionParams& params);

// floor(log2 <x>) for <x> >= 1.
int shell_index(double bracket);

struct DyadicPiece {
  const SpaceTimeField* parent = nullptr;
  int shell_index = 0;
  SpaceTimeField field;
};

DyadicPiece dyadic_project(const SpaceTimeField& f, int m, const DispersionParams& params);
// Largest shell present on f's grid.
int max_shell(const SpaceTimeField& f, const DispersionParams& params);

// (int int |u|^p)^{1/p} by trapezoid on a grid refined twice in each direction (p > 2).
double lebesgue_norm(const SpaceTimeField& f, double p);
// Several exponents from one synthesis.
std::vector<double> lebesgue_norms(const SpaceTimeField& f, std::span<const double> ps);

double embedding_ratio(const SpaceTimeField& f, double p, double b, const DispersionParams& params);

// Smallest power of two M with pi M / T_w >= max_k |w(k)| + reach on the grid.
std::size_t required_time_samples(const TorusGrid& grid, const DispersionParams& params, double time_window,
                                  double reach);

struct RandomFieldSpec {
  int max_mode = 6;
  double time_window = 1.0;
  // Offsets tau + w(k) drawn uniformly from [-detuning, detuning].
  double detuning = 4.0;
  double activation = 0.5;
  std::size_t grid_points = 0;    // 0: auto
  std::size_t time_samples = 0;   // 0: auto
  TimeWindow window{};
};

// psi(t) sum_k c_k e^{i (k x - (w(k) + sigma_k) t)} with random c_k, sigma_k and active modes.
SpaceTimeField random_dispersive_field(const RandomFieldSpec& spec, const DispersionParams& params,
                                       SplitMix64& rng);

// Same field drawn from `rng` but sampled on a finer lattice (refinement in both directions).
SpaceTimeField random_dispersive_field(const RandomFieldSpec& spec, const DispersionParams& params,
                                       SplitMix64& rng, std::size_t refinement);

struct EmbeddingSweep {
  std::size_t trials = 0;
  double max_l4 = 0.0;  // max L^4 / X^{0,5/16}
  double max_l6 = 0.0;  // max L^6 / X^{0,5/12}
};

// Trial i draws from SplitMix64::stream(seed, i), so the result does not depend on `threads`.
EmbeddingSweep embedding_sweep(const DispersionParams& params, std::size_t trials, std::uint64_t seed,
                               const RandomFieldSpec& spec = {}, std::size_t threads = 1);

// Indicator of [-N, N] x [-N^delta, N^delta] with tau spacing N^delta / half_box_points.
SpaceTimeField sharpness_family(int N, int delta);
SpaceTimeField sharpness_family(int N, int delta, std::size_t grid_points, std::size_t half_box_points);

struct NecessityVerdict {
  int q = 2;
  int delta = 2;
  double b = 0.0;
  double b_star = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  bool diverges = false;
};

double necessity_threshold(int q, int delta);
NecessityVerdict necessity_check(int q, int delta, double b);

struct NecessityScan {
  std::vector<NecessityVerdict> verdicts;
  double b_star = 0.0;
  // Midpoint between the last diverging and first bounded grid point.
  double crossover = 0.0;
  bool single_flip = false;
};

NecessityScan necessity_scan(int q, int delta, std::span<const double> b_grid);

struct SharpnessSlopes {
  int delta = 2;
  std::vector<int> Ns;
  std::vector<double> l4, l6;
  std::vector<double> bs;
  std::vector<std::vector<double>> xsb;  // [b][N]
  LinearFit l4_fit, l6_fit;
  std::vector<LinearFit> xsb_fits;
};

SharpnessSlopes sharpness_slopes(int delta, std::span<const int> Ns, std::span<const double> bs);

// |J(f conj g) h|_{X^{s,-5/16}} over the three-term right side with b = 5/16.
double trilinear_inequality_probe(const SpaceTimeField& f, const SpaceTimeField& g, const SpaceTimeField& h,
                                  double s, const DispersionParams& params);

}  // namespace fnls
