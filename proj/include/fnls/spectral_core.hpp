#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fnls {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// <k> = (1 + k^2)^{1/2}
inline double japanese(double k) { return std::sqrt(1.0 + k * k); }

class TorusGrid {
 public:
  explicit TorusGrid(std::size_t num_points);

  std::size_t num_points() const { return n_; }
  double spacing() const { return kTwoPi / static_cast<double>(n_); }
  double point(std::size_t j) const { return spacing() * static_cast<double>(j); }

  // Ascending: -n/2 ... n/2-1.
  std::vector<std::int64_t> frequencies() const;

  // Coefficients are stored in FFT order; these map storage slot <-> k.
  std::int64_t frequency(std::size_t slot) const {
    const auto i = static_cast<std::int64_t>(slot);
    const auto n = static_cast<std::int64_t>(n_);
    return i < n / 2 ? i : i - n;
  }
  std::size_t slot(std::int64_t k) const;
  bool contains(std::int64_t k) const {
    const auto h = static_cast<std::int64_t>(n_ / 2);
    return k >= -h && k < h;
  }
  std::int64_t nyquist() const { return -static_cast<std::int64_t>(n_ / 2); }

  bool operator==(const TorusGrid&) const = default;

 private:
  std::size_t n_;
};

enum class Regime { Dispersive, Dissipative, BlowUp, Resonant };

std::string to_string(Regime r);

// eps^2 = alpha + i beta is the stored datum; eps is derived.
class DispersionParams {
 public:
  DispersionParams() = default;

  static DispersionParams from_epsilon_squared(cplx eps2);
  static DispersionParams from_epsilon(cplx eps);
  static DispersionParams real(double eps) { return from_epsilon(cplx(eps, 0.0)); }
  // Pure k^delta dispersion.
  static DispersionParams monomial(int delta);

  cplx epsilon_squared() const { return eps2_; }
  double alpha() const { return eps2_.real(); }
  double beta() const { return eps2_.imag(); }
  // Principal root, Im >= 0.
  cplx epsilon() const;
  int delta() const { return delta_; }
  bool monomial_mode() const { return monomial_; }

  Regime regime() const;
  // Resonant index n with eps = i/n, or 0.
  std::int64_t resonant_mode() const;
  // Real dispersion symbol: real eps, or monomial mode.
  bool real_symbol() const { return monomial_ || beta() == 0.0; }
  // eps real and >= 0 (alpha >= 0, beta == 0), quartic mode.
  bool real_epsilon() const { return !monomial_ && beta() == 0.0 && alpha() >= 0.0; }

  std::string describe() const;

 private:
  cplx eps2_{1.0, 0.0};
  int delta_ = 4;
  bool monomial_ = false;
};

// w(k) = eps^2 k^4 + k^2, or k^delta.
cplx dispersion_symbol(double k, const DispersionParams& params);
// Real part of the symbol; throws DomainError unless params.real_symbol().
double real_dispersion(double k, const DispersionParams& params);

// 1/(1 + eps^2 k^2)
cplx smoothing_symbol(double k, const DispersionParams& params);

class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);
  SpectralField(TorusGrid grid, std::vector<cplx> coeffs);

  static SpectralField single_mode(TorusGrid grid, std::int64_t k, cplx value);

  const TorusGrid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }
  const std::vector<cplx>& data() const { return coeffs_; }

  cplx at(std::int64_t k) const { return coeffs_[grid_.slot(k)]; }
  cplx& at(std::int64_t k) { return coeffs_[grid_.slot(k)]; }

  double sup_modulus() const;
  bool finite() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx c);

 private:
  TorusGrid grid_;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx c, SpectralField a);

// u_hat(k) = (2 pi / n) sum_j u(x_j) e^{-i k x_j}
SpectralField forward_transform(const TorusGrid& grid, std::span<const cplx> samples);
// u(x_j) = (1 / 2 pi) sum_k u_hat(k) e^{i k x_j}
std::vector<cplx> inverse_transform(const SpectralField& field);

// Multiplies mode k by exp(-i t w(k)). Negative t needs beta == 0.
SpectralField apply_semigroup(const SpectralField& field, double t, const DispersionParams& params);
SpectralField apply_smoothing_J(const SpectralField& field, const DispersionParams& params);

// ((1/2pi) sum <k>^{2s} |u_hat|^2)^{1/2}
double sobolev_norm(const SpectralField& field, double s);

// sup_n |1/(1 + eps^2 n^2)|
double gamma_constant(const DispersionParams& params);

void require_non_resonant(const DispersionParams& params, const char* where);
void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

}  // namespace fnls
