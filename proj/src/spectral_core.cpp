#include "fnls/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fnls/errors.hpp"
#include "fnls/fft.hpp"

namespace fnls {

TorusGrid::TorusGrid(std::size_t num_points) : n_(num_points) {
  if (n_ < 4 || n_ % 2 != 0)
    throw DimensionError("TorusGrid: num_points must be even and >= 4, got " + std::to_string(n_));
}

std::vector<std::int64_t> TorusGrid::frequencies() const {
  std::vector<std::int64_t> out(n_);
  const auto h = static_cast<std::int64_t>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) out[i] = static_cast<std::int64_t>(i) - h;
  return out;
}

std::size_t TorusGrid::slot(std::int64_t k) const {
  if (!contains(k)) throw DimensionError("TorusGrid: frequency " + std::to_string(k) + " outside grid");
  const auto n = static_cast<std::int64_t>(n_);
  return static_cast<std::size_t>(k >= 0 ? k : k + n);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Dispersive: return "dispersive";
    case Regime::Dissipative: return "dissipative";
    case Regime::BlowUp: return "blow-up";
    case Regime::Resonant: return "resonant";
  }
  return "?";
}

DispersionParams DispersionParams::from_epsilon_squared(cplx eps2) {
  DispersionParams p;
  p.eps2_ = eps2;
  return p;
}

DispersionParams DispersionParams::from_epsilon(cplx eps) {
  // (0 + i theta)^2 has an exact zero imaginary part, so eps = i/n stays resonant.
  return from_epsilon_squared(eps * eps);
}

DispersionParams DispersionParams::monomial(int delta) {
  if (delta < 2) throw DomainError("monomial dispersion needs delta >= 2");
  DispersionParams p;
  p.monomial_ = true;
  p.delta_ = delta;
  p.eps2_ = cplx(0.0, 0.0);
  return p;
}

cplx DispersionParams::epsilon() const {
  cplx e = std::sqrt(eps2_);
  if (e.imag() < 0.0) e = -e;
  return e;
}

std::int64_t DispersionParams::resonant_mode() const {
  if (monomial_ || beta() != 0.0 || alpha() >= 0.0) return 0;
  const double inv = 1.0 / std::sqrt(-alpha());
  const auto n = static_cast<std::int64_t>(std::llround(inv));
  if (n == 0) return 0;
  const double nn = static_cast<double>(n);
  if (std::abs(alpha() * nn * nn + 1.0) <= 1e-12) return n;
  return 0;
}

Regime DispersionParams::regime() const {
  if (monomial_) return Regime::Dispersive;
  if (beta() < 0.0) return Regime::Dissipative;
  if (beta() > 0.0) return Regime::BlowUp;
  if (resonant_mode() != 0) return Regime::Resonant;
  return Regime::Dispersive;
}

std::string DispersionParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (monomial_)
    os << "k^" << delta_;
  else
    os << "eps2=(" << alpha() << "," << beta() << ")";
  return os.str();
}

namespace {

double ipow(double x, int d) {
  double r = 1.0;
  for (int i = 0; i < d; ++i) r *= x;
  return r;
}

}  // namespace

cplx dispersion_symbol(double k, const DispersionParams& params) {
  if (params.monomial_mode()) return ipow(k, params.delta());
  const double k2 = k * k;
  return params.epsilon_squared() * (k2 * k2) + k2;
}

double real_dispersion(double k, const DispersionParams& params) {
  if (!params.real_symbol()) throw DomainError("real dispersion requested for complex eps^2");
  return dispersion_symbol(k, params).real();
}

cplx smoothing_symbol(double k, const DispersionParams& params) {
  if (params.monomial_mode()) throw DomainError("J_eps is not defined in monomial mode");
  return 1.0 / (1.0 + params.epsilon_squared() * (k * k));
}

void require_non_resonant(const DispersionParams& params, const char* where) {
  if (const auto n = params.resonant_mode(); n != 0)
    throw SingularOperatorError(std::string(where) + ": eps = i/" + std::to_string(n) +
                                " makes 1 + eps^2 k^2 vanish, J_eps is not defined");
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
  if (!(a == b)) throw DimensionError(std::string(where) + ": grid mismatch");
}

SpectralField::SpectralField(TorusGrid grid) : grid_(grid), coeffs_(grid.num_points()) {}

SpectralField::SpectralField(TorusGrid grid, std::vector<cplx> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.num_points())
    throw DimensionError("SpectralField: coefficient count does not match grid");
}

SpectralField SpectralField::single_mode(TorusGrid grid, std::int64_t k, cplx value) {
  SpectralField f(grid);
  f.at(k) = value;
  return f;
}

double SpectralField::sup_modulus() const {
  double m = 0.0;
  for (const auto& c : coeffs_) {
    const double a = std::abs(c);
    if (!std::isfinite(a)) return std::numeric_limits<double>::infinity();
    m = std::max(m, a);
  }
  return m;
}

bool SpectralField::finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField +=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(grid_, o.grid_, "SpectralField -=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(cplx c) {
  for (auto& v : coeffs_) v *= c;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx c, SpectralField a) { return a *= c; }

SpectralField forward_transform(const TorusGrid& grid, std::span<const cplx> samples) {
  if (samples.size() != grid.num_points())
    throw DimensionError("forward_transform: " + std::to_string(samples.size()) + " samples for grid of " +
                         std::to_string(grid.num_points()));
  std::vector<cplx> buf(samples.begin(), samples.end());
  fft::transform(buf, fft::kForward);
  const double scale = grid.spacing();
  for (auto& c : buf) c *= scale;
  return SpectralField(grid, std::move(buf));
}

std::vector<cplx> inverse_transform(const SpectralField& field) {
  std::vector<cplx> buf(field.coeffs().begin(), field.coeffs().end());
  fft::transform(buf, fft::kBackward);
  const double scale = 1.0 / kTwoPi;
  for (auto& c : buf) c *= scale;
  return buf;
}

SpectralField apply_semigroup(const SpectralField& field, double t, const DispersionParams& params) {
  if (t < 0.0 && !params.real_symbol())
    throw RegimeError("apply_semigroup: negative time outside the dispersive regime (" +
                      to_string(params.regime()) + ")");
  SpectralField out = field;
  const auto& grid = field.grid();
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx w = dispersion_symbol(static_cast<double>(grid.frequency(i)), params);
    c[i] *= std::exp(cplx(0.0, -t) * w);
  }
  return out;
}

SpectralField apply_smoothing_J(const SpectralField& field, const DispersionParams& params) {
  require_non_resonant(params, "apply_smoothing_J");
  SpectralField out = field;
  const auto& grid = field.grid();
  auto c = out.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] *= smoothing_symbol(static_cast<double>(grid.frequency(i)), params);
  return out;
}

double sobolev_norm(const SpectralField& field, double s) {
  const auto& grid = field.grid();
  auto c = field.coeffs();
  double acc = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double k = static_cast<double>(grid.frequency(i));
    const double weight = s == 0.0 ? 1.0 : std::pow(1.0 + k * k, s);
    acc += weight * std::norm(c[i]);
  }
  return std::sqrt(acc / kTwoPi);
}

double gamma_constant(const DispersionParams& params) {
  if (params.monomial_mode()) throw DomainError("gamma_constant: no eps in monomial mode");
  if (params.resonant_mode() != 0)
    throw SingularOperatorError("gamma_constant: infinite at resonant eps = i/" +
                                std::to_string(params.resonant_mode()));
  const double a = params.alpha();
  const double b = params.beta();
  double best = 1.0;  // n = 0
  // |1 + eps^2 x|^2 is a convex quadratic in x = n^2 with minimum at x*;
  // over the squares the minimum sits at the squares bracketing x*.
  const double denom = a * a + b * b;
  if (denom == 0.0) return best;
  const double xstar = -a / denom;
  if (xstar <= 0.0) return best;
  const double root = std::sqrt(xstar);
  const double lo = std::floor(root);
  for (double n : {lo - 1.0, lo, lo + 1.0, lo + 2.0}) {
    if (n < 1.0) continue;
    best = std::max(best, std::abs(smoothing_symbol(n, params)));
  }
  return best;
}

}  // namespace fnls
