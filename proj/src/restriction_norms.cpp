#include "fnls/restriction_norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fnls/errors.hpp"
#include "fnls/fft.hpp"
#include "fnls/parallel.hpp"

namespace fnls {

namespace {

std::size_t next_pow2(double x) {
  std::size_t p = 1;
  while (static_cast<double>(p) < x) p <<= 1;
  return p;
}

// Maps a frequency index from an array of size n into one of size big (FFT order).
std::size_t reslot(std::int64_t index, std::size_t big) {
  return static_cast<std::size_t>(index >= 0 ? index : index + static_cast<std::int64_t>(big));
}

void require_real(const DispersionParams& params, const char* where) {
  if (!params.real_symbol())
    throw DomainError(std::string(where) + ": X^{s,b} is only defined here for real eps");
}

}  // namespace

double TimeWindow::weight(double fraction) const {
  if (kind == WindowKind::None) return 1.0;
  const double s = 2.0 * fraction - 1.0;
  const double base = 1.0 - s * s;
  return base <= 0.0 ? 0.0 : std::pow(base, order);
}

SpaceTimeField::SpaceTimeField(TorusGrid grid, double time_window, std::size_t num_time_samples, TimeWindow window)
    : grid_(grid), time_window_(time_window), m_(num_time_samples), window_(window),
      coeffs_(grid.num_points() * num_time_samples) {
  if (!(time_window > 0.0)) throw DomainError("SpaceTimeField: time window must be positive");
  if (num_time_samples < 2 || num_time_samples % 2 != 0)
    throw DimensionError("SpaceTimeField: time samples must be even and >= 2");
}

std::size_t SpaceTimeField::tau_slot(std::int64_t l) const {
  const auto m = static_cast<std::int64_t>(m_);
  if (l < -m / 2 || l >= m / 2) throw DimensionError("SpaceTimeField: tau index outside grid");
  return static_cast<std::size_t>(l >= 0 ? l : l + m);
}

SpaceTimeField from_physical(const TorusGrid& grid, double time_window, std::size_t num_time_samples,
                             TimeWindow window, std::vector<cplx> values) {
  SpaceTimeField f(grid, time_window, num_time_samples, window);
  const std::size_t n = grid.num_points();
  if (values.size() != n * num_time_samples) throw DimensionError("from_physical: size mismatch");
  fft::transform_2d(values, n, num_time_samples, fft::kForward);
  const double scale = grid.spacing() * f.time_step();
  auto c = f.coeffs();
  for (std::size_t i = 0; i < values.size(); ++i) c[i] = values[i] * scale;
  return f;
}

SpaceTimeField spacetime_transform(std::span<const SpectralField> slices, std::span<const double> times,
                                   TimeWindow window) {
  if (slices.size() != times.size()) throw DimensionError("spacetime_transform: slices and times differ in length");
  if (slices.size() < 2) throw DimensionError("spacetime_transform: need two or more slices");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw DomainError("spacetime_transform: times must increase");
  for (std::size_t m = 0; m < times.size(); ++m)
    if (std::abs(times[m] - times.front() - dt * static_cast<double>(m)) > 1e-9 * dt)
      throw DomainError("spacetime_transform: non-uniform time sampling");
  const TorusGrid grid = slices.front().grid();
  const std::size_t n = grid.num_points();
  const std::size_t mcount = slices.size();
  SpaceTimeField f(grid, dt * static_cast<double>(mcount), mcount, window);
  auto c = f.coeffs();
  std::vector<cplx> row(mcount);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < mcount; ++m) {
      require_same_grid(slices[m].grid(), grid, "spacetime_transform");
      const double w = window.weight(static_cast<double>(m) / static_cast<double>(mcount));
      row[m] = slices[m].coeffs()[i] * w;
    }
    fft::transform(row, fft::kForward);
    for (std::size_t m = 0; m < mcount; ++m) c[i * mcount + m] = row[m] * dt;
  }
  return f;
}

SpaceTimeField sample_spacetime(const TorusGrid& grid, double t0, double time_window, std::size_t num_time_samples,
                                TimeWindow window, const std::function<cplx(double, double)>& u) {
  const std::size_t n = grid.num_points();
  std::vector<cplx> values(n * num_time_samples);
  const double dt = time_window / static_cast<double>(num_time_samples);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < num_time_samples; ++m) {
      const double frac = static_cast<double>(m) / static_cast<double>(num_time_samples);
      values[j * num_time_samples + m] = u(grid.point(j), t0 + dt * static_cast<double>(m)) * window.weight(frac);
    }
  return from_physical(grid, time_window, num_time_samples, window, std::move(values));
}

std::vector<SpectralField> inverse_spacetime(const SpaceTimeField& f) {
  const std::size_t n = f.grid().num_points();
  const std::size_t mcount = f.num_time_samples();
  std::vector<SpectralField> out(mcount, SpectralField(f.grid()));
  std::vector<cplx> row(mcount);
  auto c = f.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < mcount; ++m) row[m] = c[i * mcount + m];
    fft::transform(row, fft::kBackward);
    for (std::size_t m = 0; m < mcount; ++m) out[m].coeffs()[i] = row[m] / f.time_window();
  }
  return out;
}

std::vector<cplx> physical_values(const SpaceTimeField& f, std::size_t oversample) {
  const std::size_t n = f.grid().num_points();
  const std::size_t mcount = f.num_time_samples();
  const std::size_t nb = n * oversample;
  const std::size_t mb = mcount * oversample;
  std::vector<cplx> big(nb * mb);
  auto c = f.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ib = reslot(f.grid().frequency(i), nb);
    for (std::size_t m = 0; m < mcount; ++m) big[ib * mb + reslot(f.tau_index(m), mb)] = c[i * mcount + m];
  }
  fft::transform_2d(big, nb, mb, fft::kBackward);
  const double scale = 1.0 / (kTwoPi * f.time_window());
  for (auto& v : big) v *= scale;
  return big;
}

double l2_norm(const SpaceTimeField& f) {
  double acc = 0.0;
  for (const auto& v : f.coeffs()) acc += std::norm(v);
  return std::sqrt(acc / (kTwoPi * f.time_window()));
}

double xsb_norm(const SpaceTimeField& f, double s, double b, const DispersionParams& params) {
  require_real(params, "xsb_norm");
  const std::size_t n = f.grid().num_points();
  const std::size_t mcount = f.num_time_samples();
  auto c = f.coeffs();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(f.grid().frequency(i));
    const double wk = real_dispersion(k, params);
    const double space = s == 0.0 ? 1.0 : std::pow(1.0 + k * k, s);
    for (std::size_t m = 0; m < mcount; ++m) {
      const double x = f.tau(m) + wk;
      const double time = b == 0.0 ? 1.0 : std::pow(1.0 + x * x, b);
      acc += space * time * std::norm(c[i * mcount + m]);
    }
  }
  return std::sqrt(acc / (kTwoPi * f.time_window()));
}

int shell_index(double bracket) {
  if (!(bracket >= 1.0)) throw DomainError("shell_index: bracket below 1");
  return std::ilogb(bracket);
}

DyadicPiece dyadic_project(const SpaceTimeField& f, int m, const DispersionParams& params) {
  require_real(params, "dyadic_project");
  DyadicPiece piece{&f, m, f};
  const std::size_t n = f.grid().num_points();
  const std::size_t mcount = f.num_time_samples();
  auto c = piece.field.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    const double wk = real_dispersion(static_cast<double>(f.grid().frequency(i)), params);
    for (std::size_t l = 0; l < mcount; ++l)
      if (shell_index(japanese(f.tau(l) + wk)) != m) c[i * mcount + l] = 0.0;
  }
  return piece;
}

int max_shell(const SpaceTimeField& f, const DispersionParams& params) {
  require_real(params, "max_shell");
  int top = 0;
  for (std::size_t i = 0; i < f.grid().num_points(); ++i) {
    const double wk = real_dispersion(static_cast<double>(f.grid().frequency(i)), params);
    for (std::size_t l = 0; l < f.num_time_samples(); ++l) top = std::max(top, shell_index(japanese(f.tau(l) + wk)));
  }
  return top;
}

std::vector<double> lebesgue_norms(const SpaceTimeField& f, std::span<const double> ps) {
  const std::size_t os = 2;
  const std::vector<cplx> u = physical_values(f, os);
  const double cell = (kTwoPi / static_cast<double>(f.grid().num_points() * os)) *
                      (f.time_window() / static_cast<double>(f.num_time_samples() * os));
  std::vector<double> out;
  for (double p : ps) {
    if (!(p >= 1.0)) throw DomainError("lebesgue_norm: p must be >= 1");
    double acc = 0.0;
    const bool even = p == std::floor(p) && static_cast<long>(p) % 2 == 0;
    for (const auto& v : u) {
      const double a2 = std::norm(v);
      acc += even ? std::pow(a2, p / 2.0) : std::pow(std::sqrt(a2), p);
    }
    out.push_back(std::pow(acc * cell, 1.0 / p));
  }
  return out;
}

double lebesgue_norm(const SpaceTimeField& f, double p) {
  const double ps[1] = {p};
  return lebesgue_norms(f, ps).front();
}

double embedding_ratio(const SpaceTimeField& f, double p, double b, const DispersionParams& params) {
  const double den = xsb_norm(f, 0.0, b, params);
  if (den == 0.0) throw DomainError("embedding_ratio: zero field");
  return lebesgue_norm(f, p) / den;
}

std::size_t required_time_samples(const TorusGrid& grid, const DispersionParams& params, double time_window,
                                   double reach) {
  double wmax = 0.0;
  for (auto k : grid.frequencies()) wmax = std::max(wmax, std::abs(dispersion_symbol(static_cast<double>(k), params)));
  return std::max<std::size_t>(2, next_pow2(time_window * (wmax + reach) / kTwoPi * 2.0));
}

namespace {

struct FieldDraw {
  std::vector<std::int64_t> modes;
  std::vector<cplx> amps;
  std::vector<double> detune;
};

FieldDraw draw_field(const RandomFieldSpec& spec, SplitMix64& rng) {
  FieldDraw d;
  for (std::int64_t k = -spec.max_mode; k <= spec.max_mode; ++k) {
    const bool active = rng.uniform() < spec.activation;
    const cplx a(rng.normal(), rng.normal());
    const double sigma = rng.uniform(-spec.detuning, spec.detuning);
    if (!active) continue;
    d.modes.push_back(k);
    d.amps.push_back(a);
    d.detune.push_back(sigma);
  }
  if (d.modes.empty()) {
    d.modes.push_back(0);
    d.amps.push_back(1.0);
    d.detune.push_back(0.0);
  }
  return d;
}

}  // namespace

SpaceTimeField random_dispersive_field(const RandomFieldSpec& spec, const DispersionParams& params, SplitMix64& rng,
                                       std::size_t refinement) {
  require_real(params, "random_dispersive_field");
  const FieldDraw d = draw_field(spec, rng);
  const std::size_t nx = (spec.grid_points ? spec.grid_points : std::max<std::size_t>(8, next_pow2(4.0 * spec.max_mode + 1))) *
                         refinement;
  const TorusGrid grid(nx);
  const double reach = spec.detuning + 40.0 * kTwoPi / spec.time_window;
  // The tau lattice only has to hold the populated modes; products computed on a
  // twice refined lattice still fit.
  double wmax = 0.0;
  for (std::int64_t k = -spec.max_mode; k <= spec.max_mode; ++k)
    wmax = std::max(wmax, std::abs(real_dispersion(static_cast<double>(k), params)));
  const std::size_t base_m = spec.time_samples
                                 ? spec.time_samples
                                 : std::max<std::size_t>(8, next_pow2(spec.time_window * (wmax + reach) / std::numbers::pi));
  const std::size_t mcount = base_m * refinement;
  const double dt = spec.time_window / static_cast<double>(mcount);
  std::vector<SpectralField> slices;
  std::vector<double> times;
  slices.reserve(mcount);
  for (std::size_t m = 0; m < mcount; ++m) {
    const double t = dt * static_cast<double>(m);
    SpectralField s(grid);
    for (std::size_t q = 0; q < d.modes.size(); ++q) {
      const double w = real_dispersion(static_cast<double>(d.modes[q]), params) + d.detune[q];
      s.at(d.modes[q]) = kTwoPi * d.amps[q] * std::exp(cplx(0.0, -w * t));
    }
    slices.push_back(std::move(s));
    times.push_back(t);
  }
  return spacetime_transform(slices, times, spec.window);
}

SpaceTimeField random_dispersive_field(const RandomFieldSpec& spec, const DispersionParams& params, SplitMix64& rng) {
  return random_dispersive_field(spec, params, rng, 1);
}

SpaceTimeField sharpness_family(int N, int delta, std::size_t grid_points, std::size_t half_box_points) {
  if (N < 2 || delta < 2) throw DomainError("sharpness_family: need N >= 2 and delta >= 2");
  const TorusGrid grid(grid_points);
  if (!grid.contains(-N) || !grid.contains(N)) throw DimensionError("sharpness_family: box exceeds spatial grid");
  const std::size_t mcount = 4 * half_box_points;
  const double top = std::pow(static_cast<double>(N), delta);
  const double dtau = top / static_cast<double>(half_box_points);
  SpaceTimeField f(grid, kTwoPi / dtau, mcount, TimeWindow{WindowKind::None, 0});
  const auto r = static_cast<std::int64_t>(half_box_points);
  for (std::int64_t k = -N; k <= N; ++k)
    for (std::int64_t l = -r; l <= r; ++l) f.at(k, l) = 1.0;
  return f;
}

SpaceTimeField sharpness_family(int N, int delta) {
  const std::size_t grid_points = std::max<std::size_t>(256, next_pow2(4.0 * N));
  return sharpness_family(N, delta, grid_points, 32);
}

double necessity_threshold(int q, int delta) {
  return static_cast<double>(q - 1) * (1.0 + delta) / (2.0 * q * delta);
}

namespace {

constexpr int kSharpNs[] = {4, 8, 16, 32, 64};

}  // namespace

EmbeddingSweep embedding_sweep(const DispersionParams& params, std::size_t trials, std::uint64_t seed,
                               const RandomFieldSpec& spec, std::size_t threads) {
  std::vector<double> l4(trials), l6(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    const SpaceTimeField f = random_dispersive_field(spec, params, rng);
    l4[i] = embedding_ratio(f, 4, 5.0 / 16, params);
    l6[i] = embedding_ratio(f, 6, 5.0 / 12, params);
  });
  EmbeddingSweep out;
  out.trials = trials;
  for (std::size_t i = 0; i < trials; ++i) {
    out.max_l4 = std::max(out.max_l4, l4[i]);
    out.max_l6 = std::max(out.max_l6, l6[i]);
  }
  return out;
}

NecessityVerdict necessity_check(int q, int delta, double b) {
  if (q < 2 || delta < 2) throw DomainError("necessity_check: need q >= 2 and delta >= 2");
  const auto params = DispersionParams::monomial(delta);
  std::vector<double> ns, ratios;
  for (int N : kSharpNs) {
    const SpaceTimeField f = sharpness_family(N, delta);
    ns.push_back(N);
    ratios.push_back(lebesgue_norm(f, 2.0 * q) / xsb_norm(f, 0.0, b, params));
  }
  const LinearFit fit = fit_loglog(ns, ratios);
  return NecessityVerdict{q, delta, b, necessity_threshold(q, delta), fit.slope, fit.r2, fit.slope > 0.0};
}

NecessityScan necessity_scan(int q, int delta, std::span<const double> b_grid) {
  const auto params = DispersionParams::monomial(delta);
  std::vector<double> ns, lp;
  std::vector<SpaceTimeField> fields;
  for (int N : kSharpNs) {
    fields.push_back(sharpness_family(N, delta));
    ns.push_back(N);
    lp.push_back(lebesgue_norm(fields.back(), 2.0 * q));
  }
  NecessityScan scan;
  scan.b_star = necessity_threshold(q, delta);
  for (double b : b_grid) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i < fields.size(); ++i) ratios.push_back(lp[i] / xsb_norm(fields[i], 0.0, b, params));
    const LinearFit fit = fit_loglog(ns, ratios);
    scan.verdicts.push_back({q, delta, b, scan.b_star, fit.slope, fit.r2, fit.slope > 0.0});
  }
  int flips = 0;
  for (std::size_t i = 1; i < scan.verdicts.size(); ++i)
    if (scan.verdicts[i].diverges != scan.verdicts[i - 1].diverges) {
      ++flips;
      scan.crossover = 0.5 * (scan.verdicts[i].b + scan.verdicts[i - 1].b);
    }
  scan.single_flip = flips == 1 && scan.verdicts.front().diverges && !scan.verdicts.back().diverges;
  return scan;
}

SharpnessSlopes sharpness_slopes(int delta, std::span<const int> Ns, std::span<const double> bs) {
  const auto params = DispersionParams::monomial(delta);
  SharpnessSlopes out;
  out.delta = delta;
  out.Ns.assign(Ns.begin(), Ns.end());
  out.bs.assign(bs.begin(), bs.end());
  out.xsb.assign(bs.size(), {});
  std::vector<double> ns;
  const double ps[2] = {4.0, 6.0};
  for (int N : Ns) {
    const SpaceTimeField f = sharpness_family(N, delta);
    const auto norms = lebesgue_norms(f, ps);
    out.l4.push_back(norms[0]);
    out.l6.push_back(norms[1]);
    for (std::size_t j = 0; j < bs.size(); ++j) out.xsb[j].push_back(xsb_norm(f, 0.0, bs[j], params));
    ns.push_back(N);
  }
  out.l4_fit = fit_loglog(ns, out.l4);
  out.l6_fit = fit_loglog(ns, out.l6);
  for (const auto& row : out.xsb) out.xsb_fits.push_back(fit_loglog(ns, row));
  return out;
}

double trilinear_inequality_probe(const SpaceTimeField& f, const SpaceTimeField& g, const SpaceTimeField& h,
                                  double s, const DispersionParams& params) {
  require_real(params, "trilinear_inequality_probe");
  if (s < 0.0) throw DomainError("trilinear_inequality_probe: s must be >= 0");
  require_same_grid(f.grid(), g.grid(), "trilinear_inequality_probe");
  require_same_grid(f.grid(), h.grid(), "trilinear_inequality_probe");
  if (f.num_time_samples() != g.num_time_samples() || f.num_time_samples() != h.num_time_samples() ||
      f.time_window() != g.time_window() || f.time_window() != h.time_window())
    throw DimensionError("trilinear_inequality_probe: time lattices differ");
  const double b = 5.0 / 16.0;
  const double rhs = xsb_norm(f, s, b, params) * xsb_norm(g, 0, b, params) * xsb_norm(h, 0, b, params) +
                     xsb_norm(f, 0, b, params) * xsb_norm(g, s, b, params) * xsb_norm(h, 0, b, params) +
                     xsb_norm(f, 0, b, params) * xsb_norm(g, 0, b, params) * xsb_norm(h, s, b, params);
  if (rhs == 0.0) throw DomainError("trilinear_inequality_probe: zero right side");

  const std::size_t os = 2;
  const TorusGrid fine(f.grid().num_points() * os);
  const std::size_t mf = f.num_time_samples() * os;
  const auto uf = physical_values(f, os);
  const auto ug = physical_values(g, os);
  const auto uh = physical_values(h, os);
  std::vector<cplx> prod(uf.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = uf[i] * std::conj(ug[i]);
  SpaceTimeField rho = from_physical(fine, f.time_window(), mf, f.window(), std::move(prod));
  auto rc = rho.coeffs();
  for (std::size_t i = 0; i < fine.num_points(); ++i) {
    const cplx j = smoothing_symbol(static_cast<double>(fine.frequency(i)), params);
    for (std::size_t m = 0; m < mf; ++m) rc[i * mf + m] *= j;
  }
  std::vector<cplx> smooth = physical_values(rho, 1);
  for (std::size_t i = 0; i < smooth.size(); ++i) smooth[i] *= uh[i];
  const SpaceTimeField lhs_field = from_physical(fine, f.time_window(), mf, f.window(), std::move(smooth));
  return xsb_norm(lhs_field, s, -b, params) / rhs;
}

}  // namespace fnls
