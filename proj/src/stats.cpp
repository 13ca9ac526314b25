#include "fnls/stats.hpp"

#include <cmath>
#include <vector>

#include "fnls/errors.hpp"

namespace fnls {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("fit_line: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

LinearFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) lx[i] = std::log(x[i]);
  for (std::size_t i = 0; i < y.size(); ++i) ly[i] = std::log(y[i]);
  return fit_line(lx, ly);
}

PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2, std::span<const double> y) {
  const std::size_t n = y.size();
  if (x1.size() != n || x2.size() != n || n < 3) throw DimensionError("fit_plane: need three or more points");
  // Normal equations on centered data.
  double m1 = 0, m2 = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += x1[i];
    m2 += x2[i];
    my += y[i];
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d1 = x1[i] - m1, d2 = x2[i] - m2, dy = y[i] - my;
    s11 += d1 * d1;
    s12 += d1 * d2;
    s22 += d2 * d2;
    s1y += d1 * dy;
    s2y += d2 * dy;
    syy += dy * dy;
  }
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) < 1e-300) throw DomainError("fit_plane: collinear regressors");
  PlaneFit f;
  f.a = (s22 * s1y - s12 * s2y) / det;
  f.b = (s11 * s2y - s12 * s1y) / det;
  f.c = my - f.a * m1 - f.b * m2;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.a * x1[i] + f.b * x2[i] + f.c);
    sse += r * r;
  }
  f.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
  return f;
}

}  // namespace fnls
