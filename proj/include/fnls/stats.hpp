#pragma once

#include <cstddef>
#include <span>

namespace fnls {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares y = slope x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);
// Fit on (log x, log y); both base e.
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct PlaneFit {
  double a = 0.0;  // coefficient of x1
  double b = 0.0;  // coefficient of x2
  double c = 0.0;
  double r2 = 0.0;
};

// Least squares y = a x1 + b x2 + c.
PlaneFit fit_plane(std::span<const double> x1, std::span<const double> x2, std::span<const double> y);

}  // namespace fnls
