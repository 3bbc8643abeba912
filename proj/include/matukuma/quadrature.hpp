#pragma once

#include <functional>
#include <span>
#include <vector>

namespace matukuma::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature. The initial partition is
/// given by `points` (sorted, at least two). Stops when the summed error
/// estimate is below max(abs_tol, rel_tol * |value|). Throws QuadratureError
/// carrying the worst subinterval when `max_intervals` is exhausted.
Result adaptive(const Integrand& f, std::span<const double> points, double rel_tol,
                double abs_tol = 0.0, int max_intervals = 20000);

Result integrate(const Integrand& f, double a, double b, double rel_tol, double abs_tol = 0.0);

/// Same as `integrate`, with the initial partition split at powers of ten.
/// For a == 0 the first panel is [0, b * 1e-12]. Suited to integrands with
/// power-law behaviour over many decades.
Result integrate_log(const Integrand& f, double a, double b, double rel_tol,
                     double abs_tol = 0.0);

/// Decade breakpoints used by integrate_log.
std::vector<double> log_breakpoints(double a, double b);

}  // namespace matukuma::quad
