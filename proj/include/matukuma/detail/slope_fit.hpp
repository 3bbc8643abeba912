#pragma once

#include <cmath>
#include <vector>

namespace matukuma {

namespace detail {
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i0,
                       std::size_t i1) {
  const double m = static_cast<double>(i1 - i0);
  double sx = 0, sy = 0;
  for (std::size_t i = i0; i < i1; ++i) {
    sx += x[i];
    sy += y[i];
  }
  sx /= m;
  sy /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = i0; i < i1; ++i) {
    sxx += (x[i] - sx) * (x[i] - sx);
    sxy += (x[i] - sx) * (y[i] - sy);
  }
  return sxy / sxx;
}
}  // namespace detail

template <class G>
SlopeFit fit_log_slope(G&& g, double r0, double r1, int points) {
  SlopeFit out;
  std::vector<double> x, y;
  bool ok = true;
  const double l0 = std::log(r0), l1 = std::log(r1);
  for (int i = 0; i < points; ++i) {
    const double t = l0 + (l1 - l0) * i / (points - 1);
    const double v = std::abs(g(std::exp(t)));
    if (!(v > 0.0) || !std::isfinite(v)) {
      ok = false;
      continue;
    }
    x.push_back(t);
    y.push_back(std::log(v));
  }
  if (x.size() < 4) return out;
  const std::size_t half = x.size() / 2;
  out.slope = detail::ls_slope(x, y, 0, x.size());
  out.half_lo = detail::ls_slope(x, y, 0, half);
  out.half_hi = detail::ls_slope(x, y, half, x.size());
  const double ref = std::max(std::abs(out.slope), 0.1);
  out.consistent = ok && std::abs(out.half_lo - out.half_hi) <= 0.1 * ref;
  return out;
}

}  // namespace matukuma
