#pragma once

// Dormand-Prince 5(4) with the Hairer-Wanner continuous extension and PI
// step-size control.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "matukuma/errors.hpp"

namespace matukuma::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// Dense output over one accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State<N>, 5> c{};

  double t1() const { return t0 + h; }

  State<N> eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
    return y;
  }
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_max = 0.0;  ///< 0 means |t_end - t0|
  std::size_t max_steps = 2'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

namespace detail {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace detail

/// Integrates y' = rhs(t, y) forward from t0 to t_end. After every accepted
/// step `observer(segment, y_new, dydt_new)` is called; returning false stops
/// the integration at the end of that step. Returns the final time reached.
/// Throws StepSizeCollapse when the step falls below the floating-point
/// resolution of t.
template <std::size_t N, class Rhs, class Observer>
double dopri5(Rhs&& rhs, double t0, State<N> y, double t_end, const StepControl& ctl,
              Observer&& observer, Stats* stats = nullptr) {
  using namespace detail;
  Stats local;
  Stats& st = stats ? *stats : local;
  const double span = t_end - t0;
  if (!(span > 0.0)) return t0;
  const double h_max = ctl.h_max > 0.0 ? ctl.h_max : span;

  auto norm = [&](const State<N>& err, const State<N>& ya, const State<N>& yb) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sk = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (err[i] / sk) * (err[i] / sk);
    }
    return std::sqrt(s / N);
  };

  State<N> k1 = rhs(t0, y);
  st.evaluations += 1;

  // Initial step guess (Hairer-Wanner, II.4).
  double h;
  {
    State<N> zero{};
    const double d0 = norm(y, zero, y) ;
    const double d1n = norm(k1, zero, y);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, h_max);
    State<N> y1{};
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h0 * k1[i];
    State<N> f1 = rhs(t0 + h0, y1);
    st.evaluations += 1;
    State<N> df{};
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - k1[i];
    const double d2 = norm(df, zero, y) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100 * h0, h1, h_max});
  }

  constexpr double safe = 0.9, fac_lo = 0.2, fac_hi = 10.0, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool last_rejected = false;
  double t = t0;
  State<N> k2, k3, k4, k5, k6, k7, y1, ystage;

  for (std::size_t step = 0; step < ctl.max_steps; ++step) {
    bool last = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }
    if (h <= 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "step size collapsed at t = " << t;
      throw StepSizeCollapse(t, os.str());
    }
    for (std::size_t i = 0; i < N; ++i) ystage[i] = y[i] + h * a21 * k1[i];
    k2 = rhs(t + c2 * h, ystage);
    for (std::size_t i = 0; i < N; ++i) ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(t + c3 * h, ystage);
    for (std::size_t i = 0; i < N; ++i)
      ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(t + c4 * h, ystage);
    for (std::size_t i = 0; i < N; ++i)
      ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(t + c5 * h, ystage);
    for (std::size_t i = 0; i < N; ++i)
      ystage[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(t + h, ystage);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(t + h, y1);
    st.evaluations += 6;

    State<N> err{};
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double e = norm(err, y, y1);
    if (!std::isfinite(e)) e = 1e10;

    const double fac11 = std::pow(e, expo1);
    if (e <= 1.0) {
      double fac = fac11 / std::pow(facold, beta);
      fac = std::clamp(fac / safe, 1.0 / fac_hi, 1.0 / fac_lo);
      double h_new = std::min(h / fac, h_max);
      if (last_rejected) h_new = std::min(h_new, h);
      facold = std::max(e, 1e-4);

      DenseSegment<N> seg;
      seg.t0 = t;
      seg.h = h;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.c[0][i] = y[i];
        seg.c[1][i] = ydiff;
        seg.c[2][i] = bspl;
        seg.c[3][i] = ydiff - h * k7[i] - bspl;
        seg.c[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      ++st.accepted;
      t = last ? t_end : t + h;
      y = y1;
      k1 = k7;
      last_rejected = false;
      if (!observer(static_cast<const DenseSegment<N>&>(seg), static_cast<const State<N>&>(y),
                    static_cast<const State<N>&>(k1)))
        return t;
      if (last) return t;
      h = h_new;
    } else {
      ++st.rejected;
      h = h / std::min(1.0 / fac_lo, fac11 / safe);
      last_rejected = true;
    }
  }
  std::ostringstream os;
  os << "maximum number of steps exceeded at t = " << t;
  throw StepSizeCollapse(t, os.str());
}

}  // namespace matukuma::ode
