#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "matukuma/errors.hpp"
#include "matukuma/model.hpp"
#include "matukuma/ode.hpp"
#include "matukuma/quadrature.hpp"

namespace matukuma {

struct Sample {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;  ///< u'(r)
  double w = 0.0;   ///< r^((n-2)/2) u
  double dw = 0.0;  ///< w'(r)
};

enum class Termination { Crossed, HorizonReached, Underflow };
const char* to_string(Termination t);

struct IntegrateOptions {
  /// Keep integrating past the first zero using (u+)^p.
  bool continue_past_zero = false;
  /// Levels k for which r_{alpha,k} (first r with u = alpha/k) is recorded.
  std::vector<double> r_alpha_ks{2.0};
};

/// Solution of the IVP from the origin. Near r = 0 it is represented by one
/// Picard iterate of the integral equation; beyond r_start by the dense
/// output of the integrator in t = ln r with state (w, r w').
class Trajectory {
 public:
  const ProblemSpec& spec() const noexcept { return spec_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::optional<double> crossing_radius() const noexcept { return crossing_; }
  std::optional<double> r_alpha() const;
  const std::map<double, double>& r_alpha_k() const noexcept { return r_alpha_k_; }
  double horizon() const noexcept { return horizon_; }
  Termination termination() const noexcept { return termination_; }
  double r_start() const noexcept { return r_start_; }
  std::size_t steps() const noexcept { return segments_.size(); }

  /// Interpolated state at 0 <= r <= horizon().
  Sample at(double r) const;
  /// Copy restricted to [0, r]; events beyond r are dropped and the
  /// termination becomes HorizonReached.
  Trajectory truncated(double r) const;

  /// Boundaries of the dense-output segments in r (from r_start).
  std::vector<double> knots() const;

  /// int_a^b g(s, sample(s)) ds along the dense output, with breakpoints at
  /// the integrator steps. Requires 0 <= a <= b <= horizon().
  template <class G>
  double integrate(G&& g, double a, double b, double rel_tol) const;

 private:
  friend Trajectory integrate(const ProblemSpec&, double, const Tolerances&, double,
                              const IntegrateOptions&);
  Trajectory(ProblemSpec spec, double alpha) : spec_(std::move(spec)), alpha_(alpha) {}

  Sample picard(double r) const;
  Sample from_state(double r, const ode::State<2>& y) const;

  ProblemSpec spec_;
  double alpha_;
  double r_start_ = 0.0;
  double horizon_ = 0.0;
  Termination termination_ = Termination::HorizonReached;
  std::optional<double> crossing_;
  std::map<double, double> r_alpha_k_;
  std::vector<Sample> samples_;
  std::vector<ode::DenseSegment<2>> segments_;
};

/// Integrates u'' + (n-1)/r u' + f(r)(u+)^p = 0, u(0) = alpha, u'(0) = 0 up to
/// `horizon`, the first zero (unless continued) or u < 1e-30. alpha = 0 gives
/// the trivial solution.
Trajectory integrate(const ProblemSpec& spec, double alpha, const Tolerances& tol, double horizon,
                     const IntegrateOptions& opts = {});

/// Radius below which one Picard iterate is accurate to the ODE tolerance.
double picard_radius(const ProblemSpec& spec, double alpha, const Tolerances& tol);

/// Estimate of r_alpha from the first Picard iterate: the r where
/// alpha^(p-1)/(n-2) int_0^r {1-(s/r)^(n-2)} s f(s) ds = 1/2.
double estimate_r_alpha(const ProblemSpec& spec, double alpha);

/// max(1e3, 20 * estimate_r_alpha).
double default_horizon(const ProblemSpec& spec, double alpha);

/// First r with u(r) = alpha / k, refined on the dense output. Empty when u
/// does not reach alpha / k in the trajectory. Throws DomainError for k <= 1.
std::optional<double> detect_r_alpha(const Trajectory& traj, double k, double root_abs = 1e-12);

/// u(r) - [alpha - 1/(n-2) int_0^r {1-(s/r)^(n-2)} s f(s) (u+)^p ds].
double residual_integral_equation(const Trajectory& traj, double r, double quad_rel = 1e-12);

struct FluxCheck {
  bool applicable = false;
  double radius = 0.0;
  double value = 0.0;      ///< r^(n-1) u'(r) at the horizon
  double predicted = 0.0;  ///< -m r^(n-2) u(r) from the fitted decay exponent m
  double fitted_exponent = 0.0;
  bool pass = false;  ///< |value| <= 10 |predicted|
};
FluxCheck flux_limit_check(const Trajectory& traj);

/// Least-squares slope of -log u against log r over the decade ending at
/// r_end, on `points` log-spaced dense-output values.
double fit_decay_exponent(const Trajectory& traj, double r_end, int points = 64);

/// CSV with header r,u,du,w,dw and 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

// ---------------------------------------------------------------------------

template <class G>
double Trajectory::integrate(G&& g, double a, double b, double rel_tol) const {
  if (!(0.0 <= a && a <= b && b <= horizon_ * (1 + 1e-14)))
    throw DomainError("Trajectory::integrate: need 0 <= a <= b <= horizon");
  double total = 0.0;
  auto fr = [&](double s) { return g(s, at(s)); };
  if (a < r_start_) {
    const double top = std::min(b, r_start_);
    total += quad::integrate_log(fr, a, top, rel_tol).value;
    a = top;
  }
  if (b > a) {
    std::vector<double> pts{std::log(a)};
    for (const auto& seg : segments_) {
      const double t1 = seg.t1();
      if (t1 > pts.back() && t1 < std::log(b)) pts.push_back(t1);
    }
    pts.push_back(std::log(b));
    auto ft = [&](double t) {
      const double s = std::exp(t);
      return g(s, at(s)) * s;
    };
    const int cap = std::max<int>(20000, 8 * static_cast<int>(pts.size()));
    total += quad::adaptive(ft, pts, rel_tol, 0.0, cap).value;
  }
  return total;
}

}  // namespace matukuma
