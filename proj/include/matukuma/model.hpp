#pragma once

#include "matukuma/weights.hpp"

namespace matukuma {

/// (n + 2 + 2l) / (n - 2). Throws DomainError for n < 3 or l <= -2.
double critical_exponent(int n, double l);

/// (sigma - l)(n + l) / (2 + l): the upper bound on the small-r exponent of h
/// under which the large-alpha growth of the weighted h-integral holds.
double gamma_star(int n, double l, double sigma);

/// Closed-form solution of u'' + (n-1)/r u' + r^l u^{p*} = 0, u(0) = alpha,
/// at the critical exponent. No validation; see scan::phi_closed_form.
double critical_profile(int n, double l, double alpha, double r);

struct DerivedExponents {
  double p_star;      ///< critical exponent for the weight decay l
  double sobolev;     ///< (n + 2) / (n - 2)
  double slow_rate;   ///< (l + 2) / (p - 1), far-field decay of slow solutions
  double rapid_rate;  ///< n - 2
  double w_exponent;  ///< (n - 2) / 2
  double gamma_star;
};

struct Tolerances {
  double ode_rel = 1e-10;
  double ode_abs = 1e-12;
  double quad_rel = 1e-10;
  double root_abs = 1e-12;
  /// Fixed classification horizon; 0 selects the adaptive horizon.
  double class_horizon = 0.0;
  double class_margin = 0.15;

  /// Multiplies every tolerance (not the margin or the horizon).
  Tolerances scaled(double factor) const;
  void validate() const;
};

/// One IVP family u'' + (n-1)/r u' + f(r) (u+)^p = 0. Immutable.
class ProblemSpec {
 public:
  ProblemSpec(int n, double l, double sigma, double p, WeightFunction weight);

  int n() const noexcept { return n_; }
  double l() const noexcept { return l_; }
  double sigma() const noexcept { return sigma_; }
  double p() const noexcept { return p_; }
  const WeightFunction& weight() const noexcept { return weight_; }

  double p_star() const;
  DerivedExponents derived() const;
  /// True when p equals p* to 1e-12 relative.
  bool is_critical() const;
  double w_exponent() const noexcept { return 0.5 * (n_ - 2); }

  ProblemSpec with_p(double p) const;
  ProblemSpec with_weight(WeightFunction w) const;

 private:
  int n_;
  double l_;
  double sigma_;
  double p_;
  WeightFunction weight_;
};

}  // namespace matukuma
