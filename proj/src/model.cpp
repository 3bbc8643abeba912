#include "matukuma/model.hpp"

#include <cmath>
#include <string>

#include "matukuma/errors.hpp"

namespace matukuma {

double critical_exponent(int n, double l) {
  if (n < 3) throw DomainError("critical_exponent: n must be >= 3, got " + std::to_string(n));
  if (!(l > -2.0)) throw DomainError("critical_exponent: l must exceed -2");
  return (n + 2.0 + 2.0 * l) / (n - 2.0);
}

double gamma_star(int n, double l, double sigma) {
  if (!(2.0 + l > 0.0)) throw DomainError("gamma_star: requires 2 + l > 0");
  if (!(n + l > 0.0)) throw DomainError("gamma_star: requires n + l > 0");
  return (sigma - l) * (n + l) / (2.0 + l);
}

double critical_profile(int n, double l, double alpha, double r) {
  const double ps = (n + 2.0 + 2.0 * l) / (n - 2.0);
  const double c = 2.0 * std::pow(alpha, ps - 1.0) / ((ps + 1.0) * (n - 2.0) * (n - 2.0));
  return alpha * std::pow(1.0 + c * std::pow(r, 2.0 + l), -2.0 / (ps - 1.0));
}

Tolerances Tolerances::scaled(double factor) const {
  if (!(factor > 0.0)) throw DomainError("tolerance scale must be positive");
  Tolerances t = *this;
  t.ode_rel *= factor;
  t.ode_abs *= factor;
  t.quad_rel *= factor;
  t.root_abs *= factor;
  return t;
}

void Tolerances::validate() const {
  if (!(ode_rel > 0 && ode_abs > 0 && quad_rel > 0 && root_abs > 0 && class_margin > 0))
    throw ValidationError("tolerances", "all tolerances must be strictly positive");
  if (!(class_margin < 0.5)) throw ValidationError("tolerances", "class_margin must be < 0.5");
  if (class_horizon < 0) throw ValidationError("tolerances", "class_horizon must be >= 0");
}

ProblemSpec::ProblemSpec(int n, double l, double sigma, double p, WeightFunction weight)
    : n_(n), l_(l), sigma_(sigma), p_(p), weight_(std::move(weight)) {
  if (n_ < 3) throw DomainError("ProblemSpec: n must be >= 3");
  if (!(l_ > -2.0 && l_ < 0.0)) throw DomainError("ProblemSpec: l must lie in (-2, 0)");
  if (!(sigma_ > -2.0)) throw DomainError("ProblemSpec: sigma must exceed -2");
  if (!(p_ > 1.0) || !std::isfinite(p_)) throw DomainError("ProblemSpec: p must exceed 1");
}

double ProblemSpec::p_star() const { return critical_exponent(n_, l_); }

DerivedExponents ProblemSpec::derived() const {
  DerivedExponents d{};
  d.p_star = p_star();
  d.sobolev = (n_ + 2.0) / (n_ - 2.0);
  d.slow_rate = (l_ + 2.0) / (p_ - 1.0);
  d.rapid_rate = n_ - 2.0;
  d.w_exponent = 0.5 * (n_ - 2.0);
  d.gamma_star = gamma_star(n_, l_, sigma_);
  return d;
}

bool ProblemSpec::is_critical() const {
  const double ps = p_star();
  return std::abs(p_ - ps) <= 1e-12 * ps;
}

ProblemSpec ProblemSpec::with_p(double p) const { return {n_, l_, sigma_, p, weight_}; }

ProblemSpec ProblemSpec::with_weight(WeightFunction w) const {
  return {n_, l_, sigma_, p_, std::move(w)};
}

}  // namespace matukuma
