#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace matukuma {

class ProblemSpec;

/// Compactly supported bump k(r) = r^gamma q(r) on [0, c], with q a piecewise
/// cubic. k vanishes identically for r > c.
class BumpFunction {
 public:
  /// q(x) = sum_i coeffs[i] (x - x0)^i on [x0, x1].
  struct Piece {
    double x0 = 0.0;
    double x1 = 0.0;
    std::array<double, 4> coeffs{};
  };

  /// Hermite data for the default C^1 shape: q(0) = amplitude, q'(0) = 0,
  /// q'(a) = -slope_a, q'(b) = slope_b, q'(c) = 0 and q = 0 at a, b, c.
  struct Shape {
    double amplitude = 0.1;
    double slope_a = 2.0;
    double slope_b = 6.0;
  };

  static BumpFunction hermite(double a, double b, double c, double gamma, Shape shape);

  /// Explicit pieces; they must tile [0, c] with breakpoints at a and b (more
  /// breakpoints are allowed). Runs validate().
  BumpFunction(double a, double b, double c, double gamma, std::vector<Piece> pieces);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double gamma() const noexcept { return gamma_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  /// Hermite shape when built by hermite(), empty for explicit pieces.
  const std::optional<Shape>& shape() const noexcept { return shape_; }

  double q(double r) const;
  double operator()(double r) const;

  /// Integral of k over [x0, x1] (clipped to [0, c]), in closed form.
  double integral(double x0, double x1) const;
  /// Integral of s^power k(s) over [x0, x1] (clipped to [0, c]). Requires
  /// gamma + power > -1 when x0 == 0.
  double weighted_integral(double x0, double x1, double power) const;

  /// Re-checks conditions 2.1(a), (b), (c) and (e); throws ValidationError
  /// naming the clause ("2.1a", ...).
  void validate() const;

 private:
  double a_, b_, c_, gamma_;
  std::vector<Piece> pieces_;
  std::optional<Shape> shape_;
};

struct PurePower {
  double l;
};

/// f = C{(p - (n+l)/(n-2)) + (l+2p)/(n-2) (1+r^2)^-1}(1+r^2)^(l/2),
/// C = (l+2)(n-2)/(p-1)^2.
struct ExampleIII {
  int n;
  double l;
  double p;
};

/// f = (c1 + c2 r^2)^(gamma/2) (c3 + c4 r^2)^(nu/2), all c_i > 0.
struct ProductPower {
  double c1, c2, c3, c4, gamma, nu;
};

/// f = (A + B (1+r^2)^nu) (1+r^2)^mu.
struct ShiftedPower {
  double A, B, mu, nu;
};

/// f = r^l (1 + epsilon (p*+1) K(r)), K(r) = int_0^r s^-(n+l) k(s) ds.
struct Constructed {
  BumpFunction k;
  double epsilon;
  double l;
  int n;
  double p_star;
  double K_total;  ///< K(c); K is constant beyond the support of k
};

class WeightFunction {
 public:
  using Family = std::variant<PurePower, ExampleIII, ProductPower, ShiftedPower, Constructed>;

  /// `scale` multiplies f. With analytic_derivative = false, h is evaluated
  /// by central differences.
  explicit WeightFunction(Family family, double scale = 1.0, bool analytic_derivative = true);

  const Family& family() const noexcept { return family_; }
  double scale() const noexcept { return scale_; }
  bool has_analytic_derivative() const noexcept { return analytic_; }
  std::string family_name() const;

  WeightFunction scaled(double factor) const;
  WeightFunction with_numeric_derivative() const;

  double f(double r) const;
  double df(double r) const;
  /// r f'(r)/f(r) - asymptotic_l(), evaluated without cancellation.
  double log_slope_excess(double r) const;

  /// Exponent of f at infinity.
  double asymptotic_l() const;
  /// Exponent of f at the origin.
  double small_r_exponent() const;
  /// Radii at which f or h is not smooth (knots of a bump); may be empty.
  std::vector<double> breakpoints() const;

 private:
  Family family_;
  double scale_;
  bool analytic_;
};

WeightFunction make_example_iii(int n, double l, double p);

/// f(r); r == 0 only when f stays finite there. Throws DomainError for r < 0.
double eval_f(const WeightFunction& w, double r);
/// h(r) = r (r^-l f)' with the given l.
double eval_h(const WeightFunction& w, double r, double l);
/// h with l = w.asymptotic_l().
double eval_h(const WeightFunction& w, double r);
/// Central-difference h with step r eps^(1/3), regardless of the family.
double eval_h_numeric(const WeightFunction& w, double r, double l);
/// H(R) = int_0^R h(s) s^(n+l-1) ds by adaptive quadrature.
double eval_H(const WeightFunction& w, double R, int n, double l, double quad_rel = 1e-10);

enum class HypStatus { Holds, Fails, NotApplicable, Undetermined };
std::string_view to_string(HypStatus s);

struct HypothesisResult {
  std::string id;
  HypStatus status = HypStatus::Undetermined;
  double witness = 0.0;
  std::string note;
};

struct HypothesisReport {
  /// Ids: f1, f2, f2', f3, f4, f5, f6, f7, f8, f9.
  std::vector<HypothesisResult> items;
  std::optional<double> fitted_l;
  std::optional<double> fitted_sigma;
  std::optional<double> delta1;
  std::optional<double> delta1_prime;
  std::optional<double> beta;
  std::optional<double> r2;
  std::optional<double> gamma;
  std::optional<double> r3;
  std::optional<double> H_inf;
  std::optional<double> H_tail_bound;

  const HypothesisResult& get(std::string_view id) const;
  bool holds(std::string_view id) const { return get(id).status == HypStatus::Holds; }
};

HypothesisReport check_hypotheses(const WeightFunction& w, const ProblemSpec& spec);

/// Least-squares slope of log|g| against log r on `points` log-spaced radii in
/// [r0, r1], plus the slopes of the two halves.
struct SlopeFit {
  double slope = 0.0;
  double half_lo = 0.0;
  double half_hi = 0.0;
  bool consistent = false;  ///< halves agree to 10% and every sample is finite and nonzero
};
template <class G>
SlopeFit fit_log_slope(G&& g, double r0, double r1, int points = 50);

/// Validates k (and gamma > n+l-1 so K is finite) and returns the Constructed
/// weight. Throws ValidationError naming the violated clause.
WeightFunction build_constructed_f(const BumpFunction& k, double epsilon, const ProblemSpec& spec);

/// Largest epsilon keeping 1 + epsilon (p*+1) K(r) positive on [0, c];
/// +infinity when K never goes negative.
double epsilon_max(const BumpFunction& k, const ProblemSpec& spec);

struct Condition21d {
  bool holds = false;
  double value = 0.0;
};

/// phi(0)^(p*+1) int_0^a k + phi(b)^(p*+1) (int_a^b k + int_b^r* k) < -delta^2,
/// with phi the closed-form pure-power solution. Requires a < b < r_star.
Condition21d check_condition_2_1d(const BumpFunction& k, double alpha_star, double r_star,
                                  double delta, const ProblemSpec& spec);

}  // namespace matukuma

#include "matukuma/detail/slope_fit.hpp"
