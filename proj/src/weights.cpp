#include "matukuma/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "matukuma/errors.hpp"
#include "matukuma/model.hpp"
#include "matukuma/quadrature.hpp"

namespace matukuma {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

BumpFunction::Piece hermite_piece(double x0, double x1, double y0, double d0, double y1, double d1) {
  const double h = x1 - x0;
  const double slope = (y1 - y0) / h;
  BumpFunction::Piece p;
  p.x0 = x0;
  p.x1 = x1;
  p.coeffs = {y0, d0, (3 * slope - 2 * d0 - d1) / h, (d0 + d1 - 2 * slope) / (h * h)};
  return p;
}

double eval_piece(const BumpFunction::Piece& p, double x) {
  const double t = x - p.x0;
  return p.coeffs[0] + t * (p.coeffs[1] + t * (p.coeffs[2] + t * p.coeffs[3]));
}

/// int_{u0}^{u1} s^e q(s) ds for one piece, via monomial expansion about 0.
double piece_moment(const BumpFunction::Piece& p, double u0, double u1, double e) {
  std::array<double, 4> m{};
  const double x0 = p.x0;
  constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) m[j] += p.coeffs[i] * binom[i][j] * std::pow(-x0, i - j);
  double total = 0.0;
  for (int j = 0; j < 4; ++j) {
    if (m[j] == 0.0) continue;
    const double k = e + j + 1.0;
    double anti;
    if (std::abs(k) < 1e-14) {
      anti = std::log(u1) - std::log(u0);
    } else {
      const double lo = u0 > 0.0 ? std::pow(u0, k) : 0.0;
      anti = (std::pow(u1, k) - lo) / k;
    }
    total += m[j] * anti;
  }
  return total;
}

double shifted_excess(double A, double B, double mu, double nu, double r) {
  const double s = 1.0 + r * r;
  if (A == 0.0) return -2.0 * (mu + nu) / s;
  const double bs = B * std::pow(s, nu);
  if (nu < 0.0) return -2.0 * mu / s + (2.0 * r * r / s) * nu * bs / (A + bs);
  const double Y = A / (A + bs);
  return -2.0 * mu / s + 2.0 * nu * (-1.0 / s - (r * r / s) * Y);
}

ShiftedPower example_iii_as_shifted(const ExampleIII& e) {
  const double n = e.n;
  const double C = (e.l + 2.0) * (n - 2.0) / ((e.p - 1.0) * (e.p - 1.0));
  const double P = e.p - (n + e.l) / (n - 2.0);
  const double Q = (e.l + 2.0 * e.p) / (n - 2.0);
  return {C * P, C * Q, e.l / 2.0, -1.0};
}

double constructed_K(const Constructed& c, double r) {
  if (r >= c.k.c()) return c.K_total;
  if (r <= 0.0) return 0.0;
  return c.k.weighted_integral(0.0, r, -(c.n + c.l));
}

}  // namespace

// ---------------------------------------------------------------------------
// BumpFunction

BumpFunction BumpFunction::hermite(double a, double b, double c, double gamma, Shape s) {
  if (!(0.0 < a && a < b && b < c))
    throw ValidationError("2.1a", "bump knots must satisfy 0 < a < b < c");
  std::vector<Piece> pieces{hermite_piece(0.0, a, s.amplitude, 0.0, 0.0, -s.slope_a),
                            hermite_piece(a, b, 0.0, -s.slope_a, 0.0, s.slope_b),
                            hermite_piece(b, c, 0.0, s.slope_b, 0.0, 0.0)};
  BumpFunction k(a, b, c, gamma, std::move(pieces));
  k.shape_ = s;
  return k;
}

BumpFunction::BumpFunction(double a, double b, double c, double gamma, std::vector<Piece> pieces)
    : a_(a), b_(b), c_(c), gamma_(gamma), pieces_(std::move(pieces)) {
  validate();
}

double BumpFunction::q(double r) const {
  if (r < 0.0 || r > c_) return 0.0;
  for (const auto& p : pieces_)
    if (r <= p.x1) return eval_piece(p, r);
  return 0.0;
}

double BumpFunction::operator()(double r) const {
  if (r <= 0.0 || r >= c_) return 0.0;
  return std::pow(r, gamma_) * q(r);
}

double BumpFunction::integral(double x0, double x1) const { return weighted_integral(x0, x1, 0.0); }

double BumpFunction::weighted_integral(double x0, double x1, double power) const {
  if (x1 < x0) return -weighted_integral(x1, x0, power);
  x0 = std::max(x0, 0.0);
  x1 = std::min(x1, c_);
  if (!(x1 > x0)) return 0.0;
  const double e = gamma_ + power;
  if (x0 == 0.0 && !(e > -1.0))
    throw DomainError("bump moment diverges at the origin: gamma + power must exceed -1");
  double total = 0.0;
  for (const auto& p : pieces_) {
    const double u0 = std::max(x0, p.x0), u1 = std::min(x1, p.x1);
    if (u1 > u0) total += piece_moment(p, u0, u1, e);
  }
  return total;
}

void BumpFunction::validate() const {
  if (!(0.0 < a_ && a_ < b_ && b_ < c_))
    throw ValidationError("2.1a", "bump knots must satisfy 0 < a < b < c");
  if (pieces_.empty() || pieces_.front().x0 != 0.0 || pieces_.back().x1 != c_)
    throw ValidationError("2.1a", "bump pieces must tile [0, c]");
  double qmax = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (!(p.x1 > p.x0)) throw ValidationError("2.1a", "bump piece with empty range");
    for (double cf : p.coeffs)
      if (!std::isfinite(cf)) throw ValidationError("2.1a", "non-finite bump coefficient");
    if (i > 0 && pieces_[i - 1].x1 != p.x0)
      throw ValidationError("2.1a", "bump pieces must be contiguous");
    qmax = std::max({qmax, std::abs(eval_piece(p, p.x0)), std::abs(eval_piece(p, p.x1)),
                     std::abs(eval_piece(p, 0.5 * (p.x0 + p.x1)))});
  }
  const double ztol = 1e-12 * std::max(qmax, 1.0);
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    const double jump = eval_piece(pieces_[i], pieces_[i].x0) -
                        eval_piece(pieces_[i - 1], pieces_[i - 1].x1);
    if (std::abs(jump) > ztol) {
      std::ostringstream os;
      os << "bump is discontinuous at r = " << pieces_[i].x0;
      throw ValidationError("2.1a", os.str());
    }
  }
  for (double knot : {a_, b_, c_}) {
    if (std::abs(q(knot)) > ztol) {
      std::ostringstream os;
      os << "k must vanish at r = " << knot << " (q = " << q(knot) << ")";
      throw ValidationError("2.1a", os.str());
    }
  }
  if (!(gamma_ > 0.0) || !(q(0.0) > 0.0))
    throw ValidationError("2.1c", "k must behave like A r^gamma near 0 with A > 0 and gamma > 0");

  constexpr int kSamples = 400;
  struct Lobe {
    double x0, x1;
    int sign;
  };
  for (const Lobe& lobe : {Lobe{0.0, a_, 1}, Lobe{a_, b_, -1}, Lobe{b_, c_, 1}}) {
    for (int i = 0; i < kSamples; ++i) {
      const double x = lobe.x0 + (lobe.x1 - lobe.x0) * (i + 0.5) / kSamples;
      const double v = (*this)(x);
      if (!(v * lobe.sign > 0.0)) {
        std::ostringstream os;
        os << "k has the wrong sign at r = " << x << " (k = " << v << ", expected "
           << (lobe.sign > 0 ? "positive" : "negative") << ")";
        throw ValidationError("2.1b", os.str());
      }
    }
  }
  const double total = integral(0.0, c_);
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "integral of k over [0, c] must be positive, got " << total;
    throw ValidationError("2.1e", os.str());
  }
}

// ---------------------------------------------------------------------------
// WeightFunction

WeightFunction::WeightFunction(Family family, double scale, bool analytic_derivative)
    : family_(std::move(family)), scale_(scale), analytic_(analytic_derivative) {
  if (!(scale_ > 0.0) || !std::isfinite(scale_))
    throw DomainError("weight scale must be positive and finite");
  std::visit(overloaded{
                 [](const PurePower& w) {
                   if (!std::isfinite(w.l)) throw DomainError("pure_power: l must be finite");
                 },
                 [](const ExampleIII& w) {
                   if (w.n < 3 || !(w.l > -2.0) || !(w.p > 1.0))
                     throw DomainError("example_iii: requires n >= 3, l > -2, p > 1");
                 },
                 [](const ProductPower& w) {
                   if (!(w.c1 > 0 && w.c2 > 0 && w.c3 > 0 && w.c4 > 0))
                     throw DomainError("product_power: all c_i must be positive");
                 },
                 [](const ShiftedPower& w) {
                   if (!std::isfinite(w.A + w.B + w.mu + w.nu))
                     throw DomainError("shifted_power: parameters must be finite");
                 },
                 [](const Constructed& w) {
                   if (!(w.epsilon >= 0.0)) throw DomainError("constructed: epsilon must be >= 0");
                 },
             },
             family_);
}

std::string WeightFunction::family_name() const {
  return std::visit(overloaded{
                        [](const PurePower&) { return std::string("pure_power"); },
                        [](const ExampleIII&) { return std::string("example_iii"); },
                        [](const ProductPower&) { return std::string("product_power"); },
                        [](const ShiftedPower&) { return std::string("shifted_power"); },
                        [](const Constructed&) { return std::string("constructed"); },
                    },
                    family_);
}

WeightFunction WeightFunction::scaled(double factor) const {
  return WeightFunction(family_, scale_ * factor, analytic_);
}

WeightFunction WeightFunction::with_numeric_derivative() const {
  return WeightFunction(family_, scale_, false);
}

double WeightFunction::f(double r) const {
  const double v = std::visit(
      overloaded{
          [r](const PurePower& w) { return std::pow(r, w.l); },
          [r](const ExampleIII& w) {
            const ShiftedPower s = example_iii_as_shifted(w);
            const double t = 1.0 + r * r;
            return (s.A + s.B / t) * std::pow(t, s.mu);
          },
          [r](const ProductPower& w) {
            return std::pow(w.c1 + w.c2 * r * r, 0.5 * w.gamma) *
                   std::pow(w.c3 + w.c4 * r * r, 0.5 * w.nu);
          },
          [r](const ShiftedPower& w) {
            const double t = 1.0 + r * r;
            return (w.A + w.B * std::pow(t, w.nu)) * std::pow(t, w.mu);
          },
          [r](const Constructed& w) {
            return std::pow(r, w.l) * (1.0 + w.epsilon * (w.p_star + 1.0) * constructed_K(w, r));
          },
      },
      family_);
  return scale_ * v;
}

double WeightFunction::log_slope_excess(double r) const {
  return std::visit(
      overloaded{
          [](const PurePower&) { return 0.0; },
          [r](const ExampleIII& w) {
            const ShiftedPower s = example_iii_as_shifted(w);
            return shifted_excess(s.A, s.B, s.mu, s.nu, r);
          },
          [r](const ProductPower& w) {
            return -w.gamma * w.c1 / (w.c1 + w.c2 * r * r) - w.nu * w.c3 / (w.c3 + w.c4 * r * r);
          },
          [r](const ShiftedPower& w) { return shifted_excess(w.A, w.B, w.mu, w.nu, r); },
          [r](const Constructed& w) {
            if (r >= w.k.c() || w.epsilon == 0.0) return 0.0;
            const double e = w.epsilon * (w.p_star + 1.0);
            return e * std::pow(r, 1.0 - (w.n + w.l)) * w.k(r) / (1.0 + e * constructed_K(w, r));
          },
      },
      family_);
}

double WeightFunction::df(double r) const {
  if (!(r > 0.0)) throw DomainError("df requires r > 0");
  return f(r) * (log_slope_excess(r) + asymptotic_l()) / r;
}

double WeightFunction::asymptotic_l() const {
  return std::visit(overloaded{
                        [](const PurePower& w) { return w.l; },
                        [](const ExampleIII& w) { return w.l; },
                        [](const ProductPower& w) { return w.gamma + w.nu; },
                        [](const ShiftedPower& w) {
                          if (w.A == 0.0 || w.nu >= 0.0) return 2.0 * (w.mu + w.nu);
                          return 2.0 * w.mu;
                        },
                        [](const Constructed& w) { return w.l; },
                    },
                    family_);
}

double WeightFunction::small_r_exponent() const {
  return std::visit(overloaded{
                        [](const PurePower& w) { return w.l; },
                        [](const ExampleIII&) { return 0.0; },
                        [](const ProductPower&) { return 0.0; },
                        [](const ShiftedPower&) { return 0.0; },
                        [](const Constructed& w) { return w.l; },
                    },
                    family_);
}

std::vector<double> WeightFunction::breakpoints() const {
  if (const auto* c = std::get_if<Constructed>(&family_)) {
    std::vector<double> out;
    for (const auto& p : c->k.pieces()) out.push_back(p.x1);
    return out;
  }
  return {};
}

WeightFunction make_example_iii(int n, double l, double p) { return WeightFunction(ExampleIII{n, l, p}); }

// ---------------------------------------------------------------------------
// f, h, H

double eval_f(const WeightFunction& w, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_f: r must be non-negative");
  const double v = w.f(r);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "eval_f: weight is not finite at r = " << r;
    throw DomainError(os.str());
  }
  return v;
}

double eval_h(const WeightFunction& w, double r, double l) {
  if (!(r > 0.0)) throw DomainError("eval_h: r must be positive");
  if (!w.has_analytic_derivative()) return eval_h_numeric(w, r, l);
  if (const auto* c = std::get_if<Constructed>(&w.family()); c && l == c->l) {
    if (r >= c->k.c()) return 0.0;
    return w.scale() * c->epsilon * (c->p_star + 1.0) * std::pow(r, 1.0 - (c->n + c->l)) * c->k(r);
  }
  const double excess = w.log_slope_excess(r) + (w.asymptotic_l() - l);
  if (excess == 0.0) return 0.0;
  return std::pow(r, -l) * w.f(r) * excess;
}

double eval_h(const WeightFunction& w, double r) { return eval_h(w, r, w.asymptotic_l()); }

double eval_h_numeric(const WeightFunction& w, double r, double l) {
  if (!(r > 0.0)) throw DomainError("eval_h: r must be positive");
  const double step = r * std::cbrt(std::numeric_limits<double>::epsilon());
  auto F = [&](double x) { return std::pow(x, -l) * w.f(x); };
  return r * (F(r + step) - F(r - step)) / (2.0 * step);
}

double eval_H(const WeightFunction& w, double R, int n, double l, double quad_rel) {
  if (!(R > 0.0)) throw DomainError("eval_H: R must be positive");
  const double expo = n + l - 1.0;
  auto integrand = [&](double s) { return s > 0.0 ? eval_h(w, s, l) * std::pow(s, expo) : 0.0; };

  // A small-r power law h ~ r^g is integrable against s^(n+l-1) iff g + n + l > 0.
  const double r_probe = std::min(1e-5, R * 1e-3);
  const double h1 = eval_h(w, r_probe, l), h2 = eval_h(w, 10 * r_probe, l);
  if (h1 != 0.0 && h2 != 0.0) {
    const double g = std::log10(std::abs(h2) / std::abs(h1));
    if (g + n + l <= 0.0) {
      std::ostringstream os;
      os << "eval_H: h ~ r^" << g << " near 0 is not integrable against r^(n+l-1)";
      throw DomainError(os.str());
    }
  }
  std::vector<double> pts = quad::log_breakpoints(0.0, R);
  for (double b : w.breakpoints())
    if (b > 0.0 && b < R) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return quad::adaptive(integrand, pts, quad_rel, 0.0).value;
}

// ---------------------------------------------------------------------------
// Hypotheses

std::string_view to_string(HypStatus s) {
  switch (s) {
    case HypStatus::Holds:
      return "holds";
    case HypStatus::Fails:
      return "fails";
    case HypStatus::NotApplicable:
      return "not_applicable";
    case HypStatus::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

const HypothesisResult& HypothesisReport::get(std::string_view id) const {
  for (const auto& it : items)
    if (it.id == id) return it;
  throw DomainError("unknown hypothesis id: " + std::string(id));
}

HypothesisReport check_hypotheses(const WeightFunction& w, const ProblemSpec& spec) {
  HypothesisReport rep;
  const int n = spec.n();
  const double l = spec.l();
  const double sigma = spec.sigma();
  constexpr double kExpTol = 0.02;

  auto add = [&](std::string id, HypStatus st, double witness, std::string note) {
    rep.items.push_back({std::move(id), st, witness, std::move(note)});
  };
  auto h = [&](double r) { return eval_h(w, r, l); };
  auto F = [&](double r) { return std::pow(r, -l) * w.f(r); };
  auto negligible = [&](double r, double hv) { return std::abs(hv) <= 1e-13 * std::abs(F(r)); };

  // Log grid on [1e-6, 1e6], 40 points per decade.
  constexpr int kPerDecade = 40;
  std::vector<double> grid;
  for (int i = 0; i <= 12 * kPerDecade; ++i) grid.push_back(std::pow(10.0, -6.0 + double(i) / kPerDecade));
  std::vector<double> hv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) hv[i] = h(grid[i]);
  auto all_zero_on = [&](double lo, double hi) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (grid[i] >= lo * (1 - 1e-12) && grid[i] <= hi * (1 + 1e-12) && !negligible(grid[i], hv[i]))
        return false;
    return true;
  };
  const bool h_zero = all_zero_on(1e-6, 1e6);
  const bool tail_zero = all_zero_on(1e2, 1e6);
  const bool head_zero = all_zero_on(1e-5, 1e-3);

  // (f1)
  {
    double fmin = std::numeric_limits<double>::infinity();
    double bad_r = -1.0;
    for (double r : grid) {
      const double v = w.f(r);
      if (!(v > 0.0) || !std::isfinite(v)) {
        bad_r = r;
        break;
      }
      fmin = std::min(fmin, v);
    }
    if (bad_r < 0.0)
      add("f1", HypStatus::Holds, fmin, "minimum of f on [1e-6, 1e6]");
    else
      add("f1", HypStatus::Fails, bad_r, "f is not positive and finite at this r");
  }
  // (f2), (f2')
  {
    const SlopeFit fit = fit_log_slope([&](double r) { return w.f(r); }, 1e3, 1e5);
    rep.fitted_l = fit.slope;
    if (!fit.consistent)
      add("f2", HypStatus::Undetermined, fit.slope, "far-field slope fit is not consistent");
    else
      add("f2", fit.slope <= l + kExpTol ? HypStatus::Holds : HypStatus::Fails, fit.slope,
          "log-log slope of f on [1e3, 1e5]");
    const SlopeFit fit0 = fit_log_slope([&](double r) { return w.f(r); }, 1e-5, 1e-3);
    rep.fitted_sigma = fit0.slope;
    if (!fit0.consistent)
      add("f2'", HypStatus::Undetermined, fit0.slope, "small-r slope fit is not consistent");
    else
      add("f2'", fit0.slope >= sigma - kExpTol ? HypStatus::Holds : HypStatus::Fails, fit0.slope,
          "log-log slope of f on [1e-5, 1e-3]");
  }
  // (f3): h < -delta1 r^-beta beyond r2.
  double fit_lo = 1e2, fit_hi = 1e4;
  if (tail_zero) {
    add("f3", HypStatus::Fails, 0.0, "h vanishes identically for large r");
  } else {
    std::size_t last_nonneg = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (hv[i] >= 0.0) last_nonneg = i;
    const double r2 = last_nonneg == grid.size() ? grid.front() : grid[last_nonneg];
    fit_lo = std::max(2.0 * r2, 1e2);
    fit_hi = std::min(std::max(1e4, 100.0 * fit_lo), 1e6);
    if (last_nonneg + 1 >= grid.size() || fit_lo * 10.0 > fit_hi) {
      add("f3", HypStatus::Fails, hv.back(), "h is not negative in the far field");
    } else {
      const SlopeFit fit = fit_log_slope(h, fit_lo, fit_hi);
      if (!fit.consistent) {
        add("f3", HypStatus::Undetermined, fit.slope, "decay fit of -h is not consistent");
      } else {
        const double beta = -fit.slope;
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i)
          if (grid[i] >= fit_lo && grid[i] <= fit_hi) dmin = std::min(dmin, -hv[i] * std::pow(grid[i], beta));
        rep.beta = beta;
        rep.r2 = r2;
        rep.delta1 = 0.5 * dmin;
        add("f3", HypStatus::Holds, beta, "beta fitted from -h beyond r2");
      }
    }
  }
  // (f4)
  if (head_zero) {
    add("f4", HypStatus::Holds, 0.0, "h vanishes identically near the origin");
  } else {
    const SlopeFit fit = fit_log_slope(h, 1e-5, 1e-3);
    if (!fit.consistent) {
      add("f4", HypStatus::Undetermined, fit.slope, "small-r fit of h is not consistent");
    } else {
      rep.gamma = fit.slope;
      add("f4", fit.slope > 0.0 ? HypStatus::Holds : HypStatus::Fails, fit.slope,
          "log-log slope of |h| on [1e-5, 1e-3]");
    }
  }
  // (f6): |h| < delta1' r^-beta beyond r2'.
  std::optional<double> beta6;
  if (tail_zero) {
    rep.delta1_prime = 0.0;
    add("f6", HypStatus::Holds, 0.0, "h vanishes identically for large r");
  } else {
    const SlopeFit fit = fit_log_slope(h, fit_lo, fit_hi);
    if (!fit.consistent) {
      add("f6", HypStatus::Undetermined, fit.slope, "decay fit of |h| is not consistent");
    } else if (fit.slope >= 0.0) {
      add("f6", HypStatus::Fails, fit.slope, "|h| does not decay");
    } else {
      beta6 = -fit.slope;
      double dmax = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= fit_lo) dmax = std::max(dmax, std::abs(hv[i]) * std::pow(grid[i], *beta6));
      rep.delta1_prime = 2.0 * dmax;
      if (!rep.beta) rep.beta = beta6;
      add("f6", HypStatus::Holds, *beta6, "beta fitted from |h| in the far field");
    }
  }

  // Cumulative H on the grid, used by (f5), (f7) and (f8).
  std::vector<double> Hg(grid.size(), 0.0);
  const double expo = n + l - 1.0;
  auto integrand = [&](double s) { return s > 0.0 ? h(s) * std::pow(s, expo) : 0.0; };
  std::vector<double> bps = w.breakpoints();
  auto piece = [&](double a, double b) {
    std::vector<double> pts{a};
    for (double x : bps)
      if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    double abs_floor = 0.0;
    return quad::adaptive(integrand, pts, 1e-10, abs_floor).value;
  };
  if (!h_zero) {
    Hg[0] = piece(0.0, grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) Hg[i] = Hg[i - 1] + piece(grid[i - 1], grid[i]);
  }

  // (f5), (f7)
  {
    const double R = grid.back();
    const double H = Hg.back();
    std::optional<double> bound;
    std::optional<double> Hinf;
    if (h_zero) {
      Hinf = 0.0;
    } else if (tail_zero) {
      bound = 0.0;
    } else if (beta6 && *beta6 > n + l && rep.delta1_prime) {
      bound = *rep.delta1_prime * std::pow(R, n + l - *beta6) / (*beta6 - (n + l));
    } else if (beta6 && *beta6 <= n + l) {
      bool all_neg = true, all_pos = true;
      for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] >= fit_lo) {
          all_neg = all_neg && hv[i] < 0.0;
          all_pos = all_pos && hv[i] > 0.0;
        }
      if (all_neg) Hinf = -std::numeric_limits<double>::infinity();
      if (all_pos) Hinf = std::numeric_limits<double>::infinity();
    }
    if (bound && std::abs(H) > *bound) Hinf = H;
    rep.H_tail_bound = bound;
    if (Hinf) {
      rep.H_inf = *Hinf;
      const bool neg = *Hinf < 0.0, pos = *Hinf > 0.0;
      const std::string note = h_zero ? "h vanishes identically" : "H(1e6) with bounded tail";
      add("f5", neg ? HypStatus::Holds : HypStatus::Fails, *Hinf, note);
      add("f7", pos ? HypStatus::Holds : HypStatus::Fails, *Hinf, note);
    } else {
      add("f5", HypStatus::Undetermined, H, "sign of the tail not resolved");
      add("f7", HypStatus::Undetermined, H, "sign of the tail not resolved");
    }
  }
  // (f8)
  {
    std::size_t last = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (Hg[i] <= 0.0) last = i;
    if (last == grid.size()) {
      add("f8", HypStatus::Fails, 0.0, "H(r) > 0 for every sampled r");
    } else if (last + 1 == grid.size()) {
      add("f8", HypStatus::Fails, std::numeric_limits<double>::infinity(),
          "H(r) <= 0 at the largest sampled r; r3 is not finite");
    } else {
      double lo = grid[last], hi = grid[last + 1];
      const double H0 = Hg[last];
      for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (H0 + piece(grid[last], mid) <= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      rep.r3 = lo;
      add("f8", HypStatus::Holds, lo, "last sign change of H(r) from <= 0 to > 0");
    }
  }
  // (f9)
  if (head_zero) {
    add("f9", HypStatus::NotApplicable, 0.0, "h vanishes near the origin; gamma is arbitrary");
  } else if (!rep.gamma) {
    add("f9", HypStatus::Undetermined, 0.0, "gamma could not be fitted");
  } else {
    const double margin = *rep.gamma * (2.0 + l) - (sigma - l) * (n + l);
    add("f9", margin > 0.0 ? HypStatus::Holds : HypStatus::Fails, margin,
        "gamma (2 + l) - (sigma - l)(n + l)");
  }

  static const std::vector<std::string> order{"f1", "f2", "f2'", "f3", "f4", "f5", "f6", "f7", "f8", "f9"};
  std::vector<HypothesisResult> sorted;
  for (const auto& id : order)
    for (const auto& it : rep.items)
      if (it.id == id) sorted.push_back(it);
  rep.items = std::move(sorted);
  return rep;
}

// ---------------------------------------------------------------------------
// Constructed weight

namespace {
double k_moment_min(const BumpFunction& k, double power) {
  double kmin = 0.0;
  constexpr int kGrid = 2000;
  for (int i = 1; i <= kGrid; ++i) {
    const double r = k.c() * i / kGrid;
    kmin = std::min(kmin, k.weighted_integral(0.0, r, power));
  }
  for (double knot : {k.a(), k.b()}) kmin = std::min(kmin, k.weighted_integral(0.0, knot, power));
  return kmin;
}
}  // namespace

double epsilon_max(const BumpFunction& k, const ProblemSpec& spec) {
  const double kmin = k_moment_min(k, -(spec.n() + spec.l()));
  if (kmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / ((spec.p_star() + 1.0) * kmin);
}

WeightFunction build_constructed_f(const BumpFunction& k, double epsilon, const ProblemSpec& spec) {
  k.validate();
  const int n = spec.n();
  const double l = spec.l();
  if (!(k.gamma() > n + l - 1.0)) {
    std::ostringstream os;
    os << "gamma = " << k.gamma() << " must exceed n + l - 1 = " << n + l - 1.0
       << " for the weight integral to converge";
    throw ValidationError("2.1c", os.str());
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ValidationError("epsilon", "epsilon must be non-negative and finite");
  const double emax = epsilon_max(k, spec);
  if (!(epsilon < emax)) {
    std::ostringstream os;
    os << "epsilon = " << epsilon << " makes f non-positive (epsilon_max = " << emax << ")";
    throw ValidationError("f1", os.str());
  }
  const double K_total = k.weighted_integral(0.0, k.c(), -(n + l));
  return WeightFunction(Constructed{k, epsilon, l, n, spec.p_star(), K_total});
}

Condition21d check_condition_2_1d(const BumpFunction& k, double alpha_star, double r_star,
                                  double delta, const ProblemSpec& spec) {
  if (!(r_star > k.b())) throw DomainError("check_condition_2_1d: r* must exceed b");
  if (!(alpha_star >= 0.0)) throw DomainError("check_condition_2_1d: alpha* must be >= 0");
  const double q = spec.p_star() + 1.0;
  const double phi0 = alpha_star;
  const double phib = critical_profile(spec.n(), spec.l(), alpha_star, k.b());
  Condition21d out;
  out.value = std::pow(phi0, q) * k.integral(0.0, k.a()) +
              std::pow(phib, q) * (k.integral(k.a(), k.b()) + k.integral(k.b(), r_star));
  out.holds = out.value < -delta * delta;
  return out;
}

}  // namespace matukuma
