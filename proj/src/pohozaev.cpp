#include "matukuma/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace matukuma {
namespace {

void require_radius(const Trajectory& traj, double R) {
  if (!(R > 0.0) || R > traj.horizon() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "Pohozaev identity: R = " << R << " outside (0, " << traj.horizon() << "]";
    throw DomainError(os.str());
  }
}

/// The two integrals over [0, R] that make up the right-hand sides:
/// int h r^(n+l-1) (u+)^(p+1) and int r^(n-1) f (u+)^(p+1).
struct Integrals {
  double h_part = 0.0;
  double f_part = 0.0;
};

Integrals rhs_integrals(const Trajectory& traj, double R, double quad_rel) {
  const ProblemSpec& spec = traj.spec();
  const WeightFunction& wf = spec.weight();
  const int n = spec.n();
  const double l = spec.l(), p = spec.p();
  Integrals out;
  out.h_part = traj.integrate(
      [&](double r, const Sample& s) {
        if (!(s.u > 0.0) || r == 0.0) return 0.0;
        const double h = eval_h(wf, r, l);
        return h == 0.0 ? 0.0 : h * std::pow(r, n + l - 1.0) * std::pow(s.u, p + 1.0);
      },
      0.0, R, quad_rel);
  if (!spec.is_critical())
    out.f_part = traj.integrate(
        [&](double r, const Sample& s) {
          if (!(s.u > 0.0) || r == 0.0) return 0.0;
          return std::pow(r, n - 1.0) * wf.f(r) * std::pow(s.u, p + 1.0);
        },
        0.0, R, quad_rel);
  return out;
}

double drift_coefficient(const ProblemSpec& spec) {
  return spec.is_critical() ? 0.0 : -0.5 * (spec.n() - 2) * (spec.p() - spec.p_star());
}

}  // namespace

std::string_view to_string(Identity id) {
  return id == Identity::Energy33 ? "identity_3_3" : "identity_4_1";
}

PohozaevReport identity_3_3(const Trajectory& traj, double R, double quad_rel) {
  require_radius(traj, R);
  const ProblemSpec& spec = traj.spec();
  const int n = spec.n();
  const double p = spec.p(), m = spec.w_exponent();
  const Sample s = traj.at(R);
  const double up = std::max(s.u, 0.0);

  const double t1 = m * std::pow(R, n - 1.0) * s.u * s.du;
  const double t2 = 0.5 * std::pow(R, n) * s.du * s.du;
  const double t3 = std::pow(R, n) * spec.weight().f(R) * std::pow(up, p + 1.0) / (p + 1.0);
  const Integrals I = rhs_integrals(traj, R, quad_rel);

  PohozaevReport rep;
  rep.which = Identity::Energy33;
  rep.R = R;
  rep.lhs = t1 + t2 + t3;
  rep.rhs = (drift_coefficient(spec) * I.f_part + I.h_part) / (p + 1.0);
  rep.residual = rep.lhs - rep.rhs;
  rep.scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3), std::abs(rep.rhs)});
  rep.weighted_integral = I.h_part;
  return rep;
}

PohozaevReport identity_4_1(const Trajectory& traj, double R, double quad_rel) {
  require_radius(traj, R);
  const ProblemSpec& spec = traj.spec();
  const int n = spec.n();
  const double p = spec.p(), m = spec.w_exponent();
  const Sample s = traj.at(R);
  const double up = std::max(s.u, 0.0);
  const double f = spec.weight().f(R);

  const double w = s.w, dw = s.dw;
  const double wp = w > 0.0 ? std::pow(w, p) : 0.0;
  const double G = wp == 0.0 ? 0.0 : std::pow(R, m + 2.0 - m * p) * f;
  const double d2w = (m * m * w - G * wp - R * dw) / (R * R);

  const double a1 = -R * R * d2w * w;
  const double a2 = -R * w * dw;
  const double a3 = R * R * dw * dw;
  const double a4 = -(p - 1.0) / (p + 1.0) * std::pow(R, n) * f * std::pow(up, p + 1.0);
  const Integrals I = rhs_integrals(traj, R, quad_rel);

  PohozaevReport rep;
  rep.which = Identity::Variant41;
  rep.R = R;
  rep.lhs = a1 + a2 + a3 + a4;
  rep.rhs = 2.0 / (p + 1.0) * (drift_coefficient(spec) * I.f_part + I.h_part);
  rep.residual = rep.lhs - rep.rhs;
  rep.scale = std::max({std::abs(a1), std::abs(a2), std::abs(a3), std::abs(a4), std::abs(rep.rhs)});
  rep.weighted_integral = I.h_part;
  return rep;
}

std::vector<ProbePoint> limit_sequence_probe(const Trajectory& traj, int points) {
  std::vector<ProbePoint> out;
  if (traj.crossing_radius() || points < 3) return out;
  const ProblemSpec& spec = traj.spec();
  const double m = spec.w_exponent(), p = spec.p();
  const double H = traj.horizon();
  const double lo = std::max(H / 10.0, traj.r_start());
  std::vector<ProbePoint> grid;
  grid.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double R = std::min(H, lo * std::pow(H / lo, double(i) / (points - 1)));
    const Sample s = traj.at(R);
    if (!(s.u > 0.0)) return out;
    const double G = std::pow(R, m + 2.0 - m * p) * spec.weight().f(R);
    ProbePoint q;
    q.R = R;
    q.w = s.w;
    q.Rdw = R * s.dw;
    q.R2d2w = m * m * s.w - G * std::pow(s.w, p) - q.Rdw;
    grid.push_back(q);
  }
  double best = std::abs(grid.front().Rdw);
  out.push_back(grid.front());
  for (int i = 1; i < points; ++i) {
    const double v = std::abs(grid[i].Rdw);
    const bool trough = i + 1 == points || v < std::abs(grid[i + 1].Rdw);
    if (v < best && trough) {
      best = v;
      out.push_back(grid[i]);
    }
  }
  return out;
}

GrowthReport lemma_4_1_growth(const ProblemSpec& spec, const std::vector<double>& alphas,
                              const Tolerances& tol) {
  GrowthReport rep;
  const HypothesisReport hyp = check_hypotheses(spec.weight(), spec);
  const double gstar = spec.derived().gamma_star;
  std::ostringstream why;
  if (!spec.is_critical())
    why << "p differs from p*";
  else if (!hyp.holds("f4"))
    why << "(f4) does not hold";
  else if (!hyp.gamma)
    why << "h vanishes near the origin";
  else if (!(*hyp.gamma < gstar))
    why << "gamma = " << *hyp.gamma << " is not below gamma* = " << gstar;
  rep.gate_reason = why.str();
  rep.gate = rep.gate_reason.empty();
  if (rep.gate) {
    std::ostringstream ok;
    ok << "gamma = " << *hyp.gamma << " < gamma* = " << gstar << "; (f9) " << to_string(hyp.get("f9").status);
    rep.gate_reason = ok.str();
  }

  for (double a : alphas) {
    GrowthEntry e;
    e.alpha = a;
    const Trajectory tr = integrate(spec, a, tol, 20.0 * estimate_r_alpha(spec, a));
    const auto ra = tr.r_alpha();
    if (!ra) throw NumericError("lemma_4_1_growth: r_alpha not reached");
    e.r_alpha = *ra;
    const Integrals I = rhs_integrals(tr, *ra, tol.quad_rel);
    e.integral = I.h_part;
    rep.entries.push_back(e);
  }
  rep.strictly_increasing = rep.entries.size() >= 2;
  for (std::size_t i = 1; i < rep.entries.size(); ++i)
    if (!(rep.entries[i].integral > rep.entries[i - 1].integral)) rep.strictly_increasing = false;
  return rep;
}

}  // namespace matukuma
