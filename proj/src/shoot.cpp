#include "matukuma/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace matukuma {
namespace {

constexpr double kUnderflow = 1e-30;

struct OriginIntegrals {
  double I1;  ///< int_0^r s f(s) ds
  double In;  ///< int_0^r s^(n-1) f(s) ds
};

OriginIntegrals origin_integrals(const ProblemSpec& spec, double r, double rel = 1e-13) {
  const WeightFunction& w = spec.weight();
  const int n = spec.n();
  auto g1 = [&](double s) { return s > 0.0 ? s * w.f(s) : 0.0; };
  auto gn = [&](double s) { return s > 0.0 ? std::pow(s, n - 1) * w.f(s) : 0.0; };
  return {quad::integrate_log(g1, 0.0, r, rel).value, quad::integrate_log(gn, 0.0, r, rel).value};
}

/// Illinois false position for g(ta) > 0 >= g(tb).
template <class G>
double refine_root(G&& g, double ta, double tb, double ga, double gb, double t_tol) {
  int side = 0;
  for (int it = 0; it < 200 && tb - ta > t_tol; ++it) {
    double tm = (ta * gb - tb * ga) / (gb - ga);
    if (!(tm > ta && tm < tb)) tm = 0.5 * (ta + tb);
    const double gm = g(tm);
    if (gm > 0.0) {
      ta = tm;
      ga = gm;
      if (side == 1) gb *= 0.5;
      side = 1;
    } else {
      tb = tm;
      gb = gm;
      if (side == -1) ga *= 0.5;
      side = -1;
    }
  }
  return tb;
}

double root_tol_t(double root_abs, double r) {
  const double ulp = std::numeric_limits<double>::epsilon() * r;
  return std::max(root_abs, 4.0 * ulp) / r;
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Crossed:
      return "crossed";
    case Termination::HorizonReached:
      return "horizon_reached";
    case Termination::Underflow:
      return "underflow";
  }
  return "horizon_reached";
}

std::optional<double> Trajectory::r_alpha() const {
  auto it = r_alpha_k_.find(2.0);
  if (it != r_alpha_k_.end()) return it->second;
  return detect_r_alpha(*this, 2.0);
}

Sample Trajectory::picard(double r) const {
  const int n = spec_.n();
  const double m = 0.5 * (n - 2);
  Sample s;
  s.r = r;
  if (r == 0.0) {
    s.u = alpha_;
    s.du = 0.0;
    s.w = 0.0;
    s.dw = 0.0;
    return s;
  }
  const auto I = origin_integrals(spec_, r);
  const double ap = std::pow(alpha_, spec_.p());
  s.u = alpha_ - ap / (n - 2.0) * (I.I1 - std::pow(r, 2.0 - n) * I.In);
  s.du = -ap * std::pow(r, 1.0 - n) * I.In;
  s.w = std::pow(r, m) * s.u;
  s.dw = m * std::pow(r, m - 1.0) * s.u + std::pow(r, m) * s.du;
  return s;
}

Sample Trajectory::from_state(double r, const ode::State<2>& y) const {
  const double m = 0.5 * (spec_.n() - 2);
  const double rm = std::pow(r, -m);
  Sample s;
  s.r = r;
  s.w = y[0];
  s.dw = y[1] / r;
  s.u = rm * y[0];
  s.du = rm / r * (y[1] - m * y[0]);
  return s;
}

Sample Trajectory::at(double r) const {
  if (!(r >= 0.0) || r > horizon_ * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "Trajectory::at: r = " << r << " outside [0, " << horizon_ << "]";
    throw DomainError(os.str());
  }
  if (r < r_start_ || segments_.empty()) return picard(r);
  const double t = std::log(r);
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const ode::DenseSegment<2>& s) { return v < s.t0; });
  const auto& seg = it == segments_.begin() ? segments_.front() : *std::prev(it);
  return from_state(r, seg.eval(t));
}

std::vector<double> Trajectory::knots() const {
  std::vector<double> out;
  out.reserve(segments_.size() + 1);
  if (!segments_.empty()) out.push_back(std::exp(segments_.front().t0));
  for (const auto& s : segments_) out.push_back(std::exp(s.t1()));
  return out;
}

Trajectory Trajectory::truncated(double r) const {
  Trajectory out = *this;
  if (r >= horizon_) return out;
  out.horizon_ = r;
  const double t = std::log(r);
  while (!out.segments_.empty() && out.segments_.back().t0 >= t) out.segments_.pop_back();
  while (!out.samples_.empty() && out.samples_.back().r > r) out.samples_.pop_back();
  out.samples_.push_back(at(r));
  if (out.crossing_ && *out.crossing_ > r) out.crossing_.reset();
  for (auto it = out.r_alpha_k_.begin(); it != out.r_alpha_k_.end();)
    it = it->second > r ? out.r_alpha_k_.erase(it) : std::next(it);
  out.termination_ = out.crossing_ ? Termination::Crossed : Termination::HorizonReached;
  return out;
}

double picard_radius(const ProblemSpec& spec, double alpha, const Tolerances& tol) {
  const double p = spec.p();
  double r = 1e-3;
  for (int i = 0; i < 400; ++i) {
    const auto I = origin_integrals(spec, r, 1e-10);
    const double c1 = std::pow(alpha, p - 1.0) * I.I1 / (spec.n() - 2.0);
    if (p * c1 * c1 < 0.01 * tol.ode_rel) return r;
    r *= 0.5;
  }
  return r;
}

Trajectory integrate(const ProblemSpec& spec, double alpha, const Tolerances& tol, double horizon,
                     const IntegrateOptions& opts) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw DomainError("integrate: alpha must be non-negative and finite");
  if (!(horizon > 0.0)) throw DomainError("integrate: horizon must be positive");
  tol.validate();
  for (double k : opts.r_alpha_ks)
    if (!(k > 1.0)) throw DomainError("integrate: r_alpha levels must exceed 1");

  Trajectory tr(spec, alpha);
  if (alpha == 0.0) {
    tr.r_start_ = horizon;
    tr.horizon_ = horizon;
    tr.samples_ = {tr.picard(0.0), tr.picard(horizon)};
    return tr;
  }
  const int n = spec.n();
  const double m = 0.5 * (n - 2);
  const double p = spec.p();
  const WeightFunction& wf = spec.weight();

  const double r0 = std::min(picard_radius(spec, alpha, tol), 0.5 * horizon);
  tr.r_start_ = r0;
  const Sample s0 = tr.picard(r0);
  tr.samples_.push_back(tr.picard(0.0));
  tr.samples_.push_back(s0);

  const double gexp = m + 2.0 - m * p;
  auto rhs = [&](double t, const ode::State<2>& y) -> ode::State<2> {
    const double r = std::exp(t);
    const double wp = y[0] > 0.0 ? std::pow(y[0], p) : 0.0;
    const double G = wp == 0.0 ? 0.0 : std::pow(r, gexp) * wf.f(r);
    return {y[1], m * m * y[0] - G * wp};
  };

  ode::State<2> y0{s0.w, r0 * s0.dw};
  ode::StepControl ctl;
  ctl.rel_tol = tol.ode_rel;
  ctl.abs_tol = tol.ode_abs * alpha * std::pow(r0, m);

  std::vector<double> levels = opts.r_alpha_ks;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<bool> found(levels.size(), false);
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (s0.u <= alpha / levels[i]) {
      tr.r_alpha_k_[levels[i]] = r0;
      found[i] = true;
    }

  bool stop_flag = false;
  auto observer = [&](const ode::DenseSegment<2>& seg, const ode::State<2>& y, const ode::State<2>&) {
    tr.segments_.push_back(seg);
    const double t1 = seg.t1();
    const double r1 = std::exp(t1);
    const Sample s1 = tr.from_state(r1, y);

    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (found[i]) continue;
      const double level = alpha / levels[i];
      if (s1.u <= level) {
        auto g = [&](double t) { return std::exp(-m * t) * seg.eval(t)[0] - level; };
        const double ga = g(seg.t0);
        double tr_root = seg.t0;
        if (ga > 0.0) tr_root = refine_root(g, seg.t0, t1, ga, g(t1), root_tol_t(tol.root_abs, r1));
        tr.r_alpha_k_[levels[i]] = std::exp(tr_root);
        found[i] = true;
      }
    }
    if (!tr.crossing_ && y[0] <= 0.0) {
      auto g = [&](double t) { return seg.eval(t)[0]; };
      const double ga = g(seg.t0);
      const double troot = ga > 0.0 ? refine_root(g, seg.t0, t1, ga, y[0], root_tol_t(tol.root_abs, r1))
                                    : seg.t0;
      const double rc = std::exp(troot);
      tr.crossing_ = rc;
      if (!opts.continue_past_zero) {
        tr.horizon_ = rc;
        tr.termination_ = Termination::Crossed;
        Sample sc = tr.from_state(rc, seg.eval(troot));
        sc.u = 0.0;
        sc.w = 0.0;
        tr.samples_.push_back(sc);
        stop_flag = true;
        return false;
      }
    }
    tr.samples_.push_back(s1);
    if (y[0] > 0.0 && s1.u < kUnderflow) {
      tr.horizon_ = r1;
      tr.termination_ = Termination::Underflow;
      stop_flag = true;
      return false;
    }
    return true;
  };

  const double t_end = std::log(horizon);
  double t_reached;
  try {
    t_reached = ode::dopri5<2>(rhs, std::log(r0), y0, t_end, ctl, observer);
  } catch (const StepSizeCollapse& e) {
    const double rc = std::exp(e.radius());
    std::ostringstream os;
    os << "step size collapse at r = " << rc << " (alpha = " << alpha << ")";
    throw StepSizeCollapse(rc, os.str());
  }
  if (!stop_flag) {
    tr.horizon_ = std::exp(t_reached);
    if (std::abs(t_reached - t_end) < 1e-12 * std::max(1.0, std::abs(t_end))) tr.horizon_ = horizon;
    tr.termination_ = Termination::HorizonReached;
    if (!tr.samples_.empty()) tr.samples_.back().r = tr.horizon_;
  }
  return tr;
}

double estimate_r_alpha(const ProblemSpec& spec, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("estimate_r_alpha: alpha must be positive");
  const int n = spec.n();
  const double c = std::pow(alpha, spec.p() - 1.0) / (n - 2.0);
  auto F = [&](double r) {
    const auto I = origin_integrals(spec, r, 1e-8);
    return c * (I.I1 - std::pow(r, 2.0 - n) * I.In) - 0.5;
  };
  double lo = 1.0, hi = 1.0;
  if (F(1.0) > 0.0) {
    for (int i = 0; i < 60 && F(lo) > 0.0; ++i) lo *= 0.1;
  } else {
    for (int i = 0; i < 60 && F(hi) <= 0.0; ++i) hi *= 10.0;
  }
  if (lo == hi) {
    if (F(1.0) > 0.0)
      hi = lo * 10.0;
    else
      lo = hi / 10.0;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (F(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return std::sqrt(lo * hi);
}

double default_horizon(const ProblemSpec& spec, double alpha) {
  return std::max(1e3, 20.0 * estimate_r_alpha(spec, alpha));
}

std::optional<double> detect_r_alpha(const Trajectory& traj, double k, double root_abs) {
  if (!(k > 1.0)) throw DomainError("detect_r_alpha: k must exceed 1");
  const double level = traj.alpha() / k;
  const auto& s = traj.samples();
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i].u > level) continue;
    double a = s[i - 1].r, b = s[i].r;
    for (int it = 0; it < 200 && b - a > std::max(root_abs, 4 * std::numeric_limits<double>::epsilon() * b); ++it) {
      const double mid = a < traj.r_start() ? 0.5 * (a + b) : std::sqrt(a * b);
      if (traj.at(mid).u > level)
        a = mid;
      else
        b = mid;
    }
    return b;
  }
  return std::nullopt;
}

double residual_integral_equation(const Trajectory& traj, double r, double quad_rel) {
  const ProblemSpec& spec = traj.spec();
  const int n = spec.n();
  const double p = spec.p();
  const WeightFunction& wf = spec.weight();
  if (r == 0.0) return traj.at(0.0).u - traj.alpha();
  auto g = [&](double s, const Sample& x) {
    if (s <= 0.0 || x.u <= 0.0) return 0.0;
    return (1.0 - std::pow(s / r, n - 2)) * s * wf.f(s) * std::pow(x.u, p);
  };
  const double I = traj.integrate(g, 0.0, r, quad_rel);
  return traj.at(r).u - (traj.alpha() - I / (n - 2.0));
}

double fit_decay_exponent(const Trajectory& traj, double r_end, int points) {
  const double r_beg = r_end / 10.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < points; ++i) {
    const double x = std::log(r_beg) + std::log(10.0) * i / (points - 1);
    const double u = traj.at(std::min(std::exp(x), traj.horizon())).u;
    if (!(u > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double y = std::log(u);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double N = points;
  return -(N * sxy - sx * sy) / (N * sxx - sx * sx);
}

FluxCheck flux_limit_check(const Trajectory& traj) {
  FluxCheck out;
  if (traj.crossing_radius()) return out;
  const int n = traj.spec().n();
  const double R = traj.horizon();
  const Sample s = traj.at(R);
  out.applicable = true;
  out.radius = R;
  out.value = std::pow(R, n - 1) * s.du;
  out.fitted_exponent = fit_decay_exponent(traj, R);
  out.predicted = -out.fitted_exponent * std::pow(R, n - 2) * s.u;
  out.pass = std::abs(out.value) <= 10.0 * std::abs(out.predicted);
  return out;
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  os << "r,u,du,w,dw\n";
  char buf[160];
  for (const auto& s : traj.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.r, s.u, s.du, s.w, s.dw);
    os << buf;
  }
}

}  // namespace matukuma
