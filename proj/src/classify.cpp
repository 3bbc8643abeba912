#include "matukuma/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace matukuma {
namespace {

constexpr int kFitPoints = 64;

double ls_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t i0,
                std::size_t i1, double* r2 = nullptr) {
  const double m = static_cast<double>(i1 - i0);
  double sx = 0, sy = 0;
  for (std::size_t i = i0; i < i1; ++i) {
    sx += x[i];
    sy += y[i];
  }
  sx /= m;
  sy /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = i0; i < i1; ++i) {
    sxx += (x[i] - sx) * (x[i] - sx);
    sxy += (x[i] - sx) * (y[i] - sy);
    syy += (y[i] - sy) * (y[i] - sy);
  }
  if (r2) *r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return sxy / sxx;
}

/// Spearman rank correlation of v against its index.
double spearman_trend(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 3) return 0.0;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (double(i) + double(j));
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
    i = j + 1;
  }
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 0.0);
  const double mx = (n - 1) / 2.0;
  double my = std::accumulate(rank.begin(), rank.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (rank[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (rank[i] - my) * (rank[i] - my);
  }
  if (syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

/// Looks for a rise of w after its first major peak, the first local
/// maximum reaching half the overall maximum. Periodic w has pulses of equal
/// height, so the overall maximum alone would land on an arbitrary pulse.
bool w_rebounds(const Trajectory& traj) {
  const auto& s = traj.samples();
  if (s.empty()) return false;
  double wmax = 0.0;
  for (const auto& x : s) wmax = std::max(wmax, x.w);
  std::size_t peak = s.size() - 1;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i].w >= 0.5 * wmax && s[i].w >= s[i + 1].w) {
      peak = i;
      break;
    }
  double wmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = peak + 1; i < s.size(); ++i) {
    if (!(s[i].u > 0.0)) return false;
    wmin = std::min(wmin, s[i].w);
    if (wmin > 0.0 && s[i].w > wmin * (1.0 + 1e-3)) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Crossing:
      return "crossing";
    case Label::SlowDecay:
      return "slow_decay";
    case Label::RapidDecay:
      return "rapid_decay";
    case Label::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

char to_char(Label l) {
  switch (l) {
    case Label::Crossing:
      return 'C';
    case Label::SlowDecay:
      return 'S';
    case Label::RapidDecay:
      return 'R';
    case Label::Undetermined:
      return 'U';
  }
  return 'U';
}

Classification classify(const Trajectory& traj, const Tolerances& tol) {
  Classification c;
  const ProblemSpec& spec = traj.spec();
  const int n = spec.n();
  const DerivedExponents d = spec.derived();
  const double R = traj.horizon();
  c.window_end = R;
  c.fitted_decay_exponent = std::numeric_limits<double>::quiet_NaN();

  if (traj.crossing_radius()) {
    c.label = Label::Crossing;
    c.crossing_radius = traj.crossing_radius();
    c.confidence = 1.0;
    c.reason = "zero detected";
    return c;
  }

  const double r_beg = std::max(R / 10.0, traj.r_start());
  std::vector<double> x, y, D, W;
  for (int i = 0; i < kFitPoints; ++i) {
    const double r = std::min(R, std::exp(std::log(r_beg) + std::log(R / r_beg) * i / (kFitPoints - 1)));
    const Sample s = traj.at(r);
    x.push_back(std::log(r));
    y.push_back(s.u > 0.0 ? std::log(s.u) : std::numeric_limits<double>::quiet_NaN());
    D.push_back(std::pow(r, n - 2) * s.u);
    W.push_back(s.w);
  }
  c.D_limit = D.back();
  c.D_trend = spearman_trend(D);
  c.w_limit = W.back();
  c.w_trend = spearman_trend(W);

  if (w_rebounds(traj)) {
    c.label = Label::SlowDecay;
    c.confidence = 0.9;
    c.reason = "w rebounds after its peak";
    return c;
  }
  if (std::any_of(y.begin(), y.end(), [](double v) { return !std::isfinite(v); })) {
    c.reason = "u is not positive over the fit window";
    return c;
  }

  const double rapid = d.rapid_rate, slow = d.slow_rate;
  const double gap = std::abs(rapid - slow);
  const double margin = tol.class_margin * gap;
  const double m = -ls_slope(x, y, 0, x.size());
  const double m_lo = -ls_slope(x, y, 0, x.size() / 2);
  const double m_hi = -ls_slope(x, y, x.size() / 2, x.size());
  c.fitted_decay_exponent = m;
  const bool consistent = std::abs(m_lo - m_hi) <= 0.1 * std::max(std::abs(m), gap);
  const double decades = std::log10(R / r_beg);

  if (consistent && gap > 0.0) {
    if (std::abs(m - rapid) < margin) {
      c.label = Label::RapidDecay;
      c.confidence = 1.0 - std::abs(m - rapid) / margin;
      c.reason = "decay exponent matches n-2";
      return c;
    }
    if (std::abs(m - slow) < margin) {
      c.label = Label::SlowDecay;
      c.confidence = 1.0 - std::abs(m - slow) / margin;
      c.reason = "decay exponent matches (l+2)/(p-1)";
      return c;
    }
  }
  if (gap > 0.0 && decades > 0.5 && D.front() > 0.0) {
    const double growth = std::log10(D.back() / D.front()) / decades;
    if (c.D_trend > 0.9 && growth > 0.5 * gap) {
      c.label = Label::SlowDecay;
      c.confidence = 0.5;
      c.reason = "r^(n-2) u increases steadily";
      return c;
    }
    if (std::abs(growth) < 0.25 * gap) {
      c.label = Label::RapidDecay;
      c.confidence = 0.5;
      c.reason = "r^(n-2) u levels off";
      return c;
    }
  }
  std::ostringstream os;
  os << "decay exponent " << m << " matches neither target"
     << (consistent ? "" : " (fit halves disagree)");
  c.reason = os.str();
  return c;
}

double classification_horizon(const ProblemSpec& spec, double alpha, const Tolerances& tol) {
  if (tol.class_horizon > 0.0) return tol.class_horizon;
  return estimate_r_alpha(spec, alpha) * std::exp(60.0);
}

Shot shoot(const ProblemSpec& spec, double alpha, const Tolerances& tol) {
  const double cap = classification_horizon(spec, alpha, tol);
  IntegrateOptions opts;
  Trajectory a = integrate(spec, alpha, tol, cap, opts);
  Trajectory b = integrate(spec, alpha, tol.scaled(0.01), cap, opts);

  double divergence = 0.0;
  bool agree_crossing = false;
  if (a.crossing_radius() && b.crossing_radius()) {
    const double ra = *a.crossing_radius(), rb = *b.crossing_radius();
    agree_crossing = std::abs(ra - rb) <= 0.05 * rb;
  }
  if (!agree_crossing) {
    const double lo = std::max(a.r_start(), b.r_start());
    const double hi = std::min(a.horizon(), b.horizon());
    const double t_lo = std::log(lo), t_hi = std::log(hi);
    const int steps = std::max(2, static_cast<int>(std::ceil((t_hi - t_lo) / 0.02)));
    for (int i = 0; i <= steps; ++i) {
      const double r = i == steps ? hi : std::exp(t_lo + (t_hi - t_lo) * i / steps);
      const double wa = a.at(r).w, wb = b.at(r).w;
      if (!(wb > 0.0) || std::abs(wa - wb) > 0.05 * std::abs(wb)) {
        divergence = r;
        break;
      }
    }
    if (divergence > 0.0)
      a = a.truncated(divergence);
    else if (a.horizon() > hi)
      a = a.truncated(hi);
  }
  Classification c = classify(a, tol);
  return Shot{std::move(a), std::move(c), divergence};
}

ScalingFit fit_r_alpha_scaling(const ProblemSpec& spec, std::vector<double> alphas, double k,
                               const Tolerances& tol) {
  if (!(k > 1.0)) throw DomainError("fit_r_alpha_scaling: k must exceed 1");
  std::sort(alphas.begin(), alphas.end());
  ScalingFit out;
  IntegrateOptions opts;
  opts.r_alpha_ks = {k};
  for (double a : alphas) {
    const double horizon = std::max(100.0, 10.0 * k) * estimate_r_alpha(spec, a);
    const Trajectory tr = integrate(spec, a, tol, horizon, opts);
    auto it = tr.r_alpha_k().find(k);
    if (it == tr.r_alpha_k().end()) continue;
    out.alphas.push_back(a);
    out.radii.push_back(it->second);
  }
  const std::size_t n = out.alphas.size();
  const std::size_t half = n / 2;
  if (half < 5 || n - half < 5)
    throw ValidationError("insufficient_data",
                          "fit_r_alpha_scaling needs at least 5 usable r_alpha values in each half");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(out.alphas[i]);
    y[i] = std::log(out.radii[i]);
  }
  out.slope_small = ls_slope(x, y, 0, half, &out.r2_small);
  out.slope_large = ls_slope(x, y, half, n, &out.r2_large);
  out.slope_all = ls_slope(x, y, 0, n, &out.r2_all);
  out.intercept_all = std::accumulate(y.begin(), y.end(), 0.0) / n -
                      out.slope_all * std::accumulate(x.begin(), x.end(), 0.0) / n;
  return out;
}

double apriori_sup(const std::vector<Trajectory>& trajs, double r0) {
  double sup = 0.0;
  for (const auto& tr : trajs) {
    if (tr.crossing_radius()) throw DomainError("apriori_sup: trajectory is not positive");
    const double H = tr.horizon();
    if (!(H > r0)) throw DomainError("apriori_sup: trajectory ends before r0");
    for (const auto& s : tr.samples())
      if (s.r >= r0) sup = std::max(sup, s.w);
    constexpr int kGrid = 2000;
    for (int i = 0; i <= kGrid; ++i) {
      const double r = std::min(H, r0 * std::pow(H / r0, double(i) / kGrid));
      sup = std::max(sup, tr.at(r).w);
    }
  }
  return sup;
}

AprioriBound apriori_bound_check(const std::vector<Trajectory>& base,
                                 const std::vector<Trajectory>& extension, double r0) {
  AprioriBound out;
  out.C_base = apriori_sup(base, r0);
  out.C_extended = out.C_base;
  if (!extension.empty()) out.C_extended = std::max(out.C_base, apriori_sup(extension, r0));
  out.variation = out.C_base > 0.0 ? std::abs(out.C_extended - out.C_base) / out.C_base : 0.0;
  out.pass = out.variation < 0.1;
  return out;
}

}  // namespace matukuma
