#include "matukuma/scan.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>
#include <variant>

#include "matukuma/quadrature.hpp"

namespace matukuma {
namespace {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          body(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Label label_at(const ProblemSpec& spec, double alpha, const Tolerances& tol) {
  return shoot(spec, alpha, tol).classification.label;
}

std::vector<Boundary> refine(const ProblemSpec& spec, const Tolerances& tol, const SweepOptions& opts, double lo,
                             Label left, double hi, Label right, int depth = 0) {
  int it = 0;
  while (hi - lo >= opts.rel_bracket * lo && it < opts.max_iterations) {
    const double mid = std::sqrt(lo * hi);
    const Label m = label_at(spec, mid, tol);
    ++it;
    if (m == left) {
      lo = mid;
    } else if (m == right) {
      hi = mid;
    } else if (m == Label::Undetermined || depth > 4) {
      break;
    } else {
      auto a = refine(spec, tol, opts, lo, left, mid, m, depth + 1);
      auto b = refine(spec, tol, opts, mid, m, hi, right, depth + 1);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
  }
  return {Boundary{lo, hi, left, right, it}};
}

/// Sign changes of h on a 40-per-decade grid over [1e-6, 1e6].
struct HSigns {
  std::optional<double> r0;  ///< inf {h < 0}
  std::optional<double> r1;  ///< sup {h > 0}
  std::vector<double> zeros;
};

double bisect_sign(const std::function<double(double)>& g, double a, double b) {
  const bool sa = g(a) > 0.0;
  for (int i = 0; i < 200 && b - a > 1e-14 * b; ++i) {
    const double m = 0.5 * (a + b);
    ((g(m) > 0.0) == sa ? a : b) = m;
  }
  return 0.5 * (a + b);
}

HSigns h_signs(const ProblemSpec& spec) {
  const WeightFunction& w = spec.weight();
  const double l = spec.l();
  auto h = [&](double r) { return eval_h(w, r, l); };
  const std::vector<double> grid = log_grid(1e-6, 1e6, 481);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = h(grid[i]);
  HSigns out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (v[i] < 0.0) {
      out.r0 = i == 0 ? grid[0] : bisect_sign([&](double r) { return h(r) < 0.0 ? -1.0 : 1.0; }, grid[i - 1], grid[i]);
      break;
    }
  for (std::size_t i = grid.size(); i-- > 0;)
    if (v[i] > 0.0) {
      if (i + 1 < grid.size())
        out.r1 = bisect_sign([&](double r) { return h(r) > 0.0 ? 1.0 : -1.0; }, grid[i], grid[i + 1]);
      break;
    }
  for (std::size_t i = 1; i < grid.size(); ++i)
    if ((v[i - 1] > 0.0) != (v[i] > 0.0))
      out.zeros.push_back(bisect_sign([&](double r) { return h(r); }, grid[i - 1], grid[i]));
  return out;
}

/// int_a^b g(r) r^(n+l-1) dr with breakpoints at the zeros of h and the knots of f.
double h_moment(const ProblemSpec& spec, const std::function<double(double)>& g, double a, double b,
                const std::vector<double>& zeros, double rel) {
  std::vector<double> pts = quad::log_breakpoints(a, b);
  for (double z : zeros)
    if (z > a && z < b) pts.push_back(z);
  for (double z : spec.weight().breakpoints())
    if (z > a && z < b) pts.push_back(z);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double e = spec.n() + spec.l() - 1.0;
  return quad::adaptive([&](double r) { return r == 0.0 ? 0.0 : g(r) * std::pow(r, e); }, pts, rel, 0.0, 20000)
      .value;
}

/// Log-alpha bisection for the alpha where estimate_r_alpha equals r.
double alpha_for_radius(const ProblemSpec& spec, double r) {
  double lo = -700.0, hi = 700.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double est = estimate_r_alpha(spec, std::exp(mid));
    (est > r ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

std::optional<double> measured_r_alpha(const ProblemSpec& spec, double alpha, const Tolerances& tol) {
  return integrate(spec, alpha, tol, 100.0 * estimate_r_alpha(spec, alpha)).r_alpha();
}

}  // namespace

double phi_closed_form(const ProblemSpec& spec, double alpha, double r) {
  if (!std::holds_alternative<PurePower>(spec.weight().family()))
    throw DomainError("phi_closed_form: weight must be a pure power");
  if (!spec.is_critical()) throw DomainError("phi_closed_form: p must equal p*");
  if (!(alpha >= 0.0) || !(r >= 0.0)) throw DomainError("phi_closed_form: alpha and r must be non-negative");
  const double s = spec.weight().scale();
  // u -> u / s^(1/(p-1)) maps the scaled weight back to r^l.
  const double k = std::pow(s, 1.0 / (spec.p() - 1.0));
  return critical_profile(spec.n(), spec.l(), alpha * k, r) / k;
}

double example_iii_solution(int n, double l, double p, double r) {
  if (n < 3) throw DomainError("example_iii_solution: n must be at least 3");
  const double lo = (n + l) / (n - 2.0), hi = critical_exponent(n, l);
  if (!(p > lo && p < hi)) {
    std::ostringstream os;
    os << "example_iii_solution: p = " << p << " outside (" << lo << ", " << hi << ")";
    throw DomainError(os.str());
  }
  if (!(r >= 0.0)) throw DomainError("example_iii_solution: r must be non-negative");
  return std::pow(1.0 + r * r, -(l + 2.0) / (2.0 * (p - 1.0)));
}

std::vector<OracleResult> run_oracles(const Tolerances& tol, const std::vector<double>& phi_alphas, double r_max) {
  std::vector<OracleResult> out;
  const std::vector<double> radii = [&] {
    std::vector<double> g = log_grid(1e-6, r_max, 2000);
    g.insert(g.begin(), 0.0);
    return g;
  }();
  auto measure = [&](const std::string& name, const ProblemSpec& spec, double alpha, auto exact) {
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory tr = integrate(spec, alpha, tol, r_max);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double err = 0.0;
    for (double r : radii) {
      const double e = exact(r);
      err = std::max(err, std::abs(tr.at(r).u - e) / std::abs(e));
    }
    out.push_back(OracleResult{name, alpha, r_max, err, secs});
  };
  const ProblemSpec phi(3, -0.5, -0.5, 4.0, WeightFunction(PurePower{-0.5}));
  for (double a : phi_alphas) measure("phi", phi, a, [&](double r) { return phi_closed_form(phi, a, r); });
  const ProblemSpec e3(3, -1.0, 0.0, 2.5, make_example_iii(3, -1.0, 2.5));
  measure("example_iii", e3, 1.0, [](double r) { return example_iii_solution(3, -1.0, 2.5, r); });
  return out;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) g[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

StructureReport sweep(const ProblemSpec& spec, const std::vector<double>& alpha_grid, const Tolerances& tol,
                      const SweepOptions& opts) {
  if (alpha_grid.size() < 8) throw ValidationError("grid", "sweep needs at least 8 grid points");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0) || !std::isfinite(alpha_grid[i]))
      throw ValidationError("grid", "sweep grid values must be positive and finite");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
      throw ValidationError("grid", "sweep grid must be strictly increasing");
  }
  StructureReport rep;
  rep.grid.resize(alpha_grid.size());
  parallel_for(alpha_grid.size(), opts.jobs, [&](std::size_t i) {
    rep.grid[i] = GridPoint{alpha_grid[i], shoot(spec, alpha_grid[i], tol).classification};
  });

  struct Bracket {
    double lo, hi;
    Label left, right;
  };
  std::vector<Bracket> brackets;
  std::optional<std::size_t> prev;
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    const Label l = rep.grid[i].classification.label;
    if (l == Label::Undetermined) continue;
    if (prev) {
      const Label pl = rep.grid[*prev].classification.label;
      if (pl != l) brackets.push_back({rep.grid[*prev].alpha, rep.grid[i].alpha, pl, l});
    }
    if (rep.pattern.empty() || rep.pattern.back() != to_char(l)) {
      if (!rep.pattern.empty()) rep.pattern += '|';
      rep.pattern += to_char(l);
    }
    prev = i;
  }

  std::vector<std::vector<Boundary>> refined(brackets.size());
  parallel_for(brackets.size(), opts.jobs, [&](std::size_t i) {
    const Bracket& b = brackets[i];
    refined[i] = refine(spec, tol, opts, b.lo, b.left, b.hi, b.right);
  });
  for (auto& v : refined) rep.boundaries.insert(rep.boundaries.end(), v.begin(), v.end());
  auto cs = [](Label a, Label b) {
    return (a == Label::Crossing && b == Label::SlowDecay) || (a == Label::SlowDecay && b == Label::Crossing);
  };
  for (std::size_t i = 0; i < rep.boundaries.size(); ++i) {
    const Boundary& b = rep.boundaries[i];
    if (cs(b.left, b.right)) rep.rapid_alphas.push_back(b.alpha());
    if (i + 1 < rep.boundaries.size()) {
      const Boundary& c = rep.boundaries[i + 1];
      if (b.right == Label::RapidDecay && c.left == Label::RapidDecay && cs(b.left, c.right))
        rep.rapid_alphas.push_back(std::sqrt(b.hi * c.lo));
    }
  }
  return rep;
}

void write_structure_csv(const StructureReport& rep, std::ostream& os) {
  os << "alpha,label,decay_exponent,crossing_radius\n";
  char buf[128];
  for (const GridPoint& g : rep.grid) {
    const Classification& c = g.classification;
    std::snprintf(buf, sizeof buf, "%.17g,", g.alpha);
    os << buf << to_string(c.label) << ',';
    std::snprintf(buf, sizeof buf, "%.17g,", c.fitted_decay_exponent);
    os << buf;
    if (c.crossing_radius) {
      std::snprintf(buf, sizeof buf, "%.17g", *c.crossing_radius);
      os << buf;
    }
    os << '\n';
  }
}

Theorem5Report theorem5_pipeline(const BumpFunction& k, const ProblemSpec& spec, const Theorem5Config& cfg,
                                 const Tolerances& tol, const SweepOptions& opts) {
  Theorem5Report rep;
  k.validate();
  rep.log.push_back("2.1(a), (b), (c), (e) hold for k");
  const ProblemSpec base = spec.with_p(spec.p_star());
  const ProblemSpec fs = base.with_weight(build_constructed_f(k, cfg.epsilon, base));
  {
    std::ostringstream os;
    os << "f built with epsilon = " << cfg.epsilon << " (epsilon_max = " << epsilon_max(k, base) << ")";
    rep.log.push_back(os.str());
  }
  rep.condition = check_condition_2_1d(k, cfg.alpha_star, cfg.r_star, cfg.delta, base);
  {
    std::ostringstream os;
    os << "2.1(d): value = " << rep.condition.value << " against -delta^2 = " << -cfg.delta * cfg.delta;
    if (!rep.condition.holds) throw ValidationError("2.1d", os.str());
    rep.log.push_back(os.str());
  }
  rep.hypotheses = check_hypotheses(fs.weight(), fs);
  for (const char* id : {"f4", "f6", "f7", "f9"}) {
    const HypothesisResult& h = rep.hypotheses.get(id);
    std::ostringstream os;
    os << "(" << id << ") " << to_string(h.status) << (h.note.empty() ? "" : ": ") << h.note;
    if (h.status != HypStatus::Holds) throw ValidationError(id, os.str());
    rep.log.push_back(os.str());
  }

  const std::vector<double> grid =
      log_grid(cfg.alpha_star * cfg.lo_factor, cfg.alpha_star * cfg.hi_factor, cfg.points);
  rep.structure = sweep(fs, grid, tol, opts);
  rep.alpha_star_label = shoot(fs, cfg.alpha_star, tol).classification.label;
  rep.crossing_low = rep.structure.grid.front().classification.label == Label::Crossing;
  rep.crossing_high = rep.structure.grid.back().classification.label == Label::Crossing;
  rep.rapid_count = rep.structure.rapid_alphas.size();
  {
    std::ostringstream os;
    os << "pattern " << rep.structure.pattern << ", label at alpha* " << to_string(rep.alpha_star_label) << ", "
       << rep.rapid_count << " rapid candidates";
    rep.log.push_back(os.str());
  }
  rep.pass = rep.crossing_low && rep.crossing_high && rep.alpha_star_label == Label::SlowDecay &&
             rep.rapid_count >= 2;
  return rep;
}

SmallAlphaReport theorem1_2_smallalpha_check(const ProblemSpec& spec, const Tolerances& tol,
                                             const std::vector<double>& fallback_alphas) {
  SmallAlphaReport rep;
  const HypothesisReport hyp = check_hypotheses(spec.weight(), spec);
  const double nl = spec.n() + spec.l();
  const double p = spec.p();
  const bool supercritical = p >= spec.p_star() * (1.0 - 1e-12);
  const bool f34 = hyp.holds("f3") && hyp.holds("f4");
  const double beta = hyp.beta.value_or(0.0);

  std::ostringstream gate;
  if (!supercritical) {
    gate << "p < p*";
  } else if (!f34) {
    gate << "(f3) " << to_string(hyp.get("f3").status) << ", (f4) " << to_string(hyp.get("f4").status);
  } else if (beta > 0.0 && beta < nl) {
    rep.theorem = 1;
    gate << "(f3), (f4) hold and 0 < beta = " << beta << " < n+l";
  } else if (hyp.holds("f5")) {
    rep.theorem = 2;
    gate << "(f3), (f4), (f5) hold";
  } else {
    gate << "beta = " << beta << " is not below n+l and (f5) " << to_string(hyp.get("f5").status);
  }
  rep.gate = gate.str();

  std::vector<double> alphas = fallback_alphas;
  if (rep.theorem != 0) {
    const HSigns hs = h_signs(spec);
    if (!hs.r0 || !hs.r1) throw NumericError("theorem1_2_smallalpha_check: h does not change sign");
    rep.r0 = *hs.r0;
    rep.r1 = *hs.r1;
    rep.delta1 = hyp.delta1.value_or(0.0);
    rep.beta = beta;
    auto h = [&](double r) { return eval_h(spec.weight(), r, spec.l()); };
    rep.delta2 = h_moment(spec, [&](double r) { return std::abs(h(r)); }, 0.0, rep.r1, hs.zeros, tol.quad_rel);

    double alpha0 = 0.0;
    if (rep.theorem == 1) {
      rep.k = std::pow(2.0, -(p + 1.0)) / (nl - beta) * (1.0 - std::pow(2.0, -(nl - beta)));
      rep.r_required = std::max(std::pow(rep.delta2 / (rep.k * rep.delta1), 1.0 / (nl - beta)), 2.0 * rep.r1);
      const double guess = alpha_for_radius(spec, rep.r_required);
      const ScalingFit fit = fit_r_alpha_scaling(spec, log_grid(guess / 10.0, guess * 10.0, 11), 2.0, tol);
      alpha0 = std::exp((std::log(rep.r_required) - fit.intercept_all) / fit.slope_all);
      for (int i = 0; i < 50; ++i) {
        const auto ra = measured_r_alpha(spec, alpha0, tol);
        if (ra && *ra >= rep.r_required) break;
        alpha0 *= 0.9;
      }
    } else {
      // r^0 = sup {H >= 0}; then (3.11 i-iii) fix epsilon and alpha0.
      const std::vector<double> grid = log_grid(1e-6, 1e6, 481);
      double rr0 = 0.0;
      for (double r : grid)
        if (eval_H(spec.weight(), r, spec.n(), spec.l(), tol.quad_rel) >= 0.0) rr0 = r;
      const double neg = h_moment(spec, [&](double r) { return std::min(h(r), 0.0); }, 0.0, rr0, hs.zeros, tol.quad_rel);
      const double tail = h_moment(spec, h, rr0, 2.0 * rr0, hs.zeros, tol.quad_rel);
      if (!(tail < 0.0) || !(neg < 0.0))
        throw NumericError("theorem1_2_smallalpha_check: condition (3.11 iii) cannot be met");
      const double eps = std::min(0.5, 0.5 * tail / (std::pow(2.0, p + 1.0) * neg));
      rep.r_required = 2.0 * rr0;
      alpha0 = alpha_for_radius(spec, rep.r_required);
      for (int i = 0; i < 200; ++i) {
        const Trajectory tr = integrate(spec, alpha0, tol, 100.0 * estimate_r_alpha(spec, alpha0));
        const auto ra = tr.r_alpha();
        const bool ii = ra && *ra > rep.r_required;
        const bool i_ok = rr0 <= tr.horizon() && tr.at(rr0).u >= std::pow(1.0 - eps, 1.0 / (p + 1.0)) * alpha0;
        if (ii && i_ok) break;
        alpha0 *= 0.5;
      }
    }
    rep.alpha0 = alpha0;
    rep.r_alpha_at_alpha0 = measured_r_alpha(spec, alpha0, tol);
    alphas = {alpha0 / 100.0, alpha0 / 10.0, alpha0};
  }

  rep.all_noncrossing = rep.all_crossing = true;
  for (double a : alphas) {
    SmallAlphaSample s{a, shoot(spec, a, tol).classification};
    const bool crossed = s.classification.label == Label::Crossing;
    const bool positive = s.classification.label == Label::SlowDecay || s.classification.label == Label::RapidDecay;
    rep.all_noncrossing = rep.all_noncrossing && positive;
    rep.all_crossing = rep.all_crossing && crossed;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

}  // namespace matukuma
