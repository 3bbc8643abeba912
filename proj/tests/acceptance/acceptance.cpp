#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "matukuma/classify.hpp"
#include "matukuma/pohozaev.hpp"
#include "matukuma/scan.hpp"
#include "matukuma/serialize.hpp"

using namespace matukuma;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <class T>
  Detail& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProblemSpec pure(double p) { return ProblemSpec(3, -0.5, -0.5, p, WeightFunction(PurePower{-0.5})); }
ProblemSpec example3() { return ProblemSpec(3, -1.0, 0.0, 2.5, make_example_iii(3, -1.0, 2.5)); }

Outcome closed_form_oracle() {
  Outcome o{true, ""};
  Detail d;
  double worst = 0.0, slowest = 0.0;
  for (const OracleResult& r : run_oracles(Tolerances{})) {
    if (r.name.find("phi") == std::string::npos) continue;
    worst = std::max(worst, r.max_rel_error);
    slowest = std::max(slowest, r.seconds);
    if (!(r.max_rel_error <= 1e-6 && r.seconds < 1.0 && r.r_max >= 1e3)) o.pass = false;
  }
  d << "max rel error " << worst << ", slowest shot " << slowest << " s";
  o.detail = d.str();
  return o;
}

Outcome exact_solution_oracle() {
  Outcome o{false, ""};
  double err = -1.0;
  for (const OracleResult& r : run_oracles(Tolerances{}, {}))
    if (r.name.find("example_iii") != std::string::npos) err = r.max_rel_error;
  const Shot s = shoot(example3(), 1.0, Tolerances{});
  o.pass = err >= 0.0 && err <= 1e-6 && s.classification.label == Label::SlowDecay;
  o.detail = (Detail() << "max rel error " << err << ", label " << to_string(s.classification.label)).str();
  return o;
}

Outcome pohozaev_residuals() {
  Outcome o{true, ""};
  double worst = 0.0;
  bool shrinks = true;
  const Tolerances tol;
  for (const ProblemSpec& spec : {pure(4.0), example3()}) {
    const Trajectory coarse = integrate(spec, 1.0, tol, 1e3);
    const Trajectory fine = integrate(spec, 1.0, tol.scaled(0.1), 1e3);
    for (Identity which : {Identity::Energy33, Identity::Variant41}) {
      double sum_coarse = 0.0, sum_fine = 0.0;
      for (double R : {1.0, 10.0, 100.0}) {
        const PohozaevReport a = which == Identity::Energy33 ? identity_3_3(coarse, R) : identity_4_1(coarse, R);
        const PohozaevReport b = which == Identity::Energy33 ? identity_3_3(fine, R) : identity_4_1(fine, R);
        const double rel = std::abs(a.residual) / a.scale;
        worst = std::max(worst, rel);
        if (!(rel <= 1e-6)) o.pass = false;
        sum_coarse += rel;
        sum_fine += std::abs(b.residual) / b.scale;
      }
      if (!(sum_fine < sum_coarse)) shrinks = false;
    }
  }
  o.pass = o.pass && shrinks;
  o.detail = (Detail() << "worst residual/scale " << worst << ", shrinks under tighter tolerance: "
                       << (shrinks ? "yes" : "no"))
                 .str();
  return o;
}

Outcome trichotomy() {
  int correct = 0;
  const Tolerances tol;
  for (double a : {0.1, 1.0, 10.0}) {
    if (shoot(pure(2.0), a, tol).classification.label == Label::Crossing) ++correct;
    if (shoot(pure(4.0), a, tol).classification.label == Label::RapidDecay) ++correct;
  }
  return {correct == 6, (Detail() << correct << "/6 labels correct").str()};
}

Outcome r_alpha_scaling() {
  const Tolerances tol;
  std::vector<double> alphas = log_grid(1e-3, 1e-1, 11);
  const ScalingFit fit = fit_r_alpha_scaling(pure(4.0), alphas, 2.0, tol);
  const double target = (1.0 - 4.0) / (2.0 - 0.5);
  const bool slope_ok = std::abs(fit.slope_all - target) <= 0.05 * std::abs(target);

  IntegrateOptions opts;
  opts.r_alpha_ks = {4.0};
  std::vector<double> r4;
  for (double a : alphas) {
    const Trajectory tr = integrate(pure(4.0), a, tol, 100.0 * estimate_r_alpha(pure(4.0), a), opts);
    const auto it = tr.r_alpha_k().find(4.0);
    r4.push_back(it == tr.r_alpha_k().end() ? std::nan("") : it->second);
  }
  bool monotone = std::all_of(r4.begin(), r4.end(), [](double r) { return std::isfinite(r); });
  for (std::size_t i = 1; i < r4.size(); ++i) monotone = monotone && r4[i] < r4[i - 1];
  return {slope_ok && monotone, (Detail() << "slope " << fit.slope_all << " (target " << target << "), r_{alpha,4} "
                                          << r4.front() << " -> " << r4.back()
                                          << (monotone ? " decreasing" : " not decreasing"))
                                    .str()};
}

Outcome example_weights() {
  const Tolerances tol;
  const ProblemSpec nine(3, -1.5, 0.0, 2.0, WeightFunction(ShiftedPower{9.0 / 8.0, 1, -0.75, -1}));
  const SmallAlphaReport n = theorem1_2_smallalpha_check(nine, tol);
  const ProblemSpec quarter(3, -0.5, 0.0, 4.0, WeightFunction(ShiftedPower{1, 1, -0.25, -0.25}));
  const SmallAlphaReport q = theorem1_2_smallalpha_check(quarter, tol);
  bool below = q.alpha0.has_value();
  for (const auto& s : q.samples) below = below && s.alpha <= *q.alpha0;
  const bool pass = n.all_crossing && n.samples.size() >= 4 && q.alpha0 && q.samples.size() >= 3 &&
                    q.all_noncrossing && below;
  Detail d;
  d << "9/8 weight: " << n.samples.size() << " samples, all crossing " << (n.all_crossing ? "yes" : "no")
    << "; quarter weight: alpha0 " << (q.alpha0 ? *q.alpha0 : std::nan("")) << ", " << q.samples.size()
    << " samples, all non-crossing " << (q.all_noncrossing ? "yes" : "no");
  return {pass, d.str()};
}

io::json read_config(const std::string& name) {
  std::ifstream f(std::string(MATUKUMA_CONFIG_DIR) + "/" + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return io::parse(ss.str());
}

Outcome construction_structure() {
  const auto t0 = std::chrono::steady_clock::now();
  const io::json cfg = read_config("theorem5.json");
  const io::json& wj = cfg["problem"]["weight"];
  const BumpFunction k = io::bump_from_json(wj);
  io::json base = cfg["problem"];
  base["weight"] = io::json{{"family", "pure_power"}};
  const ProblemSpec spec = io::problem_from_json(base);
  Theorem5Config t5;
  t5.epsilon = wj.at("epsilon").get<double>();
  const io::json& c = cfg["theorem5"];
  t5.alpha_star = c.at("alpha_star").get<double>();
  t5.r_star = c.at("r_star").get<double>();
  t5.delta = c.at("delta").get<double>();
  t5.lo_factor = c.at("lo_factor").get<double>();
  t5.hi_factor = c.at("hi_factor").get<double>();
  t5.points = c.at("points").get<int>();
  const Theorem5Report r = theorem5_pipeline(k, spec, t5, Tolerances{});
  const double elapsed = seconds_since(t0);

  const std::string& pat = r.structure.pattern;
  const bool shape = !pat.empty() && pat.front() == 'C' && pat.back() == 'C' && pat.find('S') != std::string::npos;
  const double decades = std::log10(t5.hi_factor / t5.lo_factor);
  bool brackets = true;
  for (const Boundary& b : r.structure.boundaries) brackets = brackets && b.width() < 1e-6 * b.lo;
  bool gates = true;
  for (const char* id : {"f4", "f6", "f7", "f9"}) gates = gates && r.hypotheses.holds(id);
  const auto& ra = r.structure.rapid_alphas;
  const bool ordered = ra.size() >= 2 && std::is_sorted(ra.begin(), ra.end()) && ra.front() < ra.back();
  const bool pass = r.pass && shape && decades >= 4.0 && brackets && gates && ordered && elapsed < 300.0;
  Detail d;
  d << "pattern " << pat << ", " << ra.size() << " rapid candidates";
  for (double a : ra) d << " " << a;
  d << ", brackets " << (brackets ? "< 1e-6 alpha" : "too wide") << ", gates " << (gates ? "hold" : "fail") << ", "
    << elapsed << " s";
  return {pass, d.str()};
}

Outcome apriori_bound() {
  const Tolerances tol;
  std::vector<Trajectory> base, ext;
  for (double a : log_grid(0.1, 10.0, 9)) base.push_back(integrate(pure(4.0), a, tol, 1e3));
  for (double a : log_grid(10.0, 100.0, 5)) ext.push_back(integrate(pure(4.0), a, tol, 1e3));
  ext.erase(ext.begin());
  const AprioriBound b = apriori_bound_check(base, ext, 1.0);
  return {b.pass, (Detail() << "C over 2 decades " << b.C_base << ", over 3 decades " << b.C_extended
                            << ", variation " << b.variation)
                      .str()};
}

/// A randomized check returns an empty string on success.
struct Property {
  const char* name;
  std::function<std::string(std::mt19937_64&)> check;
};

Outcome invariant_suite() {
  constexpr int kCases = 100;
  const Tolerances tol;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](std::mt19937_64& g, double lo, double hi) {
    return lo * std::pow(hi / lo, unit(g));
  };

  auto random_spec = [&](std::mt19937_64& g) {
    const int n = 3 + static_cast<int>(unit(g) * 3.0);
    const double l = -1.5 + 1.4 * unit(g);
    const double ps = (n + 2.0 + 2.0 * l) / (n - 2.0);
    switch (static_cast<int>(unit(g) * 3.0)) {
      case 0: {
        const double p = 1.2 + (2.0 * ps - 1.2) * unit(g);
        return ProblemSpec(n, l, l, p, WeightFunction(PurePower{l}));
      }
      case 1: {
        const double lo = (n + l) / (n - 2.0);
        const double p = lo + (ps - lo) * (0.05 + 0.9 * unit(g));
        return ProblemSpec(n, l, 0.0, p, make_example_iii(n, l, p));
      }
      default:
        return ProblemSpec(n, -0.5, 0.0, 1.5 + 4.0 * unit(g), WeightFunction(ShiftedPower{1, 1, -0.25, -0.25}));
    }
  };

  const std::vector<Property> props{
      {"monotonicity",
       [&](std::mt19937_64& g) -> std::string {
         const ProblemSpec spec = random_spec(g);
         const double a = log_uniform(g, 1e-2, 1e2);
         const Trajectory tr = integrate(spec, a, tol, default_horizon(spec, a));
         double prev = tr.alpha();
         for (const Sample& s : tr.samples()) {
           if (s.u <= 0.0) break;
           if (s.du > tol.ode_abs || s.u > prev * (1.0 + tol.ode_rel))
             return (Detail() << "u increases at r=" << s.r << " for alpha=" << a).str();
           prev = s.u;
         }
         return {};
       }},
      {"scaling symmetry",
       [&](std::mt19937_64& g) -> std::string {
         const int n = 3 + static_cast<int>(unit(g) * 3.0);
         const double l = -1.5 + 1.4 * unit(g);
         const double ps = (n + 2.0 + 2.0 * l) / (n - 2.0);
         const double p = 1.5 + (1.5 * ps - 1.5) * unit(g);
         const ProblemSpec spec(n, l, l, p, WeightFunction(PurePower{l}));
         const double a = log_uniform(g, 0.1, 10.0);
         const double lam = log_uniform(g, 0.25, 4.0);
         const double s = (2.0 + l) / (p - 1.0);
         const double as = std::pow(lam, s) * a;
         const double H = 100.0;
         const Trajectory base = integrate(spec, a, tol, lam * H);
         const Trajectory scaled = integrate(spec, as, tol, H);
         if (base.crossing_radius().has_value() != scaled.crossing_radius().has_value())
           return "crossing in only one of the pair";
         if (base.crossing_radius()) {
           const double want = *base.crossing_radius() / lam;
           if (std::abs(*scaled.crossing_radius() - want) > 1e-6 * want) return "crossing radii do not scale";
         }
         const double top = std::min(scaled.horizon(), base.horizon() / lam);
         for (int i = 0; i <= 20; ++i) {
           const double r = top * std::pow(1e-4, 1.0 - i / 20.0);
           const double u = scaled.at(r).u, v = std::pow(lam, s) * base.at(lam * r).u;
           if (std::abs(u - v) > 1e-6 * std::abs(v) + 1e-9 * as)
             return (Detail() << "mismatch at r=" << r << ": " << u << " vs " << v).str();
         }
         return {};
       }},
      {"sweep determinism and bracket soundness",
       [&](std::mt19937_64& g) -> std::string {
         const int n = 3 + static_cast<int>(unit(g) * 2.0);
         const double l = -1.5 + 1.2 * unit(g);
         const double ps = (n + 2.0 + 2.0 * l) / (n - 2.0), lo = (n + l) / (n - 2.0);
         const double p = lo + (ps - lo) * (0.2 + 0.6 * unit(g));
         const ProblemSpec spec(n, l, 0.0, p, make_example_iii(n, l, p));
         const double a0 = log_uniform(g, 1e-2, 1.0);
         std::vector<double> grid = log_grid(a0, a0 * log_uniform(g, 30.0, 1e4), 8 + static_cast<int>(unit(g) * 8.0));
         const StructureReport one = sweep(spec, grid, tol, {1});
         const StructureReport four = sweep(spec, grid, tol, {4});
         if (io::dump(io::to_json(one)) != io::dump(io::to_json(four))) return "reports differ between 1 and 4 jobs";
         for (const Boundary& b : one.boundaries) {
           if (b.left == b.right || b.left == Label::Undetermined || b.right == Label::Undetermined)
             return "bracket endpoints do not carry two determined labels";
           if (shoot(spec, b.lo, tol).classification.label != b.left ||
               shoot(spec, b.hi, tol).classification.label != b.right)
             return (Detail() << "re-shooting the bracket around " << b.alpha() << " disagrees").str();
         }
         return {};
       }},
  };

  Outcome o{true, ""};
  Detail d;
  std::mt19937_64 rng(20241018);
  for (const Property& prop : props) {
    int failed = 0;
    std::string first;
    for (int i = 0; i < kCases; ++i) {
      std::string msg;
      try {
        msg = prop.check(rng);
      } catch (const std::exception& e) {
        msg = e.what();
      }
      if (!msg.empty() && failed++ == 0) first = msg;
    }
    if (failed) o.pass = false;
    d << prop.name << " " << kCases - failed << "/" << kCases;
    if (failed) d << " (first failure: " << first << ")";
    d << "; ";
  }
  o.detail = d.str();
  o.detail.resize(o.detail.size() - 2);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"closed-form oracle", closed_form_oracle},
      {"exact-solution oracle", exact_solution_oracle},
      {"Pohozaev residuals", pohozaev_residuals},
      {"pure power trichotomy", trichotomy},
      {"r_alpha scaling", r_alpha_scaling},
      {"example weights", example_weights},
      {"constructed weight structure", construction_structure},
      {"a-priori bound", apriori_bound},
      {"invariant suite", invariant_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
