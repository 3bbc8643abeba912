#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "matukuma/classify.hpp"

namespace matukuma {

/// phi(r; alpha) = alpha {1 + 2 alpha^(p*-1) r^(2+l) / ((p*+1)(n-2)^2)}^(-2/(p*-1)).
/// Throws DomainError unless the weight is PurePower and p = p*.
double phi_closed_form(const ProblemSpec& spec, double alpha, double r);

/// (1 + r^2)^(-(l+2)/(2(p-1))), the solution with alpha = 1 for the example_iii
/// weight. Throws DomainError unless (n+l)/(n-2) < p < p*.
double example_iii_solution(int n, double l, double p, double r);

struct OracleResult {
  std::string name;
  double alpha = 0.0;
  double r_max = 0.0;
  double max_rel_error = 0.0;
  double seconds = 0.0;
};

/// Integrates the two closed-form cases (phi for n=3, l=-1/2 at the given
/// alphas, and example_iii for n=3, l=-1, p=5/2 at alpha=1) to r_max and
/// reports the largest relative deviation on 2000 log-spaced radii and r=0.
std::vector<OracleResult> run_oracles(const Tolerances& tol, const std::vector<double>& phi_alphas = {0.5, 1.0, 2.0},
                                      double r_max = 1e3);

struct GridPoint {
  double alpha = 0.0;
  Classification classification;
};

struct Boundary {
  double lo = 0.0;  ///< bracket endpoints; lo carries `left`, hi carries `right`
  double hi = 0.0;
  Label left = Label::Undetermined;
  Label right = Label::Undetermined;
  int iterations = 0;
  double alpha() const { return std::sqrt(lo * hi); }
  double width() const { return hi - lo; }
};

struct StructureReport {
  std::vector<GridPoint> grid;
  std::vector<Boundary> boundaries;
  /// Labels of the successive regions, e.g. "C|S|C". Undetermined grid points
  /// are skipped.
  std::string pattern;
  /// Refined boundaries between a Crossing and a SlowDecay region, and the
  /// centre of any RapidDecay region that separates the two.
  std::vector<double> rapid_alphas;
};

struct SweepOptions {
  int jobs = 1;
  /// Bisection stops when hi - lo < rel_bracket * lo or after max_iterations.
  double rel_bracket = 1e-6;
  int max_iterations = 60;
};

/// Classifies every grid alpha, then refines each change of label by
/// bisection in log alpha. The grid must be sorted, positive and hold at
/// least 8 points (ValidationError "grid" otherwise). Results do not depend
/// on `jobs`.
StructureReport sweep(const ProblemSpec& spec, const std::vector<double>& alpha_grid, const Tolerances& tol,
                      const SweepOptions& opts = {});

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// Plot-ready CSV: alpha,label,decay_exponent,crossing_radius.
void write_structure_csv(const StructureReport& rep, std::ostream& os);

struct Theorem5Config {
  double epsilon = 0.1;
  double alpha_star = 1.0;
  double r_star = 2.1;
  double delta = 0.2;
  /// Sweep grid: `points` log-spaced values on [alpha_star*lo_factor, alpha_star*hi_factor].
  double lo_factor = 0.1;
  double hi_factor = 1000.0;
  int points = 33;
};

struct Theorem5Report {
  StructureReport structure;
  HypothesisReport hypotheses;
  Condition21d condition;
  Label alpha_star_label = Label::Undetermined;
  bool crossing_low = false;
  bool crossing_high = false;
  std::size_t rapid_count = 0;
  std::vector<std::string> log;
  bool pass = false;
};

/// Builds f from k and epsilon, checks 2.1(a)-(e) and (f4), (f6), (f7), (f9)
/// (ValidationError naming the first failure), sweeps the grid and records
/// whether the expected C ... S ... C structure with two rapid candidates
/// appears. `spec` supplies n, l, sigma and p = p*; its weight is replaced.
Theorem5Report theorem5_pipeline(const BumpFunction& k, const ProblemSpec& spec, const Theorem5Config& cfg,
                                 const Tolerances& tol, const SweepOptions& opts = {});

struct SmallAlphaSample {
  double alpha = 0.0;
  Classification classification;
};

struct SmallAlphaReport {
  /// 1 or 2 when the hypotheses of that theorem hold, 0 otherwise.
  int theorem = 0;
  std::string gate;  ///< which hypotheses opened or closed the gate
  double r0 = 0.0;   ///< inf {h < 0}
  double r1 = 0.0;   ///< sup {h > 0}
  double delta1 = 0.0, beta = 0.0, delta2 = 0.0, k = 0.0;
  /// Radius r_alpha must reach for the argument to apply.
  double r_required = 0.0;
  std::optional<double> alpha0;
  std::optional<double> r_alpha_at_alpha0;
  std::vector<SmallAlphaSample> samples;
  bool all_noncrossing = false;
  bool all_crossing = false;
};

/// Derives the small-alpha threshold alpha0 of the positivity theorems and
/// checks it by shooting at alpha0, alpha0/10 and alpha0/100. When neither
/// theorem applies, alpha0 stays empty and `fallback_alphas` are shot.
SmallAlphaReport theorem1_2_smallalpha_check(const ProblemSpec& spec, const Tolerances& tol,
                                             const std::vector<double>& fallback_alphas = {1e-3, 1e-1, 1.0, 10.0});

}  // namespace matukuma
