#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matukuma/shoot.hpp"

namespace matukuma {

enum class Label { Crossing, SlowDecay, RapidDecay, Undetermined };
std::string_view to_string(Label l);
/// One-letter code used in sweep patterns: C, S, R or U.
char to_char(Label l);

struct Classification {
  Label label = Label::Undetermined;
  std::optional<double> crossing_radius;
  /// Slope of -log u against log r over the last decade; NaN if not fitted.
  double fitted_decay_exponent = 0.0;
  /// r^(n-2) u at the end of the trajectory and its Spearman trend over the
  /// last decade.
  double D_limit = 0.0;
  double D_trend = 0.0;
  /// w at the end of the trajectory and its Spearman trend.
  double w_limit = 0.0;
  double w_trend = 0.0;
  double confidence = 0.0;
  double window_end = 0.0;  ///< r at which the evidence was taken
  std::string reason;
};

/// Labels a terminated trajectory. A detected zero gives Crossing. Otherwise
/// a rebound of w after its first major peak gives SlowDecay, then the decay
/// exponent over the last decade is compared with n-2 and (l+2)/(p-1) using
/// tol.class_margin, with a monotonicity test of r^(n-2) u as tie-break.
Classification classify(const Trajectory& traj, const Tolerances& tol);

struct Shot {
  Trajectory trajectory;  ///< at the requested tolerance, cut where evidence is reliable
  Classification classification;
  double companion_divergence = 0.0;  ///< r where the tol/100 run departs; 0 if never
};

/// Integrates at `tol` and at tol/100 out to the classification horizon
/// (tol.class_horizon, or r_alpha estimate times e^60), cuts at the first
/// radius where the two runs disagree by more than 5% in w, and classifies.
/// Two crossings count as agreeing when their radii differ by at most 5%.
Shot shoot(const ProblemSpec& spec, double alpha, const Tolerances& tol);

/// Classification horizon used by shoot().
double classification_horizon(const ProblemSpec& spec, double alpha, const Tolerances& tol);

struct ScalingFit {
  double slope_small = 0.0, r2_small = 0.0;
  double slope_large = 0.0, r2_large = 0.0;
  double slope_all = 0.0, r2_all = 0.0;
  double intercept_all = 0.0;  ///< log r_{alpha,k} = intercept_all + slope_all log alpha
  std::vector<double> alphas;
  std::vector<double> radii;  ///< r_{alpha,k} per usable alpha
};

/// Log-log regression of r_{alpha,k} against alpha on the lower and upper
/// halves of the sorted grid (and on all of it). Throws ValidationError
/// ("insufficient_data") when fewer than 5 usable values fall in a half.
ScalingFit fit_r_alpha_scaling(const ProblemSpec& spec, std::vector<double> alphas, double k,
                               const Tolerances& tol);

/// Supremum of r^((n-2)/2) u over [r0, horizon] across the trajectories.
/// Throws DomainError if a trajectory is not positive on that range.
double apriori_sup(const std::vector<Trajectory>& trajs, double r0);

struct AprioriBound {
  double C_base = 0.0;
  double C_extended = 0.0;
  double variation = 0.0;  ///< |C_extended - C_base| / C_base
  bool pass = false;       ///< variation < 10%
};

/// Compares the bound on a base grid with the bound after extending the grid
/// by one decade. An empty extension passes trivially.
AprioriBound apriori_bound_check(const std::vector<Trajectory>& base,
                                 const std::vector<Trajectory>& extension, double r0);

}  // namespace matukuma
