#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "matukuma/shoot.hpp"

namespace matukuma {

enum class Identity { Energy33, Variant41 };
std::string_view to_string(Identity id);

struct PohozaevReport {
  Identity which = Identity::Energy33;
  double R = 0.0;
  double lhs = 0.0;  ///< boundary terms at R
  double rhs = 0.0;  ///< weighted integral over [0, R]
  double residual = 0.0;
  /// Largest magnitude among the individual boundary terms and the rhs.
  double scale = 0.0;
  /// int_0^R h r^(n+l-1) (u+)^(p+1) dr.
  double weighted_integral = 0.0;
};

/// Energy form of the Pohozaev identity:
///   (n-2)/2 R^(n-1) u u' + 1/2 R^n u'^2 + R^n f (u+)^(p+1)/(p+1)
///     = 1/(p+1) int_0^R {-(n-2)/2 (p-p*) r^-l f + h} r^(n+l-1) (u+)^(p+1) dr.
/// Throws DomainError when R lies outside the trajectory.
PohozaevReport identity_3_3(const Trajectory& traj, double R, double quad_rel = 1e-10);

/// Variant in w = r^((n-2)/2) u:
///   -R^2 w'' w - R w w' + R^2 w'^2 - (p-1)/(p+1) R^n f (u+)^(p+1)
///     = 2/(p+1) int_0^R {-(n-2)/2 (p-p*) r^-l f + h} r^(n+l-1) (u+)^(p+1) dr,
/// where (p-1)/(p+1) = (l+2)/(n+l) at p = p*. w'' is taken from the equation.
PohozaevReport identity_4_1(const Trajectory& traj, double R, double quad_rel = 1e-10);

struct ProbePoint {
  double R = 0.0;
  double w = 0.0;
  double Rdw = 0.0;    ///< R w'(R)
  double R2d2w = 0.0;  ///< R^2 w''(R)
};

/// Radii in the last decade of a positive trajectory, on a log grid of
/// `points` nodes, at which |R w'| has a trough lower than every earlier node.
/// Starts with the first node. Empty for crossing trajectories.
std::vector<ProbePoint> limit_sequence_probe(const Trajectory& traj, int points = 100);

struct GrowthEntry {
  double alpha = 0.0;
  double r_alpha = 0.0;
  double integral = 0.0;  ///< int_0^{r_alpha} h r^(n+l-1) (u+)^(p+1) dr
};

struct GrowthReport {
  /// True when p = p*, (f4) and (f9) hold and gamma < gamma*.
  bool gate = false;
  std::string gate_reason;
  std::vector<GrowthEntry> entries;  ///< in the order of the input alphas
  bool strictly_increasing = false;
};

/// Evaluates the weighted h-integral up to r_alpha for each alpha. The values
/// are computed whether or not the gate is open.
GrowthReport lemma_4_1_growth(const ProblemSpec& spec, const std::vector<double>& alphas,
                              const Tolerances& tol);

}  // namespace matukuma
