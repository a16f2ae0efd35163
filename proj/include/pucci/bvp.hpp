#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pucci/problem.hpp"
#include "pucci/shooting.hpp"

namespace pucci {

// Geometric expansion controls for bracket_search.
struct ExpansionPolicy {
  double factor = 4.0;
  double param_min = 1e-14;
  double param_max = 1e14;
};

// A parameter interval with map(lo) >= target >= map(hi); value_lo may be
// +infinity (shots whose target feature never appears order above any target).
struct Bracket {
  double lo = 0.0, hi = 0.0;
  double value_lo = 0.0, value_hi = 0.0;
  int evaluations = 0;
};

using ShotMap = std::function<double(double)>;

// For a decreasing extended-real map: expand upward from the seed (x factor
// per step) until the map drops below the target, then contract downward until
// it rises above.  Throws NoBracketError when the scan range is exhausted.
Bracket bracket_search(const ShotMap& map, double target, double seed,
                       const ExpansionPolicy& policy = {});

struct BisectOutcome {
  double param = 0.0;     // endpoint of the final bracket closest to target
  double lo = 0.0, hi = 0.0;
  double value_lo = 0.0, value_hi = 0.0;
  double achieved = 0.0;  // map value at param
  int evaluations = 0;
};

// Bisects the bracket until its width is <= width_scale * (1 + parameter).
// Throws NoRootError if the achieved map value stays far from the target
// (the target falls in a gap of the reachable set).
BisectOutcome bisect_to_target(const ShotMap& map, double target, Bracket bracket,
                               double width_scale = 1e-12);

struct FitCertificate {
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double value_lo = 0.0, value_hi = 0.0;
  double width = 0.0;
  double target = 0.0;
  double achieved = 0.0;
  int evaluations = 0;
};

// A certified boundary-value solution.  radii runs from the inner boundary
// (a, or 0 for the ball) to the outer one and contains the k-1 interior zeros
// in between; the profile changes sign exactly there.
struct NodalSolution {
  int k = 1;
  std::vector<double> radii;
  int first_sign = +1;
  double shot_parameter = 0.0;           // fitted slope, or center value (ball)
  std::optional<double> rescale_factor;  // ball solves: the radius contraction q
  RadialProfile profile;
  double residual = 0.0;         // max normalized equation residual
  double boundary_defect = 0.0;  // |u| (or |u'| for a Neumann end) at the fitted boundary
  FitCertificate certificate;
  ShotResult shot;  // the certified shot, sign-adjusted to match profile
  bool unsupported_regime = false;
  std::string note;
};

// u(a)=u(b)=0 with constant sign (k=1).
NodalSolution solve_dirichlet_annulus(const ProblemSpec& spec,
                                      const SolverControls& controls);

// u(a)=u(b)=0 with k nodal regions (k-1 interior zeros, alternating signs).
NodalSolution solve_nodal_annulus(const ProblemSpec& spec, int k,
                                  const SolverControls& controls);

// u(a)=0, u'(b)=0.
NodalSolution solve_mixed_dn(const ProblemSpec& spec,
                             const SolverControls& controls);

// u'(a)=0, u(b)=0.
NodalSolution solve_mixed_nd(const ProblemSpec& spec,
                             const SolverControls& controls);

// Ball of radius R, k nodal regions: shoots once from the center with unit
// seed and rescales so the k-th zero lands on R (scale covariance makes the
// seed immaterial).
NodalSolution solve_ball(const ProblemSpec& spec, int k,
                         const SolverControls& controls);

inline RadialProfile rescale(const RadialProfile& profile, double target_r_hi,
                             double p) {
  return profile.rescaled_to(target_r_hi, p);
}

}  // namespace pucci
