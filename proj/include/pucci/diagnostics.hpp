#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "pucci/shooting.hpp"

namespace pucci {

// One verification outcome.  pass <=> worst_margin >= -tolerance whenever the
// check applies; checks that do not apply (for example a first-zero bound on a
// shot with no zero) report applicable = false and pass = true.
struct CheckReport {
  std::string name;
  bool pass = false;
  bool applicable = true;
  double worst_margin = 0.0;
  double worst_location = 0.0;
  double tolerance = 0.0;
  double measured = 0.0;
  std::string note;
};

// Outer branch: E1 must not decrease, E2 must not increase; inner branch: the
// calE pair likewise.  Margins are increments normalized by the branch
// maximum of the respective energy.
CheckReport check_energy_monotonicity(const EnergyTrace& trace, double tol = 1e-8);

// Two lower and two upper bounds relating the first-arch maximum u(tau) to
// the shooting slope.  Margins are normalized by the right-hand sides.  The
// second lower bound only applies when the minimal dimension-like exponent
// exceeds 2.
CheckReport check_tau_bounds(const ShotResult& shot, const PucciParams& params,
                             double p, double a, double alpha, double tol = 1e-7);

// Slope bound at the first zero: u'(rho) <= -sqrt(lambda/Lambda) (a/rho)^{n--1} alpha.
CheckReport check_hopf_bound(const ShotResult& shot, const PucciParams& params,
                             double a, double alpha, double tol = 1e-7);

// integral over (0,1) of dsigma / sqrt(1 - sigma^{p+1}), to abs_tol.  The
// sigma = 1 - s^2 substitution removes the endpoint singularity first.
double c_p_quadrature(double p, double abs_tol = 1e-11);

// Minimal evaluable view for residual-type checks; works for dense profiles
// and analytic test functions alike.
struct ProfileView {
  std::function<std::array<double, 2>(double)> eval;  // (u, u')
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::vector<double> special_radii;  // zeros / critical points to excise
};

ProfileView view_of(const RadialProfile& profile,
                    std::vector<double> special_radii = {});

// Max of |F(r, u'', u'/r) + |u|^{p-1} u| over interior samples, normalized by
// 1 + max|u|^p.  u'' is reconstructed by a second central difference of the
// u track at spacing fd_scale*(domain length).  Samples where |u| or |u'| is
// below 10*abs_tol, within one stencil of a special radius, or adjacent to a
// reconstructed-u'' sign change are excluded: differencing across the
// operator's switching surfaces measures the kink, not the equation error.
CheckReport equation_residual(const ProfileView& view, const OperatorKind& kind,
                              const PucciParams& params, double p,
                              const SolverControls& controls, double tol = 1e-6,
                              std::size_t samples = 2001, double fd_scale = 1e-4);

CheckReport equation_residual(const RadialProfile& profile,
                              const std::vector<double>& special_radii,
                              const OperatorKind& kind, const PucciParams& params,
                              double p, const SolverControls& controls,
                              double tol = 1e-6, std::size_t samples = 2001,
                              double fd_scale = 1e-4);

// No sample may be simultaneously above threshold in u, u', and reconstructed
// u'' (a solution cannot be positive, increasing, and convex at once), nor the
// mirrored triple on negative arches.
CheckReport check_arch_exclusion(const ProfileView& view,
                                 const SolverControls& controls,
                                 double threshold = 1e-7,
                                 std::size_t samples = 2001,
                                 double fd_scale = 1e-4);

}  // namespace pucci
