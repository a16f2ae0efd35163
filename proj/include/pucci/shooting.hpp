#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pucci/problem.hpp"
#include "pucci/profile.hpp"

namespace pucci {

// Finite: a zero of u was recorded (the first return radius is finite).
// DecaysToZero: horizon reached with |u| below decay_threshold and still
// shrinking.  Undetermined: anything else at the horizon — never silently
// treated as finite.
enum class Classification { Finite, DecaysToZero, Undetermined };

inline const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Finite: return "finite";
    case Classification::DecaysToZero: return "decays-to-zero";
    case Classification::Undetermined: return "undetermined";
  }
  return "?";
}

struct ShotResult {
  double start_radius = 0.0;
  double start_value = 0.0;
  double start_slope = 0.0;
  double parameter = 0.0;  // the shooting parameter: slope or center value

  std::vector<double> zeros;             // radii where u = 0, increasing
  std::vector<double> critical_points;   // radii where u' = 0, increasing
  std::vector<double> slopes_at_zeros;   // u' at each recorded zero

  Classification classification = Classification::Undetermined;
  Terminal terminal = Terminal::ReachedHorizon;
  RadialProfile profile;
  long n_accepted = 0;
  long n_rejected = 0;
  std::string note;

  std::optional<double> first_zero() const {
    if (zeros.empty()) return std::nullopt;
    return zeros.front();
  }
  std::optional<double> first_critical() const {
    if (critical_points.empty()) return std::nullopt;
    return critical_points.front();
  }

  ShotResult negated() const;
};

// Shoot from the inner radius with u(a)=0, u'(a)=slope.  Only kind/params/p
// are read off the ProblemSpec; its domain and sign fields are ignored here
// (the boundary-value layer owns them).  max_zeros <= 0 records zeros without
// stopping.
ShotResult shoot_annulus(const ProblemSpec& spec, double a, double slope,
                         const SolverControls& controls);

// Shoot from the center with u(0)=center_value, u'(0)=0, using a quadratic
// series start over [0, h0] to step off the coordinate singularity.  Pucci
// kinds only (the center curvature closed form needs them).
ShotResult shoot_ball(const ProblemSpec& spec, double center_value,
                      const SolverControls& controls);

// Shoot from radius a with u(a)=gamma > 0, u'(a)=0.
ShotResult shoot_neumann(const ProblemSpec& spec, double a, double gamma,
                         const SolverControls& controls);

// Four energy functions sampled along the first arch.  Outer-branch pair
// (E1 up, E2 down on [tau, rho)); inner-branch pair (calE1 up, calE2 down on
// [start, tau]).  tau_index locates tau within radii.
struct EnergyTrace {
  std::vector<double> radii;
  std::vector<double> E1, E2, calE1, calE2;
  std::size_t tau_index = 0;
};

EnergyTrace energy_trace(const ShotResult& shot, const PucciParams& params,
                         double p, std::size_t samples_per_branch = 400);

}  // namespace pucci
