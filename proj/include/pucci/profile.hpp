#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "pucci/ode.hpp"

namespace pucci {

// Piecewise dense representation of (u, u') over a radius interval.  Segments
// reuse the integrator's quintic interpolant; endpoint queries return stored
// states bitwise, so segment joints are exact.
class RadialProfile {
public:
  struct Segment {
    double r0 = 0.0;  // segment start
    double h = 0.0;   // width the dense coefficients are normalized by
    double r1 = 0.0;  // segment end (<= r0 + h)
    std::array<double, 2> y0{}, y1{};
    std::array<double, 5> cu{}, cv{};  // dense coefficients for u and u'
  };

  RadialProfile() = default;

  static RadialProfile from_trajectory(const Trajectory<2>& traj);
  void append_trajectory(const Trajectory<2>& traj);

  bool empty() const { return segments_.empty(); }
  double r_lo() const;
  double r_hi() const;

  std::array<double, 2> eval(double r) const;  // (u, u')
  double value(double r) const { return eval(r)[0]; }
  double slope(double r) const { return eval(r)[1]; }

  // count >= 2 uniformly spaced samples (r, u, u') covering [r_lo, r_hi].
  std::vector<std::array<double, 3>> sample(std::size_t count) const;

  // v(r) = q^{2/(p-1)} u(q r) with q chosen so the domain endpoint r_hi lands
  // on target_r_hi.  Exact on the dense coefficients: zeros divide by q.
  RadialProfile rescaled_to(double target_r_hi, double p) const;
  double rescale_factor_to(double target_r_hi) const;  // the q above

  RadialProfile negated() const;

  void push_segment(const Segment& s);
  const std::vector<Segment>& segments() const { return segments_; }

private:
  std::vector<Segment> segments_;
};

// Quadratic start segment for center shots: u = gamma + curvature r^2 / 2 on
// [0, h0], expressed in the dense basis so eval() needs no special case.
RadialProfile::Segment series_start_segment(double gamma, double curvature,
                                            double h0);

}  // namespace pucci
