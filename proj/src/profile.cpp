#include "pucci/profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pucci {

RadialProfile RadialProfile::from_trajectory(const Trajectory<2>& traj) {
  RadialProfile p;
  p.append_trajectory(traj);
  return p;
}

void RadialProfile::append_trajectory(const Trajectory<2>& traj) {
  segments_.reserve(segments_.size() + traj.steps.size());
  for (const auto& st : traj.steps) {
    Segment s;
    s.r0 = st.r0;
    s.h = st.h;
    s.r1 = st.r1;
    s.y0 = st.y0;
    s.y1 = st.y1;
    s.cu = st.cont[0];
    s.cv = st.cont[1];
    segments_.push_back(s);
  }
}

double RadialProfile::r_lo() const {
  if (segments_.empty()) throw std::logic_error("empty profile");
  return segments_.front().r0;
}

double RadialProfile::r_hi() const {
  if (segments_.empty()) throw std::logic_error("empty profile");
  return segments_.back().r1;
}

std::array<double, 2> RadialProfile::eval(double r) const {
  if (segments_.empty()) throw std::logic_error("empty profile");
  const double lo = segments_.front().r0, hi = segments_.back().r1;
  const double slack = 1e-12 * (hi - lo + std::abs(lo) + 1.0);
  if (r < lo - slack || r > hi + slack)
    throw std::domain_error("radius outside the profile domain");
  r = std::clamp(r, lo, hi);
  std::size_t i = 0, j = segments_.size() - 1;
  while (i < j) {
    const std::size_t mid = (i + j + 1) / 2;
    if (segments_[mid].r0 <= r)
      i = mid;
    else
      j = mid - 1;
  }
  const Segment& s = segments_[i];
  if (r == s.r0) return s.y0;
  if (r == s.r1) return s.y1;
  const double theta = (r - s.r0) / s.h;
  const auto horner = [theta](const std::array<double, 5>& c) {
    return c[0] + theta * (c[1] + (1.0 - theta) *
                                      (c[2] + theta * (c[3] + (1.0 - theta) * c[4])));
  };
  return {horner(s.cu), horner(s.cv)};
}

std::vector<std::array<double, 3>> RadialProfile::sample(std::size_t count) const {
  if (count < 2) throw std::invalid_argument("need at least two samples");
  const double lo = r_lo(), hi = r_hi();
  std::vector<std::array<double, 3>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = i + 1 == count ? hi : lo + (hi - lo) * double(i) / double(count - 1);
    const auto y = eval(r);
    out.push_back({r, y[0], y[1]});
  }
  return out;
}

double RadialProfile::rescale_factor_to(double target_r_hi) const {
  if (!(target_r_hi > 0.0))
    throw std::invalid_argument("rescale target radius must be positive");
  return r_hi() / target_r_hi;
}

RadialProfile RadialProfile::rescaled_to(double target_r_hi, double p) const {
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  const double q = rescale_factor_to(target_r_hi);
  const double A = std::pow(q, 2.0 / (p - 1.0));  // value scale
  const double B = A * q;                         // slope scale
  RadialProfile out;
  out.segments_.reserve(segments_.size());
  for (const auto& s : segments_) {
    Segment t;
    t.r0 = s.r0 / q;
    t.h = s.h / q;
    t.r1 = s.r1 / q;
    t.y0 = {s.y0[0] * A, s.y0[1] * B};
    t.y1 = {s.y1[0] * A, s.y1[1] * B};
    for (int i = 0; i < 5; ++i) {
      t.cu[i] = s.cu[i] * A;
      t.cv[i] = s.cv[i] * B;
    }
    out.segments_.push_back(t);
  }
  return out;
}

RadialProfile RadialProfile::negated() const {
  RadialProfile out;
  out.segments_.reserve(segments_.size());
  for (const auto& s : segments_) {
    Segment t = s;
    t.y0 = {-s.y0[0], -s.y0[1]};
    t.y1 = {-s.y1[0], -s.y1[1]};
    for (int i = 0; i < 5; ++i) {
      t.cu[i] = -s.cu[i];
      t.cv[i] = -s.cv[i];
    }
    out.segments_.push_back(t);
  }
  return out;
}

void RadialProfile::push_segment(const Segment& s) {
  if (!segments_.empty() && !(s.r0 >= segments_.back().r1 - 1e-12))
    throw std::invalid_argument("segments must be appended in radius order");
  segments_.push_back(s);
}

RadialProfile::Segment series_start_segment(double gamma, double curvature,
                                            double h0) {
  if (!(h0 > 0.0)) throw std::invalid_argument("series segment needs h0 > 0");
  // Dense basis: c0 + t(c1 + (1-t)(c2 + t(c3 + (1-t)c4))).  A pure quadratic
  // gamma + A t^2 is c = {gamma, A, -A, 0, 0}; the linear slope c*h0*t is
  // {0, c*h0, 0, 0, 0}.
  const double A = 0.5 * curvature * h0 * h0;
  RadialProfile::Segment s;
  s.r0 = 0.0;
  s.h = h0;
  s.r1 = h0;
  s.cu = {gamma, A, -A, 0.0, 0.0};
  s.cv = {0.0, curvature * h0, 0.0, 0.0, 0.0};
  s.y0 = {gamma, 0.0};
  s.y1 = {gamma + A, curvature * h0};
  return s;
}

}  // namespace pucci
