#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pucci/errors.hpp"

namespace pucci {

// Tolerances and guards shared by every integration in the library.  r_max is
// the integration horizon; callers that know a natural length scale fill it in
// before integrating (0 means "not set yet").
struct SolverControls {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_init = 0.0;   // 0: choose automatically from the right-hand side
  double h_min = 0.0;    // 0: machine-precision floor scaled by |r|
  double r_max = 0.0;
  double blowup_threshold = 1e12;
  double decay_threshold = 1e-10;
  double event_tol = 1e-12;  // radius tolerance for refined event locations
  int max_zeros = 64;
  long max_steps = 2000000;
};

enum class Terminal { ReachedHorizon, EventStopped, BlowUp, StepUnderflow };

inline const char* terminal_name(Terminal t) {
  switch (t) {
    case Terminal::ReachedHorizon: return "reached-horizon";
    case Terminal::EventStopped: return "event-stopped";
    case Terminal::BlowUp: return "blow-up";
    case Terminal::StepUnderflow: return "step-underflow";
  }
  return "?";
}

template <int N>
using State = std::array<double, N>;

template <int N>
using Rhs = std::function<void(double r, const State<N>& y, State<N>& dydr)>;

template <int N>
using EventFn = std::function<double(double r, const State<N>& y)>;

// stop_after = 0 records crossings without stopping; k > 0 stops the
// integration at the k-th sign change of fn.
template <int N>
struct EventSpec {
  EventFn<N> fn;
  int stop_after = 0;
};

template <int N>
struct EventHit {
  int event = 0;
  double r = 0.0;
  State<N> state{};
};

// Piecewise quintic interpolant produced by the integrator.  Each step stores
// its dense coefficients; endpoint queries return the stored states bitwise.
template <int N>
class Trajectory {
public:
  struct Step {
    double r0 = 0.0;  // step start
    double h = 0.0;   // step size the dense coefficients were built with
    double r1 = 0.0;  // step end (may be < r0 + h when an event truncated it)
    State<N> y0{}, y1{};
    std::array<std::array<double, 5>, N> cont{};
  };

  double r_begin() const { return r_begin_; }
  double r_end() const { return r_end_; }
  const State<N>& y_begin() const { return y_begin_; }
  const State<N>& y_end() const { return y_end_; }

  State<N> eval(double r) const {
    if (steps.empty()) {
      if (r == r_begin_) return y_begin_;
      throw std::domain_error("empty trajectory");
    }
    const double span = r_end_ - r_begin_;
    const double slack = 1e-12 * (std::abs(span) + std::abs(r_begin_) + 1.0);
    if (r < r_begin_ - slack || r > r_end_ + slack)
      throw std::domain_error("radius outside the integrated range");
    r = std::clamp(r, r_begin_, r_end_);
    // last step whose start is <= r
    std::size_t lo = 0, hi = steps.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (steps[mid].r0 <= r)
        lo = mid;
      else
        hi = mid - 1;
    }
    const Step& s = steps[lo];
    if (r == s.r0) return s.y0;
    if (r == s.r1) return s.y1;
    const double theta = (r - s.r0) / s.h;
    State<N> out;
    for (int i = 0; i < N; ++i) {
      const auto& c = s.cont[i];
      out[i] = c[0] + theta * (c[1] + (1.0 - theta) *
                                          (c[2] + theta * (c[3] + (1.0 - theta) * c[4])));
    }
    return out;
  }

  std::vector<Step> steps;
  std::vector<EventHit<N>> hits;
  Terminal status = Terminal::ReachedHorizon;
  long n_accepted = 0;
  long n_rejected = 0;

  double r_begin_ = 0.0, r_end_ = 0.0;
  State<N> y_begin_{}, y_end_{};
};

namespace dopri {

// Dormand-Prince 5(4) tableau with the Shampine dense-output weights.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                        c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                        a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                        a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                        a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double er1 = 71.0 / 57600.0, er3 = -71.0 / 16695.0,
                        er4 = 71.0 / 1920.0, er5 = -17253.0 / 339200.0,
                        er6 = 22.0 / 525.0, er7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

}  // namespace dopri

namespace detail {

template <int N>
double error_norm(const State<N>& e, const State<N>& y0, const State<N>& y1,
                  double atol, double rtol) {
  double acc = 0.0;
  for (int i = 0; i < N; ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = e[i] / sk;
    acc += q * q;
  }
  return std::sqrt(acc / N);
}

template <int N>
double initial_step(const Rhs<N>& f, double r0, const State<N>& y0,
                    const State<N>& f0, double hmax, double atol, double rtol) {
  double dnf = 0.0, dny = 0.0;
  for (int i = 0; i < N; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  State<N> y1, f1;
  for (int i = 0; i < N; ++i) y1[i] = y0[i] + h * f0[i];
  f(r0 + h, y1, f1);
  double der2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    const double q = (f1[i] - f0[i]) / sk;
    der2 += q * q;
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(der2, std::sqrt(dnf));
  const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                     : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, hmax});
}

inline int sgn(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace detail

// Refines an event location inside one step of a trajectory by bisection on
// the dense interpolant.  The event function must change sign across the step.
template <int N>
double locate_event(const Trajectory<N>& traj, const EventFn<N>& fn,
                    std::size_t step_index, double event_tol) {
  if (step_index >= traj.steps.size())
    throw std::invalid_argument("step index out of range");
  const auto& s = traj.steps[step_index];
  double lo = s.r0, hi = s.r1;
  double vlo = fn(lo, traj.eval(lo));
  double vhi = fn(hi, traj.eval(hi));
  if (vlo == 0.0) return lo;
  if (vhi == 0.0) return hi;
  if (detail::sgn(vlo) == detail::sgn(vhi))
    throw std::invalid_argument("event function does not change sign within the step");
  while (hi - lo > event_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double vm = fn(mid, traj.eval(mid));
    if (vm == 0.0) return mid;
    if (detail::sgn(vm) == detail::sgn(vlo))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

template <int N>
Trajectory<N> integrate(const Rhs<N>& f, double r0, const State<N>& y0,
                        const SolverControls& ctl,
                        const std::vector<EventSpec<N>>& events = {}) {
  using namespace dopri;
  if (!(ctl.r_max > r0))
    throw std::invalid_argument("integration horizon r_max must exceed the start radius");
  if (!(ctl.rel_tol > 0.0) || !(ctl.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  for (const auto& e : events)
    if (!e.fn) throw std::invalid_argument("event function must be callable");

  Trajectory<N> traj;
  traj.r_begin_ = r0;
  traj.y_begin_ = y0;
  traj.r_end_ = r0;
  traj.y_end_ = y0;

  const double hmax = ctl.r_max - r0;
  State<N> y = y0;
  State<N> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err_vec;
  f(r0, y, k1);

  double r = r0;
  double h = ctl.h_init > 0.0 ? std::min(ctl.h_init, hmax)
                              : detail::initial_step<N>(f, r0, y, k1, hmax,
                                                        ctl.abs_tol, ctl.rel_tol);

  // PI controller state (Hairer's dopri5 defaults).
  const double safe = 0.9, beta = 0.04;
  const double expo1 = 0.2 - beta * 0.75;
  const double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  double facold = 1e-4;
  bool reject_prev = false;

  // Per-event sign tracking: the sign last seen at a sample where the event
  // function was nonzero.  Starting at zero (for example u(a) = 0 on a
  // Dirichlet shot) therefore does not register as a crossing.
  std::vector<int> last_sign(events.size(), 0);
  std::vector<int> hit_count(events.size(), 0);
  for (std::size_t e = 0; e < events.size(); ++e)
    last_sign[e] = detail::sgn(events[e].fn(r0, y0));

  const auto hmin_at = [&](double rr) {
    const double machine = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(rr));
    return std::max(ctl.h_min, machine);
  };

  while (true) {
    if (traj.n_accepted + traj.n_rejected >= ctl.max_steps)
      throw ResourceError("step budget exhausted before reaching the horizon");

    bool last = false;
    if (r + 1.0001 * h >= ctl.r_max) {
      h = ctl.r_max - r;
      last = true;
    }
    if (h < hmin_at(r)) {
      if (last) {
        // Horizon closer than the minimum step: declare arrival.
        traj.status = Terminal::ReachedHorizon;
        traj.r_end_ = ctl.r_max;
        traj.y_end_ = y;
        return traj;
      }
      traj.status = Terminal::StepUnderflow;
      return traj;
    }

    // The seven Dormand-Prince stages (k1 carried over, first-same-as-last).
    for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    f(r + c2 * h, ytmp, k2);
    for (int i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(r + c3 * h, ytmp, k3);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(r + c4 * h, ytmp, k4);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(r + c5 * h, ytmp, k5);
    for (int i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    f(r + h, ytmp, k6);
    for (int i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                            a75 * k5[i] + a76 * k6[i]);
    f(r + h, ynew, k7);
    for (int i = 0; i < N; ++i)
      err_vec[i] = h * (er1 * k1[i] + er3 * k3[i] + er4 * k4[i] + er5 * k5[i] +
                        er6 * k6[i] + er7 * k7[i]);

    bool finite = true;
    for (int i = 0; i < N; ++i)
      if (!std::isfinite(ynew[i]) || !std::isfinite(err_vec[i])) finite = false;

    if (!finite) {
      // Overflow inside the stages: halve and retry, bypassing the controller.
      ++traj.n_rejected;
      h *= 0.5;
      reject_prev = true;
      continue;
    }

    const double err = detail::error_norm<N>(err_vec, y, ynew, ctl.abs_tol, ctl.rel_tol);
    const double fac11 = std::pow(err, expo1);

    if (err > 1.0) {
      ++traj.n_rejected;
      h = h / std::min(facc1, fac11 / safe);
      reject_prev = true;
      continue;
    }

    // Accepted: build the dense-output coefficients for this step.
    ++traj.n_accepted;
    typename Trajectory<N>::Step step;
    step.r0 = r;
    step.h = h;
    step.r1 = last ? ctl.r_max : r + h;
    step.y0 = y;
    step.y1 = ynew;
    for (int i = 0; i < N; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      step.cont[i][0] = y[i];
      step.cont[i][1] = ydiff;
      step.cont[i][2] = bspl;
      step.cont[i][3] = ydiff - h * k7[i] - bspl;
      step.cont[i][4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                             d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    traj.steps.push_back(step);
    traj.r_end_ = step.r1;
    traj.y_end_ = ynew;

    // Event scan on a five-point subsample of the step.
    if (!events.empty()) {
      struct Crossing {
        double r;
        int event;
      };
      std::vector<Crossing> found;
      static constexpr double thetas[4] = {0.25, 0.5, 0.75, 1.0};
      std::vector<double> track_r(events.size(), step.r0);
      for (double th : thetas) {
        const double rs = std::min(step.r0 + th * h, step.r1);
        const State<N> ys = traj.eval(rs);
        for (std::size_t e = 0; e < events.size(); ++e) {
          const double v = events[e].fn(rs, ys);
          const int s = detail::sgn(v);
          if (s == 0) continue;
          if (last_sign[e] == 0) {
            last_sign[e] = s;
            track_r[e] = rs;
            continue;
          }
          if (s != last_sign[e]) {
            // refine on the bracketing subinterval [track_r[e], rs]
            double lo = track_r[e], hi = rs;
            double vlo = events[e].fn(lo, traj.eval(lo));
            if (vlo == 0.0) {
              // previous sample sat exactly on the surface; nudge inward
              lo = std::nextafter(lo, hi);
              vlo = events[e].fn(lo, traj.eval(lo));
            }
            while (hi - lo > ctl.event_tol) {
              const double mid = 0.5 * (lo + hi);
              if (mid == lo || mid == hi) break;
              const double vm = events[e].fn(mid, traj.eval(mid));
              if (vm == 0.0 || detail::sgn(vm) != detail::sgn(vlo)) {
                hi = mid;
              } else {
                lo = mid;
                vlo = vm;
              }
            }
            found.push_back({0.5 * (lo + hi), static_cast<int>(e)});
            last_sign[e] = s;
          }
          track_r[e] = rs;
        }
      }
      if (!found.empty()) {
        std::sort(found.begin(), found.end(),
                  [](const Crossing& a, const Crossing& b) { return a.r < b.r; });
        for (const auto& c : found) {
          EventHit<N> hit;
          hit.event = c.event;
          hit.r = c.r;
          hit.state = traj.eval(c.r);
          traj.hits.push_back(hit);
          ++hit_count[c.event];
          if (events[c.event].stop_after > 0 &&
              hit_count[c.event] >= events[c.event].stop_after) {
            // Truncate the final step at the stopping radius.
            auto& s_last = traj.steps.back();
            s_last.r1 = c.r;
            s_last.y1 = hit.state;
            traj.r_end_ = c.r;
            traj.y_end_ = hit.state;
            traj.status = Terminal::EventStopped;
            return traj;
          }
        }
      }
    }

    double ymax = 0.0;
    for (int i = 0; i < N; ++i) ymax = std::max(ymax, std::abs(ynew[i]));
    if (ymax > ctl.blowup_threshold) {
      traj.status = Terminal::BlowUp;
      return traj;
    }

    if (last) {
      traj.status = Terminal::ReachedHorizon;
      traj.r_end_ = ctl.r_max;
      return traj;
    }

    r = step.r1;
    y = ynew;
    k1 = k7;  // FSAL

    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;
    if (hnew > hmax) hnew = hmax;
    if (reject_prev) hnew = std::min(hnew, h);
    reject_prev = false;
    facold = std::max(err, 1e-4);
    h = hnew;
  }
}

}  // namespace pucci
