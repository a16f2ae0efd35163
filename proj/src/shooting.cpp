#include "pucci/shooting.hpp"

#include <algorithm>
#include <cmath>

namespace pucci {

namespace {

Rhs<2> make_rhs(const OperatorKind& kind, const PucciParams& params, double p,
                double root_tol) {
  return [kind, params, p, root_tol](double r, const State<2>& y, State<2>& dy) {
    dy[0] = y[1];
    dy[1] = normal_form(kind, params, r, y[0], y[1], p, root_tol);
  };
}

std::vector<EventSpec<2>> make_events(const SolverControls& ctl) {
  std::vector<EventSpec<2>> ev(2);
  ev[0].fn = [](double, const State<2>& y) { return y[0]; };
  ev[0].stop_after = std::max(ctl.max_zeros, 0);
  ev[1].fn = [](double, const State<2>& y) { return y[1]; };
  ev[1].stop_after = 0;
  return ev;
}

void harvest(ShotResult& out, const Trajectory<2>& traj) {
  for (const auto& hit : traj.hits) {
    if (hit.event == 0) {
      out.zeros.push_back(hit.r);
      out.slopes_at_zeros.push_back(hit.state[1]);
    } else {
      out.critical_points.push_back(hit.r);
    }
  }
  for (std::size_t i = 1; i < out.zeros.size(); ++i)
    if (!(out.zeros[i] > out.zeros[i - 1]))
      throw InternalError("recorded zeros are not strictly increasing");
  out.terminal = traj.status;
  out.n_accepted = traj.n_accepted;
  out.n_rejected = traj.n_rejected;
}

void classify(ShotResult& out, const Trajectory<2>& traj,
              const PucciParams& params, double p,
              const SolverControls& ctl) {
  if (traj.status == Terminal::BlowUp && out.zeros.empty())
    throw InternalError(
        "trajectory blew up before the first zero; the outer energy decreases "
        "along genuine trajectories, so this indicates a misconfigured "
        "integration (check tolerances and blowup_threshold)");
  if (!out.zeros.empty()) {
    out.classification = Classification::Finite;
    return;
  }
  const auto& ye = traj.y_end();
  if (traj.status == Terminal::ReachedHorizon &&
      std::abs(ye[0]) < ctl.decay_threshold && ye[0] * ye[1] < 0.0) {
    out.classification = Classification::DecaysToZero;
    return;
  }
  out.classification = Classification::Undetermined;
  const ExponentSet ex = exponents(params);
  if (ex.p_minus && p >= *ex.p_minus - 1e-12)
    out.note =
        "no zero before the horizon; p is at or beyond the subcritical "
        "threshold n-/(n- - 2), where a first zero need not exist";
}

}  // namespace

ShotResult ShotResult::negated() const {
  ShotResult m = *this;
  m.start_value = -start_value;
  m.start_slope = -start_slope;
  m.parameter = -parameter;
  for (auto& s : m.slopes_at_zeros) s = -s;
  m.profile = profile.negated();
  return m;
}

ShotResult shoot_annulus(const ProblemSpec& spec, double a, double slope,
                         const SolverControls& controls) {
  spec.params.validate();
  if (!(spec.p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (!(a > 0.0)) throw std::invalid_argument("inner radius a must be positive");
  if (slope == 0.0) throw std::invalid_argument("shooting slope must be nonzero");

  SolverControls ctl = controls;
  if (ctl.r_max <= 0.0) ctl.r_max = 1e4 * a;
  if (!(ctl.r_max > a))
    throw std::invalid_argument("horizon r_max must exceed the start radius");

  const auto rhs = make_rhs(spec.kind, spec.params, spec.p,
                            ctl.abs_tol / spec.params.Lambda);
  const auto traj = integrate<2>(rhs, a, {0.0, slope}, ctl, make_events(ctl));

  ShotResult out;
  out.start_radius = a;
  out.start_value = 0.0;
  out.start_slope = slope;
  out.parameter = slope;
  harvest(out, traj);
  out.profile = RadialProfile::from_trajectory(traj);
  classify(out, traj, spec.params, spec.p, ctl);
  return out;
}

ShotResult shoot_ball(const ProblemSpec& spec, double center_value,
                      const SolverControls& controls) {
  spec.params.validate();
  if (!(spec.p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (center_value == 0.0)
    throw std::invalid_argument("center value must be nonzero");
  if (!spec.kind.is_pucci())
    throw std::invalid_argument(
        "center shots need the Pucci closed form for u''(0); general radial "
        "operators are not supported here");

  SolverControls ctl = controls;
  if (ctl.r_max <= 0.0) ctl.r_max = 1e4;

  const PucciParams& pp = spec.params;
  const double gamma = center_value;
  // u''(0) = c solves F(c I) = -|gamma|^{p-1} gamma =: t; all n Hessian
  // eigenvalues coincide at the center.
  const double t = -std::pow(std::abs(gamma), spec.p - 1.0) * gamma;
  double c;
  if (spec.kind.tag() == OperatorTag::PucciPlus)
    c = t >= 0.0 ? t / (pp.n * pp.Lambda) : t / (pp.n * pp.lambda);
  else
    c = t >= 0.0 ? t / (pp.n * pp.lambda) : t / (pp.n * pp.Lambda);

  const double h0 = std::sqrt(ctl.abs_tol) *
                    std::pow(std::max(1.0, std::abs(gamma)), (1.0 - spec.p) / 2.0);
  if (!(ctl.r_max > h0))
    throw std::invalid_argument("horizon r_max must exceed the series-start radius");

  const double A = 0.5 * c * h0 * h0;
  const State<2> y0 = {gamma + A, c * h0};

  const auto rhs = make_rhs(spec.kind, spec.params, spec.p,
                            ctl.abs_tol / pp.Lambda);
  const auto traj = integrate<2>(rhs, h0, y0, ctl, make_events(ctl));

  ShotResult out;
  out.start_radius = 0.0;
  out.start_value = gamma;
  out.start_slope = 0.0;
  out.parameter = gamma;
  harvest(out, traj);
  out.profile.push_segment(series_start_segment(gamma, c, h0));
  out.profile.append_trajectory(traj);
  classify(out, traj, spec.params, spec.p, ctl);
  return out;
}

ShotResult shoot_neumann(const ProblemSpec& spec, double a, double gamma,
                         const SolverControls& controls) {
  spec.params.validate();
  if (!(spec.p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (!(a > 0.0)) throw std::invalid_argument("start radius a must be positive");
  if (!(gamma > 0.0))
    throw std::invalid_argument("Neumann start value gamma must be positive");

  SolverControls ctl = controls;
  if (ctl.r_max <= 0.0) ctl.r_max = 1e4 * a;
  if (!(ctl.r_max > a))
    throw std::invalid_argument("horizon r_max must exceed the start radius");

  const auto rhs = make_rhs(spec.kind, spec.params, spec.p,
                            ctl.abs_tol / spec.params.Lambda);
  const auto traj = integrate<2>(rhs, a, {gamma, 0.0}, ctl, make_events(ctl));

  ShotResult out;
  out.start_radius = a;
  out.start_value = gamma;
  out.start_slope = 0.0;
  out.parameter = gamma;
  harvest(out, traj);
  out.profile = RadialProfile::from_trajectory(traj);
  classify(out, traj, spec.params, spec.p, ctl);
  return out;
}

EnergyTrace energy_trace(const ShotResult& shot, const PucciParams& params,
                         double p, std::size_t samples_per_branch) {
  params.validate();
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  if (samples_per_branch < 1)
    throw std::invalid_argument("need at least one sample per branch");

  double tau;
  const double start = shot.profile.r_lo();
  if (shot.start_slope == 0.0) {
    tau = start;  // Neumann or center start: the arch maximum is the start
  } else if (!shot.critical_points.empty()) {
    tau = shot.critical_points.front();
    if (!shot.zeros.empty() && !(tau < shot.zeros.front()))
      throw InternalError("first critical point is not before the first zero");
  } else {
    throw std::invalid_argument("shot has no critical point; energy branches undefined");
  }

  double outer_end = shot.profile.r_hi();
  for (double z : shot.zeros)
    if (z > tau) {
      outer_end = z;
      break;
    }

  const ExponentSet ex = exponents(params);
  const double expo = 2.0 * (ex.n_tilde_minus - 1.0);
  const double P1 = p + 1.0;

  EnergyTrace tr;
  const auto push = [&](double r) {
    const auto y = shot.profile.eval(r);
    const double kin = 0.5 * y[1] * y[1];
    const double pot = std::pow(std::abs(y[0]), P1) / P1;
    const double w = std::pow(r, expo);
    tr.radii.push_back(r);
    tr.E1.push_back(w * (kin + pot / params.Lambda));
    tr.E2.push_back(kin + pot / params.lambda);
    tr.calE1.push_back(w * (kin + pot / params.lambda));
    tr.calE2.push_back(kin + pot / params.Lambda);
  };

  if (tau > start) {
    for (std::size_t i = 0; i <= samples_per_branch; ++i)
      push(start + (tau - start) * double(i) / double(samples_per_branch));
  } else {
    push(tau);
  }
  tr.tau_index = tr.radii.size() - 1;
  for (std::size_t i = 1; i <= samples_per_branch; ++i)
    push(tau + (outer_end - tau) * double(i) / double(samples_per_branch));
  return tr;
}

}  // namespace pucci
