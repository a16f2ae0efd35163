#include "pucci/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pucci/diagnostics.hpp"

namespace pucci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Bracket bracket_search(const ShotMap& map, double target, double seed,
                       const ExpansionPolicy& policy) {
  if (!map) throw std::invalid_argument("bracket_search needs a callable map");
  if (!(seed > 0.0)) throw std::invalid_argument("seed must be positive");
  if (!(policy.factor > 1.0))
    throw std::invalid_argument("expansion factor must exceed 1");

  Bracket br;
  int evals = 0;
  const auto eval = [&](double x) {
    ++evals;
    return map(x);
  };

  bool have_lo = false, have_hi = false;
  double lo = 0, hi = 0, vlo = 0, vhi = 0;

  const double vseed = eval(seed);
  if (vseed < target) {
    hi = seed;
    vhi = vseed;
    have_hi = true;
  } else {
    lo = seed;
    vlo = vseed;
    have_lo = true;
  }

  // upward: the map eventually falls below any target
  double x = seed;
  while (!have_hi) {
    const double nx = x * policy.factor;
    if (nx > policy.param_max) {
      std::ostringstream msg;
      msg << "no parameter with map value below target " << target
          << " found while expanding from " << seed << " up to " << x
          << " (limit " << policy.param_max << ")";
      throw NoBracketError(msg.str());
    }
    const double nv = eval(nx);
    if (nv < target) {
      hi = nx;
      vhi = nv;
      have_hi = true;
    } else {
      lo = nx;  // tighten from below while climbing
      vlo = nv;
      have_lo = true;
    }
    x = nx;
  }

  // downward: find the above-target side if the seed was already below
  x = std::min(seed, hi);
  while (!have_lo) {
    const double nx = x / policy.factor;
    if (nx < policy.param_min) {
      std::ostringstream msg;
      msg << "no parameter with map value above target " << target
          << " found while contracting from " << seed << " down to " << x
          << " (limit " << policy.param_min << ")";
      throw NoBracketError(msg.str());
    }
    const double nv = eval(nx);
    if (nv < target) {
      hi = nx;  // tighten from above while descending
      vhi = nv;
    } else {
      lo = nx;
      vlo = nv;
      have_lo = true;
    }
    x = nx;
  }

  br.lo = lo;
  br.hi = hi;
  br.value_lo = vlo;
  br.value_hi = vhi;
  br.evaluations = evals;
  if (!(br.lo < br.hi)) throw InternalError("bracket endpoints out of order");
  return br;
}

BisectOutcome bisect_to_target(const ShotMap& map, double target, Bracket br,
                               double width_scale) {
  if (!map) throw std::invalid_argument("bisect_to_target needs a callable map");
  if (!(br.lo < br.hi)) throw std::invalid_argument("invalid bracket");

  double lo = br.lo, hi = br.hi, vlo = br.value_lo, vhi = br.value_hi;
  int evals = br.evaluations;
  while (hi - lo > width_scale * (1.0 + 0.5 * (lo + hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = map(mid);
    ++evals;
    if (v < target) {
      hi = mid;
      vhi = v;
    } else {
      lo = mid;
      vlo = v;
    }
  }

  BisectOutcome out;
  out.lo = lo;
  out.hi = hi;
  out.value_lo = vlo;
  out.value_hi = vhi;
  out.evaluations = evals;
  const double dlo = std::isfinite(vlo) ? std::abs(vlo - target) : kInf;
  const double dhi = std::isfinite(vhi) ? std::abs(vhi - target) : kInf;
  if (dlo <= dhi) {
    out.param = lo;
    out.achieved = vlo;
  } else {
    out.param = hi;
    out.achieved = vhi;
  }
  if (!std::isfinite(out.achieved) ||
      std::abs(out.achieved - target) > 1e-6 * (1.0 + std::abs(target))) {
    std::ostringstream msg;
    msg << "bisection collapsed to [" << lo << ", " << hi
        << "] without the map reaching target " << target << " (closest value "
        << out.achieved << "); the target may be unreachable from this bracket";
    throw NoRootError(msg.str());
  }
  return out;
}

namespace {

enum class FitFeature { KthZero, FirstCritical };
enum class StartKind { Dirichlet, Neumann };

SolverControls certification_controls(const SolverControls& controls,
                                      double horizon) {
  SolverControls c = controls;
  c.rel_tol = std::min(controls.rel_tol, 1e-12);
  c.abs_tol = std::min(controls.abs_tol, 1e-13);
  c.r_max = horizon;
  c.max_zeros = 0;  // record zeros, never stop on them
  return c;
}

std::vector<double> interior_zeros(const ShotResult& shot, double b,
                                   double merge) {
  std::vector<double> out;
  for (double z : shot.zeros)
    if (z < b - merge) out.push_back(z);
  return out;
}

void check_sign_pattern(const RadialProfile& profile,
                        const std::vector<double>& radii) {
  for (std::size_t j = 1; j < radii.size(); ++j) {
    const double mid = 0.5 * (radii[j - 1] + radii[j]);
    const double expected = (j % 2 == 1) ? +1.0 : -1.0;
    if (!(profile.value(mid) * expected > 0.0)) {
      std::ostringstream msg;
      msg << "certified shot violates the alternating sign pattern on arch " << j
          << " (sample at r=" << mid << ")";
      throw InternalError(msg.str());
    }
  }
}

std::vector<double> special_radii_of(const ShotResult& shot, double lo,
                                     double hi) {
  std::vector<double> s = shot.zeros;
  s.insert(s.end(), shot.critical_points.begin(), shot.critical_points.end());
  s.push_back(lo);
  s.push_back(hi);
  std::sort(s.begin(), s.end());
  return s;
}

NodalSolution solve_annulus_core(const ProblemSpec& spec, int k,
                                 FitFeature feature, StartKind start,
                                 const SolverControls& controls) {
  spec.validate();
  const auto& dom = spec.annulus();
  if (k < 1) throw std::invalid_argument("nodal count k must be >= 1");

  ProblemSpec eff = spec;
  eff.sign = SignChoice::Positive;
  if (spec.sign == SignChoice::Negative) eff.kind = spec.kind.dual();

  // fit with the same accuracy the certification shot will use, otherwise the
  // fitted parameter inherits the looser map's feature-location bias
  SolverControls map_ctl = controls;
  map_ctl.rel_tol = std::min(controls.rel_tol, 1e-12);
  map_ctl.abs_tol = std::min(controls.abs_tol, 1e-13);
  map_ctl.max_zeros = feature == FitFeature::KthZero ? k : 1;

  const ShotMap map = [&](double param) {
    const ShotResult s = start == StartKind::Dirichlet
                             ? shoot_annulus(eff, dom.a, param, map_ctl)
                             : shoot_neumann(eff, dom.a, param, map_ctl);
    if (feature == FitFeature::KthZero) {
      if (s.zeros.size() < static_cast<std::size_t>(k)) return kInf;
      return s.zeros[k - 1];
    }
    const auto tau = s.first_critical();
    return tau ? *tau : kInf;
  };

  const Bracket br = bracket_search(map, dom.b, 1.0);
  const BisectOutcome fit = bisect_to_target(map, dom.b, br);

  const SolverControls cert_ctl = certification_controls(controls, dom.b);
  const ShotResult cert = start == StartKind::Dirichlet
                              ? shoot_annulus(eff, dom.a, fit.param, cert_ctl)
                              : shoot_neumann(eff, dom.a, fit.param, cert_ctl);

  const double merge = 1e-4 * (dom.b - dom.a);
  const std::vector<double> inner = interior_zeros(cert, dom.b, merge);
  const std::size_t expected = feature == FitFeature::KthZero ? k - 1 : 0;
  if (inner.size() != expected) {
    std::ostringstream msg;
    msg << "certified shot has " << inner.size() << " interior zeros, expected "
        << expected;
    throw InternalError(msg.str());
  }

  std::vector<double> radii;
  radii.push_back(dom.a);
  radii.insert(radii.end(), inner.begin(), inner.end());
  radii.push_back(dom.b);
  check_sign_pattern(cert.profile, radii);

  const auto yb = cert.profile.eval(dom.b);
  const double defect =
      feature == FitFeature::FirstCritical ? std::abs(yb[1]) : std::abs(yb[0]);

  const CheckReport res =
      equation_residual(cert.profile, special_radii_of(cert, dom.a, dom.b),
                        eff.kind, spec.params, spec.p, cert_ctl);

  const bool negate = spec.sign == SignChoice::Negative;
  NodalSolution sol;
  sol.k = feature == FitFeature::KthZero ? k : 1;
  sol.radii = radii;
  sol.first_sign = negate ? -1 : +1;
  sol.shot_parameter = negate ? -fit.param : fit.param;
  sol.profile = negate ? cert.profile.negated() : cert.profile;
  sol.shot = negate ? cert.negated() : cert;
  sol.residual = res.measured;
  sol.boundary_defect = defect;
  sol.certificate = {fit.lo,      fit.hi,       fit.value_lo,  fit.value_hi,
                     fit.hi - fit.lo, dom.b,    fit.achieved,  fit.evaluations};
  return sol;
}

}  // namespace

NodalSolution solve_dirichlet_annulus(const ProblemSpec& spec,
                                      const SolverControls& controls) {
  return solve_annulus_core(spec, 1, FitFeature::KthZero, StartKind::Dirichlet,
                            controls);
}

NodalSolution solve_nodal_annulus(const ProblemSpec& spec, int k,
                                  const SolverControls& controls) {
  return solve_annulus_core(spec, k, FitFeature::KthZero, StartKind::Dirichlet,
                            controls);
}

NodalSolution solve_mixed_dn(const ProblemSpec& spec,
                             const SolverControls& controls) {
  return solve_annulus_core(spec, 1, FitFeature::FirstCritical,
                            StartKind::Dirichlet, controls);
}

NodalSolution solve_mixed_nd(const ProblemSpec& spec,
                             const SolverControls& controls) {
  return solve_annulus_core(spec, 1, FitFeature::KthZero, StartKind::Neumann,
                            controls);
}

NodalSolution solve_ball(const ProblemSpec& spec, int k,
                         const SolverControls& controls) {
  spec.validate();
  const auto& dom = spec.ball();
  if (k < 1) throw std::invalid_argument("nodal count k must be >= 1");
  if (!spec.kind.is_pucci())
    throw std::invalid_argument(
        "ball solves need the Pucci closed form for the center curvature");

  ProblemSpec eff = spec;
  eff.sign = SignChoice::Positive;
  if (spec.sign == SignChoice::Negative) eff.kind = spec.kind.dual();

  const ExponentSet ex = exponents(spec.params);
  const bool unsupported = ex.p_minus && spec.p > *ex.p_minus + 1e-12;

  SolverControls cert_ctl = controls;
  cert_ctl.rel_tol = std::min(controls.rel_tol, 1e-12);
  cert_ctl.abs_tol = std::min(controls.abs_tol, 1e-13);
  if (cert_ctl.r_max <= 0.0) cert_ctl.r_max = 1e4;
  cert_ctl.max_zeros = k;  // stop exactly at the k-th zero

  const ShotResult unit = shoot_ball(eff, 1.0, cert_ctl);
  if (unit.zeros.size() < static_cast<std::size_t>(k)) {
    std::ostringstream msg;
    msg << "center shot produced only " << unit.zeros.size() << " zeros before r="
        << cert_ctl.r_max << ", need " << k;
    if (unsupported)
      msg << "; p=" << spec.p
          << " exceeds the subcritical threshold for the minimal operator, "
             "where zeros need not exist";
    throw NoRootError(msg.str());
  }

  const double S = unit.zeros[k - 1];
  const double q = S / dom.R;
  const double A = std::pow(q, 2.0 / (spec.p - 1.0));

  ShotResult scaled = unit;
  scaled.profile = unit.profile.rescaled_to(dom.R, spec.p);
  scaled.start_value = unit.start_value * A;
  scaled.parameter = scaled.start_value;
  for (auto& z : scaled.zeros) z /= q;
  for (auto& c : scaled.critical_points) c /= q;
  for (auto& s : scaled.slopes_at_zeros) s *= A * q;

  std::vector<double> radii;
  radii.push_back(0.0);
  for (int j = 0; j + 1 < k; ++j) radii.push_back(unit.zeros[j] / q);
  radii.push_back(dom.R);
  check_sign_pattern(scaled.profile, radii);

  const double defect = A * std::abs(unit.profile.eval(S)[0]);

  std::vector<double> specials = scaled.zeros;
  specials.insert(specials.end(), scaled.critical_points.begin(),
                  scaled.critical_points.end());
  const CheckReport res = equation_residual(scaled.profile, specials, eff.kind,
                                            spec.params, spec.p, cert_ctl);

  const bool negate = spec.sign == SignChoice::Negative;
  NodalSolution sol;
  sol.k = k;
  sol.radii = radii;
  sol.first_sign = negate ? -1 : +1;
  sol.shot_parameter = negate ? -scaled.start_value : scaled.start_value;
  sol.rescale_factor = q;
  sol.profile = negate ? scaled.profile.negated() : scaled.profile;
  sol.shot = negate ? scaled.negated() : scaled;
  sol.residual = res.measured;
  sol.boundary_defect = defect;
  sol.certificate = {1.0, 1.0, S, S, 0.0, dom.R, dom.R, 1};
  sol.unsupported_regime = unsupported;
  if (unsupported)
    sol.note =
        "p exceeds the subcritical threshold for the minimal operator; the "
        "solve proceeded but the regime is outside the supported theory";
  return sol;
}

}  // namespace pucci
