#include "pucci/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace pucci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void finalize(CheckReport& rep, double tol) {
  rep.tolerance = tol;
  rep.pass = !rep.applicable || rep.worst_margin >= -tol;
}

}  // namespace

CheckReport check_energy_monotonicity(const EnergyTrace& trace, double tol) {
  CheckReport rep;
  rep.name = "energy-monotonicity";
  if (trace.radii.size() < 2 || trace.tau_index >= trace.radii.size())
    throw std::invalid_argument("energy trace too short");

  double worst = kInf, where = trace.radii.front();

  // direction +1 means the series must not decrease on [from, to].
  const auto scan = [&](const std::vector<double>& x, std::size_t from,
                        std::size_t to, double direction) {
    if (to <= from + 0) return;
    double scale = 0.0;
    for (std::size_t i = from; i <= to; ++i) scale = std::max(scale, std::abs(x[i]));
    if (scale == 0.0) scale = 1.0;
    for (std::size_t i = from; i < to; ++i) {
      const double m = direction * (x[i + 1] - x[i]) / scale;
      if (m < worst) {
        worst = m;
        where = trace.radii[i + 1];
      }
    }
  };

  const std::size_t t = trace.tau_index, e = trace.radii.size() - 1;
  scan(trace.calE1, 0, t, +1.0);
  scan(trace.calE2, 0, t, -1.0);
  scan(trace.E1, t, e, +1.0);
  scan(trace.E2, t, e, -1.0);

  if (worst == kInf) {
    worst = tol;
    rep.note = "degenerate branches; nothing to compare";
  }
  rep.worst_margin = worst;
  rep.worst_location = where;
  rep.measured = worst;
  finalize(rep, tol);
  return rep;
}

CheckReport check_tau_bounds(const ShotResult& shot, const PucciParams& params,
                             double p, double a, double alpha, double tol) {
  params.validate();
  CheckReport rep;
  rep.name = "first-arch-maximum-bounds";
  if (alpha == 0.0)
    throw std::invalid_argument("bounds need a nonzero shooting slope");
  if (shot.critical_points.empty()) {
    rep.applicable = false;
    rep.note = "no critical point recorded; bounds not applicable";
    finalize(rep, tol);
    return rep;
  }

  const double tau = shot.critical_points.front();
  const double am = std::abs(alpha);
  const double ut = std::abs(shot.profile.eval(tau)[0]);
  const ExponentSet ex = exponents(params);
  const double ntm = ex.n_tilde_minus;
  const double e2 = 2.0 * (ntm - 1.0);
  const double P1 = p + 1.0;

  const auto norm = [&](double lhs, double rhs) {
    return std::max(std::abs(rhs), 1e-12 * (1.0 + std::abs(lhs)));
  };

  const double up1 = std::pow(ut, P1);
  const double lb1 = 0.5 * params.lambda * P1 * std::pow(a / tau, e2) * am * am;
  const double ub1 = 0.5 * params.Lambda * P1 * am * am;
  const double cp = c_p_quadrature(p);
  const double ub2 =
      std::pow(std::sqrt(0.5 * params.Lambda * P1) * cp / (tau - a), 2.0 / (p - 1.0));

  double margins[4];
  const char* names[4] = {"lower1", "upper1", "upper2", "lower2"};
  margins[0] = (up1 - lb1) / norm(up1, lb1);
  margins[1] = (ub1 - up1) / norm(up1, ub1);
  margins[2] = (ub2 - ut) / norm(ut, ub2);
  int count = 3;
  bool lb2_skipped = false;
  if (ntm > 2.0 + 1e-12) {
    const double lb2 =
        std::pow(a, ntm - 1.0) * am / (ntm - 2.0) *
            (std::pow(a, 2.0 - ntm) - std::pow(tau, 2.0 - ntm)) -
        std::pow(ut, p) * (tau - a) * (tau - a) / (2.0 * params.lambda);
    margins[3] = (ut - lb2) / norm(ut, lb2);
    count = 4;
  } else {
    lb2_skipped = true;
  }

  double worst = kInf;
  int worst_i = 0;
  std::ostringstream note;
  for (int i = 0; i < count; ++i) {
    if (margins[i] < worst) {
      worst = margins[i];
      worst_i = i;
    }
    note << names[i] << "=" << margins[i] << (i + 1 < count ? " " : "");
  }
  if (lb2_skipped)
    note << " lower2=skipped (minimal dimension-like exponent is 2)";
  note << "; worst=" << names[worst_i];

  rep.worst_margin = worst;
  rep.worst_location = tau;
  rep.measured = ut;
  rep.note = note.str();
  finalize(rep, tol);
  return rep;
}

CheckReport check_hopf_bound(const ShotResult& shot, const PucciParams& params,
                             double a, double alpha, double tol) {
  params.validate();
  CheckReport rep;
  rep.name = "first-zero-slope-bound";
  if (alpha == 0.0)
    throw std::invalid_argument("bound needs a nonzero shooting slope");
  if (shot.classification != Classification::Finite || shot.zeros.empty()) {
    rep.applicable = false;
    rep.note = "no finite first zero; bound not applicable";
    finalize(rep, tol);
    return rep;
  }

  const double rho = shot.zeros.front();
  const double s = shot.slopes_at_zeros.front();
  const double sm = alpha > 0.0 ? s : -s;  // mirrored to the positive arch
  const ExponentSet ex = exponents(params);
  const double bound = std::sqrt(params.lambda / params.Lambda) *
                       std::pow(a / rho, ex.n_tilde_minus - 1.0) * std::abs(alpha);
  rep.worst_margin = (-sm - bound) / bound;
  rep.worst_location = rho;
  rep.measured = s;
  finalize(rep, tol);
  return rep;
}

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469};

struct GkEstimate {
  double integral;
  double error;
};

template <typename F>
GkEstimate gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = hl * kXgk[j];
    const double f1 = f(c - x), f2 = f(c + x);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }
  return {resk * hl, std::abs(resk - resg) * hl};
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double abs_tol) {
  struct Piece {
    double a, b;
    int depth;
  };
  std::vector<Piece> stack{{a, b, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    const Piece piece = stack.back();
    stack.pop_back();
    const GkEstimate est = gk15(f, piece.a, piece.b);
    const double budget = abs_tol * (piece.b - piece.a) / (b - a);
    if (est.error <= budget || piece.depth >= 48) {
      total += est.integral;
    } else {
      const double mid = 0.5 * (piece.a + piece.b);
      stack.push_back({piece.a, mid, piece.depth + 1});
      stack.push_back({mid, piece.b, piece.depth + 1});
    }
  }
  return total;
}

}  // namespace

double c_p_quadrature(double p, double abs_tol) {
  if (!(p >= 1.0)) throw std::invalid_argument("exponent must be >= 1");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  // After sigma = 1 - s^2 the integrand is 2s / sqrt(1 - (1-s^2)^{p+1}),
  // finite at both ends: 2/sqrt(p+1) at s=0, and 2 at s=1.
  const double P1 = p + 1.0;
  const auto f = [P1](double s) {
    if (s < 1e-14) return 2.0 / std::sqrt(P1);
    const double q = -std::expm1(P1 * std::log1p(-s * s));
    return 2.0 * s / std::sqrt(q);
  };
  return adaptive_gk(f, 0.0, 1.0, abs_tol);
}

ProfileView view_of(const RadialProfile& profile,
                    std::vector<double> special_radii) {
  auto shared = std::make_shared<RadialProfile>(profile);
  ProfileView v;
  v.eval = [shared](double r) { return shared->eval(r); };
  v.r_lo = shared->r_lo();
  v.r_hi = shared->r_hi();
  v.special_radii = std::move(special_radii);
  return v;
}

namespace {

struct FdSweep {
  std::vector<double> r, u, v, w;  // w = reconstructed u''
  std::vector<bool> excluded;
  double max_u = 0.0;
  std::size_t n_excluded = 0;
};

FdSweep fd_sweep(const ProfileView& view, const SolverControls& controls,
                 std::size_t samples, double fd_scale) {
  if (!view.eval) throw std::invalid_argument("profile view has no evaluator");
  const double L = view.r_hi - view.r_lo;
  const double h = fd_scale * L;
  if (!(L > 0.0) || !(h > 0.0) || L <= 4.0 * h || samples < 16)
    throw std::invalid_argument("profile too short for differencing");

  FdSweep s;
  s.r.resize(samples);
  s.u.resize(samples);
  s.v.resize(samples);
  s.w.resize(samples);
  s.excluded.assign(samples, false);

  const double lo = view.r_lo + h, hi = view.r_hi - h;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = lo + (hi - lo) * double(i) / double(samples - 1);
    const auto y = view.eval(r);
    s.r[i] = r;
    s.u[i] = y[0];
    s.v[i] = y[1];
    s.w[i] = (view.eval(r + h)[0] - 2.0 * y[0] + view.eval(r - h)[0]) / (h * h);
    s.max_u = std::max(s.max_u, std::abs(y[0]));
  }

  const double floor = 10.0 * controls.abs_tol;
  for (std::size_t i = 0; i < samples; ++i) {
    bool ex = std::abs(s.u[i]) < floor || std::abs(s.v[i]) < floor;
    if (!ex)
      for (double z : view.special_radii)
        if (std::abs(s.r[i] - z) <= 2.0 * h) {
          ex = true;
          break;
        }
    s.excluded[i] = ex;
  }
  // Adjacent samples straddling a u'' sign change sit on a switching surface
  // of the operator; differencing there measures the kink.
  for (std::size_t i = 0; i + 1 < samples; ++i) {
    if (s.w[i] == 0.0 || s.w[i + 1] == 0.0 ||
        (s.w[i] > 0.0) != (s.w[i + 1] > 0.0)) {
      s.excluded[i] = true;
      s.excluded[i + 1] = true;
    }
  }
  for (bool b : s.excluded) s.n_excluded += b ? 1 : 0;
  return s;
}

}  // namespace

CheckReport equation_residual(const ProfileView& view, const OperatorKind& kind,
                              const PucciParams& params, double p,
                              const SolverControls& controls, double tol,
                              std::size_t samples, double fd_scale) {
  params.validate();
  CheckReport rep;
  rep.name = "equation-residual";
  const FdSweep s = fd_sweep(view, controls, samples, fd_scale);
  const double denom = 1.0 + std::pow(s.max_u, p);

  double worst = 0.0, where = s.r.front();
  std::size_t used = 0;
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    if (s.excluded[i]) continue;
    ++used;
    const double F = kind.evaluate(params, s.r[i], s.w[i], s.v[i] / s.r[i]);
    const double forcing = std::pow(std::abs(s.u[i]), p - 1.0) * s.u[i];
    const double res = std::abs(F + forcing) / denom;
    if (res > worst) {
      worst = res;
      where = s.r[i];
    }
  }

  std::ostringstream note;
  note << used << " of " << s.r.size() << " samples checked ("
       << s.n_excluded << " excluded near zeros, critical points, and "
       << "switching surfaces)";
  rep.note = note.str();
  rep.measured = worst;
  rep.worst_margin = tol - worst;
  rep.worst_location = where;
  if (used == 0) {
    rep.applicable = false;
    rep.note += "; no usable samples";
  }
  rep.tolerance = tol;
  rep.pass = !rep.applicable || rep.worst_margin >= 0.0;
  return rep;
}

CheckReport equation_residual(const RadialProfile& profile,
                              const std::vector<double>& special_radii,
                              const OperatorKind& kind, const PucciParams& params,
                              double p, const SolverControls& controls, double tol,
                              std::size_t samples, double fd_scale) {
  return equation_residual(view_of(profile, special_radii), kind, params, p,
                           controls, tol, samples, fd_scale);
}

CheckReport check_arch_exclusion(const ProfileView& view,
                                 const SolverControls& controls,
                                 double threshold, std::size_t samples,
                                 double fd_scale) {
  CheckReport rep;
  rep.name = "convex-increasing-exclusion";
  const FdSweep s = fd_sweep(view, controls, samples, fd_scale);

  double worst = -kInf, where = s.r.front();
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    // positive arches: (u, u', u'') all above threshold is forbidden; negative
    // arches mirror to all below -threshold.
    const double up = std::min({s.u[i], s.v[i], s.w[i]});
    const double dn = std::min({-s.u[i], -s.v[i], -s.w[i]});
    const double viol = std::max(up, dn);
    if (viol > worst) {
      worst = viol;
      where = s.r[i];
    }
  }
  rep.measured = worst;
  rep.worst_margin = threshold - worst;
  rep.worst_location = where;
  rep.tolerance = threshold;
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

}  // namespace pucci
