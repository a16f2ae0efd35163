#include "pucci/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace pucci {

void PucciParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!(Lambda >= lambda) || !std::isfinite(Lambda))
    throw std::invalid_argument("Lambda must satisfy Lambda >= lambda > 0");
  if (n < 2) throw std::invalid_argument("dimension n must be at least 2");
}

OperatorKind OperatorKind::pucci_plus() {
  OperatorKind k;
  k.tag_ = OperatorTag::PucciPlus;
  return k;
}

OperatorKind OperatorKind::pucci_minus() {
  OperatorKind k;
  k.tag_ = OperatorTag::PucciMinus;
  return k;
}

OperatorKind OperatorKind::general(RadialEvaluator f) {
  if (!f) throw std::invalid_argument("general operator needs an evaluator");
  OperatorKind k;
  k.tag_ = OperatorTag::GeneralRadial;
  k.fn_ = std::make_shared<const RadialEvaluator>(std::move(f));
  return k;
}

namespace {

// One-eigenvalue slice of the maximal operator: Lambda on the positive cone,
// lambda on the negative one.  The minimal operator swaps the slopes.
inline double slice_plus(double x, const PucciParams& p) {
  return x >= 0.0 ? p.Lambda * x : p.lambda * x;
}
inline double slice_minus(double x, const PucciParams& p) {
  return x >= 0.0 ? p.lambda * x : p.Lambda * x;
}

}  // namespace

double OperatorKind::evaluate(const PucciParams& params, double r, double m,
                              double l) const {
  params.validate();
  switch (tag_) {
    case OperatorTag::PucciPlus:
      return slice_plus(m, params) + (params.n - 1) * slice_plus(l, params);
    case OperatorTag::PucciMinus:
      return slice_minus(m, params) + (params.n - 1) * slice_minus(l, params);
    case OperatorTag::GeneralRadial:
      return negated_ ? -(*fn_)(r, -m, -l) : (*fn_)(r, m, l);
  }
  throw InternalError("unreachable operator tag");
}

OperatorKind OperatorKind::dual() const {
  OperatorKind k = *this;
  switch (tag_) {
    case OperatorTag::PucciPlus:
      k.tag_ = OperatorTag::PucciMinus;
      break;
    case OperatorTag::PucciMinus:
      k.tag_ = OperatorTag::PucciPlus;
      break;
    case OperatorTag::GeneralRadial:
      k.negated_ = !negated_;
      break;
  }
  return k;
}

const char* OperatorKind::name() const {
  switch (tag_) {
    case OperatorTag::PucciPlus:
      return "pucci-plus";
    case OperatorTag::PucciMinus:
      return "pucci-minus";
    case OperatorTag::GeneralRadial:
      return negated_ ? "general-radial (dual)" : "general-radial";
  }
  return "?";
}

double pucci_apply(OperatorTag tag, const PucciParams& params,
                   std::span<const double> eigenvalues) {
  params.validate();
  if (tag == OperatorTag::GeneralRadial)
    throw std::invalid_argument("pucci_apply accepts the two Pucci tags only");
  double acc = 0.0;
  for (double mu : eigenvalues)
    acc += tag == OperatorTag::PucciPlus ? slice_plus(mu, params)
                                         : slice_minus(mu, params);
  return acc;
}

RadialHessian radial_hessian_eigenvalues(double r, double uprime, double usecond,
                                         int n) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (n < 2) throw std::invalid_argument("dimension n must be at least 2");
  return RadialHessian{usecond, uprime / r, n - 1};
}

double normal_form(const OperatorKind& kind, const PucciParams& params, double r,
                   double u, double uprime, double p, double root_tol) {
  params.validate();
  if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
  const double l = uprime / r;
  const double s = -std::pow(std::abs(u), p - 1.0) * u;  // forcing value of F

  switch (kind.tag()) {
    case OperatorTag::PucciPlus: {
      const double t = s - (params.n - 1) * slice_plus(l, params);
      return t >= 0.0 ? t / params.Lambda : t / params.lambda;
    }
    case OperatorTag::PucciMinus: {
      const double t = s - (params.n - 1) * slice_minus(l, params);
      return t >= 0.0 ? t / params.lambda : t / params.Lambda;
    }
    case OperatorTag::GeneralRadial:
      break;
  }

  // General case: F(r, ., l) is increasing with slope in [lambda, Lambda], so
  // the root lies within |m| <= |s - F(r,0,l)| / lambda of zero.
  const double f0 = kind.evaluate(params, r, 0.0, l);
  double radius = std::abs(s - f0) / params.lambda;
  radius = radius * 1.0000001 + 1e-300;
  double lo = -radius, hi = radius;
  double flo = kind.evaluate(params, r, lo, l);
  double fhi = kind.evaluate(params, r, hi, l);
  if (!(flo <= s && s <= fhi)) {
    std::ostringstream msg;
    msg << "operator violates ellipticity bounds on bracket [" << lo << ", "
        << hi << "] at r=" << r;
    throw EllipticityViolation(msg.str());
  }
  while (hi - lo > root_tol * (1.0 + std::min(std::abs(lo), std::abs(hi)))) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = kind.evaluate(params, r, mid, l);
    if (fm <= s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

ExponentSet exponents(const PucciParams& params) {
  params.validate();
  ExponentSet e;
  e.n_tilde_plus = params.lambda / params.Lambda * (params.n - 1) + 1.0;
  e.n_tilde_minus = params.Lambda / params.lambda * (params.n - 1) + 1.0;
  if (e.n_tilde_plus > 2.0) e.p_plus = e.n_tilde_plus / (e.n_tilde_plus - 2.0);
  if (e.n_tilde_minus > 2.0)
    e.p_minus = e.n_tilde_minus / (e.n_tilde_minus - 2.0);
  return e;
}

void validate_ellipticity(const OperatorKind& kind, const PucciParams& params,
                          int samples, unsigned seed) {
  params.validate();
  if (kind.is_pucci()) return;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> point(-10.0, 10.0);
  std::uniform_real_distribution<double> radius(0.1, 10.0);
  std::uniform_real_distribution<double> incr(1e-3, 1.0);
  // Slope checks get a little slack for rounding inside the evaluator.
  const double slack = 1e-9;
  for (int i = 0; i < samples; ++i) {
    const double r = radius(rng);
    const double m = point(rng), l = point(rng);
    const double d = incr(rng);
    const double base = kind.evaluate(params, r, m, l);
    const double dm = kind.evaluate(params, r, m + d, l) - base;
    const double dl = kind.evaluate(params, r, m, l + d) - base;
    const double lo_m = params.lambda * d, hi_m = params.Lambda * d;
    const double lo_l = (params.n - 1) * params.lambda * d;
    const double hi_l = (params.n - 1) * params.Lambda * d;
    const double tol = slack * (1.0 + std::abs(base));
    if (dm < lo_m - tol || dm > hi_m + tol) {
      std::ostringstream msg;
      msg << "simple-eigenvalue increment " << dm << " outside [" << lo_m
          << ", " << hi_m << "] at (r,m,l)=(" << r << "," << m << "," << l
          << ")";
      throw EllipticityViolation(msg.str());
    }
    if (dl < lo_l - tol || dl > hi_l + tol) {
      std::ostringstream msg;
      msg << "repeated-eigenvalue increment " << dl << " outside [" << lo_l
          << ", " << hi_l << "] at (r,m,l)=(" << r << "," << m << "," << l
          << ")";
      throw EllipticityViolation(msg.str());
    }
  }
}

}  // namespace pucci
