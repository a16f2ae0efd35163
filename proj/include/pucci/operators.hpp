#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "pucci/errors.hpp"

namespace pucci {

// Ellipticity bounds 0 < lambda <= Lambda and space dimension n >= 2.
struct PucciParams {
  double lambda = 1.0;
  double Lambda = 1.0;
  int n = 2;

  void validate() const;  // throws std::invalid_argument with a reason
};

enum class OperatorTag { PucciPlus, PucciMinus, GeneralRadial };

// A rotationally invariant operator evaluated on the eigenvalue data of a
// radial Hessian: F(r, m, l) where m is the simple eigenvalue (u'') and l the
// (n-1)-fold one (u'/r).  Must be nondecreasing in both, with slopes between
// lambda and Lambda per eigenvalue direction.
using RadialEvaluator = std::function<double(double r, double m, double l)>;

class OperatorKind {
public:
  OperatorKind() = default;

  static OperatorKind pucci_plus();
  static OperatorKind pucci_minus();
  static OperatorKind general(RadialEvaluator f);

  OperatorTag tag() const { return tag_; }
  bool is_pucci() const { return tag_ != OperatorTag::GeneralRadial; }

  // F applied to the radial eigenvalue pair (m simple, l with multiplicity n-1).
  double evaluate(const PucciParams& params, double r, double m, double l) const;

  // The operator G with G(M) = -F(-M); swaps the two Pucci operators and is
  // an involution.  Negative solutions of F correspond to positive ones of G.
  OperatorKind dual() const;

  const char* name() const;

private:
  OperatorTag tag_ = OperatorTag::PucciPlus;
  std::shared_ptr<const RadialEvaluator> fn_;  // set for GeneralRadial only
  bool negated_ = false;                       // dual-wrap of a general evaluator
};

// Extremal operator value on an explicit eigenvalue list (Pucci kinds only).
double pucci_apply(OperatorTag tag, const PucciParams& params,
                   std::span<const double> eigenvalues);

struct RadialHessian {
  double simple;      // u''
  double repeated;    // u'/r
  int multiplicity;   // n-1
};

RadialHessian radial_hessian_eigenvalues(double r, double uprime, double usecond,
                                         int n);

// Solves F(r, u'', u'/r) = -|u|^{p-1} u for u''.  Closed form for the Pucci
// operators; safeguarded bisection for general evaluators.
double normal_form(const OperatorKind& kind, const PucciParams& params, double r,
                   double u, double uprime, double p, double root_tol = 1e-13);

inline OperatorKind dual_operator(const OperatorKind& kind) { return kind.dual(); }

// Scaling exponents attached to (lambda, Lambda, n).  A missing optional means
// the corresponding critical exponent is +infinity.
struct ExponentSet {
  double n_tilde_plus = 0;
  double n_tilde_minus = 0;
  std::optional<double> p_plus;
  std::optional<double> p_minus;
};

ExponentSet exponents(const PucciParams& params);

// Spot-checks monotonicity and the [lambda, Lambda] slope bounds of a general
// evaluator on random eigenvalue increments.  Throws EllipticityViolation on
// the first failure.  Pucci kinds pass by construction.
void validate_ellipticity(const OperatorKind& kind, const PucciParams& params,
                          int samples = 256, unsigned seed = 20260824u);

}  // namespace pucci
