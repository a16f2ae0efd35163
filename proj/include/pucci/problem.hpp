#pragma once

#include <stdexcept>
#include <variant>

#include "pucci/operators.hpp"

namespace pucci {

struct AnnulusDomain {
  double a = 0.0;
  double b = 0.0;
};

struct BallDomain {
  double R = 0.0;
};

enum class SignChoice { Positive, Negative };

// Full description of -F(x, D^2 u) = |u|^{p-1} u on an annulus or ball.
struct ProblemSpec {
  OperatorKind kind;
  PucciParams params;
  double p = 0.0;
  std::variant<AnnulusDomain, BallDomain> domain = AnnulusDomain{};
  SignChoice sign = SignChoice::Positive;
  int nodal_k = 1;

  bool is_annulus() const { return std::holds_alternative<AnnulusDomain>(domain); }
  const AnnulusDomain& annulus() const {
    if (!is_annulus()) throw std::invalid_argument("spec domain is not an annulus");
    return std::get<AnnulusDomain>(domain);
  }
  const BallDomain& ball() const {
    if (is_annulus()) throw std::invalid_argument("spec domain is not a ball");
    return std::get<BallDomain>(domain);
  }

  void validate() const {
    params.validate();
    if (!(p > 1.0)) throw std::invalid_argument("exponent p must exceed 1");
    if (nodal_k < 1) throw std::invalid_argument("nodal count k must be >= 1");
    if (is_annulus()) {
      const auto& d = std::get<AnnulusDomain>(domain);
      if (!(d.a > 0.0)) throw std::invalid_argument("inner radius a must be positive");
      if (!(d.b > d.a)) throw std::invalid_argument("outer radius b must exceed a");
    } else {
      const auto& d = std::get<BallDomain>(domain);
      if (!(d.R > 0.0)) throw std::invalid_argument("ball radius R must be positive");
    }
  }
};

}  // namespace pucci
