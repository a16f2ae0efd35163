#pragma once

#include <stdexcept>
#include <string>

namespace pucci {

// Bracket expansion ran out of room without straddling the target.
class NoBracketError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bisection collapsed without the map reaching the target, or a requested
// feature (k-th zero, first critical point, ...) never appeared.
class NoRootError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A user-supplied operator failed a degenerate-ellipticity check.
class EllipticityViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Step budget or similar resource limit exhausted.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// An internal consistency check failed; indicates a solver bug or a
// misconfigured integration, not bad user input.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace pucci
