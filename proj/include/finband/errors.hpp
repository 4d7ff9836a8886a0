#pragma once

#include <stdexcept>
#include <string>

namespace finband {

// Input or invariant violation (bad JSON, q^(d) not positive, window too
// small, ...).  The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A computation that was attempted but could not be completed (no
// convergence, continuation collision, ...).  CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finband
