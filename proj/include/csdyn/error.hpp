#pragma once

#include <stdexcept>
#include <string>

namespace csdyn {

// Thrown for numerical failures: non-convergence, broken invariants,
// singular maps. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Thrown for inputs violating a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// F(t) not invertible at time t.
class SingularMapError : public NumericalError {
public:
  SingularMapError(double t, double det)
      : NumericalError("transfer matrix singular at t=" + std::to_string(t) +
                       " (det=" + std::to_string(det) + ")"),
        t_(t), det_(det) {}

  double time() const noexcept { return t_; }
  double det() const noexcept { return det_; }

private:
  double t_;
  double det_;
};

} // namespace csdyn
