#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace steerftrl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A point of a probability simplex counts as interior when every
// coordinate exceeds this.
inline constexpr double kInteriorEpsilon = 1e-9;

// The integrator refuses to continue once a primal coordinate falls
// below this; flows under the squared-norm regularizer can genuinely
// reach the boundary and clamping would silently change the dynamics.
inline constexpr double kGuardMinCoord = 1e-7;

// Relative singular-value cutoff for the rank of a projected payoff
// matrix (exact linear-algebra object, tight threshold).
inline constexpr double kRankThreshold = 1e-9;

// Relative singular-value cutoff for ranks of spans that include
// finite-difference Lie brackets (looser, matches the bracket noise).
inline constexpr double kBracketRankThreshold = 1e-6;

// Step for central finite differences in the flattened primal chart.
inline constexpr double kBracketFdStep = 1e-5;

// Raised when an input leaves the mathematical domain of an operation
// (non-simplex strategy, boundary point where interiority is required,
// mismatched dimensions).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a trajectory leaves the guarded interior region.
class GuardError : public std::runtime_error {
 public:
  GuardError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Raised when an integration step produces a non-finite state.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

// Raised by the structured-text parsers; carries a line number when the
// failing construct has one.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace steerftrl
