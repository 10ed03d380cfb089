#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace esr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A value (or vector) stopped being finite inside an evaluation.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An optional capability (e.g. Hessian-vector products) was required but is absent.
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterates of a discrete method left the finite range.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t step, Vector last_finite)
      : std::runtime_error(what), step_(step), last_finite_(std::move(last_finite)) {}

  std::size_t step() const { return step_; }
  const Vector& last_finite_state() const { return last_finite_; }

 private:
  std::size_t step_;
  Vector last_finite_;
};

/// The ODE integrator could not continue (step-size underflow, step budget).
class IntegratorError : public std::runtime_error {
 public:
  IntegratorError(const std::string& what, double time, Vector state)
      : std::runtime_error(what), time_(time), state_(std::move(state)) {}

  double time() const { return time_; }
  const Vector& state() const { return state_; }

 private:
  double time_;
  Vector state_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace esr
