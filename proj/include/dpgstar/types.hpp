#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dpg {

using Index = Eigen::Index;
using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXc = Matrix<Complex>;
using VectorXc = Vector<Complex>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Input rejected before any numerical work starts.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A Hermitian factorization hit a non-positive pivot.
///
/// `pivot()` is the zero-based column at which the factorization stopped,
/// `stage()` names the matrix that failed (local Gram, Schur complement, ...).
class FactorizationError : public std::runtime_error {
public:
  FactorizationError(std::string stage, Index pivot)
      : std::runtime_error(stage + ": factorization failed at pivot " + std::to_string(pivot)),
        stage_(std::move(stage)), pivot_(pivot) {}

  const std::string &stage() const noexcept { return stage_; }
  Index pivot() const noexcept { return pivot_; }

private:
  std::string stage_;
  Index pivot_;
};

/// A documented precondition of an operation does not hold for its inputs.
class PreconditionError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace dpg
