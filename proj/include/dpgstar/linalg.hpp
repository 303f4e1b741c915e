#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dpgstar/types.hpp"

namespace dpg {

/// Dense Hermitian positive definite factorization M = L Lᴴ.
///
/// Thin wrapper over Eigen::LLT that turns a failed factorization into a
/// FactorizationError carrying the first non-positive pivot.
template <typename Scalar>
class HermitianFactor {
public:
  using MatrixType = Matrix<Scalar>;

  HermitianFactor() = default;

  HermitianFactor(const MatrixType &m, const std::string &stage) { compute(m, stage); }

  void compute(const MatrixType &m, const std::string &stage) {
    llt_.compute(m);
    if (llt_.info() != Eigen::Success || !pivots_positive()) {
      MatrixType copy = m;
      Index k = Eigen::internal::llt_inplace<Scalar, Eigen::Lower>::unblocked(copy);
      throw FactorizationError(stage, k < 0 ? first_bad_pivot() : k);
    }
  }

  Index size() const { return llt_.rows(); }

  template <typename Rhs>
  auto solve(const Eigen::MatrixBase<Rhs> &b) const {
    return llt_.solve(b);
  }

  /// L⁻¹ b
  template <typename Rhs>
  Matrix<Scalar> lower_solve(const Eigen::MatrixBase<Rhs> &b) const {
    Matrix<Scalar> x = b;
    llt_.matrixL().solveInPlace(x);
    return x;
  }

  /// sqrt(bᴴ M⁻¹ b) for a single right-hand side.
  template <typename Rhs>
  double inverse_norm(const Eigen::MatrixBase<Rhs> &b) const {
    return lower_solve(b).norm();
  }

  const Eigen::LLT<MatrixType> &llt() const { return llt_; }

private:
  bool pivots_positive() const {
    const auto &l = llt_.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) {
      double d = std::real(l(i, i));
      if (!(d > 0.0) || !std::isfinite(d)) return false;
    }
    return true;
  }

  Index first_bad_pivot() const {
    const auto &l = llt_.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) {
      double d = std::real(l(i, i));
      if (!(d > 0.0) || !std::isfinite(d)) return i;
    }
    return l.rows();
  }

  Eigen::LLT<MatrixType> llt_;
};

/// ‖v‖_M = sqrt(vᴴ M v) for Hermitian positive semidefinite M.
template <typename DerivedM, typename DerivedV>
double weighted_norm(const Eigen::MatrixBase<DerivedM> &m, const Eigen::MatrixBase<DerivedV> &v) {
  double sq = std::real(v.dot(m * v));
  return std::sqrt(std::max(sq, 0.0));
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived> &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace dpg
