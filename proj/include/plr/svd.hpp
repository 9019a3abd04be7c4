#pragma once

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "plr/core.hpp"

namespace plr {

// Thin SVD X = U diag(s) V^T with d = min(d1, d2) columns.
struct SvdFactors {
  Matrix U;
  Vector singular_values;  // nonincreasing, >= 0
  Matrix V;

  Matrix reconstruct() const {
    return U * singular_values.asDiagonal() * V.transpose();
  }

  Matrix reconstruct(const Vector& values) const {
    return U * values.asDiagonal() * V.transpose();
  }
};

// Each left singular vector is flipped so that its largest-magnitude entry is
// nonnegative (first such entry on ties); V is flipped alongside.
inline SvdFactors compute_svd(const Matrix& X) {
  if (X.size() == 0) throw DimensionError("compute_svd: empty matrix");
  if (!X.allFinite()) {
    throw NumericalError("compute_svd: matrix has non-finite entries (" +
                         detail::dims_string(X.rows(), X.cols()) + ")");
  }
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    const double smin = s.size() ? s(s.size() - 1) : 0.0;
    throw NumericalError("compute_svd: decomposition failed for " +
                         detail::dims_string(X.rows(), X.cols()) +
                         " matrix, sigma_max=" + std::to_string(smax) +
                         " sigma_min=" + std::to_string(smin));
  }
  SvdFactors f{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index k = 0; k < f.U.cols(); ++k) {
    Eigen::Index arg = 0;
    f.U.col(k).cwiseAbs().maxCoeff(&arg);
    if (f.U(arg, k) < 0.0) {
      f.U.col(k) *= -1.0;
      f.V.col(k) *= -1.0;
    }
  }
  return f;
}

inline Vector singular_values(const Matrix& X) {
  if (X.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(X);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("singular_values: decomposition failed");
  }
  return svd.singularValues();
}

inline double nuclear_norm(const Matrix& X) { return singular_values(X).sum(); }

inline double l11_norm(const Matrix& X) { return X.cwiseAbs().sum(); }

}  // namespace plr
