#pragma once

#include <cstdint>

#include "plr/plr.hpp"

namespace plr::testing {

inline Matrix uniform_matrix(Eigen::Index r, Eigen::Index c, double lo, double hi, Rng& rng) {
  Matrix X(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) X(i, j) = lo + (hi - lo) * rng.uniform();
  }
  return X;
}

inline Matrix normal_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  return gaussian_matrix(r, c, rng);
}

inline CompletionObservations full_observations(const Matrix& Y) {
  std::vector<ObservedEntry> e;
  for (Eigen::Index i = 0; i < Y.rows(); ++i) {
    for (Eigen::Index j = 0; j < Y.cols(); ++j) {
      e.push_back({i, j, static_cast<std::int64_t>(std::llround(Y(i, j)))});
    }
  }
  return CompletionObservations(Y.rows(), Y.cols(), std::move(e));
}

inline SensingEnsemble::BoolMatrix bool_matrix(Eigen::Index r, Eigen::Index c, bool v) {
  return SensingEnsemble::BoolMatrix::Constant(r, c, v);
}

}  // namespace plr::testing
