#pragma once

// Constraint-set maps: box clamp, l1-ball and nuclear-ball projections, the
// positive-part rescale onto {X >= 0, ||X||_{1,1} = I}, singular value
// thresholding, and plain alternating projection onto box ∩ nuclear ball.

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "plr/core.hpp"
#include "plr/svd.hpp"

namespace plr {

inline Matrix project_box(const Matrix& X, double alpha, double beta) {
  if (!(beta < alpha)) throw ParameterError("project_box: require beta < alpha");
  return X.cwiseMax(beta).cwiseMin(alpha);
}

// Euclidean projection of a nonnegative vector onto {x : ||x||_1 <= radius}.
// Sort-based threshold; the largest index satisfying the threshold test wins.
inline Vector project_l1_ball(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw ParameterError("project_l1_ball: radius must be > 0");
  if ((v.array() < 0.0).any()) {
    throw ParameterError("project_l1_ball: entries must be nonnegative");
  }
  if (v.sum() <= radius) return v;
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (cumsum - radius) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

inline Matrix project_nuclear_ball(const Matrix& X, double radius) {
  if (!(radius > 0.0)) {
    throw ParameterError("project_nuclear_ball: radius must be > 0");
  }
  const SvdFactors f = compute_svd(X);
  if (f.singular_values.sum() <= radius) return X;
  return f.reconstruct(project_l1_ball(f.singular_values, radius));
}

// I (Z)^+ / ||(Z)^+||_{1,1}
inline Matrix positive_rescale(const Matrix& Z, double total_intensity) {
  if (!(total_intensity > 0.0)) {
    throw ParameterError("positive_rescale: total intensity must be > 0");
  }
  const Matrix pos = Z.cwiseMax(0.0);
  const double mass = pos.sum();
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericalError("positive_rescale: positive part is identically zero");
  }
  return pos * (total_intensity / mass);
}

// D_tau(Z) = U diag((sigma - tau)^+) V^T
inline Matrix svt(const Matrix& Z, double tau) {
  if (!(tau >= 0.0)) throw ParameterError("svt: tau must be >= 0");
  if (tau == 0.0) return Z;
  const SvdFactors f = compute_svd(Z);
  return f.reconstruct((f.singular_values.array() - tau).cwiseMax(0.0).matrix());
}

struct AlternatingProjectionResult {
  Matrix X;              // last box iterate U_j, always in Gamma1
  int sweeps = 0;
  double residual = 0.0;  // ||V_j - U_j||_F at exit
  bool converged = false;
};

// V_j = Pi_Gamma2(U_{j-1}), U_j = Pi_Gamma1(V_j), until ||V_j - U_j||_F <= tol.
// Converges to a point of the intersection, not in general the orthogonal
// projection of U0 onto it.
inline AlternatingProjectionResult alternating_project(const Matrix& U0,
                                                       const FeasibleSet& set,
                                                       double tol = 1e-8,
                                                       int max_iter = 10000) {
  if (!(tol > 0.0)) throw ParameterError("alternating_project: tol must be > 0");
  if (max_iter < 1) throw ParameterError("alternating_project: max_iter must be >= 1");
  const double radius = set.nuclear_radius(U0.rows(), U0.cols());
  AlternatingProjectionResult r;
  Matrix U = U0;
  for (int j = 1; j <= max_iter; ++j) {
    const Matrix V = project_nuclear_ball(U, radius);
    U = project_box(V, set.alpha, set.beta);
    r.sweeps = j;
    r.residual = (V - U).norm();
    if (r.residual <= tol) {
      r.converged = true;
      break;
    }
  }
  r.X = std::move(U);
  return r;
}

}  // namespace plr
