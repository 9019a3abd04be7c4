#pragma once

// Error and divergence metrics between Poisson intensity matrices, plus the
// structural parts of the performance bounds. The bound functions multiply by
// user-supplied absolute constants that default to 1; their values are
// structural diagnostics, not certified bounds.

#include <algorithm>
#include <cmath>
#include <limits>

#include "plr/core.hpp"
#include "plr/sensing.hpp"

namespace plr {

// ||M - Mhat||_F^2
inline double squared_error(const Matrix& M, const Matrix& Mhat) {
  detail::require_same_shape(M, Mhat, "squared_error");
  return (M - Mhat).squaredNorm();
}

// D(p||q) = p log(p/q) - (p - q)
inline double kl_poisson(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) {
    throw ParameterError("kl_poisson: arguments must be > 0");
  }
  return p * std::log(p / q) - (p - q);
}

// d_H^2(p, q) = 2 - 2 exp(-(sqrt p - sqrt q)^2 / 2)
inline double hellinger_poisson(double p, double q) {
  if (!(p >= 0.0) || !(q >= 0.0)) {
    throw ParameterError("hellinger_poisson: arguments must be >= 0");
  }
  const double d = std::sqrt(p) - std::sqrt(q);
  return -2.0 * std::expm1(-0.5 * d * d);
}

inline double kl_matrix(const Matrix& P, const Matrix& Q) {
  detail::require_same_shape(P, Q, "kl_matrix");
  double s = 0.0;
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    for (Eigen::Index i = 0; i < P.rows(); ++i) s += kl_poisson(P(i, j), Q(i, j));
  }
  return s / static_cast<double>(P.size());
}

inline double hellinger_matrix(const Matrix& P, const Matrix& Q) {
  detail::require_same_shape(P, Q, "hellinger_matrix");
  double s = 0.0;
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      s += hellinger_poisson(P(i, j), Q(i, j));
    }
  }
  return s / static_cast<double>(P.size());
}

namespace detail {

// (1 - e^{-T}) / T, with its series below T = 1e-8.
inline double one_minus_exp_over(double T) {
  if (T < 1e-8) return 1.0 - 0.5 * T + T * T / 6.0;
  return -std::expm1(-T) / T;
}

}  // namespace detail

// T = (alpha - beta)^2 / (8 beta)
inline double hellinger_temperature(const FeasibleSet& set) {
  const double gap = set.alpha - set.beta;
  return gap * gap / (8.0 * set.beta);
}

// (1 - e^{-T}) / (4 alpha T): for P, Q in S,
// d_H^2(P, Q) >= factor * ||P - Q||_F^2 / (d1 d2).
inline double hellinger_lower_bound_factor(const FeasibleSet& set) {
  set.validate();
  return detail::one_minus_exp_over(hellinger_temperature(set)) / (4.0 * set.alpha);
}

struct BoundConstants {
  double C = 1.0;        // probability constant of the completion bound
  double C_prime = 1.0;  // completion bound
  double c0 = 1.0;       // weak-lq tail constant
  double c2 = 1.0;
  double c4 = 1.0;       // measurement-count constant
  double rho = 1.0;      // weak-lq radius factor
  double q = 0.5;        // weak-lq exponent, in (0, 1)
  double sensing_p = 0.5;

  void validate() const {
    if (!(C > 0 && C_prime > 0 && c0 > 0 && c2 > 0 && c4 > 0 && rho > 0)) {
      throw ParameterError("BoundConstants: constants must be > 0");
    }
    if (!(q > 0.0 && q < 1.0)) throw ParameterError("BoundConstants: q must be in (0,1)");
    if (!(sensing_p > 0.0 && sensing_p < 1.0)) {
      throw ParameterError("BoundConstants: sensing_p must be in (0,1)");
    }
  }
};

// Per-entry MSE upper bound for completion with expected sample size m.
// Uses the simplified form when m >= (d1 + d2) log(d1 d2), the general form
// with its extra square-root bracket otherwise.
inline double completion_upper_bound(const FeasibleSet& set, Eigen::Index d1,
                                     Eigen::Index d2, double m,
                                     const BoundConstants& k = {}) {
  set.validate();
  k.validate();
  if (!(m > 0.0)) throw ParameterError("completion_upper_bound: m must be > 0");
  const double n1 = static_cast<double>(d1);
  const double n2 = static_cast<double>(d2);
  const double T = hellinger_temperature(set);
  const double temp_factor = 8.0 * set.alpha / detail::one_minus_exp_over(T);
  const double core = k.C_prime * temp_factor *
                      (set.alpha * std::sqrt(static_cast<double>(set.rank_budget)) /
                       set.beta) *
                      (set.alpha * (std::exp(2.0) - 2.0) + 3.0 * std::log(n1 * n2)) *
                      std::sqrt((n1 + n2) / m);
  const double threshold = (n1 + n2) * std::log(n1 * n2);
  if (m >= threshold) return std::sqrt(2.0) * core;
  return core * std::sqrt(1.0 + threshold / m);
}

struct RecoveryBoundFactors {
  double ell_star = 0.0;  // 2m / [c4 xi_p^4 (d1 + d2 + 4) log2 d]
  double ell_min = 0.0;   // continuous minimizer, clipped to [1, ell_star]
  double bracket = 0.0;   // c0 rho^2 l^{-2a'} + lambda l (d1+d2+4) log2 d / (2I) at ell_min
};

// Bracket of the nearly-low-rank recovery bound as a function of l.
inline double recovery_bracket(double ell, Eigen::Index d1, Eigen::Index d2,
                               double I, double lambda, const BoundConstants& k) {
  const double a = 1.0 / k.q - 0.5;
  const double d = static_cast<double>(std::min(d1, d2));
  const double b = lambda * (static_cast<double>(d1 + d2) + 4.0) * std::log2(d) /
                   (2.0 * I);
  return k.c0 * k.rho * k.rho * std::pow(ell, -2.0 * a) + b * ell;
}

inline RecoveryBoundFactors recovery_bound_factors(Eigen::Index d1, Eigen::Index d2,
                                                   double m, double I, double lambda,
                                                   const BoundConstants& k = {}) {
  k.validate();
  if (!(I > 0.0)) throw ParameterError("recovery_bound_factors: I must be > 0");
  if (!(lambda >= 0.0)) throw ParameterError("recovery_bound_factors: lambda < 0");
  const double a = 1.0 / k.q - 0.5;
  const double d = static_cast<double>(std::min(d1, d2));
  const double log2d = std::log2(d);
  const double width = (static_cast<double>(d1 + d2) + 4.0) * log2d;
  const double xi = xi_p(k.sensing_p);
  RecoveryBoundFactors out;
  out.ell_star = width > 0.0 ? 2.0 * m / (k.c4 * std::pow(xi, 4) * width)
                             : std::numeric_limits<double>::infinity();
  const double denom = lambda * width;
  const double interior =
      denom > 0.0 ? std::pow(4.0 * k.c0 * k.rho * k.rho * a * I / denom, 1.0 / (2.0 * a + 1.0))
                  : std::numeric_limits<double>::infinity();
  out.ell_min = std::max(1.0, std::min(interior, out.ell_star));
  if (!std::isfinite(out.ell_min)) out.ell_min = std::max(1.0, d);
  out.bracket = recovery_bracket(out.ell_min, d1, d2, I, lambda, k);
  return out;
}

}  // namespace plr
