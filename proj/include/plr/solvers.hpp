#pragma once

// Optimization drivers.
//
// proximal_gradient and accelerated_proximal_gradient take fixed 1/L steps
// with L = alpha / beta^2 and use alternating projection as the map onto
// S = Gamma1 ∩ Gamma2. pmlsvt alternates a gradient step, singular value
// soft-thresholding by lambda/t and a feasibility map, with geometric
// backtracking on t.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "plr/core.hpp"
#include "plr/objectives.hpp"
#include "plr/projections.hpp"
#include "plr/sensing.hpp"

namespace plr {

enum class StopRule {
  quadratic_gap,     // |f(X) - Q_t(X, X')| < 0.5/K
  objective_change,  // |f(X) - f(X')| < 0.5/K
};

struct SolverConfig {
  int max_iter = 1000;                // K
  double step_recip = 1e-4;           // t, PMLSVT starting value
  double eta = 1.1;                   // backtracking factor, > 1
  std::optional<double> lambda;       // nuclear penalty; default from the set
  double tol = 1e-10;                 // generic solvers: |f_k - f_{k-1}| < tol
  StopRule stop_rule = StopRule::quadratic_gap;
  int max_backtracks = 2000;          // per PMLSVT iteration
  double projection_tol = 1e-8;       // alternating projection
  int projection_max_iter = 10000;

  void validate() const {
    if (max_iter < 1) throw ParameterError("SolverConfig: max_iter must be >= 1");
    if (!(step_recip > 0.0)) throw ParameterError("SolverConfig: t must be > 0");
    if (!(eta > 1.0)) throw ParameterError("SolverConfig: eta must be > 1");
    if (lambda && !(*lambda >= 0.0)) {
      throw ParameterError("SolverConfig: lambda must be >= 0");
    }
    if (!(tol > 0.0)) throw ParameterError("SolverConfig: tol must be > 0");
    if (max_backtracks < 1) throw ParameterError("SolverConfig: max_backtracks < 1");
    if (!(projection_tol > 0.0) || projection_max_iter < 1) {
      throw ParameterError("SolverConfig: invalid projection settings");
    }
  }
};

struct SolverResult {
  Matrix X;
  SolverTrace trace;
};

// Thrown when a solve cannot continue; carries the progress made so far.
class SolverAborted : public Error {
 public:
  SolverAborted(const std::string& what, Matrix last, SolverTrace trace)
      : Error(what), last_(std::move(last)), trace_(std::move(trace)) {}
  const Matrix& last_iterate() const noexcept { return last_; }
  const SolverTrace& trace() const noexcept { return trace_; }

 private:
  Matrix last_;
  SolverTrace trace_;
};

// 1 / (alpha sqrt(r d1 d2))
inline double select_lambda_default(const FeasibleSet& set, Eigen::Index d1,
                                    Eigen::Index d2) {
  set.validate();
  return 1.0 / set.nuclear_radius(d1, d2);
}

// ---------------------------------------------------------------------------
// Initial points

struct CompletionInit {
  Matrix X;
  std::size_t clamped = 0;  // observed entries whose count fell outside the box
};

// Y_ij on Omega (clamped into [beta, alpha]), (alpha + beta)/2 elsewhere.
inline CompletionInit completion_init(const CompletionObservations& obs,
                                      const FeasibleSet& set) {
  CompletionInit init;
  init.X = Matrix::Constant(obs.rows(), obs.cols(), 0.5 * (set.alpha + set.beta));
  for (const auto& e : obs.entries()) {
    const double y = static_cast<double>(e.count);
    const double v = std::clamp(y, set.beta, set.alpha);
    if (v != y) ++init.clamped;
    init.X(e.row, e.col) = v;
  }
  return init;
}

// P(sum_i y_i A_i)
inline Matrix recovery_init(const SensingEnsemble& e,
                            const CompressiveObservations& y,
                            double total_intensity) {
  Vector v(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = static_cast<double>(y.counts[i]);
  }
  return positive_rescale(e.apply_adjoint(v), total_intensity);
}

// ---------------------------------------------------------------------------
// Generic methods

namespace detail {

inline Matrix project_onto_S(const Matrix& U, const FeasibleSet& set,
                             const SolverConfig& config) {
  return alternating_project(U, set, config.projection_tol,
                             config.projection_max_iter)
      .X;
}

template <PoissonObjective F>
double value_or_abort(const F& f, const Matrix& X, const SolverTrace& trace) {
  try {
    return f.value(X);
  } catch (const DomainError& e) {
    throw SolverAborted(std::string("objective domain error: ") + e.what(), X, trace);
  }
}

template <PoissonObjective F>
Matrix gradient_or_abort(const F& f, const Matrix& X, const SolverTrace& trace) {
  try {
    return f.gradient(X);
  } catch (const DomainError& e) {
    throw SolverAborted(std::string("objective domain error: ") + e.what(), X, trace);
  }
}

}  // namespace detail

// X_k = Pi_S(X_{k-1} - (1/L) grad f(X_{k-1}))
template <PoissonObjective F>
SolverResult proximal_gradient(const F& f, const FeasibleSet& set,
                               const Matrix& X0, const SolverConfig& config) {
  config.validate();
  const double L = set.lipschitz();
  SolverResult r;
  Matrix X = detail::project_onto_S(X0, set, config);
  double fx = detail::value_or_abort(f, X, r.trace);
  for (int k = 1; k <= config.max_iter; ++k) {
    const Matrix g = detail::gradient_or_abort(f, X, r.trace);
    Matrix Xn = detail::project_onto_S(X - g / L, set, config);
    const double fn = detail::value_or_abort(f, Xn, r.trace);
    r.trace.record(fn, L);
    const bool done = std::fabs(fn - fx) < config.tol;
    X = std::move(Xn);
    fx = fn;
    if (done) {
      r.trace.terminated_by = Termination::tolerance;
      break;
    }
  }
  r.X = std::move(X);
  return r;
}

// X_k = Pi_S(Z_{k-1} - (1/L) grad f(Z_{k-1})),
// Z_k = X_k + ((k-1)/(k+2)) (X_k - X_{k-1}).
// If an extrapolated point leaves the objective's domain the momentum is
// dropped for that step (Z = X_k).
template <PoissonObjective F>
SolverResult accelerated_proximal_gradient(const F& f, const FeasibleSet& set,
                                           const Matrix& X0,
                                           const SolverConfig& config) {
  config.validate();
  const double L = set.lipschitz();
  SolverResult r;
  Matrix X = detail::project_onto_S(X0, set, config);
  Matrix Z = X;
  double fx = detail::value_or_abort(f, X, r.trace);
  for (int k = 1; k <= config.max_iter; ++k) {
    Matrix g;
    try {
      g = f.gradient(Z);
    } catch (const DomainError&) {
      Z = X;
      g = detail::gradient_or_abort(f, Z, r.trace);
    }
    Matrix Xn = detail::project_onto_S(Z - g / L, set, config);
    const double fn = detail::value_or_abort(f, Xn, r.trace);
    r.trace.record(fn, L);
    const double w = static_cast<double>(k - 1) / static_cast<double>(k + 2);
    Z = Xn + w * (Xn - X);
    const bool done = std::fabs(fn - fx) < config.tol;
    X = std::move(Xn);
    fx = fn;
    if (done) {
      r.trace.terminated_by = Termination::tolerance;
      break;
    }
  }
  r.X = std::move(X);
  return r;
}

// ---------------------------------------------------------------------------
// PMLSVT

// Map applied after thresholding. Throws to reject a trial point.
using FeasibleStrategy = std::function<Matrix(const Matrix&)>;

inline FeasibleStrategy box_strategy(const FeasibleSet& set) {
  return [alpha = set.alpha, beta = set.beta](const Matrix& X) {
    return project_box(X, alpha, beta);
  };
}

inline FeasibleStrategy rescale_strategy(double total_intensity) {
  return [total_intensity](const Matrix& X) {
    return positive_rescale(X, total_intensity);
  };
}

inline FeasibleStrategy identity_strategy() {
  return [](const Matrix& X) { return X; };
}

// Each iteration: C = X - grad f(X)/t, X_new = strategy(D_{lambda/t}(C)).
// A trial with f(X_new) > Q_t(X_new, X) is discarded, t grows by eta and the
// step is recomputed from the same X. Trials outside the objective's domain
// (or rejected by the strategy) count as f = +inf.
template <PoissonObjective F>
SolverResult pmlsvt(const F& f, const Matrix& X0, double lambda,
                    const SolverConfig& config, const FeasibleStrategy& strategy) {
  config.validate();
  if (!(lambda >= 0.0)) throw ParameterError("pmlsvt: lambda must be >= 0");
  SolverResult r;
  Matrix X = X0;
  double t = config.step_recip;
  double fx = detail::value_or_abort(f, X, r.trace);
  const double stop_gap = 0.5 / static_cast<double>(config.max_iter);

  for (int k = 1; k <= config.max_iter; ++k) {
    const Matrix g = detail::gradient_or_abort(f, X, r.trace);
    Matrix Xn;
    double fn = 0.0;
    double q = 0.0;
    int backtracks = 0;
    for (;;) {
      bool ok = true;
      try {
        Xn = strategy(svt(X - g / t, lambda / t));
        fn = f.value(Xn);
      } catch (const DomainError&) {
        ok = false;
      } catch (const NumericalError&) {
        ok = false;
      }
      if (ok) {
        q = quadratic_model(fx, g, Xn, X, t);
        if (fn <= q) break;
      }
      t *= config.eta;
      if (++backtracks > config.max_backtracks || !std::isfinite(t)) {
        throw SolverAborted("pmlsvt: backtracking did not find an acceptable step",
                            X, r.trace);
      }
    }
    r.trace.record(fn, t);
    const double gap = config.stop_rule == StopRule::quadratic_gap
                           ? std::fabs(fn - q)
                           : std::fabs(fn - fx);
    X = std::move(Xn);
    fx = fn;
    if (gap < stop_gap) {
      r.trace.terminated_by = Termination::tolerance;
      break;
    }
  }
  r.X = std::move(X);
  return r;
}

// Completion: box strategy, default start from completion_init.
inline SolverResult pmlsvt(const CompletionObjective& f, const FeasibleSet& set,
                           const std::optional<Matrix>& X0,
                           const SolverConfig& config) {
  const double lambda =
      config.lambda.value_or(select_lambda_default(set, f.rows(), f.cols()));
  const Matrix start =
      X0 ? project_box(*X0, set.alpha, set.beta) : completion_init(f.observations(), set).X;
  return pmlsvt(f, start, lambda, config, box_strategy(set));
}

// Recovery: positive-rescale strategy, default start P(sum_i y_i A_i).
inline SolverResult pmlsvt(const RecoveryObjective& f, const FeasibleSet& set,
                           const std::optional<Matrix>& X0,
                           const SolverConfig& config) {
  const double lambda =
      config.lambda.value_or(select_lambda_default(set, f.rows(), f.cols()));
  const Matrix start = X0 ? positive_rescale(*X0, set.total_intensity)
                          : recovery_init(f.ensemble(), f.counts(), set.total_intensity);
  return pmlsvt(f, start, lambda, config, rescale_strategy(set.total_intensity));
}

inline SolverResult pmlsvt(const ObjectiveHandle& f, const FeasibleSet& set,
                           const std::optional<Matrix>& X0,
                           const SolverConfig& config) {
  return f.visit([&](const auto& obj) { return pmlsvt(obj, set, X0, config); });
}

}  // namespace plr
