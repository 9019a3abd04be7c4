#pragma once

// Poisson negative log-likelihoods.
//
//   completion: f1(X) = -sum_{(i,j) in Omega} [Y_ij log X_ij - X_ij]
//   recovery:   f0(X) = -sum_i [y_i log [A X]_i - [A X]_i]
//
// Terms with a zero count contribute the bare rate (0 log 0 := 0). A rate
// below the floor on a term with a positive count is a DomainError.

#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <variant>

#include "plr/core.hpp"
#include "plr/sensing.hpp"

namespace plr {

template <typename T>
concept PoissonObjective = requires(const T& f, const Matrix& X) {
  { f.value(X) } -> std::convertible_to<double>;
  { f.gradient(X) } -> std::convertible_to<Matrix>;
  { f.rows() } -> std::convertible_to<Eigen::Index>;
  { f.cols() } -> std::convertible_to<Eigen::Index>;
};

class CompletionObjective {
 public:
  CompletionObjective(const CompletionObservations& obs, double rate_floor)
      : obs_(&obs), rate_floor_(rate_floor) {
    if (!(rate_floor > 0.0)) {
      throw ParameterError("CompletionObjective: rate floor must be > 0");
    }
  }

  // Floor defaults to beta.
  CompletionObjective(const CompletionObservations& obs, const FeasibleSet& set)
      : CompletionObjective(obs, set.beta) {}

  Eigen::Index rows() const { return obs_->rows(); }
  Eigen::Index cols() const { return obs_->cols(); }
  double rate_floor() const { return rate_floor_; }
  const CompletionObservations& observations() const { return *obs_; }

  double value(const Matrix& X) const {
    check(X);
    double f = 0.0;
    for (const auto& e : obs_->entries()) {
      const double x = X(e.row, e.col);
      f += x;
      if (e.count > 0) f -= static_cast<double>(e.count) * std::log(x);
    }
    return f;
  }

  // [grad]_ij = 1 - Y_ij / X_ij on Omega, 0 elsewhere.
  Matrix gradient(const Matrix& X) const {
    check(X);
    Matrix g = Matrix::Zero(X.rows(), X.cols());
    for (const auto& e : obs_->entries()) {
      g(e.row, e.col) = 1.0 - static_cast<double>(e.count) / X(e.row, e.col);
    }
    return g;
  }

 private:
  void check(const Matrix& X) const {
    if (X.rows() != obs_->rows() || X.cols() != obs_->cols()) {
      throw DimensionError("completion objective: expected " +
                           detail::dims_string(obs_->rows(), obs_->cols()) +
                           ", got " + detail::dims_string(X.rows(), X.cols()));
    }
    const double lo = rate_floor_ - kEntryAbsTol;
    for (const auto& e : obs_->entries()) {
      const double x = X(e.row, e.col);
      if (!(x >= lo) || !(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("completion objective: X(" + std::to_string(e.row + 1) +
                              "," + std::to_string(e.col + 1) + ") = " +
                              std::to_string(x) + " below rate floor " +
                              std::to_string(rate_floor_),
                          static_cast<long>(e.row), static_cast<long>(e.col));
      }
    }
  }

  const CompletionObservations* obs_;
  double rate_floor_;
};

class RecoveryObjective {
 public:
  RecoveryObjective(const SensingEnsemble& ensemble,
                    const CompressiveObservations& y, double rate_floor)
      : ensemble_(&ensemble), y_(&y), rate_floor_(rate_floor) {
    y.validate(ensemble.size());
    if (!(rate_floor > 0.0)) {
      throw ParameterError("RecoveryObjective: rate floor must be > 0");
    }
  }

  // Floor defaults to max(c/m, 1e-12).
  RecoveryObjective(const SensingEnsemble& ensemble,
                    const CompressiveObservations& y, const FeasibleSet& set)
      : RecoveryObjective(ensemble, y, default_floor(ensemble, set)) {}

  static double default_floor(const SensingEnsemble& ensemble,
                              const FeasibleSet& set) {
    return std::max(set.entry_floor / static_cast<double>(ensemble.size()), 1e-12);
  }

  Eigen::Index rows() const { return ensemble_->rows(); }
  Eigen::Index cols() const { return ensemble_->cols(); }
  double rate_floor() const { return rate_floor_; }
  const SensingEnsemble& ensemble() const { return *ensemble_; }
  const CompressiveObservations& counts() const { return *y_; }

  double value(const Matrix& X) const {
    const Vector rates = checked_rates(X);
    double f = 0.0;
    for (Eigen::Index i = 0; i < rates.size(); ++i) {
      const auto yi = y_->counts[static_cast<std::size_t>(i)];
      f += rates(i);
      if (yi > 0) f -= static_cast<double>(yi) * std::log(rates(i));
    }
    return f;
  }

  // adjoint(1 - y ./ A X)
  Matrix gradient(const Matrix& X) const {
    const Vector rates = checked_rates(X);
    Vector w(rates.size());
    for (Eigen::Index i = 0; i < rates.size(); ++i) {
      const auto yi = y_->counts[static_cast<std::size_t>(i)];
      w(i) = yi > 0 ? 1.0 - static_cast<double>(yi) / rates(i) : 1.0;
    }
    return ensemble_->apply_adjoint(w);
  }

 private:
  Vector checked_rates(const Matrix& X) const {
    Vector rates = ensemble_->apply_forward(X);
    const double lo = rate_floor_ - kEntryAbsTol;
    for (Eigen::Index i = 0; i < rates.size(); ++i) {
      const auto yi = y_->counts[static_cast<std::size_t>(i)];
      if (!std::isfinite(rates(i)) || (yi > 0 && !(rates(i) >= lo && rates(i) > 0.0))) {
        throw DomainError("recovery objective: rate [AX]_" + std::to_string(i + 1) +
                              " = " + std::to_string(rates(i)) +
                              " below rate floor " + std::to_string(rate_floor_),
                          static_cast<long>(i));
      }
    }
    return rates;
  }

  const SensingEnsemble* ensemble_;
  const CompressiveObservations* y_;
  double rate_floor_;
};

// Either objective behind one value type, for drivers that pick at runtime.
class ObjectiveHandle {
 public:
  ObjectiveHandle(CompletionObjective f) : impl_(std::move(f)) {}
  ObjectiveHandle(RecoveryObjective f) : impl_(std::move(f)) {}

  bool is_recovery() const { return std::holds_alternative<RecoveryObjective>(impl_); }
  double rate_floor() const {
    return std::visit([](const auto& f) { return f.rate_floor(); }, impl_);
  }
  Eigen::Index rows() const {
    return std::visit([](const auto& f) { return f.rows(); }, impl_);
  }
  Eigen::Index cols() const {
    return std::visit([](const auto& f) { return f.cols(); }, impl_);
  }
  double value(const Matrix& X) const {
    return std::visit([&](const auto& f) { return f.value(X); }, impl_);
  }
  Matrix gradient(const Matrix& X) const {
    return std::visit([&](const auto& f) { return f.gradient(X); }, impl_);
  }
  template <typename F>
  decltype(auto) visit(F&& fn) const {
    return std::visit(std::forward<F>(fn), impl_);
  }

 private:
  std::variant<CompletionObjective, RecoveryObjective> impl_;
};

inline double nll_completion(const CompletionObservations& obs, const Matrix& X,
                             double rate_floor) {
  return CompletionObjective(obs, rate_floor).value(X);
}

inline Matrix grad_nll_completion(const CompletionObservations& obs,
                                  const Matrix& X, double rate_floor) {
  return CompletionObjective(obs, rate_floor).gradient(X);
}

inline double nll_recovery(const SensingEnsemble& e,
                           const CompressiveObservations& y, const Matrix& X,
                           double rate_floor = 1e-12) {
  return RecoveryObjective(e, y, rate_floor).value(X);
}

inline Matrix grad_nll_recovery(const SensingEnsemble& e,
                                const CompressiveObservations& y, const Matrix& X,
                                double rate_floor = 1e-12) {
  return RecoveryObjective(e, y, rate_floor).gradient(X);
}

inline double lipschitz_completion(const FeasibleSet& set) {
  set.validate();
  return set.lipschitz();
}

// Q_t(X, X_prev) = f(X_prev) + <X - X_prev, grad> + (t/2) ||X - X_prev||_F^2
inline double quadratic_model(double f_prev, const Matrix& grad, const Matrix& X,
                              const Matrix& X_prev, double t) {
  if (!(t > 0.0)) throw ParameterError("quadratic_model: t must be > 0");
  detail::require_same_shape(X, X_prev, "quadratic_model");
  detail::require_same_shape(grad, X_prev, "quadratic_model");
  const Matrix d = X - X_prev;
  return f_prev + (d.array() * grad.array()).sum() + 0.5 * t * d.squaredNorm();
}

}  // namespace plr
