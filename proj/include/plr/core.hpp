#pragma once

// Shared domain types for Poisson low-rank recovery and completion.
//
// Matrices are plain Eigen::MatrixXd values. Which constraint set a matrix is
// supposed to live in is a property checked on demand by validate_membership,
// not encoded in the type.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace plr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntensityMatrix = Matrix;

// Set membership tolerances: relative on norms, absolute on entry bounds.
inline constexpr double kNormRelTol = 1e-9;
inline constexpr double kEntryAbsTol = 1e-12;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Objective evaluated outside its domain. Carries the offending index: for
// completion (row, col), for recovery (measurement, -1). Indices are 0-based.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, long first, long second = -1)
      : Error(what), index_(first, second) {}
  std::pair<long, long> index() const noexcept { return index_; }

 private:
  std::pair<long, long> index_;
};

namespace detail {

inline std::string dims_string(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch " +
                         dims_string(a.rows(), a.cols()) + " vs " +
                         dims_string(b.rows(), b.cols()));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Feasible set parameters
//
//   Gamma1 = { beta <= X_ij <= alpha }
//   Gamma2 = { ||X||_* <= alpha * sqrt(r d1 d2) }
//   S      = Gamma1 ∩ Gamma2                     (completion)
//   Gamma0 = { X >= 0, ||X||_{1,1} = I }          (recovery, PMLSVT target)
//   Gamma  = { X >= c, ||X||_{1,1} = I }          (recovery candidate set)

struct FeasibleSet {
  double alpha = 0.0;
  double beta = 0.0;
  int rank_budget = 1;
  double total_intensity = 1.0;
  double entry_floor = 1.0;

  FeasibleSet() = default;
  FeasibleSet(double alpha_, double beta_, int rank_budget_,
              double total_intensity_ = 1.0, double entry_floor_ = 1.0)
      : alpha(alpha_),
        beta(beta_),
        rank_budget(rank_budget_),
        total_intensity(total_intensity_),
        entry_floor(entry_floor_) {
    validate();
  }

  void validate() const {
    if (!(std::isfinite(alpha) && std::isfinite(beta) && beta > 0.0 &&
          beta < alpha)) {
      throw ParameterError("FeasibleSet: require 0 < beta < alpha");
    }
    if (rank_budget < 1) throw ParameterError("FeasibleSet: rank_budget < 1");
    if (!(total_intensity > 0.0)) {
      throw ParameterError("FeasibleSet: total_intensity must be > 0");
    }
    if (!(entry_floor > 0.0)) {
      throw ParameterError("FeasibleSet: entry_floor must be > 0");
    }
  }

  double nuclear_radius(Eigen::Index d1, Eigen::Index d2) const {
    return alpha * std::sqrt(static_cast<double>(rank_budget) *
                             static_cast<double>(d1) * static_cast<double>(d2));
  }

  // Gradient Lipschitz constant of the completion objective on Gamma1.
  double lipschitz() const { return alpha / (beta * beta); }
};

// ---------------------------------------------------------------------------
// Observations

struct ObservedEntry {
  Eigen::Index row = 0;  // 0-based
  Eigen::Index col = 0;  // 0-based
  std::int64_t count = 0;

  friend bool operator==(const ObservedEntry&, const ObservedEntry&) = default;
};

// Poisson counts of a subset Omega of matrix entries. Entries are kept sorted
// by (row, col); duplicates are rejected.
class CompletionObservations {
 public:
  CompletionObservations() = default;

  CompletionObservations(Eigen::Index rows, Eigen::Index cols,
                         std::vector<ObservedEntry> entries,
                         std::optional<double> sample_prob = std::nullopt)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows <= 0 || cols <= 0) {
      throw DimensionError("CompletionObservations: dims must be positive");
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const ObservedEntry& a, const ObservedEntry& b) {
                return std::pair(a.row, a.col) < std::pair(b.row, b.col);
              });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
        throw DimensionError("CompletionObservations: index (" +
                             std::to_string(e.row + 1) + "," +
                             std::to_string(e.col + 1) + ") out of range");
      }
      if (e.count < 0) {
        throw ParameterError("CompletionObservations: negative count at (" +
                             std::to_string(e.row + 1) + "," +
                             std::to_string(e.col + 1) + ")");
      }
      if (k > 0 && entries_[k - 1].row == e.row && entries_[k - 1].col == e.col) {
        throw ParameterError("CompletionObservations: duplicate index (" +
                             std::to_string(e.row + 1) + "," +
                             std::to_string(e.col + 1) + ")");
      }
    }
    sample_prob_ = sample_prob.value_or(
        static_cast<double>(entries_.size()) /
        (static_cast<double>(rows) * static_cast<double>(cols)));
  }

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  const std::vector<ObservedEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  double sample_prob() const noexcept { return sample_prob_; }

  std::int64_t max_count() const {
    std::int64_t best = 0;
    for (const auto& e : entries_) best = std::max(best, e.count);
    return best;
  }

  // Boolean observation mask.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask() const {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> m =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
            rows_, cols_, false);
    for (const auto& e : entries_) m(e.row, e.col) = true;
    return m;
  }

 private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<ObservedEntry> entries_;
  double sample_prob_ = 0.0;
};

// Counts y_1..y_m from compressive measurements.
struct CompressiveObservations {
  std::vector<std::int64_t> counts;

  std::size_t size() const noexcept { return counts.size(); }

  void validate(std::size_t ensemble_size) const {
    if (counts.size() != ensemble_size) {
      throw DimensionError("CompressiveObservations: have " +
                           std::to_string(counts.size()) + " counts, ensemble has " +
                           std::to_string(ensemble_size) + " masks");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] < 0) {
        throw ParameterError("CompressiveObservations: negative count at " +
                             std::to_string(i));
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Solver trace

enum class Termination { max_iter, tolerance };

inline const char* to_string(Termination t) {
  return t == Termination::max_iter ? "max_iter" : "tolerance";
}

struct SolverTrace {
  std::vector<double> objective_values;
  std::vector<double> step_control;
  int iterations_run = 0;
  Termination terminated_by = Termination::max_iter;

  void record(double objective, double t) {
    objective_values.push_back(objective);
    step_control.push_back(t);
    ++iterations_run;
  }
};

}  // namespace plr
