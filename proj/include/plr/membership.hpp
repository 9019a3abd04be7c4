#pragma once

#include <sstream>
#include <string>

#include "plr/core.hpp"
#include "plr/svd.hpp"

namespace plr {

enum class SetKind {
  S,       // Gamma1 ∩ Gamma2
  Gamma,   // entries >= c, ||X||_{1,1} = I
  Gamma0,  // entries >= 0, ||X||_{1,1} = I
  Gamma1,  // box [beta, alpha]
  Gamma2,  // nuclear-norm ball of radius alpha sqrt(r d1 d2)
};

struct MembershipReport {
  bool member = true;
  std::string violation;  // empty when member
  // First violating entry (0-based), when the violation is entrywise.
  std::optional<std::pair<Eigen::Index, Eigen::Index>> entry;

  explicit operator bool() const noexcept { return member; }
};

namespace detail {

inline MembershipReport entry_violation(const Matrix& X, Eigen::Index i,
                                        Eigen::Index j, const std::string& why) {
  std::ostringstream os;
  os << "entry (" << i + 1 << "," << j + 1 << ") = " << X(i, j) << " " << why;
  return {false, os.str(), std::pair(i, j)};
}

template <typename Pred>
inline std::optional<MembershipReport> first_bad_entry(const Matrix& X,
                                                       Pred&& ok,
                                                       const std::string& why) {
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (!ok(X(i, j))) return entry_violation(X, i, j, why);
    }
  }
  return std::nullopt;
}

inline std::optional<MembershipReport> check_box(const Matrix& X,
                                                 const FeasibleSet& set) {
  const double lo = set.beta - kEntryAbsTol;
  const double hi = set.alpha + kEntryAbsTol;
  return first_bad_entry(
      X, [&](double v) { return v >= lo && v <= hi; },
      "outside [" + std::to_string(set.beta) + ", " + std::to_string(set.alpha) + "]");
}

inline std::optional<MembershipReport> check_nuclear(const Matrix& X,
                                                     const FeasibleSet& set) {
  const double radius = set.nuclear_radius(X.rows(), X.cols());
  const double norm = nuclear_norm(X);
  if (norm > radius * (1.0 + kNormRelTol)) {
    std::ostringstream os;
    os << "nuclear norm " << norm << " exceeds radius " << radius;
    return MembershipReport{false, os.str(), std::nullopt};
  }
  return std::nullopt;
}

inline std::optional<MembershipReport> check_intensity(const Matrix& X,
                                                       const FeasibleSet& set) {
  const double total = X.sum();
  if (std::fabs(total - set.total_intensity) > kNormRelTol * set.total_intensity) {
    std::ostringstream os;
    os << "||X||_{1,1} = " << total << " differs from I = " << set.total_intensity;
    return MembershipReport{false, os.str(), std::nullopt};
  }
  return std::nullopt;
}

}  // namespace detail

inline MembershipReport validate_membership(const Matrix& X,
                                            const FeasibleSet& set,
                                            SetKind which) {
  if (X.size() == 0) throw DimensionError("validate_membership: empty matrix");
  set.validate();
  if (auto bad = detail::first_bad_entry(
          X, [](double v) { return std::isfinite(v); }, "is not finite")) {
    return *bad;
  }
  switch (which) {
    case SetKind::Gamma1:
      if (auto bad = detail::check_box(X, set)) return *bad;
      break;
    case SetKind::Gamma2:
      if (auto bad = detail::check_nuclear(X, set)) return *bad;
      break;
    case SetKind::S:
      if (auto bad = detail::check_box(X, set)) return *bad;
      if (auto bad = detail::check_nuclear(X, set)) return *bad;
      break;
    case SetKind::Gamma0:
      if (auto bad = detail::first_bad_entry(
              X, [](double v) { return v >= -kEntryAbsTol; }, "is negative")) {
        return *bad;
      }
      if (auto bad = detail::check_intensity(X, set)) return *bad;
      break;
    case SetKind::Gamma: {
      const double floor = set.entry_floor - kEntryAbsTol;
      if (auto bad = detail::first_bad_entry(
              X, [&](double v) { return v >= floor; },
              "below entry floor " + std::to_string(set.entry_floor))) {
        return *bad;
      }
      if (auto bad = detail::check_intensity(X, set)) return *bad;
      break;
    }
  }
  return {};
}

// Overload that checks the shape against expected dimensions first.
inline MembershipReport validate_membership(const Matrix& X,
                                            const FeasibleSet& set,
                                            SetKind which, Eigen::Index d1,
                                            Eigen::Index d2) {
  if (X.rows() != d1 || X.cols() != d2) {
    throw DimensionError("validate_membership: expected " +
                         detail::dims_string(d1, d2) + ", got " +
                         detail::dims_string(X.rows(), X.cols()));
  }
  return validate_membership(X, set, which);
}

}  // namespace plr
