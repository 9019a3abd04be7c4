#pragma once

// Ground-truth generators, observation samplers, rank-l truncation and the
// image <-> patch-matrix transform.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/QR>

#include "plr/core.hpp"
#include "plr/projections.hpp"
#include "plr/random.hpp"
#include "plr/svd.hpp"

namespace plr {

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix G(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = rng.normal();
  }
  return G;
}

// n x k matrix with orthonormal columns (QR of a Gaussian matrix, with the
// sign of R's diagonal folded into Q).
inline Matrix random_orthonormal(Eigen::Index n, Eigen::Index k, Rng& rng) {
  const Matrix G = gaussian_matrix(n, k, rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix R = qr.matrixQR().topLeftCorner(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  }
  return Q;
}

// ---------------------------------------------------------------------------
// Exact low rank inside S

// Nonnegative factors with entries in [sqrt(beta/alpha), 1] give products
// whose dynamic range is at most alpha/beta; scaling the maximum to alpha then
// lands every entry in [beta, alpha] without clamping. Draws whose
// (rank+1)-th singular value exceeds 1e-9 sigma_1 are redrawn.
inline Matrix gen_exact_low_rank(Eigen::Index d1, Eigen::Index d2, int rank,
                                 const FeasibleSet& set, std::uint64_t seed) {
  set.validate();
  if (rank < 1 || rank > std::min(d1, d2)) {
    throw ParameterError("gen_exact_low_rank: rank must lie in [1, min(d1, d2)]");
  }
  Rng rng(derive_seed(seed, 0x10a));
  const double lo = std::sqrt(set.beta / set.alpha);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix W(d1, rank), H(rank, d2);
    for (Eigen::Index j = 0; j < rank; ++j) {
      for (Eigen::Index i = 0; i < d1; ++i) W(i, j) = lo + (1.0 - lo) * rng.uniform();
    }
    for (Eigen::Index j = 0; j < d2; ++j) {
      for (Eigen::Index i = 0; i < rank; ++i) H(i, j) = lo + (1.0 - lo) * rng.uniform();
    }
    Matrix M = W * H;
    M *= set.alpha / M.maxCoeff();
    M = project_box(M, set.alpha, set.beta);
    const Vector s = singular_values(M);
    if (rank >= s.size() || s(rank) <= 1e-9 * s(0)) return M;
  }
  throw ParameterError("gen_exact_low_rank: no feasible draw after 100 attempts");
}

// ---------------------------------------------------------------------------
// Weak-lq (nearly low rank)

struct WeakLqSpec {
  double q = 0.5;                // decay exponent, in (0, 1]
  double rho = 1.0;              // radius factor
  double total_intensity = 1.0;  // I
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  double entry_floor = 0.0;      // minimum entry after rescaling

  void validate() const {
    if (!(q > 0.0 && q <= 1.0)) throw ParameterError("WeakLqSpec: q must be in (0,1]");
    if (!(rho > 0.0)) throw ParameterError("WeakLqSpec: rho must be > 0");
    if (!(total_intensity > 0.0)) throw ParameterError("WeakLqSpec: I must be > 0");
    if (rows < 1 || cols < 1) throw ParameterError("WeakLqSpec: empty shape");
    if (entry_floor < 0.0 ||
        entry_floor * static_cast<double>(rows * cols) >= total_intensity) {
      throw ParameterError("WeakLqSpec: entry floor incompatible with I");
    }
  }

  // rho I j^{-1/q}, j = 1..d
  Vector boundary_singular_values() const {
    const Eigen::Index d = std::min(rows, cols);
    Vector theta(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      theta(j) = rho * total_intensity * std::pow(static_cast<double>(j + 1), -1.0 / q);
    }
    return theta;
  }
};

struct WeakLqSample {
  Matrix M;                 // entries >= entry_floor, ||M||_{1,1} = I
  Vector target_spectrum;   // boundary singular values before the shift
  Vector final_spectrum;    // singular values of M
  double worst_decay_ratio = 0.0;  // max_j final_j / (rho I j^{-1/q})
  bool decay_within_factor_two = false;
};

// U diag(theta) V^T with boundary theta and random orthonormal U, V, then a
// constant shift and positive rescale to reach the entry floor and total
// intensity. The shift perturbs the spectrum; the decay is re-checked.
inline WeakLqSample gen_weak_lq(const WeakLqSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, 0x3e4));
  const Eigen::Index d = std::min(spec.rows, spec.cols);
  WeakLqSample out;
  out.target_spectrum = spec.boundary_singular_values();
  const Matrix U = random_orthonormal(spec.rows, d, rng);
  const Matrix V = random_orthonormal(spec.cols, d, rng);
  const Matrix X = U * out.target_spectrum.asDiagonal() * V.transpose();

  // Choose shift s with (min X + s) I / (sum X + s n) >= floor and X + s >= 0.
  const double n = static_cast<double>(X.size());
  const double I = spec.total_intensity;
  const double c = spec.entry_floor;
  double s = std::max(0.0, -X.minCoeff());
  const double need = (c * X.sum() - X.minCoeff() * I) / (I - c * n);
  s = std::max(s, need);
  Matrix shifted = X.array() + s;
  if (shifted.sum() <= 0.0) shifted.array() += 1.0;  // X == 0 corner
  out.M = positive_rescale(shifted, I);

  out.final_spectrum = singular_values(out.M);
  out.worst_decay_ratio = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    out.worst_decay_ratio =
        std::max(out.worst_decay_ratio, out.final_spectrum(j) / out.target_spectrum(j));
  }
  out.decay_within_factor_two = out.worst_decay_ratio <= 2.0;
  return out;
}

// Best rank-l approximation via truncated SVD.
inline Matrix rank_l_approx(const Matrix& X, int ell) {
  const Eigen::Index d = std::min(X.rows(), X.cols());
  if (ell < 1 || ell > d) {
    throw ParameterError("rank_l_approx: ell must lie in [1, min(d1, d2)]");
  }
  const SvdFactors f = compute_svd(X);
  Vector s = f.singular_values;
  for (Eigen::Index j = ell; j < s.size(); ++j) s(j) = 0.0;
  return f.reconstruct(s);
}

// ---------------------------------------------------------------------------
// Observation samplers

// Each entry kept independently with probability m_expected / (d1 d2); kept
// entries carry Y_ij ~ Poisson(M_ij). Entries are visited row-major once.
inline CompletionObservations sample_completion_observations(const Matrix& M,
                                                             double m_expected,
                                                             std::uint64_t seed) {
  const double n = static_cast<double>(M.size());
  if (!(m_expected > 0.0 && m_expected <= n)) {
    throw ParameterError("sample_completion_observations: need 0 < m <= d1 d2");
  }
  if ((M.array() < 0.0).any()) {
    throw ParameterError("sample_completion_observations: negative intensity");
  }
  const double p = m_expected / n;
  Rng pick(derive_seed(seed, 0xb1));
  Rng noise(derive_seed(seed, 0xb2));
  std::vector<ObservedEntry> entries;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (p >= 1.0 || pick.bernoulli(p)) {
        entries.push_back({i, j, noise.poisson(M(i, j))});
      }
    }
  }
  return CompletionObservations(M.rows(), M.cols(), std::move(entries), p);
}

// Bernoulli(p) subsample of already-counted observations (no extra noise).
inline CompletionObservations subsample_observations(const CompletionObservations& obs,
                                                     double p, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ParameterError("subsample_observations: p must be in (0, 1]");
  }
  Rng pick(derive_seed(seed, 0xb3));
  std::vector<ObservedEntry> kept;
  for (const auto& e : obs.entries()) {
    if (p >= 1.0 || pick.bernoulli(p)) kept.push_back(e);
  }
  return CompletionObservations(obs.rows(), obs.cols(), std::move(kept),
                                p * obs.sample_prob());
}

// ---------------------------------------------------------------------------
// Patch layout

struct PatchLayout {
  Eigen::Index image_rows = 0;  // H
  Eigen::Index image_cols = 0;  // W
  Eigen::Index patch_rows = 0;  // h
  Eigen::Index patch_cols = 0;  // w

  PatchLayout() = default;
  PatchLayout(Eigen::Index H, Eigen::Index W, Eigen::Index h, Eigen::Index w)
      : image_rows(H), image_cols(W), patch_rows(h), patch_cols(w) {
    validate();
  }

  void validate() const {
    if (patch_rows < 1 || patch_cols < 1 || image_rows < 1 || image_cols < 1 ||
        image_rows % patch_rows != 0 || image_cols % patch_cols != 0) {
      throw ParameterError("PatchLayout: patch size must divide image size");
    }
  }

  Eigen::Index matrix_rows() const { return patch_rows * patch_cols; }
  Eigen::Index patches_down() const { return image_rows / patch_rows; }
  Eigen::Index patches_across() const { return image_cols / patch_cols; }
  Eigen::Index matrix_cols() const { return patches_down() * patches_across(); }
};

// Column k is patch k (row-major over the patch grid), vectorized row-major
// within the patch.
inline Matrix image_to_patch_matrix(const Matrix& image, const PatchLayout& layout) {
  layout.validate();
  if (image.rows() != layout.image_rows || image.cols() != layout.image_cols) {
    throw DimensionError("image_to_patch_matrix: image does not match layout");
  }
  Matrix out(layout.matrix_rows(), layout.matrix_cols());
  for (Eigen::Index pr = 0; pr < layout.patches_down(); ++pr) {
    for (Eigen::Index pc = 0; pc < layout.patches_across(); ++pc) {
      const Eigen::Index k = pr * layout.patches_across() + pc;
      for (Eigen::Index a = 0; a < layout.patch_rows; ++a) {
        for (Eigen::Index b = 0; b < layout.patch_cols; ++b) {
          out(a * layout.patch_cols + b, k) =
              image(pr * layout.patch_rows + a, pc * layout.patch_cols + b);
        }
      }
    }
  }
  return out;
}

inline Matrix patch_matrix_to_image(const Matrix& patches, const PatchLayout& layout) {
  layout.validate();
  if (patches.rows() != layout.matrix_rows() || patches.cols() != layout.matrix_cols()) {
    throw DimensionError("patch_matrix_to_image: matrix does not match layout");
  }
  Matrix image(layout.image_rows, layout.image_cols);
  for (Eigen::Index pr = 0; pr < layout.patches_down(); ++pr) {
    for (Eigen::Index pc = 0; pc < layout.patches_across(); ++pc) {
      const Eigen::Index k = pr * layout.patches_across() + pc;
      for (Eigen::Index a = 0; a < layout.patch_rows; ++a) {
        for (Eigen::Index b = 0; b < layout.patch_cols; ++b) {
          image(pr * layout.patch_rows + a, pc * layout.patch_cols + b) =
              patches(a * layout.patch_cols + b, k);
        }
      }
    }
  }
  return image;
}

}  // namespace plr
