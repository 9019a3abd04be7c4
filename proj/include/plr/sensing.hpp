#pragma once

// Structured random sensing ensemble for compressive Poisson measurements.
//
// Each mask A_i has entries 0 (probability p) or 1/m (probability 1-p). It is
// the affine image A_i = sqrt(p(1-p)/m) Ã_i + (1-p)/m 1 of the zero-mean
// two-point matrix Ã_i = Z_i / sqrt(m). Masks are stored as packed bits over
// the row-major linear index i*d2 + j, with the scale 1/m implicit.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "plr/core.hpp"
#include "plr/random.hpp"

namespace plr {

inline double xi_p(double p) {
  if (p == 0.5) return 1.0;
  return std::sqrt(3.0 / (2.0 * p * (1.0 - p)));
}

class SensingEnsemble {
 public:
  SensingEnsemble() = default;

  Eigen::Index rows() const noexcept { return rows_; }
  Eigen::Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return masks_; }
  double p() const noexcept { return p_; }
  double xi() const noexcept { return xi_p(p_); }
  std::uint64_t seed() const noexcept { return seed_; }
  double scale() const noexcept { return 1.0 / static_cast<double>(masks_); }
  std::size_t words_per_mask() const noexcept { return words_; }

  bool bit(std::size_t mask, Eigen::Index i, Eigen::Index j) const {
    const std::size_t idx = static_cast<std::size_t>(i * cols_ + j);
    return (bits_[mask * words_ + idx / 64] >> (idx % 64)) & 1ULL;
  }

  // Mask entry value, exactly 0 or 1/m.
  double entry(std::size_t mask, Eigen::Index i, Eigen::Index j) const {
    return bit(mask, i, j) ? scale() : 0.0;
  }

  std::size_t nonzeros(std::size_t mask) const {
    std::size_t n = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      n += static_cast<std::size_t>(std::popcount(bits_[mask * words_ + w]));
    }
    return n;
  }

  // Indices of masks with no nonzero entry.
  std::vector<std::size_t> empty_masks() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < masks_; ++i) {
      if (nonzeros(i) == 0) out.push_back(i);
    }
    return out;
  }

  Matrix mask_matrix(std::size_t mask) const {
    Matrix A(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      for (Eigen::Index j = 0; j < cols_; ++j) A(i, j) = entry(mask, i, j);
    }
    return A;
  }

  // Zero-mean random part Ã_i recovered through the affine identity.
  Matrix random_part(std::size_t mask) const {
    const double m = static_cast<double>(masks_);
    const double lo = -std::sqrt((1.0 - p_) / p_) / std::sqrt(m);
    const double hi = std::sqrt(p_ / (1.0 - p_)) / std::sqrt(m);
    Matrix Z(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      for (Eigen::Index j = 0; j < cols_; ++j) Z(i, j) = bit(mask, i, j) ? hi : lo;
    }
    return Z;
  }

  const std::vector<std::uint64_t>& words() const noexcept { return bits_; }

  // [A X]_i = tr(A_i^T X).
  Vector apply_forward(const Matrix& X) const {
    check_shape(X, "apply_forward");
    const auto flat = row_major(X);
    Vector out(static_cast<Eigen::Index>(masks_));
    for (std::size_t i = 0; i < masks_; ++i) {
      double acc = 0.0;
      for_each_bit(i, [&](std::size_t idx) { acc += flat[idx]; });
      out(static_cast<Eigen::Index>(i)) = acc * scale();
    }
    return out;
  }

  // sum_i v_i A_i.
  Matrix apply_adjoint(const Vector& v) const {
    if (static_cast<std::size_t>(v.size()) != masks_) {
      throw DimensionError("apply_adjoint: vector length " + std::to_string(v.size()) +
                           " differs from ensemble size " + std::to_string(masks_));
    }
    std::vector<double> flat(static_cast<std::size_t>(rows_ * cols_), 0.0);
    for (std::size_t i = 0; i < masks_; ++i) {
      const double vi = v(static_cast<Eigen::Index>(i)) * scale();
      if (vi == 0.0) continue;
      for_each_bit(i, [&](std::size_t idx) { flat[idx] += vi; });
    }
    Matrix out(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i) {
      for (Eigen::Index j = 0; j < cols_; ++j) {
        out(i, j) = flat[static_cast<std::size_t>(i * cols_ + j)];
      }
    }
    return out;
  }

  using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

  // Ensemble with explicit support patterns (true = 1/m). p and seed are
  // recorded only.
  static SensingEnsemble from_masks(const std::vector<BoolMatrix>& masks, double p = 0.5,
                                    std::uint64_t seed = 0) {
    if (masks.empty()) throw ParameterError("from_masks: need at least one mask");
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("from_masks: p must lie in (0, 1)");
    SensingEnsemble e;
    e.rows_ = masks.front().rows();
    e.cols_ = masks.front().cols();
    if (e.rows_ < 1 || e.cols_ < 1) throw ParameterError("from_masks: empty shape");
    e.masks_ = masks.size();
    e.p_ = p;
    e.seed_ = seed;
    e.words_ = (static_cast<std::size_t>(e.rows_ * e.cols_) + 63) / 64;
    e.bits_.assign(e.masks_ * e.words_, 0ULL);
    for (std::size_t k = 0; k < masks.size(); ++k) {
      if (masks[k].rows() != e.rows_ || masks[k].cols() != e.cols_) {
        throw DimensionError("from_masks: masks differ in shape");
      }
      for (Eigen::Index i = 0; i < e.rows_; ++i) {
        for (Eigen::Index j = 0; j < e.cols_; ++j) {
          if (!masks[k](i, j)) continue;
          const auto idx = static_cast<std::size_t>(i * e.cols_ + j);
          e.bits_[k * e.words_ + idx / 64] |= 1ULL << (idx % 64);
        }
      }
    }
    return e;
  }

  friend SensingEnsemble build_sensing_ensemble(Eigen::Index, Eigen::Index,
                                                std::size_t, double, std::uint64_t);
  friend SensingEnsemble read_ensemble(const std::string&, bool);

 private:
  void check_shape(const Matrix& X, const char* where) const {
    if (X.rows() != rows_ || X.cols() != cols_) {
      throw DimensionError(std::string(where) + ": expected " +
                           detail::dims_string(rows_, cols_) + ", got " +
                           detail::dims_string(X.rows(), X.cols()));
    }
  }

  std::vector<double> row_major(const Matrix& X) const {
    std::vector<double> flat(static_cast<std::size_t>(rows_ * cols_));
    for (Eigen::Index i = 0; i < rows_; ++i) {
      for (Eigen::Index j = 0; j < cols_; ++j) {
        flat[static_cast<std::size_t>(i * cols_ + j)] = X(i, j);
      }
    }
    return flat;
  }

  template <typename F>
  void for_each_bit(std::size_t mask, F&& f) const {
    const std::uint64_t* w = bits_.data() + mask * words_;
    for (std::size_t k = 0; k < words_; ++k) {
      std::uint64_t word = w[k];
      while (word) {
        const int b = std::countr_zero(word);
        f(k * 64 + static_cast<std::size_t>(b));
        word &= word - 1;
      }
    }
  }

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::size_t masks_ = 0;
  std::size_t words_ = 0;
  double p_ = 0.5;
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> bits_;
};

inline SensingEnsemble build_sensing_ensemble(Eigen::Index d1, Eigen::Index d2,
                                              std::size_t m, double p,
                                              std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("build_sensing_ensemble: p must lie in (0, 1)");
  }
  if (m < 1) throw ParameterError("build_sensing_ensemble: m must be >= 1");
  if (d1 < 1 || d2 < 1) throw ParameterError("build_sensing_ensemble: empty shape");
  SensingEnsemble e;
  e.rows_ = d1;
  e.cols_ = d2;
  e.masks_ = m;
  e.p_ = p;
  e.seed_ = seed;
  const auto n = static_cast<std::size_t>(d1 * d2);
  e.words_ = (n + 63) / 64;
  e.bits_.assign(m * e.words_, 0ULL);
  Rng rng(derive_seed(seed, 0x5e45));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t idx = 0; idx < n; ++idx) {
      // zero with probability p, 1/m otherwise
      if (!rng.bernoulli(p)) e.bits_[i * e.words_ + idx / 64] |= 1ULL << (idx % 64);
    }
  }
  return e;
}

inline Vector apply_forward(const SensingEnsemble& e, const Matrix& X) {
  return e.apply_forward(X);
}

inline Matrix apply_adjoint(const SensingEnsemble& e, const Vector& v) {
  return e.apply_adjoint(v);
}

// y_i ~ Poisson([A M]_i), independently.
inline CompressiveObservations sample_compressive_counts(const SensingEnsemble& e,
                                                         const Matrix& M,
                                                         std::uint64_t seed) {
  if ((M.array() < 0.0).any()) {
    throw ParameterError("sample_compressive_counts: M has negative entries");
  }
  const Vector rates = e.apply_forward(M);
  Rng rng(derive_seed(seed, 0xc0));
  CompressiveObservations obs;
  obs.counts.reserve(e.size());
  for (Eigen::Index i = 0; i < rates.size(); ++i) {
    if (rates(i) < 0.0) {
      throw NumericalError("sample_compressive_counts: negative rate at " +
                           std::to_string(i));
    }
    obs.counts.push_back(rng.poisson(rates(i)));
  }
  return obs;
}

// ---------------------------------------------------------------------------
// Persistence: little-endian header (d1, d2, m as u64; p as f64; seed as u64)
// followed optionally by the packed mask words. A header-only file is a
// seed record; masks are then regenerated on read.

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  os.write(b.data(), 8);
}

inline std::uint64_t get_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 8)) {
    throw Error("ensemble file truncated");
  }
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return v;
}

}  // namespace detail

inline void write_ensemble(const SensingEnsemble& e, const std::string& path,
                           bool include_masks = true) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  detail::put_u64(os, static_cast<std::uint64_t>(e.rows()));
  detail::put_u64(os, static_cast<std::uint64_t>(e.cols()));
  detail::put_u64(os, static_cast<std::uint64_t>(e.size()));
  detail::put_u64(os, std::bit_cast<std::uint64_t>(e.p()));
  detail::put_u64(os, e.seed());
  if (include_masks) {
    for (std::uint64_t w : e.words()) detail::put_u64(os, w);
  }
  if (!os) throw Error("write failed: " + path);
}

// With regen_from_seed, stored masks (if any) are ignored and rebuilt.
inline SensingEnsemble read_ensemble(const std::string& path,
                                     bool regen_from_seed = false) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  const auto d1 = static_cast<Eigen::Index>(detail::get_u64(is));
  const auto d2 = static_cast<Eigen::Index>(detail::get_u64(is));
  const auto m = static_cast<std::size_t>(detail::get_u64(is));
  const double p = std::bit_cast<double>(detail::get_u64(is));
  const std::uint64_t seed = detail::get_u64(is);
  SensingEnsemble e = build_sensing_ensemble(d1, d2, m, p, seed);
  if (regen_from_seed) return e;
  is.peek();
  if (is.eof()) return e;  // seed record only
  std::vector<std::uint64_t> words(e.bits_.size());
  for (auto& w : words) w = detail::get_u64(is);
  e.bits_ = std::move(words);
  return e;
}

// ---------------------------------------------------------------------------
// Empirical RIP probe (diagnostic only; the constants are unknown).

struct RipProbe {
  double min_energy = 0.0;  // min over the probe set of ||Ã X||_2^2
  double max_energy = 0.0;
  std::size_t set_size = 0;
  bool within_band = false;  // all energies in [1/2, 3/2]
};

inline RipProbe rip_probe(const SensingEnsemble& e, std::size_t set_size,
                          std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0x819));
  const double m = static_cast<double>(e.size());
  const double lo = -std::sqrt((1.0 - e.p()) / e.p()) / std::sqrt(m);
  const double hi = std::sqrt(e.p() / (1.0 - e.p())) / std::sqrt(m);
  RipProbe out;
  out.set_size = set_size;
  out.min_energy = std::numeric_limits<double>::infinity();
  out.max_energy = 0.0;
  for (std::size_t s = 0; s < set_size; ++s) {
    Matrix X(e.rows(), e.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = rng.normal();
    }
    X /= X.norm();
    // Ã_i entries are lo + (hi - lo) * bit, so tr(Ã_i^T X) = lo*sum(X) + (hi-lo)*m*[A X]_i.
    const Vector ax = e.apply_forward(X);
    const double total = X.sum();
    double energy = 0.0;
    for (Eigen::Index i = 0; i < ax.size(); ++i) {
      const double v = lo * total + (hi - lo) * m * ax(i);
      energy += v * v;
    }
    out.min_energy = std::min(out.min_energy, energy);
    out.max_energy = std::max(out.max_energy, energy);
  }
  out.within_band = out.min_energy >= 0.5 && out.max_energy <= 1.5;
  return out;
}

}  // namespace plr
