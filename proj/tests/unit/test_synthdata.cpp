#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace plr;
using plr::testing::uniform_matrix;

TEST(ExactLowRank, RankBoxAndNuclear) {
  const FeasibleSet s(200.0, 1.0, 3);
  for (int rank : {1, 2, 3}) {
    const Matrix M = gen_exact_low_rank(20, 15, rank, s, 10 + rank);
    const Vector sv = singular_values(M);
    EXPECT_LE(sv(rank), 1e-9 * sv(0));
    EXPECT_GT(sv(rank - 1), 1e-6 * sv(0));
    EXPECT_TRUE(validate_membership(M, FeasibleSet(200.0, 1.0, rank), SetKind::S).member);
    EXPECT_DOUBLE_EQ(M.maxCoeff(), 200.0);
  }
  EXPECT_THROW(gen_exact_low_rank(3, 3, 4, s, 1), ParameterError);
  EXPECT_EQ(gen_exact_low_rank(5, 4, 2, s, 7), gen_exact_low_rank(5, 4, 2, s, 7));
}

TEST(WeakLq, BoundarySpectrum) {
  WeakLqSpec spec;
  spec.q = 0.5;
  spec.rho = 0.3;
  spec.total_intensity = 1e4;
  spec.rows = 8;
  spec.cols = 6;
  const Vector th = spec.boundary_singular_values();
  EXPECT_DOUBLE_EQ(th(0), 0.3 * 1e4);
  EXPECT_NEAR(th(3) / th(0), 1.0 / 16.0, 1e-15);
  for (double c : {1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.3}) {
    int count = 0;
    for (Eigen::Index j = 0; j < th.size(); ++j) count += th(j) >= c * spec.total_intensity;
    EXPECT_LE(count, std::pow(spec.rho / c, spec.q) + 1e-12);
  }
}

TEST(WeakLq, SampleInGammaAndDecayReported) {
  WeakLqSpec spec;
  spec.q = 0.5;
  spec.rho = 0.5;
  spec.total_intensity = 1e4;
  spec.rows = 12;
  spec.cols = 10;
  spec.entry_floor = 1.0;
  const auto s = gen_weak_lq(spec, 3);
  const FeasibleSet g(1e9, 1e-9, 1, 1e4, 1.0);
  EXPECT_TRUE(validate_membership(s.M, g, SetKind::Gamma).member);
  EXPECT_EQ(s.final_spectrum.size(), 10);
  EXPECT_EQ(s.decay_within_factor_two, s.worst_decay_ratio <= 2.0);
  spec.entry_floor = 100.0;  // 120 entries * 100 > I
  EXPECT_THROW(gen_weak_lq(spec, 3), ParameterError);
}

TEST(RankLApprox, Examples) {
  Rng rng(5);
  const Matrix X = plr::testing::normal_matrix(6, 4, rng);
  EXPECT_LT((rank_l_approx(X, 4) - X).norm(), 1e-12);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 3.0;
  EXPECT_LT((rank_l_approx(D, 1) - expect).norm(), 1e-12);
  EXPECT_THROW(rank_l_approx(X, 0), ParameterError);
}

TEST(RankLApprox, ErrorIsTailEnergy) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix X = plr::testing::normal_matrix(7, 5, rng);
    const Vector s = singular_values(X);
    for (int l = 1; l <= 5; ++l) {
      const double tail = s.tail(5 - l).squaredNorm();
      EXPECT_NEAR((X - rank_l_approx(X, l)).squaredNorm(), tail, 1e-10);
    }
  }
}

TEST(CompletionSampler, FullObservationAndNoDuplicates) {
  const Matrix M = Matrix::Constant(4, 5, 3.0);
  const auto obs = sample_completion_observations(M, 20.0, 1);
  EXPECT_EQ(obs.size(), 20u);
  const auto half = sample_completion_observations(M, 10.0, 2);
  EXPECT_LT(half.size(), 20u);  // constructor already rejects duplicates
  EXPECT_THROW(sample_completion_observations(M, 0.0, 1), ParameterError);
  EXPECT_THROW(sample_completion_observations(M, 21.0, 1), ParameterError);
}

TEST(CompletionSampler, ExpectedSizeBand) {
  const Matrix M = Matrix::Constant(8, 8, 1.0);
  const double m = 20.0, n = 64.0, p = m / n;
  const int seeds = 10000;
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(sample_completion_observations(M, m, s).size());
  const double sigma = std::sqrt(n * p * (1.0 - p) / seeds);
  EXPECT_NEAR(total / seeds, m, 3.0 * sigma);
}

TEST(CompletionSampler, HalfObservedOnPaperShape) {
  const Matrix M = Matrix::Constant(64, 36, 10.0);
  const auto obs = sample_completion_observations(M, 0.5 * 64 * 36, 4);
  EXPECT_NEAR(static_cast<double>(obs.size()) / (64.0 * 36.0), 0.5, 3.0 * std::sqrt(0.25 / 2304.0));
}

TEST(SubsampleObservations, KeepsCounts) {
  const CompletionObservations obs(3, 3, {{0, 0, 5}, {1, 1, 6}, {2, 2, 7}});
  EXPECT_EQ(subsample_observations(obs, 1.0, 1).entries(), obs.entries());
  const auto sub = subsample_observations(obs, 0.5, 2);
  for (const auto& e : sub.entries()) EXPECT_EQ(e.count, e.row + 5);
}

TEST(PatchTransform, PaperDimensions) {
  const PatchLayout layout(48, 48, 8, 8);
  EXPECT_EQ(layout.matrix_rows(), 64);
  EXPECT_EQ(layout.matrix_cols(), 36);
  EXPECT_THROW(PatchLayout(48, 50, 8, 8), ParameterError);
}

TEST(PatchTransform, RoundTripIsometryAndLayout) {
  Rng rng(7);
  const PatchLayout layout(12, 8, 4, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix img = uniform_matrix(12, 8, 0.0, 255.0, rng);
    const Matrix P = image_to_patch_matrix(img, layout);
    EXPECT_EQ(patch_matrix_to_image(P, layout), img);
    EXPECT_NEAR(P.norm(), img.norm(), 1e-12);
    // second patch in row-major patch order starts at column offset 2
    EXPECT_EQ(P(0, 1), img(0, 2));
    EXPECT_EQ(P(1, 1), img(0, 3));
    EXPECT_EQ(P(2, 1), img(1, 2));
    EXPECT_EQ(P(0, 4), img(4, 0));
  }
  const Matrix c = Matrix::Constant(12, 8, 7.0);
  EXPECT_EQ(image_to_patch_matrix(c, layout), Matrix::Constant(8, 12, 7.0));
}
