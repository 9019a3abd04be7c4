#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace plr;
using plr::testing::bool_matrix;
using plr::testing::uniform_matrix;

TEST(CompletionObjective, SingleEntryValues) {
  const CompletionObservations one(1, 1, {{0, 0, 1}});
  EXPECT_DOUBLE_EQ(nll_completion(one, Matrix::Ones(1, 1), 1e-12), 1.0);
  const CompletionObservations two(1, 1, {{0, 0, 2}});
  EXPECT_DOUBLE_EQ(nll_completion(two, Matrix::Ones(1, 1), 1e-12), 1.0);
  const CompletionObservations none(3, 2, {});
  EXPECT_DOUBLE_EQ(nll_completion(none, Matrix::Ones(3, 2), 1e-12), 0.0);
}

TEST(CompletionObjective, GradientEntries) {
  const CompletionObservations obs(2, 2, {{0, 0, 4}, {1, 1, 0}});
  Matrix X(2, 2);
  X << 4.0, 7.0, 7.0, 2.0;
  const Matrix g = grad_nll_completion(obs, X, 2.0);
  EXPECT_DOUBLE_EQ(g(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g(1, 1), 1.0);  // Y = 0 at X = beta
  EXPECT_DOUBLE_EQ(g(0, 1), 0.0);  // unobserved
}

TEST(CompletionObjective, BelowFloorIsDomainError) {
  const CompletionObservations obs(2, 2, {{1, 0, 3}});
  Matrix X = Matrix::Constant(2, 2, 2.0);
  X(1, 0) = 0.5;
  try {
    nll_completion(obs, X, 1.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.index(), std::make_pair(1L, 0L));
  }
  EXPECT_THROW(grad_nll_completion(obs, X, 1.0), DomainError);
  EXPECT_THROW(nll_completion(obs, Matrix::Ones(3, 2), 1.0), DimensionError);
}

TEST(CompletionObjective, FiniteDifferenceGradient) {
  Rng rng(21);
  const Matrix X = uniform_matrix(6, 5, 1.0, 20.0, rng);
  std::vector<ObservedEntry> e;
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (rng.bernoulli(0.7)) e.push_back({i, j, rng.poisson(X(i, j))});
    }
  }
  const CompletionObservations obs(6, 5, e);
  const CompletionObjective f(obs, 1.0);
  const Matrix g = f.gradient(X);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double h = 1e-6 * X(i, j);
      Matrix a = X, b = X;
      a(i, j) += h;
      b(i, j) -= h;
      const double fd = (f.value(a) - f.value(b)) / (2.0 * h);
      EXPECT_NEAR(fd, g(i, j), 1e-5 * std::max(1.0, std::abs(g(i, j))));
    }
  }
}

TEST(RecoveryObjective, SingleMaskArithmetic) {
  const auto e = SensingEnsemble::from_masks({bool_matrix(2, 2, true)});
  const CompressiveObservations y{{3}};
  const Matrix X = Matrix::Constant(2, 2, 0.5);  // ||X||_{1,1} = 2
  EXPECT_NEAR(nll_recovery(e, y, X), 2.0 - 3.0 * std::log(2.0), 1e-14);
  EXPECT_NEAR(nll_recovery(e, y, X), -0.0794415416798, 1e-12);
}

TEST(RecoveryObjective, ZeroCountsGiveFlux) {
  const auto e = build_sensing_ensemble(3, 3, 8, 0.5, 4);
  const CompressiveObservations y{std::vector<std::int64_t>(8, 0)};
  Rng rng(1);
  const Matrix X = uniform_matrix(3, 3, 0.0, 5.0, rng);
  EXPECT_NEAR(nll_recovery(e, y, X), e.apply_forward(X).sum(), 1e-12);
  EXPECT_TRUE(grad_nll_recovery(e, y, X).isApprox(e.apply_adjoint(Vector::Ones(8))));
}

TEST(RecoveryObjective, ZeroRateZeroCountContributesNothing) {
  const auto e = SensingEnsemble::from_masks({bool_matrix(2, 2, false), bool_matrix(2, 2, true)});
  const CompressiveObservations y{{0, 2}};
  const Matrix X = Matrix::Constant(2, 2, 0.5);
  EXPECT_NEAR(nll_recovery(e, y, X), 1.0 - 2.0 * std::log(1.0), 1e-14);
}

TEST(RecoveryObjective, PositiveCountAtZeroRateIsDomainError) {
  const auto e = SensingEnsemble::from_masks({bool_matrix(2, 2, false), bool_matrix(2, 2, true)});
  const CompressiveObservations y{{1, 2}};
  try {
    nll_recovery(e, y, Matrix::Ones(2, 2));
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_EQ(err.index().first, 0);
  }
}

TEST(RecoveryObjective, MatchedRatesGiveZeroGradient) {
  const auto e = SensingEnsemble::from_masks({bool_matrix(2, 2, true), bool_matrix(2, 2, true)});
  const Matrix X = Matrix::Constant(2, 2, 1.25);  // rate 5 / 2 per mask... scaled by 1/m
  const Vector rates = e.apply_forward(X);
  ASSERT_DOUBLE_EQ(rates(0), 2.5);
  const auto e2 = SensingEnsemble::from_masks({bool_matrix(1, 2, true)});
  const CompressiveObservations y{{4}};
  const Matrix X2 = Matrix::Constant(1, 2, 2.0);
  EXPECT_LT(grad_nll_recovery(e2, y, X2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RecoveryObjective, FiniteDifferenceGradient) {
  Rng rng(31);
  const auto e = build_sensing_ensemble(4, 4, 6, 0.5, 9);
  const Matrix M = uniform_matrix(4, 4, 1.0, 30.0, rng);
  const auto y = sample_compressive_counts(e, M, 3);
  const Matrix X = uniform_matrix(4, 4, 1.0, 30.0, rng);
  const RecoveryObjective f(e, y, 1e-12);
  const Matrix g = f.gradient(X);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double h = 1e-6 * X(i, j);
      Matrix a = X, b = X;
      a(i, j) += h;
      b(i, j) -= h;
      const double fd = (f.value(a) - f.value(b)) / (2.0 * h);
      EXPECT_NEAR(fd, g(i, j), 1e-5 * std::max(1.0, std::abs(g(i, j))));
    }
  }
}

TEST(RecoveryObjective, DefaultFloorFromSet) {
  const auto e = build_sensing_ensemble(2, 2, 50, 0.5, 1);
  const FeasibleSet s(100.0, 0.01, 1, 40.0, 0.5);
  EXPECT_DOUBLE_EQ(RecoveryObjective::default_floor(e, s), 0.01);
}

TEST(Lipschitz, PaperParameters) {
  EXPECT_DOUBLE_EQ(lipschitz_completion(FeasibleSet(200.0, 1.0, 1)), 200.0);
  EXPECT_DOUBLE_EQ(lipschitz_completion(FeasibleSet(8.0, 2.0, 1)), 2.0);  // alpha = 4 beta -> 4/beta
}

TEST(Lipschitz, GradientDifferenceBounded) {
  Rng rng(17);
  const FeasibleSet s(20.0, 1.0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix M = uniform_matrix(4, 3, 1.0, 20.0, rng);
    std::vector<ObservedEntry> e;
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 3; ++j) {
        e.push_back({i, j, std::min<std::int64_t>(rng.poisson(M(i, j)), 20)});
      }
    }
    const CompletionObservations obs(4, 3, e);
    const CompletionObjective f(obs, s);
    const Matrix U = uniform_matrix(4, 3, 1.0, 20.0, rng);
    const Matrix V = uniform_matrix(4, 3, 1.0, 20.0, rng);
    EXPECT_LE((f.gradient(U) - f.gradient(V)).norm(), s.lipschitz() * (U - V).norm() + 1e-12);
  }
}

TEST(QuadraticModel, Basics) {
  const Matrix X = Matrix::Constant(2, 2, 3.0);
  EXPECT_DOUBLE_EQ(quadratic_model(4.0, Matrix::Ones(2, 2), X, X, 2.0), 4.0);
  Matrix X1 = X;
  X1(0, 0) += 1.0;
  EXPECT_DOUBLE_EQ(quadratic_model(4.0, Matrix::Zero(2, 2), X1, X, 2.0), 5.0);
  EXPECT_THROW(quadratic_model(4.0, Matrix::Zero(2, 2), X1, X, 0.0), ParameterError);
}

TEST(QuadraticModel, DescentLemma) {
  Rng rng(3);
  const FeasibleSet s(20.0, 1.0, 1);
  const Matrix M = uniform_matrix(5, 4, 1.0, 20.0, rng);
  std::vector<ObservedEntry> e;
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) e.push_back({i, j, std::min<std::int64_t>(rng.poisson(M(i, j)), 20)});
  }
  const CompletionObservations obs(5, 4, e);
  const CompletionObjective f(obs, s);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix A = uniform_matrix(5, 4, 1.0, 20.0, rng);
    const Matrix B = uniform_matrix(5, 4, 1.0, 20.0, rng);
    EXPECT_LE(f.value(A), quadratic_model(f.value(B), f.gradient(B), A, B, s.lipschitz()) + 1e-9);
  }
}

TEST(ObjectiveHandle, DispatchesBothKinds) {
  const CompletionObservations obs(1, 1, {{0, 0, 1}});
  const ObjectiveHandle h{CompletionObjective(obs, 1.0)};
  EXPECT_FALSE(h.is_recovery());
  EXPECT_DOUBLE_EQ(h.value(Matrix::Ones(1, 1)), 1.0);
  const auto e = build_sensing_ensemble(2, 2, 3, 0.5, 1);
  const CompressiveObservations y{{0, 0, 0}};
  const ObjectiveHandle r{RecoveryObjective(e, y, 1e-6)};
  EXPECT_TRUE(r.is_recovery());
  EXPECT_EQ(r.rows(), 2);
}
