#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace plr;
using plr::testing::normal_matrix;
using plr::testing::uniform_matrix;

TEST(ProjectBox, ClampsAndIsIdempotent) {
  Matrix X(1, 3);
  X << 0.5, 300.0, 50.0;
  const Matrix P = project_box(X, 200.0, 1.0);
  EXPECT_EQ(P(0, 0), 1.0);
  EXPECT_EQ(P(0, 1), 200.0);
  EXPECT_EQ(P(0, 2), 50.0);
  EXPECT_EQ(project_box(P, 200.0, 1.0), P);
  EXPECT_THROW(project_box(X, 1.0, 1.0), ParameterError);
}

TEST(ProjectL1Ball, SmallExamples) {
  Vector v(2);
  v << 3.0, 1.0;
  EXPECT_TRUE(project_l1_ball(v, 2.0).isApprox(Eigen::Vector2d(2.0, 0.0)));
  v << 1.0, 0.5;
  EXPECT_EQ(project_l1_ball(v, 2.0), v);
  v << 2.0, 2.0;
  EXPECT_TRUE(project_l1_ball(v, 2.0).isApprox(Eigen::Vector2d(1.0, 1.0)));
  EXPECT_THROW(project_l1_ball(-v, 2.0), ParameterError);
  EXPECT_THROW(project_l1_ball(v, 0.0), ParameterError);
}

TEST(ProjectL1Ball, LandsOnSphereWhenOutside) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Vector v(6);
    for (int i = 0; i < 6; ++i) v(i) = 3.0 * rng.uniform();
    const Vector p = project_l1_ball(v, 1.5);
    ASSERT_TRUE((p.array() >= 0.0).all());
    if (v.sum() > 1.5) ASSERT_NEAR(p.sum(), 1.5, 1e-12);
  }
}

TEST(ProjectNuclearBall, DiagonalAndRankOne) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 2.0;
  EXPECT_LT((project_nuclear_ball(D, 2.0) - expect).norm(), 1e-12);
  EXPECT_EQ(project_nuclear_ball(D, 5.0), D);

  Rng rng(2);
  Vector u = normal_matrix(4, 1, rng).col(0).normalized();
  Vector w = normal_matrix(3, 1, rng).col(0).normalized();
  const Matrix X = 5.0 * u * w.transpose();
  EXPECT_LT((project_nuclear_ball(X, 2.0) - 2.0 * u * w.transpose()).norm(), 1e-12);
}

TEST(PositiveRescale, Examples) {
  Matrix Z(2, 2);
  Z << 2.0, -1.0, 1.0, 0.0;
  Matrix expect(2, 2);
  expect << 4.0, 0.0, 2.0, 0.0;
  EXPECT_LT((positive_rescale(Z, 6.0) - expect).norm(), 1e-14);
  const Matrix Y = Matrix::Constant(2, 3, 0.5);
  EXPECT_LT((positive_rescale(Y, 3.0) - Y).norm(), 1e-15);
  EXPECT_LT((positive_rescale(Matrix::Ones(3, 2), 6.0) - Matrix::Ones(3, 2)).norm(), 1e-15);
  EXPECT_THROW(positive_rescale(-Matrix::Ones(2, 2), 1.0), NumericalError);
}

TEST(Svt, Examples) {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  EXPECT_LT((svt(D, 2.0) - expect).norm(), 1e-12);
  EXPECT_EQ(svt(D, 0.0), D);

  Matrix Z(2, 2);
  Z << 0.0, 2.0, 1.0, 0.0;
  Matrix expect2(2, 2);
  expect2 << 0.0, 1.0, 0.0, 0.0;
  EXPECT_LT((svt(Z, 1.0) - expect2).norm(), 1e-12);
  EXPECT_THROW(svt(Z, -1.0), ParameterError);
}

TEST(Svt, FirstOrderOptimalitySpotCheck) {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix Z = normal_matrix(5, 4, rng);
    const double tau = 0.3 + rng.uniform();
    auto obj = [&](const Matrix& X) { return 0.5 * (X - Z).squaredNorm() + tau * nuclear_norm(X); };
    const Matrix X = svt(Z, tau);
    const double f0 = obj(X);
    for (int k = 0; k < 100; ++k) {
      const Matrix delta = 1e-3 * normal_matrix(5, 4, rng);
      ASSERT_LE(f0, obj(X + delta) + 1e-12);
    }
  }
}

TEST(Projections, NonexpansiveAndIdempotent) {
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix X = 10.0 * normal_matrix(5, 4, rng);
    const Matrix Y = 10.0 * normal_matrix(5, 4, rng);
    const Matrix bx = project_box(X, 5.0, 1.0), by = project_box(Y, 5.0, 1.0);
    EXPECT_LE((bx - by).norm(), (X - Y).norm() + 1e-12);
    const Matrix nx = project_nuclear_ball(X, 4.0), ny = project_nuclear_ball(Y, 4.0);
    EXPECT_LE((nx - ny).norm(), (X - Y).norm() + 1e-10);
    EXPECT_LT((project_nuclear_ball(nx, 4.0) - nx).norm(), 1e-10);
    EXPECT_LT((project_box(bx, 5.0, 1.0) - bx).norm(), 1e-10);
    // svt fixes matrices whose singular values all equal zero after shrinkage
    const Matrix s = svt(X, 1e9);
    EXPECT_LT(s.norm(), 1e-10);
  }
}

TEST(AlternatingProject, FixedPointAndBoxOnly) {
  const FeasibleSet s(10.0, 1.0, 1);
  Rng rng(3);
  const Matrix U0 = uniform_matrix(4, 4, 2.0, 3.0, rng);
  auto r = alternating_project(U0, s);
  EXPECT_EQ(r.sweeps, 1);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.X - U0).norm(), 1e-10);

  Matrix U1 = U0;
  U1(0, 0) = -5.0;
  r = alternating_project(U1, s);
  // the first sweep produces the answer; the second confirms it
  EXPECT_LE(r.sweeps, 2);
  EXPECT_EQ(r.X, project_box(U1, 10.0, 1.0));
  EXPECT_THROW(alternating_project(U0, s, 0.0), ParameterError);
  EXPECT_THROW(alternating_project(U0, s, 1e-8, 0), ParameterError);
}

namespace {

// Dykstra's algorithm: converges to the orthogonal projection onto the
// intersection of the box and the nuclear ball.
Matrix dykstra_projection(const Matrix& U0, const FeasibleSet& s) {
  const double radius = s.nuclear_radius(U0.rows(), U0.cols());
  Matrix x = U0;
  Matrix p = Matrix::Zero(U0.rows(), U0.cols());
  Matrix q = p;
  for (int k = 0; k < 20000; ++k) {
    const Matrix y = project_nuclear_ball(x + p, radius);
    p = x + p - y;
    const Matrix xn = project_box(y + q, s.alpha, s.beta);
    q = y + q - xn;
    const double change = (xn - x).norm();
    x = xn;
    if (change < 1e-13) break;
  }
  return x;
}

}  // namespace

TEST(AlternatingProject, MatchesExactProjectionInNearCase) {
  const FeasibleSet s(5.0, 1.0, 8);
  Rng rng(9);
  const Matrix U0 = uniform_matrix(10, 8, 0.5, 5.5, rng);
  ASSERT_LE(nuclear_norm(U0), s.nuclear_radius(10, 8));
  const auto r = alternating_project(U0, s, 1e-8);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.X - dykstra_projection(U0, s)).norm(), 1e-6);
}

TEST(AlternatingProject, BindingBallIsFeasibleButNotClosest) {
  const FeasibleSet s(5.0, 1.0, 1);
  Rng rng(19);
  const Matrix U0 = 3.0 * plr::testing::normal_matrix(10, 8, rng).array() + 4.0;
  const auto r = alternating_project(U0, s, 1e-8);
  const Matrix exact = dykstra_projection(U0, s);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(validate_membership(r.X, s, SetKind::Gamma1).member);
  EXPECT_LE(nuclear_norm(r.X), s.nuclear_radius(10, 8) * (1.0 + 1e-6));
  EXPECT_LE((U0 - exact).norm(), (U0 - r.X).norm() + 1e-9);
  RecordProperty("distance_to_exact_projection", std::to_string((r.X - exact).norm()));
}

TEST(AlternatingProject, TightBallEndsInIntersection) {
  const FeasibleSet s(5.0, 0.01, 1);
  Rng rng(10);
  const Matrix U0 = uniform_matrix(10, 8, 0.0, 60.0, rng);
  const auto r = alternating_project(U0, s, 1e-8);
  EXPECT_TRUE(r.converged);
  EXPECT_TRUE(validate_membership(r.X, s, SetKind::Gamma1).member);
  EXPECT_LE(nuclear_norm(r.X), s.nuclear_radius(10, 8) * (1.0 + 1e-6));
}
