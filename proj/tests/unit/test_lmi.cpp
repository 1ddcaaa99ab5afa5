#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "mgcomm/lmi.hpp"

using namespace mgcomm;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST(Sdp, ScalarBound) {
  // maximize x subject to 1 - x > 0
  SdpProblem p;
  p.c = Vector::Ones(1);
  p.blocks.push_back({scalar(1.0), {scalar(-1.0)}});
  const auto r = solve_sdp(p, Vector::Zero(1));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x(0), 1.0, 1e-7);
  EXPECT_LT(r.x(0), 1.0);
}

TEST(Sdp, TwoByTwoOffDiagonal) {
  // maximize t subject to [[1, t], [t, 1]] > 0, optimum t = 1
  SdpProblem p;
  p.c = Vector::Ones(1);
  Matrix E(2, 2);
  E << 0, 1, 1, 0;
  p.blocks.push_back({Matrix::Identity(2, 2), {E}});
  const auto r = solve_sdp(p, Vector::Zero(1));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.x(0), 1.0, 1e-7);
}

TEST(Sdp, LargestEigenvalueAsProgram) {
  // maximize -t subject to t I - M > 0, optimum t = lambda_max(M)
  Matrix M(3, 3);
  M << 2, 1, 0, 1, 3, -1, 0, -1, 1;
  SdpProblem p;
  p.c = -Vector::Ones(1);
  p.blocks.push_back({-M, {Matrix::Identity(3, 3)}});
  Vector x0(1);
  x0 << M.norm() + 1.0;
  const auto r = solve_sdp(p, x0);
  ASSERT_TRUE(r.converged);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  EXPECT_NEAR(r.x(0), es.eigenvalues().maxCoeff(), 1e-7);
  EXPECT_LE(r.gap, 1e-6);
}

TEST(Sdp, TwoVariablesTwoBlocks) {
  // maximize x + y subject to x < 1, y < 2, x + y < 2.5
  SdpProblem p;
  p.c = Vector::Ones(2);
  p.blocks.push_back({scalar(1.0), {scalar(-1.0), Matrix()}});
  p.blocks.push_back({scalar(2.0), {Matrix(), scalar(-1.0)}});
  p.blocks.push_back({scalar(2.5), {scalar(-1.0), scalar(-1.0)}});
  const auto r = solve_sdp(p, Vector::Zero(2));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.objective, 2.5, 1e-7);
}

TEST(Sdp, EvaluateAffineMap) {
  LmiBlock b{Matrix::Identity(2, 2), {Matrix::Identity(2, 2), Matrix()}};
  Vector x(2);
  x << 2.0, 5.0;
  EXPECT_EQ(b.evaluate(x), 3.0 * Matrix::Identity(2, 2));
}
