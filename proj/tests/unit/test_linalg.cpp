#include <gtest/gtest.h>

#include "mgcomm/error.hpp"
#include "mgcomm/linalg.hpp"
#include "mgcomm/mask.hpp"
#include "oracles.hpp"

using namespace mgcomm;

TEST(Linalg, EigenvaluesSortedByRealPartDescending) {
  Matrix m(3, 3);
  m << -1, 0, 0, 0, 2, 0, 0, 0, -5;
  const auto s = sorted_eigenvalues(m);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_DOUBLE_EQ(s[0].real(), 2.0);
  EXPECT_DOUBLE_EQ(s[1].real(), -1.0);
  EXPECT_DOUBLE_EQ(s[2].real(), -5.0);
  EXPECT_DOUBLE_EQ(max_real(s), 2.0);
}

TEST(Linalg, ComplexPairsComeAsConjugates) {
  Matrix m(2, 2);
  m << -1, 3, -3, -1;
  const auto s = sorted_eigenvalues(m);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0].real(), -1.0, 1e-12);
  EXPECT_NEAR(s[0].imag(), 3.0, 1e-12);
  EXPECT_NEAR(s[1].imag(), -3.0, 1e-12);
}

TEST(Linalg, NonSquareEigenvaluesRejected) {
  EXPECT_THROW(sorted_eigenvalues(Matrix::Zero(2, 3)), Error);
}

TEST(Linalg, SpectralNormAgreesWithPowerIteration) {
  Matrix m(3, 2);
  m << 1, 2, -3, 0.5, 4, -1;
  EXPECT_NEAR(spectral_norm(m), oracle::power_iteration_norm(m), 1e-9);
  EXPECT_EQ(spectral_norm(Matrix::Zero(2, 2)), 0.0);
}

TEST(Linalg, LambdaMaxUsesSymmetricPart) {
  Matrix m(2, 2);
  m << 0, 2, 0, 0;
  EXPECT_NEAR(lambda_max_sym(m), 1.0, 1e-12);
}

TEST(Linalg, RowsRoundTripAndRaggedRejected) {
  const std::vector<std::vector<double>> rows{{1, 2}, {3, 4}};
  EXPECT_EQ(matrix_to_rows(matrix_from_rows(rows)), rows);
  EXPECT_THROW(matrix_from_rows({{1, 2}, {3}}), Error);
}

TEST(Mask, CountsAndSubset) {
  auto m = SparsityMask::from_rows({{1, 0, 1}, {0, 1, 1}});
  EXPECT_EQ(m.popcount(), 4);
  EXPECT_EQ(m.row_sum(0), 2);
  EXPECT_EQ(m.col_sum(2), 2);
  EXPECT_EQ(m.key(), "101011");
  SparsityMask full(2, 3, true);
  EXPECT_TRUE(m.subset_of(full));
  EXPECT_FALSE(full.subset_of(m));
  EXPECT_TRUE(SparsityMask(2, 3).empty());
}

TEST(Mask, CsvRoundTrip) {
  const auto m = SparsityMask::from_rows({{1, 0}, {1, 1}, {0, 0}});
  EXPECT_EQ(m.to_csv(), "1,0\n1,1\n0,0\n");
  EXPECT_EQ(SparsityMask::from_csv(m.to_csv()), m);
  EXPECT_THROW(SparsityMask::from_csv("1,2\n"), Error);
}

TEST(Mask, IdentityIsDiagonal) {
  const auto m = SparsityMask::identity(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), i == j);
}
