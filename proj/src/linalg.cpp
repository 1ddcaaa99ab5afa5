#include "mgcomm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mgcomm/error.hpp"

namespace mgcomm {

Spectrum sorted_eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimension, "eigenvalues need a square matrix");
  Spectrum out;
  if (m.rows() == 0) return out;
  Eigen::EigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kNumerical, "eigenvalue iteration failed");
  const auto& ev = solver.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return out;
}

double max_real(const Spectrum& s) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : s) best = std::max(best, z.real());
  return best;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix symmetric_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double lambda_max_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  const auto cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error(ErrorCode::kDimension, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace mgcomm
