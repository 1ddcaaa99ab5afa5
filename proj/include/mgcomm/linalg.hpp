#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mgcomm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

// Eigenvalues ordered by real part descending, then imaginary part descending.
using Spectrum = std::vector<Complex>;

Spectrum sorted_eigenvalues(const Matrix& m);
double max_real(const Spectrum& s);

// Largest singular value.
double spectral_norm(const Matrix& m);

Matrix symmetric_part(const Matrix& m);

// Largest eigenvalue of the symmetric part of m.
double lambda_max_sym(const Matrix& m);

bool all_finite(const Matrix& m);

// Matrix from nested rows; throws on ragged input.
Matrix matrix_from_rows(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> matrix_to_rows(const Matrix& m);

}  // namespace mgcomm
