#include "mgcomm/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mgcomm/error.hpp"
#include "mgcomm/lmi.hpp"

namespace mgcomm {

std::string to_string(NormBound b) {
  return b == NormBound::kSquared ? "squared" : "spectral";
}

NormBound norm_bound_from_string(const std::string& s) {
  if (s == "squared") return NormBound::kSquared;
  if (s == "spectral") return NormBound::kSpectral;
  throw Error(ErrorCode::kInvalidArgument, "unknown norm bound '" + s + "'");
}

std::string to_string(SynthesisStatus s) {
  return s == SynthesisStatus::kCertified ? "certified" : "not_certified";
}

Matrix lyapunov_P(const Matrix& A, double beta) {
  if (A.rows() != A.cols()) throw Error(ErrorCode::kDimension, "A must be square");
  const auto n = A.rows();
  const Matrix As = A - beta * Matrix::Identity(n, n);
  const double lead = max_real(sorted_eigenvalues(As));
  if (!(lead < 0)) {
    std::ostringstream os;
    os << "A - beta*I is not stable (max real eigenvalue " << lead << " at beta = " << beta
       << "); choose a larger beta";
    throw Error(ErrorCode::kModel, os.str());
  }
  // Bartels-Stewart on the complex Schur form As = U T U^*.
  using CMatrix = Eigen::MatrixXcd;
  Eigen::ComplexSchur<Matrix> schur(As);
  const CMatrix& T = schur.matrixT();
  const CMatrix& U = schur.matrixU();
  CMatrix Y = CMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(j) = -1.0;
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
    CMatrix lhs = T;
    lhs.diagonal().array() += std::conj(T(j, j));
    Y.col(j) = lhs.triangularView<Eigen::Upper>().solve(rhs);
  }
  const Matrix P = (U * Y * U.adjoint()).real();
  return symmetric_part(P);
}

double lyapunov_residual(const Matrix& A, double beta, const Matrix& P) {
  const auto n = A.rows();
  const Matrix As = A - beta * Matrix::Identity(n, n);
  return (As * P + P * As.transpose() + Matrix::Identity(n, n)).norm();
}

Matrix synthesis_P(const StateSpaceModel& model, double beta) {
  return lyapunov_P(model.A / model.time_scale, beta / model.time_scale);
}

Matrix lyapunov_derivative(const StateSpaceModel& model, const Matrix& P, const Matrix& K) {
  const Matrix Ak = model.A + model.B * K * model.C;
  return symmetric_part(Ak.transpose() * P + P * Ak);
}

double alpha_bound(const Matrix& A, const Matrix& B, double c_K) {
  if (!(c_K > 0)) throw Error(ErrorCode::kInvalidArgument, "c_K must be positive");
  const double nb = spectral_norm(B);
  return c_K * nb * (spectral_norm(A) + nb * c_K);
}

namespace {

double gain_bound(double rho, NormBound norm) {
  return norm == NormBound::kSquared ? std::sqrt(rho) : rho;
}

void check_problem(const SynthesisProblem& prob) {
  prob.model.validate();
  if (prob.mask.rows() != prob.model.m() || prob.mask.cols() != prob.model.p()) {
    std::ostringstream os;
    os << "mask must be " << prob.model.m() << "x" << prob.model.p();
    throw Error(ErrorCode::kDimension, os.str());
  }
  if (!(prob.rho > 0)) throw Error(ErrorCode::kInvalidArgument, "rho must be positive");
  if (!(prob.tolerance > 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
}

struct GainVariables {
  std::vector<std::pair<int, int>> entries;  // masked (i, j), row-major
  std::vector<Matrix> dS;                    // derivative of S for each entry
};

GainVariables gain_variables(const SynthesisProblem& prob, const Matrix& P, double scale) {
  GainVariables v;
  const auto& model = prob.model;
  for (int i = 0; i < prob.mask.rows(); ++i)
    for (int j = 0; j < prob.mask.cols(); ++j) {
      if (!prob.mask(i, j)) continue;
      // B e_i e_j' C
      const Matrix E = model.B.col(i) * model.C.row(j);
      const Matrix PE = P * E;
      v.entries.emplace_back(i, j);
      v.dS.push_back(scale * (PE + PE.transpose()));
    }
  return v;
}

// [[I, K~], [K~', I]] > 0 in units of the gain bound.
LmiBlock norm_block(const SynthesisProblem& prob, const GainVariables& v, int num_vars) {
  const int m = prob.model.m(), p = prob.model.p();
  LmiBlock b;
  b.F0 = Matrix::Identity(m + p, m + p);
  b.F.assign(num_vars, Matrix());
  for (std::size_t k = 0; k < v.entries.size(); ++k) {
    Matrix E = Matrix::Zero(m + p, m + p);
    const auto [i, j] = v.entries[k];
    E(i, m + j) = 1.0;
    E(m + j, i) = 1.0;
    b.F[k] = std::move(E);
  }
  return b;
}

Matrix assemble_gain(const SynthesisProblem& prob, const GainVariables& v, const Vector& x,
                     double kappa) {
  Matrix K = Matrix::Zero(prob.model.m(), prob.model.p());
  for (std::size_t k = 0; k < v.entries.size(); ++k)
    K(v.entries[k].first, v.entries[k].second) = kappa * x(k);
  return K;
}

void fill_report(SynthesisResult& r, const SdpResult& sdp, double f) {
  r.report.newton_steps = sdp.newton_steps;
  r.report.outer_iterations = sdp.outer_iterations;
  r.report.gap = f * sdp.gap;
  r.report.relative_gap = r.report.gap / std::max(std::abs(r.gamma), 1e-300);
  r.report.converged = sdp.converged;
}

SdpResult solve_checked(const SdpProblem& sdp, const Vector& x0, double tolerance) {
  SdpOptions opt;
  opt.relative_gap = tolerance;
  SdpResult res = solve_sdp(sdp, x0, opt);
  if (!res.converged) {
    std::ostringstream os;
    os << "barrier method did not converge (gap " << res.gap << " after " << res.newton_steps
       << " Newton steps)";
    throw Error(ErrorCode::kNumerical, os.str());
  }
  return res;
}

}  // namespace

double lmi_max_eig(const SynthesisProblem& prob, const Matrix& P, const Matrix& K, double gamma,
                   double tau, double alpha) {
  const int n = prob.model.n();
  const Matrix S = lyapunov_derivative(prob.model, P, K);
  if (!prob.delay) return lambda_max_sym(S + gamma * Matrix::Identity(n, n));
  Matrix M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = S + (tau * alpha * alpha + gamma) * Matrix::Identity(n, n);
  M.topRightCorner(n, n) = P;
  M.bottomLeftCorner(n, n) = P;
  M.bottomRightCorner(n, n) = -tau * Matrix::Identity(n, n);
  return lambda_max_sym(M);
}

SynthesisResult max_gamma(const SynthesisProblem& prob) {
  check_problem(prob);
  const auto& model = prob.model;
  const int n = model.n();
  SynthesisResult r;
  r.P = synthesis_P(model, prob.beta);
  r.report.residual =
      lyapunov_residual(model.A / model.time_scale, prob.beta / model.time_scale, r.P);
  const Matrix S0 = lyapunov_derivative(model, r.P, Matrix::Zero(model.m(), model.p()));
  const double kappa = gain_bound(prob.rho, prob.norm);

  if (prob.mask.empty()) {
    r.K = Matrix::Zero(model.m(), model.p());
    r.gamma = -lambda_max_sym(S0);
    r.report.converged = true;
  } else {
    const double f = std::max(spectral_norm(S0), 1e-300);
    const GainVariables v = gain_variables(prob, r.P, kappa / f);
    const int nk = static_cast<int>(v.entries.size());
    SdpProblem sdp;
    sdp.c = Vector::Zero(nk + 1);
    sdp.c(nk) = 1.0;
    // -(S/f + gamma~ I) > 0
    LmiBlock sb;
    sb.F0 = -S0 / f;
    for (int k = 0; k < nk; ++k) sb.F.push_back(-v.dS[k]);
    sb.F.push_back(-Matrix::Identity(n, n));
    sdp.blocks.push_back(std::move(sb));
    sdp.blocks.push_back(norm_block(prob, v, nk + 1));

    Vector x0 = Vector::Zero(nk + 1);
    x0(nk) = -lambda_max_sym(S0 / f) - 1.0;
    const SdpResult res = solve_checked(sdp, x0, prob.tolerance);
    r.K = assemble_gain(prob, v, res.x, kappa);
    r.gamma = f * res.x(nk);
    fill_report(r, res, f);
  }
  r.closed_spectrum = closed_loop(model, r.K).spectrum;
  r.report.certificate_max_eig = lmi_max_eig(prob, r.P, r.K, r.gamma - 1e-6);
  r.status = r.gamma > 0 && r.report.certificate_max_eig < 0 ? SynthesisStatus::kCertified
                                                             : SynthesisStatus::kNotCertified;
  return r;
}

SynthesisResult max_gamma_delay(const SynthesisProblem& prob) {
  check_problem(prob);
  if (!prob.delay) throw Error(ErrorCode::kInvalidArgument, "delay program needs a delay bound");
  const auto& model = prob.model;
  const int n = model.n();
  const double kappa = gain_bound(prob.rho, prob.norm);

  SynthesisResult r;
  if (prob.delay->alpha) {
    r.alpha = *prob.delay->alpha;
  } else if (prob.delay->spec) {
    r.alpha = prob.delay->spec->max_delay() * alpha_bound(model.A, model.B, kappa);
  }
  if (!(r.alpha >= 0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be non-negative");

  r.P = synthesis_P(model, prob.beta);
  r.report.residual =
      lyapunov_residual(model.A / model.time_scale, prob.beta / model.time_scale, r.P);
  const Matrix S0 = lyapunov_derivative(model, r.P, Matrix::Zero(model.m(), model.p()));
  const double f = std::max(spectral_norm(S0), 1e-300);
  const Matrix Pf = r.P / f;
  const double pn = spectral_norm(Pf);
  // tau~ = sigma * t with a congruence 1/sqrt(sigma) on the second block row
  // keeps both blocks of comparable size.
  const double sigma = r.alpha > 0 ? pn / r.alpha : 1.0;
  const double a = r.alpha * r.alpha * sigma;
  const Matrix Q = Pf / std::sqrt(sigma);
  constexpr double kTauMax = 1e6;

  const GainVariables v = gain_variables(prob, r.P, kappa / f);
  const int nk = static_cast<int>(v.entries.size());
  const int ig = nk, it = nk + 1;
  SdpProblem sdp;
  sdp.c = Vector::Zero(nk + 2);
  sdp.c(ig) = 1.0;

  LmiBlock db;
  db.F0 = Matrix::Zero(2 * n, 2 * n);
  db.F0.topLeftCorner(n, n) = -S0 / f;
  db.F0.topRightCorner(n, n) = -Q;
  db.F0.bottomLeftCorner(n, n) = -Q;
  for (int k = 0; k < nk; ++k) {
    Matrix E = Matrix::Zero(2 * n, 2 * n);
    E.topLeftCorner(n, n) = -v.dS[k];
    db.F.push_back(std::move(E));
  }
  Matrix Eg = Matrix::Zero(2 * n, 2 * n);
  Eg.topLeftCorner(n, n) = -Matrix::Identity(n, n);
  db.F.push_back(std::move(Eg));
  Matrix Et = Matrix::Zero(2 * n, 2 * n);
  Et.topLeftCorner(n, n) = -a * Matrix::Identity(n, n);
  Et.bottomRightCorner(n, n) = Matrix::Identity(n, n);
  db.F.push_back(std::move(Et));
  sdp.blocks.push_back(std::move(db));

  LmiBlock tb;
  tb.F0 = Matrix::Constant(1, 1, kTauMax);
  tb.F.assign(nk + 2, Matrix());
  tb.F[it] = Matrix::Constant(1, 1, -1.0);
  sdp.blocks.push_back(std::move(tb));
  if (nk > 0) sdp.blocks.push_back(norm_block(prob, v, nk + 2));

  Vector x0 = Vector::Zero(nk + 2);
  x0(it) = 1.0;
  x0(ig) = -lambda_max_sym(S0 / f + a * Matrix::Identity(n, n) + Q * Q) - 1.0;
  const SdpResult res = solve_checked(sdp, x0, prob.tolerance);

  r.K = assemble_gain(prob, v, res.x, kappa);
  r.gamma = f * res.x(ig);
  r.tau = f * sigma * res.x(it);
  fill_report(r, res, f);
  if (prob.delay->spec) {
    r.closed_spectrum = delay_closed_loop(model, r.K, *prob.delay->spec).spectrum;
  } else {
    r.closed_spectrum = closed_loop(model, r.K).spectrum;
  }
  r.report.certificate_max_eig = lmi_max_eig(prob, r.P, r.K, r.gamma - 1e-6, r.tau, r.alpha);
  r.status = r.gamma > 0 && r.report.certificate_max_eig < 0 ? SynthesisStatus::kCertified
                                                             : SynthesisStatus::kNotCertified;
  return r;
}

std::size_t select_best(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidates to select from");
  double best = candidates.front().result.gamma;
  for (const auto& c : candidates) best = std::max(best, c.result.gamma);
  const double tie = 1e-6 * std::max(1.0, std::abs(best));
  std::size_t pick = candidates.size();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    if (best - c.result.gamma > tie) continue;
    if (pick == candidates.size()) {
      pick = k;
      continue;
    }
    const int hops = c.set.hop_count(), best_hops = candidates[pick].set.hop_count();
    if (hops < best_hops || (hops == best_hops && c.set.paths < candidates[pick].set.paths))
      pick = k;
  }
  return pick;
}

}  // namespace mgcomm
