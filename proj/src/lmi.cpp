#include "mgcomm/lmi.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "mgcomm/error.hpp"

namespace mgcomm {

Matrix LmiBlock::evaluate(const Vector& x) const {
  Matrix F = F0;
  for (std::size_t i = 0; i < this->F.size(); ++i)
    if (this->F[i].size() != 0 && x(i) != 0.0) F.noalias() += x(i) * this->F[i];
  return F;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -sum log det F_k(x), or +inf outside the interior.
double barrier(const SdpProblem& prob, const Vector& x) {
  double value = 0.0;
  for (const auto& block : prob.blocks) {
    Eigen::LLT<Matrix> llt(block.evaluate(x));
    if (llt.info() != Eigen::Success) return kInf;
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index k = 0; k < diag.size(); ++k) {
      if (!(diag(k) > 0)) return kInf;
      value -= 2.0 * std::log(diag(k));
    }
  }
  return std::isfinite(value) ? value : kInf;
}

struct Derivatives {
  Vector grad;
  Matrix hess;
};

Derivatives barrier_derivatives(const SdpProblem& prob, const Vector& x) {
  const int n = prob.num_vars();
  Derivatives d{Vector::Zero(n), Matrix::Zero(n, n)};
  for (const auto& block : prob.blocks) {
    Eigen::LLT<Matrix> llt(block.evaluate(x));
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::kNumerical, "barrier iterate left the feasible set");
    const Matrix L = llt.matrixL();
    std::vector<int> active;
    std::vector<Matrix> Z(n);
    for (int i = 0; i < n; ++i) {
      if (i >= static_cast<int>(block.F.size()) || block.F[i].size() == 0) continue;
      Matrix W = L.triangularView<Eigen::Lower>().solve(block.F[i]);
      Z[i] = L.triangularView<Eigen::Lower>().solve(W.transpose());
      active.push_back(i);
      d.grad(i) -= Z[i].trace();
    }
    for (std::size_t a = 0; a < active.size(); ++a)
      for (std::size_t b = a; b < active.size(); ++b) {
        const int i = active[a], j = active[b];
        const double h = Z[i].cwiseProduct(Z[j].transpose()).sum();
        d.hess(i, j) += h;
        if (i != j) d.hess(j, i) += h;
      }
  }
  return d;
}

}  // namespace

SdpResult solve_sdp(const SdpProblem& prob, const Vector& x0, const SdpOptions& opt) {
  const int n = prob.num_vars();
  if (x0.size() != n) throw Error(ErrorCode::kDimension, "start point has wrong size");
  for (const auto& block : prob.blocks) {
    if (block.F0.rows() != block.F0.cols())
      throw Error(ErrorCode::kDimension, "LMI blocks must be square");
    if (static_cast<int>(block.F.size()) > n)
      throw Error(ErrorCode::kDimension, "LMI block has more coefficients than variables");
  }
  if (!std::isfinite(barrier(prob, x0)))
    throw Error(ErrorCode::kInvalidArgument, "start point is not strictly feasible");

  double total_dim = 0.0;
  for (const auto& block : prob.blocks) total_dim += static_cast<double>(block.F0.rows());

  SdpResult res;
  res.x = x0;
  double t = 1.0;
  while (true) {
    ++res.outer_iterations;
    // Centering: minimize -t c'x + barrier(x).
    auto f = [&](const Vector& x) {
      const double b = barrier(prob, x);
      return std::isfinite(b) ? -t * prob.c.dot(x) + b : kInf;
    };
    double fx = f(res.x);
    while (true) {
      if (res.newton_steps >= opt.max_newton_steps) {
        res.objective = prob.c.dot(res.x);
        res.gap = total_dim / t;
        res.converged = false;
        return res;
      }
      ++res.newton_steps;
      Derivatives d = barrier_derivatives(prob, res.x);
      const Vector g = -t * prob.c + d.grad;
      Eigen::LDLT<Matrix> ldlt(d.hess);
      Vector dx = -ldlt.solve(g);
      if (ldlt.info() != Eigen::Success || !dx.allFinite()) {
        const double shift = 1e-12 * std::max(1.0, d.hess.diagonal().cwiseAbs().maxCoeff());
        d.hess.diagonal().array() += shift;
        dx = -d.hess.ldlt().solve(g);
      }
      const double decrement = -g.dot(dx);
      if (!(decrement > 2e-10)) break;
      double s = 1.0;
      double fn = f(res.x + s * dx);
      int halvings = 0;
      while ((!std::isfinite(fn) || fn > fx - 0.25 * s * decrement) && halvings < 80) {
        s *= 0.5;
        fn = f(res.x + s * dx);
        ++halvings;
      }
      if (!std::isfinite(fn) || fn >= fx) break;
      res.x += s * dx;
      fx = fn;
    }
    res.objective = prob.c.dot(res.x);
    res.gap = total_dim / t;
    const double target = std::max(opt.absolute_gap,
                                   opt.relative_gap * std::max(1.0, std::abs(res.objective)));
    if (res.gap <= target) {
      res.converged = true;
      return res;
    }
    t *= opt.barrier_growth;
  }
}

}  // namespace mgcomm
