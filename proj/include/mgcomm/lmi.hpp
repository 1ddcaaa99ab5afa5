#pragma once

#include <vector>

#include "mgcomm/linalg.hpp"

namespace mgcomm {

// Affine symmetric matrix function F(x) = F0 + sum_i x_i F_i, constrained
// to be positive definite. Empty coefficient matrices stand for zero.
struct LmiBlock {
  Matrix F0;
  std::vector<Matrix> F;

  Matrix evaluate(const Vector& x) const;
};

// maximize c'x subject to every block being positive definite.
struct SdpProblem {
  Vector c;
  std::vector<LmiBlock> blocks;

  int num_vars() const { return static_cast<int>(c.size()); }
};

struct SdpOptions {
  double relative_gap = 1e-8;
  double absolute_gap = 1e-12;
  double barrier_growth = 10.0;
  int max_newton_steps = 4000;
};

struct SdpResult {
  Vector x;
  double objective = 0.0;
  double gap = 0.0;  // bound on optimal minus achieved objective
  int newton_steps = 0;
  int outer_iterations = 0;
  bool converged = false;
};

// Log-barrier path following from a strictly feasible x0.
SdpResult solve_sdp(const SdpProblem& problem, const Vector& x0, const SdpOptions& options = {});

}  // namespace mgcomm
