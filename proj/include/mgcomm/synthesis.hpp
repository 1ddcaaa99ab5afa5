#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgcomm/grid_model.hpp"
#include "mgcomm/mask.hpp"
#include "mgcomm/topology.hpp"

namespace mgcomm {

// How the gain bound rho enters the program.
enum class NormBound {
  kSquared,   // K'K <= rho I, i.e. ||K||_2 <= sqrt(rho)
  kSpectral,  // ||K||_2 <= rho
};

std::string to_string(NormBound b);
NormBound norm_bound_from_string(const std::string& s);

struct DelayBound {
  std::optional<double> alpha;
  std::optional<DelaySpec> spec;
};

struct SynthesisProblem {
  StateSpaceModel model;
  SparsityMask mask;
  double beta = 5000.0;
  double rho = 5.0;
  NormBound norm = NormBound::kSquared;
  std::optional<DelayBound> delay;
  double tolerance = 1e-8;  // relative duality gap of the barrier solver
};

enum class SynthesisStatus {
  kCertified,     // gamma > 0: the Lyapunov inequality holds with margin
  kNotCertified,  // optimum found but gamma <= 0
};

std::string to_string(SynthesisStatus s);

struct SolverReport {
  int newton_steps = 0;
  int outer_iterations = 0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double certificate_max_eig = 0.0;  // lambda_max of the LMI at gamma - 1e-6
  double residual = 0.0;             // Lyapunov residual of P
  bool converged = false;
};

struct SynthesisResult {
  Matrix K;
  double gamma = 0.0;
  Matrix P;
  Spectrum closed_spectrum;
  double alpha = 0.0;  // delay bound used, 0 for the delay-free program
  double tau = 0.0;    // S-procedure multiplier of the delay program
  SynthesisStatus status = SynthesisStatus::kNotCertified;
  SolverReport report;

  double max_real_eig() const { return max_real(closed_spectrum); }
};

// Solves (A - beta I) P + P (A - beta I)' = -I.
Matrix lyapunov_P(const Matrix& A, double beta);
double lyapunov_residual(const Matrix& A, double beta, const Matrix& P);

// The Lyapunov matrix used by the synthesis programs: P of the model in its
// own time unit.
Matrix synthesis_P(const StateSpaceModel& model, double beta);

// sym(A'P + PA + (BKC)'P + PBKC).
Matrix lyapunov_derivative(const StateSpaceModel& model, const Matrix& P, const Matrix& K);

SynthesisResult max_gamma(const SynthesisProblem& prob);

double alpha_bound(const Matrix& A, const Matrix& B, double c_K);

SynthesisResult max_gamma_delay(const SynthesisProblem& prob);

// Largest eigenvalue of the program's LMI at (K, gamma); negative means the
// pair is certified.
double lmi_max_eig(const SynthesisProblem& prob, const Matrix& P, const Matrix& K, double gamma,
                   double tau = 0.0, double alpha = 0.0);

struct Candidate {
  ConnectionSet set;
  SynthesisResult result;
};

std::size_t select_best(const std::vector<Candidate>& candidates);

// Zone design over a constraint grid.
struct ConfigurationResult {
  ConstraintSet constraints;
  std::size_t num_masks = 0;
  SparsityMask mask;
  SynthesisResult result;
};

struct ZoneChoice {
  ConstraintSet constraints;
  SparsityMask mask;
  SynthesisResult result;
  bool meets_tolerance = false;  // chosen loop is stable with a numerical margin
  double target_max_eig = 0.0;
  std::vector<ConfigurationResult> evaluated;
};

struct ZoneDesignOptions {
  double beta = 5000.0;
  double rho = 5.0;
  NormBound norm = NormBound::kSpectral;
  std::optional<double> delay_seconds;  // uniform delay on active links
  std::vector<std::pair<int, int>> failed_links;  // (controller, sensor)
  int threads = 0;  // 0 picks the hardware concurrency
};

std::vector<ConstraintSet> default_constraint_grid(int n);

std::vector<ZoneChoice> zone_design(const std::vector<StateSpaceModel>& zones,
                                    const std::vector<ConstraintSet>& grid,
                                    const std::vector<double>& epsilons,
                                    const ZoneDesignOptions& options = {});

}  // namespace mgcomm
