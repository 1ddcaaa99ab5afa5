#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mgcomm/linalg.hpp"
#include "mgcomm/mask.hpp"

namespace mgcomm {

enum class Provenance { kCanonical4Bus, kParametric, kChainExtended };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// Circuit parameters of a radial feeder. The last branch (index n-1) is the
// load branch; its R and L change with the amount of load.
struct GridParams {
  int n_buses = 0;
  std::vector<double> line_R;
  std::vector<double> line_L;
  std::vector<double> coupling_L;
  double v_ref = 1.0;

  void validate() const;

  // Copy with the load branch replaced.
  GridParams with_load(double load_R, double load_L) const;
};

struct StateSpaceModel {
  Matrix A;
  Matrix B;
  Matrix C;
  double v_ref = 1.0;
  Provenance provenance = Provenance::kParametric;
  // Time unit of the model; the canonical fixture is tabulated in
  // milliseconds-scaled form and uses 1000.
  double time_scale = 1.0;
  bool open_loop_unstable = false;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }

  void validate() const;
};

struct NodalMatrices {
  Matrix T;
  Matrix T1;
  Matrix T2;
  Matrix T3;
  Matrix A_prime;
  Matrix B_prime;
  Matrix M_prime;
};

// Per-link sensor-to-controller delays in seconds, shaped like K (m x p).
struct DelaySpec {
  Matrix D;

  static DelaySpec uniform(const SparsityMask& mask, double seconds);
  double max_delay() const;
};

struct LoopMatrix {
  Matrix matrix;
  Spectrum spectrum;

  double max_real_eig() const { return max_real(spectrum); }
};

StateSpaceModel four_bus_canonical();

std::pair<NodalMatrices, StateSpaceModel> build_from_params(const GridParams& p);

StateSpaceModel chain_extend(int n, const GridParams& tmpl);

LoopMatrix closed_loop(const StateSpaceModel& model, const Matrix& K);

LoopMatrix delay_closed_loop(const StateSpaceModel& model, const Matrix& K,
                             const DelaySpec& delay);

}  // namespace mgcomm
