#include "mgcomm/grid_model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "mgcomm/error.hpp"

namespace mgcomm {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kCanonical4Bus: return "canonical_4bus";
    case Provenance::kParametric: return "parametric";
    case Provenance::kChainExtended: return "chain_extended";
  }
  return "parametric";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "canonical_4bus") return Provenance::kCanonical4Bus;
  if (s == "parametric") return Provenance::kParametric;
  if (s == "chain_extended") return Provenance::kChainExtended;
  throw Error(ErrorCode::kParse, "unknown provenance '" + s + "'");
}

void GridParams::validate() const {
  if (n_buses < 1) throw Error(ErrorCode::kInvalidArgument, "n_buses must be positive");
  const auto n = static_cast<std::size_t>(n_buses);
  if (line_R.size() != n || line_L.size() != n || coupling_L.size() != n) {
    std::ostringstream os;
    os << "parameter lists must have n_buses = " << n_buses << " entries (line_R "
       << line_R.size() << ", line_L " << line_L.size() << ", coupling_L " << coupling_L.size()
       << ")";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(coupling_L[i] > 0) || !std::isfinite(coupling_L[i]))
      throw Error(ErrorCode::kInvalidArgument,
                  "coupling_L[" + std::to_string(i) + "] must be positive");
    if (!(line_R[i] >= 0) || !std::isfinite(line_R[i]))
      throw Error(ErrorCode::kInvalidArgument, "line_R[" + std::to_string(i) + "] must be >= 0");
    if (!(line_L[i] >= 0) || !std::isfinite(line_L[i]))
      throw Error(ErrorCode::kInvalidArgument, "line_L[" + std::to_string(i) + "] must be >= 0");
  }
}

GridParams GridParams::with_load(double load_R, double load_L) const {
  GridParams p = *this;
  p.line_R.back() = load_R;
  p.line_L.back() = load_L;
  return p;
}

void StateSpaceModel::validate() const {
  if (A.rows() != A.cols()) throw Error(ErrorCode::kDimension, "A must be square");
  if (B.rows() != A.rows()) throw Error(ErrorCode::kDimension, "B must have n rows");
  if (C.cols() != A.rows()) throw Error(ErrorCode::kDimension, "C must have n columns");
  if (!A.allFinite() || !B.allFinite() || !C.allFinite())
    throw Error(ErrorCode::kModel, "model matrices must be finite");
  if (!(time_scale > 0)) throw Error(ErrorCode::kModel, "time_scale must be positive");
}

DelaySpec DelaySpec::uniform(const SparsityMask& mask, double seconds) {
  if (!(seconds >= 0)) throw Error(ErrorCode::kInvalidArgument, "delay must be non-negative");
  DelaySpec d{Matrix::Zero(mask.rows(), mask.cols())};
  for (int i = 0; i < mask.rows(); ++i)
    for (int j = 0; j < mask.cols(); ++j)
      if (mask(i, j)) d.D(i, j) = seconds;
  return d;
}

double DelaySpec::max_delay() const { return D.size() == 0 ? 0.0 : D.maxCoeff(); }

StateSpaceModel four_bus_canonical() {
  StateSpaceModel m;
  m.A = Matrix(4, 4);
  m.A << 0.1759, 0.1768, 0.5110, 1.0360,
         -0.35, 0, 0, 0,
         -0.5442, -0.4748, -0.4088, -0.8288,
         -0.1197, -0.5546, -0.9688, -1.0775;
  m.B = Matrix(4, 4);
  m.B << 0.0008, 0.3342, 0.5251, -1.0360,
         -0.35, 0, 0, 0,
         -0.0693, -0.0661, -0.4201, -0.8288,
         -0.4349, -0.4142, -0.1087, -1.0775;
  m.A *= 1e3;
  m.B *= 1e3;
  m.C = Matrix::Identity(4, 4);
  m.provenance = Provenance::kCanonical4Bus;
  m.time_scale = 1000.0;
  m.open_loop_unstable = max_real(sorted_eigenvalues(m.A)) >= 0;
  return m;
}

std::pair<NodalMatrices, StateSpaceModel> build_from_params(const GridParams& p) {
  p.validate();
  const int n = p.n_buses;
  NodalMatrices nm;
  nm.T = Matrix::Zero(n, n);
  nm.T1 = Matrix::Zero(n, n);
  nm.T3 = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      nm.T(i, j) = p.line_L[i] / p.coupling_L[j];
      nm.T1(i, j) = -p.line_R[i] / p.coupling_L[j];
      nm.T3(i, j) = p.line_L[i] / p.coupling_L[j];
    }
    nm.T(i, i) += 1.0;
    if (i + 1 < n) nm.T(i, i + 1) = -1.0;
  }
  nm.T2 = -nm.T1;

  Eigen::FullPivLU<Matrix> lu(nm.T);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "T is singular for line_L/coupling_L ratios (line_L =";
    for (double v : p.line_L) os << ' ' << v;
    os << ", coupling_L =";
    for (double v : p.coupling_L) os << ' ' << v;
    os << ")";
    throw Error(ErrorCode::kModel, os.str());
  }
  nm.A_prime = lu.solve(nm.T1);
  nm.B_prime = lu.solve(nm.T2);
  nm.M_prime = lu.solve(nm.T3);

  StateSpaceModel m;
  m.A = nm.A_prime;
  m.B = nm.A_prime * nm.M_prime + nm.B_prime;
  m.C = Matrix::Identity(n, n);
  m.v_ref = p.v_ref;
  m.provenance = Provenance::kParametric;
  m.open_loop_unstable = max_real(sorted_eigenvalues(m.A)) >= 0;
  return {nm, m};
}

StateSpaceModel chain_extend(int n, const GridParams& tmpl) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "chain_extend needs n >= 2");
  tmpl.validate();
  if (tmpl.n_buses < 2)
    throw Error(ErrorCode::kInvalidArgument, "template needs at least one line branch");
  const int lines = tmpl.n_buses - 1;
  GridParams p;
  p.n_buses = n;
  p.v_ref = tmpl.v_ref;
  for (int i = 0; i < n - 1; ++i) {
    p.line_R.push_back(tmpl.line_R[i % lines]);
    p.line_L.push_back(tmpl.line_L[i % lines]);
  }
  p.line_R.push_back(tmpl.line_R.back());
  p.line_L.push_back(tmpl.line_L.back());
  for (int i = 0; i < n; ++i) p.coupling_L.push_back(tmpl.coupling_L[i % tmpl.n_buses]);
  StateSpaceModel m = build_from_params(p).second;
  m.provenance = Provenance::kChainExtended;
  return m;
}

namespace {

void check_gain(const StateSpaceModel& model, const Matrix& K) {
  if (K.rows() != model.m() || K.cols() != model.p()) {
    std::ostringstream os;
    os << "K must be " << model.m() << "x" << model.p() << ", got " << K.rows() << "x"
       << K.cols();
    throw Error(ErrorCode::kDimension, os.str());
  }
  if (!K.allFinite()) throw Error(ErrorCode::kInvalidArgument, "K has non-finite entries");
}

}  // namespace

LoopMatrix closed_loop(const StateSpaceModel& model, const Matrix& K) {
  check_gain(model, K);
  LoopMatrix out;
  out.matrix = model.A + model.B * K * model.C;
  out.spectrum = sorted_eigenvalues(out.matrix);
  return out;
}

LoopMatrix delay_closed_loop(const StateSpaceModel& model, const Matrix& K,
                             const DelaySpec& delay) {
  check_gain(model, K);
  if (delay.D.rows() != K.rows() || delay.D.cols() != K.cols())
    throw Error(ErrorCode::kDimension, "D must have the shape of K");
  if ((delay.D.array() < 0).any()) throw Error(ErrorCode::kInvalidArgument, "negative delay");
  if ((delay.D.array() == 0).all()) return closed_loop(model, K);
  // Per-link delays scale the gain entries they sit on.
  const Matrix DK = delay.D.cwiseProduct(K);
  const int n = model.n();
  LoopMatrix out;
  out.matrix = (model.A + model.B * K * model.C) *
               (Matrix::Identity(n, n) - model.B * DK * model.C);
  out.spectrum = sorted_eigenvalues(out.matrix);
  return out;
}

}  // namespace mgcomm
