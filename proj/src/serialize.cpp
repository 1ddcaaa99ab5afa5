#include "mgcomm/serialize.hpp"

#include "json.hpp"
#include "mgcomm/error.hpp"
#include "text.hpp"

namespace mgcomm {

using ojson = nlohmann::ordered_json;

namespace {

nlohmann::json parse(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, what + ": " + e.what());
  }
}

template <typename T>
T field(const nlohmann::json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw Error(ErrorCode::kParse, what + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, what + ": bad '" + key + "': " + e.what());
  }
}

Matrix matrix_from(const nlohmann::json& j, const std::string& what) {
  try {
    return matrix_from_rows(j.get<std::vector<std::vector<double>>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, what + ": expected nested numeric rows: " + e.what());
  }
}

ojson rows(const Matrix& m) { return matrix_to_rows(m); }

ojson spectrum_json(const Spectrum& s) {
  ojson out = ojson::array();
  for (const auto& z : s) out.push_back({z.real(), z.imag()});
  return out;
}

int bound(const nlohmann::json& j, const char* key, int fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_null() || (v.is_string() && (v == "inf" || v == "unbounded"))) return kUnbounded;
  if (!v.is_number_integer()) throw Error(ErrorCode::kParse, what + ": '" + key + "' must be an integer");
  return v.get<int>();
}

}  // namespace

GridParams grid_params_from_json(const std::string& text) {
  const auto j = parse(text, "grid parameters");
  const std::string what = "grid parameters";
  GridParams p;
  p.line_R = field<std::vector<double>>(j, "line_R", what);
  p.line_L = field<std::vector<double>>(j, "line_L", what);
  p.coupling_L = field<std::vector<double>>(j, "coupling_L", what);
  p.v_ref = j.value("v_ref", 1.0);
  // The load branch may be given separately.
  if (j.contains("load_R") || j.contains("load_L")) {
    p.line_R.push_back(field<double>(j, "load_R", what));
    p.line_L.push_back(field<double>(j, "load_L", what));
  }
  p.n_buses = j.value("n_buses", static_cast<int>(p.line_R.size()));
  p.validate();
  return p;
}

std::string grid_params_to_json(const GridParams& p) {
  ojson j;
  j["n_buses"] = p.n_buses;
  j["line_R"] = p.line_R;
  j["line_L"] = p.line_L;
  j["coupling_L"] = p.coupling_L;
  j["v_ref"] = p.v_ref;
  return j.dump(2);
}

std::string model_to_json(const StateSpaceModel& m) {
  ojson j;
  j["provenance"] = to_string(m.provenance);
  j["time_scale"] = m.time_scale;
  j["v_ref"] = m.v_ref;
  j["open_loop_unstable"] = m.open_loop_unstable;
  j["A"] = rows(m.A);
  j["B"] = rows(m.B);
  j["C"] = rows(m.C);
  j["open_spectrum"] = spectrum_json(sorted_eigenvalues(m.A));
  return j.dump(2);
}

StateSpaceModel model_from_json(const std::string& text) {
  const auto j = parse(text, "model");
  StateSpaceModel m;
  m.A = matrix_from(j.at("A"), "model A");
  m.B = j.contains("B") ? matrix_from(j.at("B"), "model B") : Matrix::Identity(m.A.rows(), m.A.cols());
  m.C = j.contains("C") ? matrix_from(j.at("C"), "model C") : Matrix::Identity(m.A.rows(), m.A.cols());
  m.v_ref = j.value("v_ref", 1.0);
  m.time_scale = j.value("time_scale", 1.0);
  m.provenance = provenance_from_string(j.value("provenance", std::string("parametric")));
  m.validate();
  m.open_loop_unstable = max_real(sorted_eigenvalues(m.A)) >= 0;
  return m;
}

LayeredNetwork network_from_json(const std::string& text) {
  const auto j = parse(text, "network");
  LayeredNetwork net;
  for (const auto& l : j.at("layers")) net.layers.push_back({l.value("name", std::string()), l.at("size").get<int>()});
  if (j.contains("adjacency"))
    net.adjacency = j.at("adjacency").get<std::vector<std::vector<std::vector<int>>>>();
  if (!net.adjacency.empty()) net.validate();
  return net;
}

ConstraintSet constraints_from_json(const std::string& text) {
  auto j = parse(text, "constraints");
  if (j.contains("constraints")) j = j.at("constraints");
  const std::string what = "constraints";
  ConstraintSet cs;
  cs.bwc = bound(j, "bwc", cs.bwc, what);
  cs.cc = bound(j, "cc", cs.cc, what);
  cs.cnc = bound(j, "cnc", cs.cnc, what);
  cs.prc = bound(j, "prc", cs.prc, what);
  cs.constrained_layer = j.value("constrained_layer", 0);
  if (j.contains("user_requirement"))
    cs.user_requirement = j.at("user_requirement").get<std::vector<int>>();
  cs.validate();
  return cs;
}

std::string constraints_to_json(const ConstraintSet& cs) {
  auto b = [](int v) -> ojson { return v == kUnbounded ? ojson("unbounded") : ojson(v); };
  ojson j;
  j["bwc"] = b(cs.bwc);
  j["cc"] = b(cs.cc);
  j["cnc"] = b(cs.cnc);
  j["prc"] = b(cs.prc);
  j["constrained_layer"] = cs.constrained_layer;
  j["user_requirement"] = cs.user_requirement;
  return j.dump(2);
}

std::string paths_to_json(const std::vector<Path>& paths) {
  ojson arr = ojson::array();
  for (const auto& p : paths) arr.push_back({{"nodes", p}, {"code", path_code(p)}});
  return arr.dump(2);
}

std::string sets_to_json(const std::vector<ConnectionSet>& sets) {
  ojson arr = ojson::array();
  for (const auto& s : sets) {
    ojson e;
    e["paths"] = s.paths;
    e["hop_count"] = s.hop_count();
    arr.push_back(e);
  }
  return arr.dump(2);
}

std::string synthesis_to_json(const SynthesisResult& r) {
  ojson j;
  j["K"] = rows(r.K);
  j["gamma"] = r.gamma;
  j["status"] = to_string(r.status);
  j["spectrum"] = spectrum_json(r.closed_spectrum);
  j["max_real_eig"] = r.max_real_eig();
  j["alpha"] = r.alpha;
  j["tau"] = r.tau;
  j["P"] = rows(r.P);
  ojson s;
  s["newton_steps"] = r.report.newton_steps;
  s["outer_iterations"] = r.report.outer_iterations;
  s["gap"] = r.report.gap;
  s["relative_gap"] = r.report.relative_gap;
  s["certificate_max_eig"] = r.report.certificate_max_eig;
  s["lyapunov_residual"] = r.report.residual;
  s["converged"] = r.report.converged;
  j["solver_report"] = s;
  return j.dump(2);
}

Matrix matrix_from_json(const std::string& text) {
  auto j = parse(text, "matrix");
  if (j.is_object() && j.contains("K")) j = j.at("K");
  return matrix_from(j, "matrix");
}

std::string matrix_to_json(const Matrix& m) { return rows(m).dump(); }

Matrix matrix_from_csv(const std::string& csv) {
  std::vector<std::vector<double>> out;
  for (const auto& line : text::lines(csv)) {
    std::vector<double> row;
    for (const auto& f : text::split(line, ',')) row.push_back(text::parse_double(f, "matrix entry"));
    out.push_back(row);
  }
  if (out.empty()) throw Error(ErrorCode::kParse, "matrix CSV is empty");
  return matrix_from_rows(out);
}

}  // namespace mgcomm
