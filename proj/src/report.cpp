#include <limits>

#include "json.hpp"
#include "mgcomm/error.hpp"
#include "mgcomm/harness.hpp"
#include "text.hpp"

namespace mgcomm {

using ojson = nlohmann::ordered_json;

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown format '" + s + "' (expected json or csv)");
}

namespace {

ojson spectrum_json(const Spectrum& s) {
  ojson out = ojson::array();
  for (const auto& z : s) out.push_back({z.real(), z.imag()});
  return out;
}

double number(const ojson& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Spectrum spectrum_from(const ojson& j) {
  Spectrum s;
  for (const auto& z : j) s.emplace_back(number(z.at(0)), number(z.at(1)));
  return s;
}

Matrix matrix_from(const ojson& j) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    std::vector<double> row;
    for (const auto& v : r) row.push_back(number(v));
    rows.push_back(row);
  }
  return matrix_from_rows(rows);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string emit_json(const ScenarioReport& r, bool include_runtime) {
  ojson j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["provenance"] = r.provenance;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  j["gamma"] = r.gamma;
  j["max_closed_eig"] = r.max_closed_eig();
  j["topology"] = r.topology.to_rows();
  j["paths"] = r.paths;
  j["K"] = matrix_to_rows(r.K);
  j["open_spectrum"] = spectrum_json(r.open_spectrum);
  j["closed_spectrum"] = spectrum_json(r.closed_spectrum);
  j["reference_K"] = r.reference_K ? ojson(matrix_to_rows(*r.reference_K)) : ojson(nullptr);
  j["reference_spectrum"] = spectrum_json(r.reference_spectrum);
  ojson table = ojson::array();
  for (const auto& row : r.table) {
    ojson e;
    e["label"] = row.label;
    e["open_max_eig"] = row.open_max_eig;
    e["closed_max_eig"] = row.closed_max_eig;
    e["parameter"] = row.parameter;
    e["gamma"] = row.gamma;
    e["reference_closed_max_eig"] =
        row.reference_closed_max_eig ? ojson(*row.reference_closed_max_eig) : ojson(nullptr);
    table.push_back(e);
  }
  j["table"] = table;
  ojson sched = ojson::array();
  for (const auto& p : r.scheduling) {
    ojson e;
    e["policy"] = p.policy;
    e["peak_power"] = p.peak_power;
    e["unconstrained_peak"] = p.unconstrained_peak;
    e["completion_deadline_ratio"] = p.completion_deadline_ratio;
    e["missed"] = p.missed;
    sched.push_back(e);
  }
  j["scheduling"] = sched;
  ojson values = ojson::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  j["values"] = values;
  if (include_runtime) j["runtime_ms"] = r.runtime_ms;
  return j.dump(2) + "\n";
}

std::string emit_csv(const ScenarioReport& r) {
  std::string out = "label,open_max_eig,closed_max_eig,parameter,gamma\n";
  for (const auto& row : r.table)
    out += csv_field(row.label) + "," + text::number(row.open_max_eig) + "," +
           text::number(row.closed_max_eig) + "," + csv_field(row.parameter) + "," +
           text::number(row.gamma) + "\n";
  return out;
}

}  // namespace

std::string emit(const ScenarioReport& report, ReportFormat format, bool include_runtime) {
  return format == ReportFormat::kJson ? emit_json(report, include_runtime) : emit_csv(report);
}

ScenarioReport parse_report(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report: ") + e.what());
  }
  try {
    ScenarioReport r;
    r.id = j.at("id").get<std::string>();
    r.title = j.value("title", std::string());
    r.provenance = j.value("provenance", std::string());
    r.seed = j.value("seed", std::uint64_t{0});
    r.tolerance = j.value("tolerance", 0.0);
    r.gamma = number(j.at("gamma"));
    r.topology = SparsityMask::from_rows(j.at("topology").get<std::vector<std::vector<int>>>());
    r.paths = j.at("paths").get<std::vector<Path>>();
    r.K = matrix_from(j.at("K"));
    r.open_spectrum = spectrum_from(j.at("open_spectrum"));
    r.closed_spectrum = spectrum_from(j.at("closed_spectrum"));
    if (!j.at("reference_K").is_null()) r.reference_K = matrix_from(j.at("reference_K"));
    r.reference_spectrum = spectrum_from(j.at("reference_spectrum"));
    for (const auto& e : j.at("table")) {
      TableRow row;
      row.label = e.at("label").get<std::string>();
      row.open_max_eig = number(e.at("open_max_eig"));
      row.closed_max_eig = number(e.at("closed_max_eig"));
      row.parameter = e.at("parameter").get<std::string>();
      row.gamma = number(e.at("gamma"));
      if (!e.at("reference_closed_max_eig").is_null())
        row.reference_closed_max_eig = number(e.at("reference_closed_max_eig"));
      r.table.push_back(row);
    }
    for (const auto& e : j.at("scheduling")) {
      PolicyMetrics p;
      p.policy = e.at("policy").get<std::string>();
      p.peak_power = number(e.at("peak_power"));
      p.unconstrained_peak = number(e.at("unconstrained_peak"));
      p.completion_deadline_ratio = number(e.at("completion_deadline_ratio"));
      p.missed = e.at("missed").get<std::vector<int>>();
      r.scheduling.push_back(p);
    }
    for (const auto& [k, v] : j.at("values").items()) r.values[k] = number(v);
    if (j.contains("runtime_ms")) r.runtime_ms = number(j.at("runtime_ms"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report: ") + e.what());
  }
}

}  // namespace mgcomm
