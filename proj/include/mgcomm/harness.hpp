#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgcomm/linalg.hpp"
#include "mgcomm/mask.hpp"
#include "mgcomm/topology.hpp"

namespace mgcomm {

struct TableRow {
  std::string label;
  double open_max_eig = 0.0;
  double closed_max_eig = 0.0;
  std::string parameter;
  double gamma = 0.0;
  std::optional<double> reference_closed_max_eig;
};

struct PolicyMetrics {
  std::string policy;
  double peak_power = 0.0;
  double unconstrained_peak = 0.0;
  double completion_deadline_ratio = 0.0;
  std::vector<int> missed;
};

struct ScenarioReport {
  std::string id;
  std::string title;
  std::string provenance;
  SparsityMask topology;
  std::vector<Path> paths;
  Matrix K;
  double gamma = 0.0;
  Spectrum open_spectrum;
  Spectrum closed_spectrum;
  std::optional<Matrix> reference_K;
  Spectrum reference_spectrum;
  std::vector<TableRow> table;
  std::vector<PolicyMetrics> scheduling;
  std::map<std::string, double> values;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  double runtime_ms = 0.0;  // emitted only on request, so reports stay reproducible

  double max_closed_eig() const { return closed_spectrum.empty() ? 0.0 : max_real(closed_spectrum); }
};

struct ScenarioOptions {
  std::uint64_t seed = 20160415;
  double tolerance = 0.1;  // eigenvalue tolerance of the zone design
  int threads = 0;
};

const std::vector<std::string>& scenario_ids();

ScenarioReport run_scenario(const std::string& id, const ScenarioOptions& options = {});

// Runs several scenarios, concurrently when parallel is set; output order
// follows ids.
std::vector<ScenarioReport> run_scenarios(const std::vector<std::string>& ids,
                                          const ScenarioOptions& options, bool parallel);

enum class ReportFormat { kJson, kCsv };

ReportFormat report_format_from_string(const std::string& s);

std::string emit(const ScenarioReport& report, ReportFormat format, bool include_runtime = false);
ScenarioReport parse_report(const std::string& json);

}  // namespace mgcomm
