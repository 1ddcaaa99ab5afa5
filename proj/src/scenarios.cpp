#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include "mgcomm/error.hpp"
#include "mgcomm/fixtures.hpp"
#include "mgcomm/harness.hpp"
#include "mgcomm/scheduler.hpp"
#include "mgcomm/synthesis.hpp"

namespace mgcomm {

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids{
      "ch2-s1", "ch2-s2", "ch2-s3", "ch4-load", "ch4-delay", "ch4-nodefail", "ch5-s1",
      "ch5-s2", "ch5-s3", "ch5-s4", "ch5-13bus", "ch5-delay"};
  return ids;
}

namespace {

constexpr double kBeta = 5000.0;
constexpr double kRho = 5.0;

SparsityMask support(const Matrix& K) {
  SparsityMask m(static_cast<int>(K.rows()), static_cast<int>(K.cols()));
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j)
      if (K(i, j) != 0.0) m.set(i, j);
  return m;
}

SynthesisResult synthesize(const StateSpaceModel& model, const SparsityMask& mask,
                           double rho = kRho) {
  SynthesisProblem p;
  p.model = model;
  p.mask = mask;
  p.beta = kBeta;
  p.rho = rho;
  p.norm = NormBound::kSquared;
  return max_gamma(p);
}

void fill_result(ScenarioReport& r, const StateSpaceModel& model, const SparsityMask& mask,
                 const SynthesisResult& res) {
  r.provenance = to_string(model.provenance);
  r.topology = mask;
  r.K = res.K;
  r.gamma = res.gamma;
  r.open_spectrum = sorted_eigenvalues(model.A);
  r.closed_spectrum = res.closed_spectrum;
  r.values["certificate_max_eig"] = res.report.certificate_max_eig;
  r.values["lyapunov_residual"] = res.report.residual;
}

void add_reference(ScenarioReport& r, const StateSpaceModel& model, const std::string& key) {
  const Matrix K = fixtures::published_gain(key);
  r.reference_K = K;
  r.reference_spectrum = closed_loop(model, K).spectrum;
  r.values["published_gamma"] = fixtures::published_gamma(key);
  r.values["published_max_eig"] = fixtures::published_max_eig(key);
  r.values["reference_max_eig"] = max_real(r.reference_spectrum);
}

void summary_row(ScenarioReport& r, const std::string& parameter = {}) {
  TableRow row;
  row.label = r.id;
  row.open_max_eig = max_real(r.open_spectrum);
  row.closed_max_eig = r.max_closed_eig();
  row.parameter = parameter;
  row.gamma = r.gamma;
  if (r.values.count("published_max_eig")) row.reference_closed_max_eig = r.values["published_max_eig"];
  r.table.push_back(row);
}

// Synthesizes every candidate set once per distinct mask.
std::vector<Candidate> evaluate_sets(const StateSpaceModel& model,
                                     const std::vector<ConnectionSet>& sets, int nc, int ns) {
  std::map<SparsityMask, SynthesisResult> cache;
  std::vector<Candidate> out;
  for (const auto& s : sets) {
    const SparsityMask mask = mask_from_set(s, nc, ns);
    auto it = cache.find(mask);
    if (it == cache.end()) it = cache.emplace(mask, synthesize(model, mask)).first;
    out.push_back({s, it->second});
  }
  return out;
}

// Scheduling is shared by every scenario that carries a task set: loads are
// split by the chosen mask and each controller runs its own capped scheduler.
std::vector<PolicyMetrics> schedule_over(const SparsityMask& mask, std::uint64_t seed,
                                         std::map<std::string, double>& values) {
  TaskGeneratorOptions gen;
  gen.count = 10 * mask.cols();
  gen.regions = mask.cols();
  const TaskSet tasks = generate_tasks(seed, gen);
  int horizon = 0, work = 0;
  for (const auto& t : tasks) {
    horizon = std::max(horizon, t.d);
    work += t.c;
  }
  horizon += work;
  const auto free_run = unconstrained_profile(tasks, horizon);
  const double free_peak = *std::max_element(free_run.begin(), free_run.end());
  const double capacity = 0.6 * free_peak;
  values["schedule_capacity"] = capacity;
  values["schedule_tasks"] = static_cast<double>(tasks.size());

  const LoadDistribution dist = distribute_loads(mask, tasks, capacity);
  values["schedule_unservable"] = static_cast<double>(dist.unservable.size());

  std::vector<PolicyMetrics> out;
  for (Policy policy : {Policy::kEdf, Policy::kLlf, Policy::kDrp}) {
    std::vector<double> power(horizon, 0.0);
    int on_time = 0;
    PolicyMetrics pm;
    pm.policy = to_string(policy);
    pm.unconstrained_peak = free_peak;
    for (const auto& load : dist.controllers) {
      if (load.tasks.empty()) continue;
      const ScheduleTrace trace = run(load.tasks, load.capacity, horizon, policy);
      for (const auto& s : trace.slots) power[s.slot] += s.power;
      const ScheduleMetrics m = metrics(trace);
      on_time += static_cast<int>(load.tasks.size() - m.missed.size());
      pm.missed.insert(pm.missed.end(), m.missed.begin(), m.missed.end());
    }
    pm.missed.insert(pm.missed.end(), dist.unservable.begin(), dist.unservable.end());
    std::sort(pm.missed.begin(), pm.missed.end());
    pm.peak_power = *std::max_element(power.begin(), power.end());
    pm.completion_deadline_ratio = tasks.empty() ? 1.0 : static_cast<double>(on_time) / tasks.size();
    out.push_back(pm);
  }
  return out;
}

ScenarioReport ch2_s1(const ScenarioOptions&) {
  ScenarioReport r;
  r.title = "Published baseline gain on the canonical 4-bus model";
  const auto model = four_bus_canonical();
  const SparsityMask mask = support(fixtures::published_gain("ch2_s1"));
  fill_result(r, model, mask, synthesize(model, mask));
  add_reference(r, model, "ch2_s1");
  summary_row(r);
  return r;
}

ScenarioReport ch2_s2(const ScenarioOptions&) {
  ScenarioReport r;
  r.title = "Reliability-driven connection design on the 4-bus relay network";
  const auto model = four_bus_canonical();
  const auto fx = fixtures::ch2_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  const auto filtered = bandwidth_filter(paths, fx.net, fx.constraints);
  const auto sets = complete_sets(filtered, fx.net, fx.constraints, Objective::kReliability);
  const int nc = fx.net.num_controllers(), ns = fx.net.num_sensors();
  const auto cands = evaluate_sets(model, sets, nc, ns);
  const auto& best = cands.at(select_best(cands));
  fill_result(r, model, mask_from_set(best.set, nc, ns), best.result);
  r.paths = best.set.paths;
  r.values["paths"] = static_cast<double>(paths.size());
  r.values["filtered_paths"] = static_cast<double>(filtered.size());
  r.values["complete_sets"] = static_cast<double>(sets.size());
  add_reference(r, model, "ch2_s2");
  r.values["reference_mask_gamma"] = synthesize(model, support(*r.reference_K)).gamma;
  summary_row(r, fx.constraints.parameter());
  return r;
}

ScenarioReport ch2_s3(const ScenarioOptions&) {
  ScenarioReport r;
  r.title = "Cost-driven connection design on the 4-bus relay network";
  const auto model = four_bus_canonical();
  const auto fx = fixtures::ch2_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  const auto filtered = bandwidth_filter(paths, fx.net, fx.constraints);
  const auto sets = complete_sets(filtered, fx.net, fx.constraints, Objective::kCost);
  if (sets.empty()) throw Error(ErrorCode::kInfeasible, "no connection set meets the cost rules");
  const int nc = fx.net.num_controllers(), ns = fx.net.num_sensors();

  // Walk the sets from the cheapest (fewest connections) upwards and stop at
  // the first group that stabilizes.
  std::vector<Candidate> group, seen;
  std::optional<Candidate> accepted;
  int groups = 0;
  for (std::size_t k = 0; k < sets.size();) {
    std::size_t e = k;
    while (e < sets.size() && sets[e].paths.size() == sets[k].paths.size()) ++e;
    std::vector<ConnectionSet> slice(sets.begin() + k, sets.begin() + e);
    group = evaluate_sets(model, slice, nc, ns);
    seen.insert(seen.end(), group.begin(), group.end());
    const auto& best = group.at(select_best(group));
    if (groups++ == 0) {
      r.values["cheapest_gamma"] = best.result.gamma;
      r.values["cheapest_paths"] = static_cast<double>(best.set.paths.size());
    }
    if (best.result.gamma > 0) {
      accepted = best;
      break;
    }
    k = e;
  }
  const Candidate chosen = accepted ? *accepted : seen.at(select_best(seen));
  fill_result(r, model, mask_from_set(chosen.set, nc, ns), chosen.result);
  r.paths = chosen.set.paths;
  r.values["accepted"] = accepted ? 1.0 : 0.0;
  r.values["groups_evaluated"] = groups;
  r.values["complete_sets"] = static_cast<double>(sets.size());
  add_reference(r, model, "ch2_s3");
  r.values["reference_mask_gamma"] = synthesize(model, support(*r.reference_K)).gamma;
  summary_row(r, fx.constraints.parameter());
  return r;
}

std::vector<StateSpaceModel> zone_models(const std::vector<fixtures::Zone>& zones) {
  const GridParams base = fixtures::microgrid_params();
  std::vector<StateSpaceModel> out;
  for (const auto& z : zones) out.push_back(build_from_params(base.with_load(z.load_R, base.line_L.back())).second);
  return out;
}

ZoneDesignOptions zone_options(const ScenarioOptions& opt) {
  ZoneDesignOptions z;
  z.beta = kBeta;
  z.rho = 5.0;  // c_K
  z.norm = NormBound::kSpectral;
  z.threads = opt.threads;
  return z;
}

void fill_zone_rows(ScenarioReport& r, const std::vector<std::string>& labels,
                    const std::vector<StateSpaceModel>& models,
                    const std::vector<ZoneChoice>& choices, const std::vector<double>& refs) {
  for (std::size_t k = 0; k < choices.size(); ++k) {
    const auto& c = choices[k];
    TableRow row;
    row.label = labels[k];
    row.open_max_eig = max_real(sorted_eigenvalues(models[k].A));
    row.closed_max_eig = c.result.max_real_eig();
    row.parameter = c.constraints.parameter();
    row.gamma = c.result.gamma;
    row.reference_closed_max_eig = refs[k];
    r.table.push_back(row);
    r.values[labels[k] + ".certificate_max_eig"] = c.result.report.certificate_max_eig;
    r.values[labels[k] + ".meets_tolerance"] = c.meets_tolerance ? 1.0 : 0.0;
    r.values[labels[k] + ".configurations"] = static_cast<double>(c.evaluated.size());
  }
  const auto& first = choices.front();
  r.provenance = to_string(models.front().provenance);
  r.topology = first.mask;
  r.K = first.result.K;
  r.gamma = first.result.gamma;
  r.open_spectrum = sorted_eigenvalues(models.front().A);
  r.closed_spectrum = first.result.closed_spectrum;
}

ScenarioReport ch4_load(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "Zone design under load variation";
  const auto zones = fixtures::microgrid_zones();
  const auto models = zone_models(zones);
  const auto grid = default_constraint_grid(4);
  const auto choices =
      zone_design(models, grid, std::vector<double>(models.size(), opt.tolerance), zone_options(opt));
  std::vector<std::string> labels;
  std::vector<double> refs;
  for (const auto& z : zones) {
    labels.push_back(z.name);
    refs.push_back(z.closed_max_eig);
  }
  fill_zone_rows(r, labels, models, choices, refs);
  return r;
}

ScenarioReport ch4_delay(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "Zone design with uniform link delay";
  const auto zones = fixtures::microgrid_zones();
  const auto models = zone_models({zones.front()});
  const auto grid = default_constraint_grid(4);
  std::vector<std::string> labels;
  std::vector<StateSpaceModel> used;
  std::vector<ZoneChoice> choices;
  for (double ms : {0.5, 1.0}) {
    auto zo = zone_options(opt);
    zo.delay_seconds = ms * 1e-3;
    auto c = zone_design(models, grid, {opt.tolerance}, zo);
    choices.push_back(c.front());
    used.push_back(models.front());
    labels.push_back(ms == 0.5 ? "0.5ms" : "1ms");
  }
  fill_zone_rows(r, labels, used, choices, {-28.9729, -31.0441});
  return r;
}

ScenarioReport ch4_nodefail(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "Zone design with two failed links";
  const auto zones = fixtures::microgrid_zones();
  const auto models = zone_models(zones);
  auto zo = zone_options(opt);
  zo.failed_links = {{0, 0}, {3, 2}};
  const auto choices = zone_design(models, default_constraint_grid(4),
                                   std::vector<double>(models.size(), opt.tolerance), zo);
  std::vector<std::string> labels;
  for (const auto& z : zones) labels.push_back(z.name);
  fill_zone_rows(r, labels, models, choices, {-1.0633, -23.4642, -46.8994});
  return r;
}

ScenarioReport ch5_from_ch2(ScenarioReport (*base)(const ScenarioOptions&), const ScenarioOptions& opt,
                            const std::string& title) {
  ScenarioReport r = base(opt);
  r.title = title;
  r.scheduling = schedule_over(r.topology, opt.seed, r.values);
  return r;
}

ScenarioReport ch5_s4(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "User-requirement connection design with peak load scheduling";
  const auto model = four_bus_canonical();
  const auto fx = fixtures::ch5_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  const auto filtered = bandwidth_filter(paths, fx.net, fx.constraints);
  const auto sets = complete_sets(filtered, fx.net, fx.constraints, Objective::kUserRequirement);
  const int nc = fx.net.num_controllers(), ns = fx.net.num_sensors();
  const auto cands = evaluate_sets(model, sets, nc, ns);
  const auto& best = cands.at(select_best(cands));
  fill_result(r, model, mask_from_set(best.set, nc, ns), best.result);
  r.paths = best.set.paths;
  r.values["paths"] = static_cast<double>(paths.size());
  r.values["filtered_paths"] = static_cast<double>(filtered.size());
  r.values["complete_sets"] = static_cast<double>(sets.size());
  add_reference(r, model, "ch5_s4");
  r.values["reference_mask_gamma"] = synthesize(model, support(*r.reference_K)).gamma;
  summary_row(r, fx.constraints.parameter());
  r.scheduling = schedule_over(r.topology, opt.seed, r.values);
  return r;
}

StateSpaceModel bus13_model() {
  const GridParams base = fixtures::microgrid_params();
  const auto zones = fixtures::microgrid_zones();
  return chain_extend(13, base.with_load(zones.at(1).load_R, base.line_L.back()));
}

ScenarioReport ch5_13bus(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "13-bus chain with a lower-bidiagonal gain pattern";
  const auto model = bus13_model();
  const auto mask = fixtures::bus13_mask();
  fill_result(r, model, mask, synthesize(model, mask, 5e10));
  const Matrix K = fixtures::bus13_gain();
  r.reference_K = K;
  r.reference_spectrum = closed_loop(model, K).spectrum;
  r.values["published_gamma"] = 4246035.3125;
  r.values["published_max_eig"] = -2.2296e5;
  r.values["reference_max_eig"] = max_real(r.reference_spectrum);
  summary_row(r);
  r.scheduling = schedule_over(r.topology, opt.seed, r.values);
  return r;
}

ScenarioReport ch5_delay(const ScenarioOptions& opt) {
  ScenarioReport r;
  r.title = "13-bus chain with 0.5 ms link delay";
  const auto model = bus13_model();
  const auto mask = fixtures::bus13_mask();
  SynthesisProblem p;
  p.model = model;
  p.mask = mask;
  p.beta = kBeta;
  p.rho = kRho;
  p.norm = NormBound::kSquared;
  p.delay = DelayBound{std::nullopt, DelaySpec::uniform(mask, 0.5e-3)};
  const auto res = max_gamma_delay(p);
  fill_result(r, model, mask, res);
  r.values["alpha"] = res.alpha;
  r.values["tau"] = res.tau;
  r.values["published_max_eig"] = -31.63;
  summary_row(r);
  r.scheduling = schedule_over(r.topology, opt.seed, r.values);
  return r;
}

}  // namespace

ScenarioReport run_scenario(const std::string& id, const ScenarioOptions& opt) {
  using Fn = std::function<ScenarioReport(const ScenarioOptions&)>;
  static const std::map<std::string, Fn> table{
      {"ch2-s1", ch2_s1},
      {"ch2-s2", ch2_s2},
      {"ch2-s3", ch2_s3},
      {"ch4-load", ch4_load},
      {"ch4-delay", ch4_delay},
      {"ch4-nodefail", ch4_nodefail},
      {"ch5-s1", [](const ScenarioOptions& o) {
         return ch5_from_ch2(ch2_s1, o, "Published baseline gain with peak load scheduling");
       }},
      {"ch5-s2", [](const ScenarioOptions& o) {
         return ch5_from_ch2(ch2_s2, o, "Reliability design with peak load scheduling");
       }},
      {"ch5-s3", [](const ScenarioOptions& o) {
         return ch5_from_ch2(ch2_s3, o, "Cost design with peak load scheduling");
       }},
      {"ch5-s4", ch5_s4},
      {"ch5-13bus", ch5_13bus},
      {"ch5-delay", ch5_delay},
  };
  auto it = table.find(id);
  if (it == table.end()) {
    std::string known;
    for (const auto& k : scenario_ids()) known += (known.empty() ? "" : ", ") + k;
    throw Error(ErrorCode::kNotFound, "unknown scenario '" + id + "' (known: " + known + ")");
  }
  if (!(opt.tolerance >= 0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioReport r = it->second(opt);
  r.id = id;
  for (auto& row : r.table)
    if (row.label.empty()) row.label = id;
  r.seed = opt.seed;
  r.tolerance = opt.tolerance;
  r.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<ScenarioReport> run_scenarios(const std::vector<std::string>& ids,
                                          const ScenarioOptions& opt, bool parallel) {
  std::vector<ScenarioReport> out(ids.size());
  if (!parallel || ids.size() < 2) {
    for (std::size_t k = 0; k < ids.size(); ++k) out[k] = run_scenario(ids[k], opt);
    return out;
  }
  std::vector<std::exception_ptr> errors(ids.size());
  std::vector<std::thread> pool;
  ScenarioOptions inner = opt;
  inner.threads = 1;  // the scenarios already run side by side
  for (std::size_t k = 0; k < ids.size(); ++k)
    pool.emplace_back([&, k] {
      try {
        out[k] = run_scenario(ids[k], inner);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace mgcomm
