#include "mgcomm/mgcomm.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>

#include "json.hpp"
#include "mgcomm/comm_sim.hpp"
#include "mgcomm/error.hpp"
#include "mgcomm/fixtures.hpp"
#include "mgcomm/harness.hpp"
#include "mgcomm/scheduler.hpp"
#include "mgcomm/serialize.hpp"
#include "mgcomm/synthesis.hpp"

struct mg_model {
  mgcomm::StateSpaceModel model;
};

struct mg_report {
  mgcomm::ScenarioReport report;
};

struct mg_string {
  std::string text;
};

namespace {

using ojson = nlohmann::ordered_json;

thread_local std::string g_last_error;

mg_status fail(mg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, mapping every exception to a status code and the thread's last
// error message.
template <typename Fn>
mg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return MG_OK;
  } catch (const mgcomm::Error& e) {
    return fail(static_cast<mg_status>(static_cast<int>(e.code())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(MG_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MG_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (!p)
    throw mgcomm::Error(mgcomm::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

mg_string* make_string(std::string s) { return new mg_string{std::move(s)}; }

ojson spectrum_json(const mgcomm::Spectrum& s) {
  ojson out = ojson::array();
  for (const auto& z : s) out.push_back({z.real(), z.imag()});
  return out;
}

mgcomm::SparsityMask support(const mgcomm::Matrix& K) {
  mgcomm::SparsityMask m(static_cast<int>(K.rows()), static_cast<int>(K.cols()));
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j)
      if (K(i, j) != 0.0) m.set(i, j);
  return m;
}

}  // namespace

extern "C" {

const char* mg_version(void) { return "0.3.0"; }

const char* mg_status_string(mg_status status) {
  switch (status) {
    case MG_OK: return "ok";
    case MG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case MG_ERR_DIMENSION: return "dimension mismatch";
    case MG_ERR_MODEL: return "invalid model";
    case MG_ERR_NUMERICAL: return "numerical failure";
    case MG_ERR_INFEASIBLE: return "infeasible";
    case MG_ERR_PARSE: return "parse error";
    case MG_ERR_IO: return "i/o error";
    case MG_ERR_NOT_FOUND: return "not found";
    case MG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mg_last_error(void) { return g_last_error.c_str(); }

const char* mg_string_data(const mg_string* s) { return s ? s->text.c_str() : ""; }
size_t mg_string_size(const mg_string* s) { return s ? s->text.size() : 0; }
void mg_string_free(mg_string* s) { delete s; }

mg_status mg_model_canonical(mg_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mg_model{mgcomm::four_bus_canonical()};
  });
}

mg_status mg_model_from_params(const char* params_json, mg_model** out) {
  return guarded([&] {
    require(params_json, "params_json");
    require(out, "out");
    *out = new mg_model{mgcomm::build_from_params(mgcomm::grid_params_from_json(params_json)).second};
  });
}

mg_status mg_model_chain_extend(const char* params_json, int n, mg_model** out) {
  return guarded([&] {
    require(params_json, "params_json");
    require(out, "out");
    *out = new mg_model{mgcomm::chain_extend(n, mgcomm::grid_params_from_json(params_json))};
  });
}

mg_status mg_model_from_json(const char* model_json, mg_model** out) {
  return guarded([&] {
    require(model_json, "model_json");
    require(out, "out");
    *out = new mg_model{mgcomm::model_from_json(model_json)};
  });
}

mg_status mg_model_to_json(const mg_model* model, mg_string** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = make_string(mgcomm::model_to_json(model->model));
  });
}

mg_status mg_model_nodal_json(const char* params_json, mg_string** out) {
  return guarded([&] {
    require(params_json, "params_json");
    require(out, "out");
    const auto [nodal, model] = mgcomm::build_from_params(mgcomm::grid_params_from_json(params_json));
    ojson j;
    j["T"] = mgcomm::matrix_to_rows(nodal.T);
    j["T1"] = mgcomm::matrix_to_rows(nodal.T1);
    j["T2"] = mgcomm::matrix_to_rows(nodal.T2);
    j["T3"] = mgcomm::matrix_to_rows(nodal.T3);
    j["A_prime"] = mgcomm::matrix_to_rows(nodal.A_prime);
    j["B_prime"] = mgcomm::matrix_to_rows(nodal.B_prime);
    j["M_prime"] = mgcomm::matrix_to_rows(nodal.M_prime);
    j["model"] = ojson::parse(mgcomm::model_to_json(model));
    *out = make_string(j.dump(2));
  });
}

int mg_model_states(const mg_model* model) { return model ? model->model.n() : -1; }

void mg_model_free(mg_model* model) { delete model; }

mg_status mg_closed_loop(const mg_model* model, const char* gain_json, const char* delay_json,
                         mg_string** out) {
  return guarded([&] {
    require(model, "model");
    require(gain_json, "gain_json");
    require(out, "out");
    const mgcomm::Matrix K = mgcomm::matrix_from_json(gain_json);
    mgcomm::LoopMatrix loop;
    if (delay_json) {
      const auto d = nlohmann::json::parse(delay_json);
      mgcomm::DelaySpec spec;
      if (d.is_number())
        spec = mgcomm::DelaySpec::uniform(support(K), d.get<double>());
      else
        spec.D = mgcomm::matrix_from_json(delay_json);
      loop = mgcomm::delay_closed_loop(model->model, K, spec);
    } else {
      loop = mgcomm::closed_loop(model->model, K);
    }
    ojson j;
    j["matrix"] = mgcomm::matrix_to_rows(loop.matrix);
    j["spectrum"] = spectrum_json(loop.spectrum);
    j["max_real"] = loop.max_real_eig();
    *out = make_string(j.dump(2));
  });
}

mg_status mg_enumerate(const char* network_json, const char* constraints_json,
                       const char* objective, mg_string** out) {
  return guarded([&] {
    require(network_json, "network_json");
    require(out, "out");
    const auto net = mgcomm::network_from_json(network_json);
    const auto cs = mgcomm::constraints_from_json(constraints_json ? constraints_json : network_json);
    const auto obj = mgcomm::objective_from_string(objective ? objective : "reliability");
    const auto paths = mgcomm::enumerate_paths(net, cs);
    const auto filtered = mgcomm::bandwidth_filter(paths, net, cs);
    const auto sets = mgcomm::complete_sets(filtered, net, cs, obj);
    ojson j;
    j["objective"] = mgcomm::to_string(obj);
    j["constraints"] = ojson::parse(mgcomm::constraints_to_json(cs));
    j["paths"] = ojson::parse(mgcomm::paths_to_json(paths));
    j["filtered"] = ojson::parse(mgcomm::paths_to_json(filtered));
    j["sets"] = ojson::parse(mgcomm::sets_to_json(sets));
    const int nc = net.layers.back().size, ns = net.layers.front().size;
    ojson masks = ojson::array();
    for (const auto& s : sets) masks.push_back(mgcomm::mask_from_set(s, nc, ns).to_rows());
    j["masks"] = masks;
    *out = make_string(j.dump(2));
  });
}

mg_status mg_fixture(const char* name, mg_string** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = make_string(mgcomm::fixtures::document(name));
  });
}

mg_status mg_cbscd(int ns, int nc, const char* constraints_json, mg_string** out) {
  return guarded([&] {
    require(constraints_json, "constraints_json");
    require(out, "out");
    const auto cs = mgcomm::constraints_from_json(constraints_json);
    ojson j;
    j["parameter"] = cs.parameter();
    j["configurations"] = mgcomm::cost_configurations(cs, ns, nc);
    ojson masks = ojson::array();
    for (const auto& m : mgcomm::cbscd(ns, nc, cs)) masks.push_back(m.to_rows());
    j["masks"] = masks;
    *out = make_string(j.dump(2));
  });
}

void mg_synthesis_options_default(mg_synthesis_options* opts) {
  if (!opts) return;
  opts->beta = 5000.0;
  opts->rho = 5.0;
  opts->norm_bound = 0;
  opts->tolerance = 1e-8;
  opts->delay_seconds = -1.0;
}

mg_status mg_synthesize(const mg_model* model, const char* mask_csv,
                        const mg_synthesis_options* opts, mg_string** out) {
  return guarded([&] {
    require(model, "model");
    require(mask_csv, "mask_csv");
    require(out, "out");
    mg_synthesis_options o;
    mg_synthesis_options_default(&o);
    if (opts) o = *opts;
    if (o.norm_bound != 0 && o.norm_bound != 1)
      throw mgcomm::Error(mgcomm::ErrorCode::kInvalidArgument, "norm_bound must be 0 or 1");
    mgcomm::SynthesisProblem p;
    p.model = model->model;
    p.mask = mgcomm::SparsityMask::from_csv(mask_csv);
    p.beta = o.beta;
    p.rho = o.rho;
    p.norm = o.norm_bound == 0 ? mgcomm::NormBound::kSquared : mgcomm::NormBound::kSpectral;
    p.tolerance = o.tolerance;
    if (o.delay_seconds >= 0) {
      p.delay = mgcomm::DelayBound{std::nullopt, mgcomm::DelaySpec::uniform(p.mask, o.delay_seconds)};
      *out = make_string(mgcomm::synthesis_to_json(mgcomm::max_gamma_delay(p)));
    } else {
      *out = make_string(mgcomm::synthesis_to_json(mgcomm::max_gamma(p)));
    }
  });
}

mg_status mg_schedule(const char* tasks_csv, const char* policy, double capacity, int horizon,
                      mg_string** trace_csv, mg_string** summary_json) {
  return guarded([&] {
    require(tasks_csv, "tasks_csv");
    require(policy, "policy");
    if (!trace_csv && !summary_json) throw mgcomm::Error(mgcomm::ErrorCode::kInvalidArgument, "no output requested");
    const auto tasks = mgcomm::tasks_from_csv(tasks_csv);
    const auto pol = mgcomm::policy_from_string(policy);
    const auto trace = mgcomm::run(tasks, capacity, horizon, pol);
    const auto m = mgcomm::metrics(trace);
    const auto free_run = mgcomm::unconstrained_profile(tasks, horizon);
    double free_peak = 0.0;
    for (double p : free_run) free_peak = std::max(free_peak, p);
    if (trace_csv) *trace_csv = make_string(mgcomm::trace_to_csv(trace));
    if (summary_json) {
      ojson j;
      j["policy"] = mgcomm::to_string(pol);
      j["capacity"] = std::isinf(capacity) ? ojson("unlimited") : ojson(capacity);
      j["horizon"] = horizon;
      j["tasks"] = tasks.size();
      j["peak_power"] = m.peak_power;
      j["unconstrained_peak"] = free_peak;
      j["completion_deadline_ratio"] = m.completion_deadline_ratio;
      j["missed"] = m.missed;
      j["infeasible"] = trace.infeasible;
      *summary_json = make_string(j.dump(2));
    }
  });
}

mg_status mg_generate_tasks(uint64_t seed, int count, int regions, mg_string** csv) {
  return guarded([&] {
    require(csv, "csv");
    mgcomm::TaskGeneratorOptions o;
    o.count = count;
    o.regions = regions;
    *csv = make_string(mgcomm::tasks_to_csv(mgcomm::generate_tasks(seed, o)));
  });
}

mg_status mg_simulate(const mg_model* model, const char* gain_json, int delay_slots, double dt,
                      double horizon, const char* x0_json, mg_string** out) {
  return guarded([&] {
    require(model, "model");
    require(gain_json, "gain_json");
    require(x0_json, "x0_json");
    require(out, "out");
    if (delay_slots < 0)
      throw mgcomm::Error(mgcomm::ErrorCode::kInvalidArgument, "delay_slots must be >= 0");
    const mgcomm::Matrix K = mgcomm::matrix_from_json(gain_json);
    const auto x0v = nlohmann::json::parse(x0_json).get<std::vector<double>>();
    const mgcomm::Vector x0 = Eigen::Map<const mgcomm::Vector>(x0v.data(), x0v.size());
    const auto mask = support(K);
    std::vector<std::vector<int>> delays(mask.rows(), std::vector<int>(mask.cols(), delay_slots));
    mgcomm::Broker broker(mask, delays);
    mgcomm::SimulationOptions opt;
    if (dt > 0) opt.dt = dt;
    opt.horizon = horizon > 0 ? horizon : 0.0;
    *out = make_string(mgcomm::simulate_closed_loop(model->model, K, broker, x0, opt).to_csv());
  });
}

mg_status mg_scenario_list(mg_string** out) {
  return guarded([&] {
    require(out, "out");
    std::string s;
    for (const auto& id : mgcomm::scenario_ids()) s += id + "\n";
    *out = make_string(s);
  });
}

mg_status mg_scenario_run(const char* id, uint64_t seed, double tolerance, mg_report** out) {
  return guarded([&] {
    require(id, "id");
    require(out, "out");
    mgcomm::ScenarioOptions o;
    o.seed = seed;
    o.tolerance = tolerance;
    *out = new mg_report{mgcomm::run_scenario(id, o)};
  });
}

mg_status mg_report_emit(const mg_report* report, const char* format, int include_runtime,
                         mg_string** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    const auto fmt = mgcomm::report_format_from_string(format ? format : "json");
    *out = make_string(mgcomm::emit(report->report, fmt, include_runtime != 0));
  });
}

mg_status mg_report_parse(const char* json, mg_report** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new mg_report{mgcomm::parse_report(json)};
  });
}

double mg_report_runtime_ms(const mg_report* report) { return report ? report->report.runtime_ms : 0.0; }

void mg_report_free(mg_report* report) { delete report; }

}  // extern "C"
