// Command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mgcomm/mgcomm.h"

namespace {

// JSON config files: top-level keys are global options, nested objects hold
// the options of the subcommand they are named after.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return "{}";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const nlohmann::json& j, std::vector<std::string> parents,
                   std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        CLI::ConfigItem open;
        open.parents = parents;
        open.name = key;
        open.inputs = {"ON"};
        items.push_back(open);
        walk(value, sub, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array())
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      else
        item.inputs = {scalar(value)};
      items.push_back(item);
    }
  }
};

struct CString {
  mg_string* s = nullptr;
  ~CString() { mg_string_free(s); }
  std::string str() const { return std::string(mg_string_data(s), mg_string_size(s)); }
};

struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

void check(mg_status s) {
  if (s != MG_OK)
    throw Failure(static_cast<int>(s),
                  std::string(mg_status_string(s)) + ": " + mg_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(MG_ERR_IO, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Globals {
  std::string out_dir;
  std::string format = "json";
  std::uint64_t seed = 20160415;
  double tolerance = 0.1;
};

// Writes to <out>/<name> when an output directory is set, else to stdout.
void deliver(const Globals& g, const std::string& name, const std::string& content) {
  if (g.out_dir.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::filesystem::create_directories(g.out_dir);
  const auto path = std::filesystem::path(g.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(MG_ERR_IO, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Failure(MG_ERR_IO, "write failed for '" + path.string() + "'");
  std::cerr << "wrote " << path.string() << "\n";
}

struct Model {
  mg_model* m = nullptr;
  ~Model() { mg_model_free(m); }
};

void load_model(Model& model, const std::string& params, const std::string& model_file, int chain) {
  if (!model_file.empty()) {
    check(mg_model_from_json(read_file(model_file).c_str(), &model.m));
  } else if (!params.empty()) {
    const std::string text = read_file(params);
    if (chain > 0)
      check(mg_model_chain_extend(text.c_str(), chain, &model.m));
    else
      check(mg_model_from_params(text.c_str(), &model.m));
  } else {
    check(mg_model_canonical(&model.m));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication-aware microgrid control design"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values");

  Globals g;
  app.add_option("--out", g.out_dir, "Directory for output files (default: stdout)");
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", g.seed, "Seed for generated task sets");
  app.add_option("--tolerance", g.tolerance, "Eigenvalue tolerance of the zone design");

  // model
  std::string params, model_file;
  int chain = 0;
  bool nodal = false;
  auto* model_cmd = app.add_subcommand("model", "Build a state-space model")->configurable();
  model_cmd->add_option("--params", params, "Grid parameter JSON (default: canonical 4-bus)");
  model_cmd->add_option("--chain", chain, "Extend the parameters to an n-bus chain");
  model_cmd->add_flag("--nodal", nodal, "Also print the nodal matrices");

  // enumerate
  std::string network, constraints, fixture = "ch2_network", objective = "reliability";
  auto* enum_cmd = app.add_subcommand("enumerate", "Enumerate paths and connection sets")->configurable();
  enum_cmd->add_option("--network", network, "Layered network JSON");
  enum_cmd->add_option("--fixture", fixture, "Shipped network when --network is absent");
  enum_cmd->add_option("--constraints", constraints, "Constraint JSON (default: from the network)");
  enum_cmd->add_option("--objective", objective)
      ->check(CLI::IsMember({"reliability", "cost", "user_requirement"}));

  // synthesize
  mg_synthesis_options sopt;
  mg_synthesis_options_default(&sopt);
  std::string mask_file, norm = "squared";
  double delay_ms = -1.0;
  auto* syn_cmd = app.add_subcommand("synthesize", "Maximize gamma over a sparsity mask")->configurable();
  syn_cmd->add_option("--model", model_file, "Model JSON (default: canonical 4-bus)");
  syn_cmd->add_option("--params", params, "Grid parameter JSON");
  syn_cmd->add_option("--mask", mask_file, "0/1 CSV, controllers by sensors")->required();
  syn_cmd->add_option("--beta", sopt.beta, "Lyapunov shift");
  syn_cmd->add_option("--rho", sopt.rho, "Gain bound");
  syn_cmd->add_option("--norm", norm, "How rho bounds K")->check(CLI::IsMember({"squared", "spectral"}));
  syn_cmd->add_option("--solver-tolerance", sopt.tolerance, "Relative duality gap");
  syn_cmd->add_option("--delay-ms", delay_ms, "Uniform link delay; enables the delay program");

  // schedule
  std::string tasks_file, policy = "edf";
  double capacity = std::numeric_limits<double>::infinity();
  int horizon = 0, generate = 0, regions = 4;
  auto* sch_cmd = app.add_subcommand("schedule", "Run a capped real-time schedule")->configurable();
  sch_cmd->add_option("--tasks", tasks_file, "Task CSV (id,r,d,c,P[,region])");
  sch_cmd->add_option("--generate", generate, "Generate this many tasks from --seed instead");
  sch_cmd->add_option("--regions", regions, "Regions of generated tasks");
  sch_cmd->add_option("--policy", policy)->check(CLI::IsMember({"edf", "llf", "drp"}));
  sch_cmd->add_option("--capacity", capacity, "Power cap (default: unlimited)");
  sch_cmd->add_option("--horizon", horizon, "Slots to simulate (default: latest deadline + total work)");

  // simulate
  std::string gain_file, x0_text;
  double dt = 0.0, sim_horizon = 0.0;
  int delay_slots = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Broker-in-the-loop simulation")->configurable();
  sim_cmd->add_option("--model", model_file, "Model JSON (default: canonical 4-bus)");
  sim_cmd->add_option("--params", params, "Grid parameter JSON");
  sim_cmd->add_option("--gain", gain_file, "Gain JSON (row-major)")->required();
  sim_cmd->add_option("--x0", x0_text, "Initial state as a JSON array (default: all ones)");
  sim_cmd->add_option("--dt", dt, "Time step in seconds");
  sim_cmd->add_option("--horizon", sim_horizon, "Simulated seconds");
  sim_cmd->add_option("--delay-slots", delay_slots, "Delay of every active link");

  // scenario
  std::vector<std::string> ids;
  bool list = false, parallel = false, runtime = false;
  auto* sc_cmd = app.add_subcommand("scenario", "Run reproduction scenarios")->configurable();
  sc_cmd->add_option("ids", ids, "Scenario ids, or 'all'");
  sc_cmd->add_flag("--list", list, "List scenario ids");
  sc_cmd->add_flag("--parallel", parallel, "Run scenarios concurrently");
  sc_cmd->add_flag("--runtime", runtime, "Include wall-clock runtime in JSON reports");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*model_cmd) {
      Model m;
      load_model(m, params, "", chain);
      CString s;
      if (nodal && !params.empty() && chain == 0)
        check(mg_model_nodal_json(read_file(params).c_str(), &s.s));
      else
        check(mg_model_to_json(m.m, &s.s));
      deliver(g, "model.json", s.str());
    } else if (*enum_cmd) {
      CString net;
      std::string net_text;
      if (network.empty()) {
        check(mg_fixture(fixture.c_str(), &net.s));
        net_text = net.str();
      } else {
        net_text = read_file(network);
      }
      const std::string cs_text = constraints.empty() ? std::string() : read_file(constraints);
      CString s;
      check(mg_enumerate(net_text.c_str(), cs_text.empty() ? nullptr : cs_text.c_str(),
                         objective.c_str(), &s.s));
      deliver(g, "enumeration.json", s.str());
    } else if (*syn_cmd) {
      Model m;
      load_model(m, params, model_file, 0);
      sopt.norm_bound = norm == "squared" ? 0 : 1;
      sopt.delay_seconds = delay_ms >= 0 ? delay_ms * 1e-3 : -1.0;
      CString s;
      check(mg_synthesize(m.m, read_file(mask_file).c_str(), &sopt, &s.s));
      deliver(g, "synthesis.json", s.str());
    } else if (*sch_cmd) {
      std::string csv;
      if (generate > 0) {
        CString t;
        check(mg_generate_tasks(g.seed, generate, regions, &t.s));
        csv = t.str();
      } else if (!tasks_file.empty()) {
        csv = read_file(tasks_file);
      } else {
        throw Failure(MG_ERR_INVALID_ARGUMENT, "schedule needs --tasks or --generate");
      }
      if (horizon <= 0) {
        // Latest deadline plus all work: every admissible task can finish.
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        int max_d = 0, work = 0;
        while (std::getline(in, line)) {
          int id, r, d, c;
          if (std::sscanf(line.c_str(), "%d,%d,%d,%d", &id, &r, &d, &c) == 4) {
            max_d = std::max(max_d, d);
            work += c;
          }
        }
        horizon = max_d + work;
      }
      CString trace, summary;
      check(mg_schedule(csv.c_str(), policy.c_str(), capacity, horizon, &trace.s, &summary.s));
      if (g.out_dir.empty()) {
        std::cout << summary.str() << "\n" << trace.str();
      } else {
        deliver(g, "trace.csv", trace.str());
        deliver(g, "summary.json", summary.str());
      }
    } else if (*sim_cmd) {
      Model m;
      load_model(m, params, model_file, 0);
      if (x0_text.empty()) {
        nlohmann::json ones = std::vector<double>(mg_model_states(m.m), 1.0);
        x0_text = ones.dump();
      }
      CString s;
      check(mg_simulate(m.m, read_file(gain_file).c_str(), delay_slots, dt, sim_horizon,
                        x0_text.c_str(), &s.s));
      deliver(g, "trajectory.csv", s.str());
    } else if (*sc_cmd) {
      CString known;
      check(mg_scenario_list(&known.s));
      if (list || ids.empty()) {
        std::cout << known.str();
        return 0;
      }
      if (ids.size() == 1 && ids.front() == "all") {
        ids.clear();
        std::istringstream in(known.str());
        for (std::string id; std::getline(in, id);)
          if (!id.empty()) ids.push_back(id);
      }
      std::vector<std::string> outputs(ids.size());
      std::vector<mg_status> status(ids.size(), MG_OK);
      std::vector<std::string> errors(ids.size());
      auto one = [&](std::size_t k) {
        mg_report* rep = nullptr;
        status[k] = mg_scenario_run(ids[k].c_str(), g.seed, g.tolerance, &rep);
        if (status[k] != MG_OK) {
          errors[k] = mg_last_error();
          return;
        }
        CString s;
        status[k] = mg_report_emit(rep, g.format.c_str(), runtime ? 1 : 0, &s.s);
        if (status[k] != MG_OK) errors[k] = mg_last_error();
        outputs[k] = s.str();
        mg_report_free(rep);
      };
      if (parallel) {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < ids.size(); ++k) pool.emplace_back(one, k);
        for (auto& t : pool) t.join();
      } else {
        for (std::size_t k = 0; k < ids.size(); ++k) one(k);
      }
      for (std::size_t k = 0; k < ids.size(); ++k) {
        if (status[k] != MG_OK)
          throw Failure(status[k], ids[k] + ": " + mg_status_string(status[k]) + ": " + errors[k]);
        deliver(g, ids[k] + "." + g.format, outputs[k]);
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
