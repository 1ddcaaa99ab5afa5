#include "mgcomm/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "mgcomm/error.hpp"
#include "text.hpp"

namespace mgcomm {

std::string to_string(Policy p) {
  switch (p) {
    case Policy::kEdf: return "edf";
    case Policy::kLlf: return "llf";
    case Policy::kDrp: return "drp";
  }
  return "?";
}

Policy policy_from_string(const std::string& s) {
  if (s == "edf") return Policy::kEdf;
  if (s == "llf") return Policy::kLlf;
  if (s == "drp") return Policy::kDrp;
  throw Error(ErrorCode::kInvalidArgument, "unknown policy '" + s + "' (expected edf, llf or drp)");
}

Task Task::make(int id, int r, int d, int c, double P, int region) {
  if (c < 1) throw Error(ErrorCode::kInvalidArgument, "task " + std::to_string(id) + ": c must be >= 1");
  if (r < 0 || r > d)
    throw Error(ErrorCode::kInvalidArgument, "task " + std::to_string(id) + ": need 0 <= r <= d");
  if (!(P > 0.0) || !std::isfinite(P))
    throw Error(ErrorCode::kInvalidArgument, "task " + std::to_string(id) + ": P must be positive");
  Task t;
  t.id = id;
  t.r = r;
  t.d = d;
  t.c = c;
  t.P = P;
  t.region = region;
  t.c_rem = c;
  t.priority = P;
  return t;
}

double priority(const Task& task, int t, Policy policy) {
  switch (policy) {
    case Policy::kEdf:
      return -static_cast<double>(task.d);
    case Policy::kLlf:
      return -static_cast<double>((task.d - t) - task.c_rem);
    case Policy::kDrp:
      if (t < 1) return task.priority;
      return task.priority * (1.0 - static_cast<double>(task.d - task.c_rem) / t);
  }
  return 0.0;
}

SlotRecord step(TaskSet& tasks, int t, double capacity, Policy policy) {
  if (!(capacity > 0.0)) throw Error(ErrorCode::kInvalidArgument, "capacity must be positive");

  SlotRecord rec;
  rec.slot = t;

  std::vector<std::size_t> cand;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    Task& task = tasks[k];
    if (task.state == TaskState::kCompleted || task.r > t) continue;
    if (task.P > capacity) {
      task.infeasible = true;
      task.state = TaskState::kHold;
      continue;
    }
    task.priority = priority(task, t, policy);
    cand.push_back(k);
  }

  double total = 0.0;
  for (auto k : cand) total += tasks[k].P;

  std::vector<std::size_t> run_now;
  if (total <= capacity) {
    run_now = cand;
  } else {
    std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
      if (tasks[a].priority != tasks[b].priority) return tasks[a].priority > tasks[b].priority;
      return tasks[a].id < tasks[b].id;
    });
    // Hold from the bottom until the cap holds, then let held tasks back in
    // by rank wherever they still fit.
    std::vector<std::size_t> held;
    run_now = cand;
    while (total > capacity && !run_now.empty()) {
      total -= tasks[run_now.back()].P;
      held.insert(held.begin(), run_now.back());
      run_now.pop_back();
    }
    for (auto k : held) {
      if (total + tasks[k].P <= capacity) {
        total += tasks[k].P;
        run_now.push_back(k);
      }
    }
  }

  std::vector<bool> running(tasks.size(), false);
  for (auto k : run_now) running[k] = true;
  for (auto k : cand) {
    Task& task = tasks[k];
    if (running[k]) {
      task.state = TaskState::kRunning;
      rec.power += task.P;
      rec.running.push_back(task.id);
      if (--task.c_rem == 0) {
        task.state = TaskState::kCompleted;
        task.completion_slot = t + 1;
        rec.completed.push_back(task.id);
      }
    } else {
      task.state = TaskState::kHold;
      rec.hold.push_back(task.id);
    }
  }
  std::sort(rec.running.begin(), rec.running.end());
  std::sort(rec.hold.begin(), rec.hold.end());
  std::sort(rec.completed.begin(), rec.completed.end());
  return rec;
}

ScheduleTrace run(const TaskSet& tasks, double capacity, int horizon, Policy policy) {
  int max_d = 0;
  for (const auto& task : tasks) max_d = std::max(max_d, task.d);
  if (horizon < max_d)
    throw Error(ErrorCode::kInvalidArgument,
                "horizon " + std::to_string(horizon) + " is shorter than the latest deadline " +
                    std::to_string(max_d));

  ScheduleTrace trace;
  trace.policy = policy;
  trace.capacity = capacity;
  trace.tasks = tasks;
  for (auto& task : trace.tasks) {
    task.c_rem = task.c;
    task.state = TaskState::kOff;
    task.priority = task.P;
    task.completion_slot = -1;
    task.infeasible = false;
  }
  for (int t = 0; t < horizon; ++t) trace.slots.push_back(step(trace.tasks, t, capacity, policy));
  for (const auto& task : trace.tasks)
    if (task.infeasible) trace.infeasible.push_back(task.id);
  return trace;
}

ScheduleMetrics metrics(const ScheduleTrace& trace) {
  ScheduleMetrics m;
  for (const auto& s : trace.slots) m.peak_power = std::max(m.peak_power, s.power);
  if (trace.tasks.empty()) return m;
  int on_time = 0;
  for (const auto& task : trace.tasks) {
    if (task.completion_slot >= 0 && task.completion_slot <= task.d)
      ++on_time;
    else
      m.missed.push_back(task.id);
  }
  m.completion_deadline_ratio = static_cast<double>(on_time) / trace.tasks.size();
  return m;
}

std::vector<double> unconstrained_profile(const TaskSet& tasks, int horizon) {
  std::vector<double> power(std::max(horizon, 0), 0.0);
  for (const auto& task : tasks)
    for (int t = task.r; t < task.r + task.c && t < horizon; ++t) power[t] += task.P;
  return power;
}

LoadDistribution distribute_loads(const SparsityMask& mask, const TaskSet& tasks,
                                  double capacity) {
  const int nc = mask.rows(), ns = mask.cols();
  if (ns == 0) throw Error(ErrorCode::kInvalidArgument, "mask has no sensors");
  LoadDistribution out;
  for (int i = 0; i < nc; ++i) {
    ControllerLoad load;
    load.controller = i;
    load.capacity = capacity * static_cast<double>(mask.row_sum(i)) / ns;
    out.controllers.push_back(load);
  }
  std::vector<int> seen(ns, 0);
  for (const auto& task : tasks) {
    const int region = task.region >= 0 ? task.region : task.id % ns;
    if (region >= ns)
      throw Error(ErrorCode::kInvalidArgument,
                  "task " + std::to_string(task.id) + " names region " + std::to_string(region) +
                      " but the mask has " + std::to_string(ns) + " sensors");
    std::vector<int> ctrls;
    for (int i = 0; i < nc; ++i)
      if (mask(i, region)) ctrls.push_back(i);
    if (ctrls.empty()) {
      out.unservable.push_back(task.id);
      continue;
    }
    const int i = ctrls[seen[region]++ % ctrls.size()];
    out.controllers[i].tasks.push_back(task);
  }
  return out;
}

TaskSet generate_tasks(std::uint64_t seed, const TaskGeneratorOptions& o) {
  if (o.count < 0 || o.regions < 1 || o.max_release < 0 || o.max_exec < 1 || o.max_slack < 0 ||
      !(o.min_power > 0.0) || o.max_power < o.min_power)
    throw Error(ErrorCode::kInvalidArgument, "invalid task generator options");
  // Raw engine output only, so the sets are identical across standard libraries.
  std::mt19937_64 eng(seed);
  auto uniform_int = [&](int lo, int hi) {
    return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto uniform_real = [&](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
  };
  TaskSet tasks;
  for (int k = 0; k < o.count; ++k) {
    const int r = uniform_int(0, o.max_release);
    const int c = uniform_int(1, o.max_exec);
    const int d = r + c + uniform_int(0, o.max_slack);
    const double P = std::round(uniform_real(o.min_power, o.max_power) * 1000.0) / 1000.0;
    const int region = uniform_int(0, o.regions - 1);
    tasks.push_back(Task::make(k, r, d, c, P, region));
  }
  return tasks;
}

TaskSet tasks_from_csv(const std::string& csv) {
  auto rows = text::lines(csv);
  if (rows.empty()) throw Error(ErrorCode::kParse, "task CSV is empty");
  const auto header = text::split(rows.front(), ',');
  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header.size(); ++k) col[header[k]] = k;
  for (const char* need : {"id", "r", "d", "c", "P"})
    if (!col.count(need))
      throw Error(ErrorCode::kParse, std::string("task CSV is missing column '") + need + "'");
  const bool has_region = col.count("region") > 0;

  TaskSet tasks;
  for (std::size_t n = 1; n < rows.size(); ++n) {
    const auto f = text::split(rows[n], ',');
    if (f.size() != header.size())
      throw Error(ErrorCode::kParse, "task CSV line " + std::to_string(n + 1) + " has " +
                                         std::to_string(f.size()) + " fields");
    auto integer = [&](const char* name) {
      return static_cast<int>(text::parse_int(f[col.at(name)], name));
    };
    tasks.push_back(Task::make(integer("id"), integer("r"), integer("d"), integer("c"),
                               text::parse_double(f[col.at("P")], "P"),
                               has_region ? integer("region") : -1));
  }
  return tasks;
}

std::string tasks_to_csv(const TaskSet& tasks) {
  std::string out = "id,r,d,c,P,region\n";
  for (const auto& t : tasks)
    out += std::to_string(t.id) + "," + std::to_string(t.r) + "," + std::to_string(t.d) + "," +
           std::to_string(t.c) + "," + text::number(t.P) + "," + std::to_string(t.region) + "\n";
  return out;
}

std::string trace_to_csv(const ScheduleTrace& trace) {
  std::string out = "slot,running_ids,power\n";
  for (const auto& s : trace.slots)
    out += std::to_string(s.slot) + "," + text::join(s.running, ";") + "," +
           text::number(s.power) + "\n";
  return out;
}

}  // namespace mgcomm
