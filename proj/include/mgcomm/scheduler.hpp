#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mgcomm/mask.hpp"

namespace mgcomm {

enum class Policy { kEdf, kLlf, kDrp };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& s);

enum class TaskState { kOff, kHold, kRunning, kCompleted };

struct Task {
  int id = 0;
  int r = 0;
  int d = 0;
  int c = 1;
  double P = 1.0;
  int region = -1;  // sensor region; -1 means id modulo the sensor count
  int c_rem = 1;
  double priority = 0.0;
  TaskState state = TaskState::kOff;
  int completion_slot = -1;  // slot boundary at which c_rem reached 0
  bool infeasible = false;   // P exceeds the capacity

  static Task make(int id, int r, int d, int c, double P, int region = -1);
};

using TaskSet = std::vector<Task>;

struct SlotRecord {
  int slot = 0;
  std::vector<int> running;
  std::vector<int> hold;
  std::vector<int> completed;
  double power = 0.0;
};

struct ScheduleTrace {
  Policy policy = Policy::kEdf;
  double capacity = 0.0;
  std::vector<SlotRecord> slots;
  TaskSet tasks;  // final task states
  std::vector<int> infeasible;
};

struct ScheduleMetrics {
  double peak_power = 0.0;
  double completion_deadline_ratio = 1.0;
  std::vector<int> missed;
};

inline constexpr double kUnlimitedCapacity = std::numeric_limits<double>::infinity();

// EDF: -d. LLF: -slack. DRP: multiplicative update of task.priority, no
// update at t = 0.
double priority(const Task& task, int t, Policy policy);

// Advances one slot in place and returns the slot record.
SlotRecord step(TaskSet& tasks, int t, double capacity, Policy policy);

ScheduleTrace run(const TaskSet& tasks, double capacity, int horizon, Policy policy);

ScheduleMetrics metrics(const ScheduleTrace& trace);

// Power per slot when every task runs from its arrival without a cap.
std::vector<double> unconstrained_profile(const TaskSet& tasks, int horizon);

struct ControllerLoad {
  int controller = 0;
  double capacity = 0.0;
  TaskSet tasks;
};

struct LoadDistribution {
  std::vector<ControllerLoad> controllers;
  std::vector<int> unservable;  // task ids of regions without a controller
};

LoadDistribution distribute_loads(const SparsityMask& mask, const TaskSet& tasks,
                                  double capacity);

struct TaskGeneratorOptions {
  int count = 20;
  int regions = 4;
  int max_release = 20;
  int max_exec = 5;
  int max_slack = 10;
  double min_power = 0.5;
  double max_power = 3.0;
};

// Seeded generator; output depends only on the seed and the options.
TaskSet generate_tasks(std::uint64_t seed, const TaskGeneratorOptions& options = {});

TaskSet tasks_from_csv(const std::string& text);
std::string tasks_to_csv(const TaskSet& tasks);
std::string trace_to_csv(const ScheduleTrace& trace);

}  // namespace mgcomm
