#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgcomm/grid_model.hpp"
#include "mgcomm/mask.hpp"

namespace mgcomm {

struct Message {
  std::string topic;  // "sensor/<j>" or "controller/<i>", 1-based
  double value = 0.0;
  int slot = 0;
};

struct Delivery {
  int controller = 0;  // 0-based; -1 means the grid integrator
  int sensor = 0;      // 0-based source, -1 for controller messages
  Message message;
  int deliver_slot = 0;
};

struct TopicRef {
  enum class Kind { kSensor, kController } kind;
  int index = 0;  // 0-based
};

TopicRef parse_topic(const std::string& topic);
std::string sensor_topic(int j);
std::string controller_topic(int i);

// TLS, authentication and last-will settings are accepted for configuration
// parity and have no effect on routing.
struct BrokerConfig {
  bool tls = false;
  std::string username;
  std::string last_will_topic;
};

class Broker {
 public:
  Broker(const SparsityMask& mask, std::vector<std::vector<int>> delay_slots = {},
         BrokerConfig config = {});

  int num_controllers() const { return mask_.rows(); }
  int num_sensors() const { return mask_.cols(); }
  const SparsityMask& mask() const { return mask_; }
  int delay(int controller, int sensor) const;

  // Queues the deliveries of msg and returns them.
  std::vector<Delivery> route(const Message& msg);

  // Removes and returns deliveries due at or before slot, FIFO per topic.
  std::vector<Delivery> collect(int slot);

  std::size_t in_flight() const { return queue_.size(); }
  // Messages accepted, and deliveries they fanned out to.
  std::size_t published() const { return published_; }
  std::size_t routed() const { return routed_; }
  std::size_t delivered() const { return delivered_; }
  std::size_t expired() const { return expired_; }

  // Drops everything still queued, counting it as expired.
  void expire_all();

 private:
  SparsityMask mask_;
  std::vector<std::vector<int>> delay_;
  BrokerConfig config_;
  std::deque<Delivery> queue_;
  std::size_t published_ = 0;
  std::size_t routed_ = 0;
  std::size_t delivered_ = 0;
  std::size_t expired_ = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<int> messages;  // deliveries per step

  std::string to_csv() const;
};

struct SimulationOptions {
  std::optional<double> dt;  // default 0.1 / |max real closed-loop eigenvalue|
  double horizon = 0.0;      // seconds; 0 means 20 / |max real eigenvalue|
  double divergence_limit = 1e12;
};

double default_time_step(const StateSpaceModel& model, const Matrix& K);

// Fixed-step RK4 integration of x' = Ax + Bu. Controllers form u from the
// sensor values the broker has delivered to them.
Trajectory simulate_closed_loop(const StateSpaceModel& model, const Matrix& K, Broker& broker,
                                const Vector& x0, const SimulationOptions& options = {});

// Newline-delimited JSON messages: {"topic": ..., "value": ..., "slot": ...}.
std::string encode_message(const Message& msg);
Message decode_message(const std::string& line);

// Pushes messages through a local stream socket pair and routes what the
// reader side decodes. Returns deliveries in slot order.
std::vector<Delivery> route_over_socket(Broker& broker, const std::vector<Message>& messages);

}  // namespace mgcomm
