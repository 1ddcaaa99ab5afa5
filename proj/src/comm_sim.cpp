#include "mgcomm/comm_sim.hpp"

#include <algorithm>
#include <cmath>

#include "mgcomm/error.hpp"
#include "text.hpp"

namespace mgcomm {

TopicRef parse_topic(const std::string& topic) {
  const auto slash = topic.find('/');
  if (slash == std::string::npos)
    throw Error(ErrorCode::kInvalidArgument, "unknown topic '" + topic + "'");
  const std::string head = topic.substr(0, slash);
  TopicRef ref{};
  if (head == "sensor")
    ref.kind = TopicRef::Kind::kSensor;
  else if (head == "controller")
    ref.kind = TopicRef::Kind::kController;
  else
    throw Error(ErrorCode::kInvalidArgument, "unknown topic '" + topic + "'");
  long long idx = 0;
  try {
    idx = text::parse_int(topic.substr(slash + 1), "topic index");
  } catch (const Error&) {
    throw Error(ErrorCode::kInvalidArgument, "unknown topic '" + topic + "'");
  }
  if (idx < 1) throw Error(ErrorCode::kInvalidArgument, "topic index must be >= 1 in '" + topic + "'");
  ref.index = static_cast<int>(idx - 1);
  return ref;
}

std::string sensor_topic(int j) { return "sensor/" + std::to_string(j + 1); }
std::string controller_topic(int i) { return "controller/" + std::to_string(i + 1); }

Broker::Broker(const SparsityMask& mask, std::vector<std::vector<int>> delay_slots,
               BrokerConfig config)
    : mask_(mask), delay_(std::move(delay_slots)), config_(std::move(config)) {
  if (delay_.empty())
    delay_.assign(mask_.rows(), std::vector<int>(mask_.cols(), 0));
  if (static_cast<int>(delay_.size()) != mask_.rows())
    throw Error(ErrorCode::kDimension, "delay table needs one row per controller");
  for (const auto& row : delay_) {
    if (static_cast<int>(row.size()) != mask_.cols())
      throw Error(ErrorCode::kDimension, "delay table needs one column per sensor");
    for (int d : row)
      if (d < 0) throw Error(ErrorCode::kInvalidArgument, "link delays must be non-negative");
  }
}

int Broker::delay(int controller, int sensor) const { return delay_.at(controller).at(sensor); }

std::vector<Delivery> Broker::route(const Message& msg) {
  const TopicRef ref = parse_topic(msg.topic);
  std::vector<Delivery> out;
  if (ref.kind == TopicRef::Kind::kSensor) {
    if (ref.index >= num_sensors())
      throw Error(ErrorCode::kInvalidArgument,
                  "topic '" + msg.topic + "' is outside the " + std::to_string(num_sensors()) +
                      " sensors");
    for (int i = 0; i < num_controllers(); ++i)
      if (mask_(i, ref.index))
        out.push_back({i, ref.index, msg, msg.slot + delay_[i][ref.index]});
  } else {
    if (ref.index >= num_controllers())
      throw Error(ErrorCode::kInvalidArgument,
                  "topic '" + msg.topic + "' is outside the " +
                      std::to_string(num_controllers()) + " controllers");
    out.push_back({-1, -1, msg, msg.slot});
  }
  ++published_;
  routed_ += out.size();
  queue_.insert(queue_.end(), out.begin(), out.end());
  return out;
}

std::vector<Delivery> Broker::collect(int slot) {
  std::vector<Delivery> due;
  std::deque<Delivery> rest;
  for (auto& d : queue_) {
    if (d.deliver_slot <= slot)
      due.push_back(std::move(d));
    else
      rest.push_back(std::move(d));
  }
  queue_ = std::move(rest);
  std::stable_sort(due.begin(), due.end(), [](const Delivery& a, const Delivery& b) {
    return a.deliver_slot < b.deliver_slot;
  });
  delivered_ += due.size();
  return due;
}

void Broker::expire_all() {
  expired_ += queue_.size();
  queue_.clear();
}

std::string Trajectory::to_csv() const {
  std::string out = "t";
  const std::size_t n = x.empty() ? 0 : x.front().size();
  const std::size_t m = u.empty() ? 0 : u.front().size();
  for (std::size_t k = 0; k < n; ++k) out += ",x_" + std::to_string(k + 1);
  for (std::size_t k = 0; k < m; ++k) out += ",u_" + std::to_string(k + 1);
  out += "\n";
  for (std::size_t s = 0; s < t.size(); ++s) {
    out += text::number(t[s]);
    for (std::size_t k = 0; k < n; ++k) out += "," + text::number(x[s](k));
    for (std::size_t k = 0; k < m; ++k) out += "," + text::number(u[s](k));
    out += "\n";
  }
  return out;
}

double default_time_step(const StateSpaceModel& model, const Matrix& K) {
  const double lam = closed_loop(model, K).max_real_eig();
  if (!(std::abs(lam) > 0.0))
    throw Error(ErrorCode::kInvalidArgument,
                "closed loop has a zero eigenvalue; pass an explicit time step");
  return 0.1 / std::abs(lam);
}

Trajectory simulate_closed_loop(const StateSpaceModel& model, const Matrix& K, Broker& broker,
                                const Vector& x0, const SimulationOptions& opt) {
  model.validate();
  const int n = model.n(), m = model.m(), p = model.p();
  if (K.rows() != m || K.cols() != p)
    throw Error(ErrorCode::kDimension, "K must be " + std::to_string(m) + "x" + std::to_string(p));
  if (broker.num_controllers() != m || broker.num_sensors() != p)
    throw Error(ErrorCode::kDimension, "broker mask does not match the model");
  if (x0.size() != n) throw Error(ErrorCode::kDimension, "x0 must have " + std::to_string(n) + " entries");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j)
      if (K(i, j) != 0.0 && !broker.mask()(i, j))
        throw Error(ErrorCode::kInvalidArgument, "K uses link (" + std::to_string(i + 1) + ", " +
                                                     std::to_string(j + 1) +
                                                     ") that the broker does not route");

  const double dt = opt.dt ? *opt.dt : default_time_step(model, K);
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "time step must be positive");
  double horizon = opt.horizon;
  if (horizon <= 0.0) horizon = 20.0 / std::abs(closed_loop(model, K).max_real_eig());
  if (!std::isfinite(horizon)) throw Error(ErrorCode::kInvalidArgument, "horizon is not finite");
  const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));

  // Zero-delay links act on the live output inside every stage; delayed
  // links hold the last value the broker handed over.
  Matrix K_live = Matrix::Zero(m, p), K_held = Matrix::Zero(m, p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j)
      (broker.delay(i, j) == 0 ? K_live : K_held)(i, j) = K(i, j);
  Matrix held = Matrix::Zero(m, p);

  auto control = [&](const Vector& x) -> Vector {
    return K_live * (model.C * x) + (K_held.cwiseProduct(held)).rowwise().sum();
  };
  auto f = [&](const Vector& x) -> Vector { return model.A * x + model.B * control(x); };

  Trajectory tr;
  Vector x = x0;
  for (int k = 0;; ++k) {
    const Vector y = model.C * x;
    for (int j = 0; j < p; ++j) broker.route({sensor_topic(j), y(j), k});
    int count = 0;
    for (const auto& d : broker.collect(k)) {
      ++count;
      if (d.controller >= 0) held(d.controller, d.sensor) = d.message.value;
    }
    const Vector u = control(x);
    for (int i = 0; i < m; ++i) broker.route({controller_topic(i), u(i), k});
    count += static_cast<int>(broker.collect(k).size());

    tr.t.push_back(k * dt);
    tr.x.push_back(x);
    tr.u.push_back(u);
    tr.messages.push_back(count);
    if (k == steps) break;

    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * dt * k1);
    const Vector k3 = f(x + 0.5 * dt * k2);
    const Vector k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.norm() > opt.divergence_limit)
      throw Error(ErrorCode::kNumerical,
                  "state diverged at t = " + text::number((k + 1) * dt) + " (|x| > " +
                      text::number(opt.divergence_limit) + ")");
  }
  broker.expire_all();
  return tr;
}

}  // namespace mgcomm
