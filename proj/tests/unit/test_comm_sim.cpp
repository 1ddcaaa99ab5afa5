#include <gtest/gtest.h>

#include <random>

#include "mgcomm/comm_sim.hpp"
#include "mgcomm/error.hpp"
#include "oracles.hpp"

using namespace mgcomm;

namespace {

std::vector<int> receivers(const std::vector<Delivery>& ds) {
  std::vector<int> out;
  for (const auto& d : ds) out.push_back(d.controller);
  return out;
}

}  // namespace

TEST(Topic, ParseAndFormat) {
  const auto s = parse_topic("sensor/3");
  EXPECT_EQ(s.kind, TopicRef::Kind::kSensor);
  EXPECT_EQ(s.index, 2);
  EXPECT_EQ(parse_topic("controller/1").kind, TopicRef::Kind::kController);
  EXPECT_EQ(sensor_topic(0), "sensor/1");
  EXPECT_EQ(controller_topic(3), "controller/4");
  EXPECT_THROW(parse_topic("meter/1"), Error);
  EXPECT_THROW(parse_topic("sensor/0"), Error);
  EXPECT_THROW(parse_topic("sensor/x"), Error);
  EXPECT_THROW(parse_topic("sensor"), Error);
}

TEST(Broker, IdentityRouting) {
  Broker b(SparsityMask::identity(4));
  EXPECT_EQ(receivers(b.route({"sensor/2", 1.0, 0})), std::vector<int>{1});
}

TEST(Broker, ScenarioTwoSensorOne) {
  Broker b(oracle::support(oracle::gain_s2()));
  EXPECT_EQ(receivers(b.route({"sensor/1", 1.0, 0})), (std::vector<int>{2, 3}));
}

TEST(Broker, RoutingEqualsMask) {
  std::mt19937_64 eng(4);
  std::bernoulli_distribution on(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    SparsityMask m(3, 5);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j)
        if (on(eng)) m.set(i, j);
    Broker b(m);
    for (int j = 0; j < 5; ++j) {
      const auto got = receivers(b.route({sensor_topic(j), 0.0, 0}));
      std::vector<int> want;
      for (int i = 0; i < 3; ++i)
        if (m(i, j)) want.push_back(i);
      EXPECT_EQ(got, want);
    }
  }
}

TEST(Broker, DelayedDelivery) {
  Broker b(SparsityMask::identity(2), {{2, 0}, {0, 0}});
  const auto ds = b.route({"sensor/1", 3.5, 4});
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].deliver_slot, 6);
  EXPECT_TRUE(b.collect(5).empty());
  const auto due = b.collect(6);
  ASSERT_EQ(due.size(), 1u);
  EXPECT_DOUBLE_EQ(due[0].message.value, 3.5);
}

TEST(Broker, ControllerMessagesGoToIntegrator) {
  Broker b(SparsityMask::identity(2));
  const auto ds = b.route({"controller/2", 1.0, 0});
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].controller, -1);
  EXPECT_THROW(b.route({"controller/3", 1.0, 0}), Error);
  EXPECT_THROW(b.route({"sensor/3", 1.0, 0}), Error);
}

TEST(Broker, BadDelayTable) {
  EXPECT_THROW(Broker(SparsityMask::identity(2), {{0, 0}}), Error);
  EXPECT_THROW(Broker(SparsityMask::identity(2), {{0, -1}, {0, 0}}), Error);
}

TEST(Broker, MessageConservation) {
  const auto mask = oracle::support(oracle::gain_s2());
  Broker b(mask, std::vector<std::vector<int>>(4, std::vector<int>(4, 3)));
  std::size_t fanout = 0;
  for (int slot = 0; slot < 10; ++slot)
    for (int j = 0; j < 4; ++j) {
      fanout += mask.col_sum(j);
      b.route({sensor_topic(j), 1.0, slot});
      b.collect(slot);
    }
  b.expire_all();
  EXPECT_EQ(b.routed(), fanout);
  EXPECT_EQ(b.delivered() + b.expired(), b.routed());
  EXPECT_EQ(b.published(), 40u);
  EXPECT_EQ(b.in_flight(), 0u);
}

TEST(Simulate, ZeroStateStaysZero) {
  const auto model = four_bus_canonical();
  const Matrix K = oracle::gain_s2();
  Broker b(oracle::support(K));
  const auto tr = simulate_closed_loop(model, K, b, Vector::Zero(4));
  for (const auto& x : tr.x) EXPECT_TRUE(x.isZero(0.0));
}

TEST(Simulate, OpenLoopGrows) {
  const auto model = four_bus_canonical();
  Broker b(SparsityMask(4, 4));
  SimulationOptions o;
  o.dt = 1e-5;
  o.horizon = 0.05;
  const Vector x0 = Vector::Ones(4);
  const auto tr = simulate_closed_loop(model, Matrix::Zero(4, 4), b, x0, o);
  EXPECT_GT(tr.x.back().norm(), 10.0 * x0.norm());
}

TEST(Simulate, MatchesMatrixExponential) {
  const auto model = four_bus_canonical();
  const Matrix K = oracle::gain_s2();
  Broker b(oracle::support(K));
  std::mt19937_64 eng(1);
  std::normal_distribution<double> g;
  const Vector x0 = Vector::NullaryExpr(4, [&] { return g(eng); });
  const auto tr = simulate_closed_loop(model, K, b, x0);
  const Matrix Acl = model.A + model.B * K;
  const std::size_t stride = std::max<std::size_t>(1, tr.t.size() / 100);
  for (std::size_t k = 0; k < tr.t.size(); k += stride) {
    const Vector ref = oracle::expm_state(Acl, x0, tr.t[k]);
    EXPECT_LE((tr.x[k] - ref).norm(), 0.01 * ref.norm()) << "t = " << tr.t[k];
  }
  EXPECT_LE(tr.x.back().norm(), 1e-3 * x0.norm());
}

TEST(Simulate, DelayedLinksHoldStaleValues) {
  const auto model = four_bus_canonical();
  const Matrix K = oracle::gain_s2();
  Broker fast(oracle::support(K));
  Broker slow(oracle::support(K), std::vector<std::vector<int>>(4, std::vector<int>(4, 1)));
  SimulationOptions o;
  o.dt = 1e-5;
  o.horizon = 1e-3;
  const Vector x0 = Vector::Ones(4);
  const auto a = simulate_closed_loop(model, K, fast, x0, o);
  const auto b = simulate_closed_loop(model, K, slow, x0, o);
  EXPECT_TRUE(b.u[0].isZero(0.0));
  EXPECT_FALSE(a.u[0].isZero(0.0));
  EXPECT_GT(slow.expired(), 0u);
}

TEST(Simulate, RejectsGainOffMask) {
  const auto model = four_bus_canonical();
  Broker b(SparsityMask::identity(4));
  EXPECT_THROW(simulate_closed_loop(model, oracle::gain_s2(), b, Vector::Ones(4)), Error);
}

TEST(Simulate, DivergenceAborts) {
  const auto model = four_bus_canonical();
  Broker b(SparsityMask(4, 4));
  SimulationOptions o;
  o.dt = 1e-4;
  o.horizon = 10.0;
  o.divergence_limit = 1e3;
  EXPECT_THROW(simulate_closed_loop(model, Matrix::Zero(4, 4), b, Vector::Ones(4), o), Error);
}

TEST(Trajectory, CsvHeader) {
  Trajectory tr;
  tr.t = {0.0};
  tr.x = {Vector::Zero(2)};
  tr.u = {Vector::Ones(1)};
  EXPECT_EQ(tr.to_csv(), "t,x_1,x_2,u_1\n0,0,0,1\n");
}

TEST(Wire, EncodeDecode) {
  const Message m{"sensor/2", 0.125, 7};
  EXPECT_EQ(encode_message(m), R"({"topic":"sensor/2","value":0.125,"slot":7})");
  const auto back = decode_message(encode_message(m));
  EXPECT_EQ(back.topic, m.topic);
  EXPECT_EQ(back.value, m.value);
  EXPECT_EQ(back.slot, m.slot);
  EXPECT_THROW(decode_message("{\"topic\": 3}"), Error);
  EXPECT_THROW(decode_message("not json"), Error);
}

TEST(Wire, SocketMatchesInProcess) {
  const auto mask = oracle::support(oracle::gain_s2());
  std::vector<Message> msgs;
  for (int slot = 0; slot < 5; ++slot)
    for (int j = 0; j < 4; ++j) msgs.push_back({sensor_topic(j), 0.5 * slot + j, slot});
  Broker wire(mask), local(mask);
  const auto got = route_over_socket(wire, msgs);
  for (const auto& m : msgs) local.route(m);
  const auto want = local.collect(4);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t k = 0; k < got.size(); ++k) {
    EXPECT_EQ(got[k].controller, want[k].controller);
    EXPECT_EQ(got[k].message.topic, want[k].message.topic);
    EXPECT_EQ(got[k].message.value, want[k].message.value);
    EXPECT_EQ(got[k].deliver_slot, want[k].deliver_slot);
  }
}
