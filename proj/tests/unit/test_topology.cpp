#include <gtest/gtest.h>

#include <random>
#include <set>

#include "json.hpp"
#include "mgcomm/error.hpp"
#include "mgcomm/fixtures.hpp"
#include "mgcomm/serialize.hpp"
#include "mgcomm/topology.hpp"
#include "oracles.hpp"

using namespace mgcomm;

namespace {

LayeredNetwork full_network(const std::vector<int>& sizes) {
  return LayeredNetwork::windowed(sizes, 100);
}

LayeredNetwork random_network(std::mt19937_64& eng, const std::vector<int>& sizes, double density) {
  std::bernoulli_distribution edge(density);
  LayeredNetwork net;
  for (std::size_t l = 0; l < sizes.size(); ++l) net.layers.push_back({"l" + std::to_string(l), sizes[l]});
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    std::vector<std::vector<int>> adj(sizes[l], std::vector<int>(sizes[l + 1]));
    for (auto& row : adj)
      for (auto& v : row) v = edge(eng) ? 1 : 0;
    net.adjacency.push_back(adj);
  }
  return net;
}

std::set<std::vector<Path>> as_set(const std::vector<ConnectionSet>& sets) {
  std::set<std::vector<Path>> out;
  for (auto s : sets) {
    std::sort(s.paths.begin(), s.paths.end());
    out.insert(s.paths);
  }
  return out;
}

}  // namespace

TEST(EnumeratePaths, SingleChain) {
  EXPECT_EQ(enumerate_paths(full_network({1, 1, 1, 1}), {}).size(), 1u);
}

TEST(EnumeratePaths, ProductOfChoices) {
  const auto paths = enumerate_paths(full_network({2, 2, 2}), {});
  EXPECT_EQ(paths.size(), 8u);
  EXPECT_TRUE(std::is_sorted(paths.begin(), paths.end()));
}

TEST(EnumeratePaths, MatchesBruteForceOnRandomNetworks) {
  std::mt19937_64 eng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = random_network(eng, {1 + trial % 3, 2, 3, 1 + trial % 2}, 0.6);
    EXPECT_EQ(enumerate_paths(net, {}), oracle::all_paths(net));
  }
}

TEST(EnumeratePaths, WindowUsedWhenAdjacencyMissing) {
  LayeredNetwork net;
  net.layers = {{"s", 3}, {"c", 3}};
  ConstraintSet cs;
  cs.cc = 0;
  EXPECT_EQ(enumerate_paths(net, cs).size(), 3u);
}

TEST(Calibration, Ch2Fixture) {
  const auto fx = fixtures::ch2_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  EXPECT_EQ(paths.size(), 47u);
  const auto filtered = bandwidth_filter(paths, fx.net, fx.constraints);
  EXPECT_EQ(filtered.size(), 18u);
  const auto sets = complete_sets(paths, fx.net, fx.constraints, Objective::kReliability);
  EXPECT_EQ(sets.size(), 25u);
  for (const auto& s : sets) EXPECT_EQ(s.paths.size(), 7u);
}

TEST(Calibration, Ch5Fixture) {
  const auto fx = fixtures::ch5_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  const auto filtered = bandwidth_filter(paths, fx.net, fx.constraints);
  EXPECT_EQ(filtered.size(), 26u);
  const auto sets = complete_sets(paths, fx.net, fx.constraints, Objective::kUserRequirement);
  EXPECT_EQ(sets.size(), 50u);
  for (const auto& s : sets) EXPECT_EQ(s.paths.size(), 6u);

  std::set<std::set<std::string>> v;
  for (const auto& s : sets) {
    std::set<std::string> codes;
    for (const auto& p : s.paths) codes.insert(path_code(Path(p.begin(), p.end() - 1)));
    v.insert(codes);
  }
  const auto doc = nlohmann::json::parse(fixtures::document("ch5_network"));
  std::set<std::set<std::string>> table;
  for (const auto& row : doc.at("v_table")) table.insert(row.get<std::set<std::string>>());
  EXPECT_EQ(table.size(), 25u);
  EXPECT_EQ(v, table);
}

TEST(BandwidthFilter, UnboundedIsIdentity) {
  const auto fx = fixtures::ch2_network();
  auto cs = fx.constraints;
  cs.bwc = kUnbounded;
  const auto paths = enumerate_paths(fx.net, cs);
  EXPECT_EQ(bandwidth_filter(paths, fx.net, cs), paths);
}

TEST(CompleteSets, DegenerateSingleLink) {
  const auto net = full_network({1, 1, 1});
  const auto sets = complete_sets(enumerate_paths(net, {}), net, {}, Objective::kReliability);
  ASSERT_EQ(sets.size(), 1u);
  EXPECT_EQ(sets[0].paths.size(), 1u);
}

TEST(CompleteSets, SensorSideMatchesBruteForce) {
  std::mt19937_64 eng(5);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<int> sizes = trial % 2 ? std::vector<int>{3, 3, 3} : std::vector<int>{2, 2, 2, 2};
    const auto net = random_network(eng, sizes, 0.55);
    const auto paths = oracle::all_paths(net);
    if (paths.empty() || paths.size() > 18) continue;
    ConstraintSet cs;
    const auto got = as_set(complete_sets(paths, net, cs, Objective::kReliability));
    const auto want = oracle::brute_sets(paths, oracle::sensor_side_reliability(net, paths));
    EXPECT_EQ(got, want) << "trial " << trial;
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(CompleteSets, ControllerSideMatchesBruteForce) {
  std::mt19937_64 eng(9);
  int compared = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<int> sizes = trial % 2 ? std::vector<int>{3, 3, 3} : std::vector<int>{2, 2, 2, 2};
    const auto net = random_network(eng, sizes, 0.55);
    const auto paths = oracle::all_paths(net);
    if (paths.empty() || paths.size() > 18) continue;
    ConstraintSet cs;
    cs.constrained_layer = net.num_layers() - 1;
    const auto objective = trial % 3 ? Objective::kUserRequirement : Objective::kReliability;
    if (objective == Objective::kUserRequirement) {
      std::uniform_int_distribution<int> req(1, 2);
      for (int h = 0; h < sizes[sizes.size() - 2]; ++h) cs.user_requirement.push_back(req(eng));
    }
    const auto got = as_set(complete_sets(paths, net, cs, objective));
    const auto want =
        oracle::brute_sets(paths, oracle::controller_side(net, paths, objective, cs.user_requirement));
    EXPECT_EQ(got, want) << "trial " << trial;
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(CompleteSets, SatisfyBandwidthOnEveryLink) {
  const auto fx = fixtures::ch2_network();
  const auto sets = complete_sets(enumerate_paths(fx.net, fx.constraints), fx.net, fx.constraints,
                                  Objective::kReliability);
  for (const auto& s : sets) {
    // Each relay link carries data of one sensor only.
    std::map<std::tuple<int, int, int>, std::set<int>> carried;
    for (const auto& p : s.paths)
      for (std::size_t k = 1; k + 1 < p.size(); ++k) carried[{static_cast<int>(k), p[k], p[k + 1]}].insert(p[0]);
    for (const auto& [link, sensors] : carried) EXPECT_EQ(sensors.size(), 1u);
  }
}

TEST(CompleteSets, Deterministic) {
  const auto fx = fixtures::ch5_network();
  const auto paths = enumerate_paths(fx.net, fx.constraints);
  const auto a = complete_sets(paths, fx.net, fx.constraints, Objective::kUserRequirement);
  const auto b = complete_sets(paths, fx.net, fx.constraints, Objective::kUserRequirement);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].paths, b[k].paths);
}

TEST(CompleteSets, CostOrderedByConnectionCount) {
  const auto fx = fixtures::ch2_network();
  const auto sets =
      complete_sets(enumerate_paths(fx.net, fx.constraints), fx.net, fx.constraints, Objective::kCost);
  ASSERT_FALSE(sets.empty());
  for (std::size_t k = 1; k < sets.size(); ++k) EXPECT_LE(sets[k - 1].paths.size(), sets[k].paths.size());
}

TEST(MaskFromSet, ScenarioTwoTopology) {
  const auto fx = fixtures::ch2_network();
  const auto sets = complete_sets(enumerate_paths(fx.net, fx.constraints), fx.net, fx.constraints,
                                  Objective::kReliability);
  const auto want = oracle::support(oracle::gain_s2());
  bool found = false;
  for (const auto& s : sets) {
    const auto m = mask_from_set(s, 4, 4);
    EXPECT_LE(m.popcount(), static_cast<int>(s.paths.size()));
    found = found || m == want;
  }
  EXPECT_TRUE(found);
}

TEST(MaskFromSet, EmptySet) { EXPECT_TRUE(mask_from_set({}, 3, 2).empty()); }

TEST(PathCode, OneBasedDigits) { EXPECT_EQ(path_code({0, 1, 1}), "122"); }

TEST(CostConfigurations, GeneratorExample) {
  ConstraintSet cs;
  cs.bwc = 2;
  cs.cc = 1;
  cs.cnc = 2;
  cs.prc = 1;
  EXPECT_EQ(cost_configurations(cs, 4, 4), (std::vector<std::vector<int>>{{1, 3, 3, 1}}));
}

TEST(CostConfigurations, InfeasibleIsEmpty) {
  ConstraintSet cs;
  cs.bwc = 1;
  cs.prc = 0;
  cs.cnc = 5;
  EXPECT_TRUE(cost_configurations(cs, 4, 4).empty());
}

TEST(CostConfigurations, MatchesBruteForceWithWideWindow) {
  for (int ns = 1; ns <= 3; ++ns)
    for (int nc = 1; nc <= 4; ++nc)
      for (int bwc = 1; bwc <= 2; ++bwc)
        for (int cnc = 0; cnc <= 3; ++cnc)
          for (int prc = 0; prc <= 3; ++prc) {
            ConstraintSet cs;
            cs.bwc = bwc;
            cs.cc = 100;
            cs.cnc = cnc;
            cs.prc = prc;
            if (bwc > nc) continue;
            EXPECT_EQ(cost_configurations(cs, ns, nc), oracle::brute_cost_configurations(cs, ns, nc))
                << ns << nc << cs.parameter();
          }
}

TEST(Cbscd, GeneratorExampleSums) {
  ConstraintSet cs;
  cs.bwc = 2;
  cs.cc = 1;
  cs.cnc = 2;
  cs.prc = 1;
  const auto masks = cbscd(4, 4, cs);
  ASSERT_FALSE(masks.empty());
  for (const auto& m : masks) {
    for (int j = 0; j < 4; ++j) EXPECT_EQ(m.col_sum(j), 2);
    EXPECT_EQ((std::vector<int>{m.row_sum(0), m.row_sum(1), m.row_sum(2), m.row_sum(3)}),
              (std::vector<int>{1, 3, 3, 1}));
  }
}

TEST(Cbscd, ForbiddingEverythingIsEmpty) {
  ConstraintSet cs;
  cs.bwc = 1;
  cs.cc = 0;
  cs.prc = 0;
  cs.cnc = 10;
  EXPECT_TRUE(cbscd(3, 3, cs).empty());
}

TEST(Cbscd, TwoByTwoPermutations) {
  ConstraintSet cs;
  cs.bwc = 1;
  cs.cc = 1;
  cs.prc = 1;
  const auto masks = cbscd(2, 2, cs);
  EXPECT_EQ(masks, oracle::brute_masks(2, 2, cs));
  EXPECT_EQ(masks.size(), 2u);
}

TEST(Cbscd, MatchesBruteForceOnSmallInstances) {
  for (int ns = 1; ns <= 3; ++ns)
    for (int nc = 1; nc <= 3; ++nc)
      for (int bwc = 1; bwc <= 3; ++bwc)
        for (int cc = 0; cc <= 2; ++cc)
          for (int cnc = 0; cnc <= 3; ++cnc)
            for (int prc = 0; prc <= 3; ++prc) {
              ConstraintSet cs;
              cs.bwc = bwc;
              cs.cc = cc;
              cs.cnc = cnc;
              cs.prc = prc;
              EXPECT_EQ(cbscd(ns, nc, cs), oracle::brute_masks(ns, nc, cs)) << ns << "x" << nc << " " << cs.parameter();
            }
}

TEST(Constraints, JsonForms) {
  const auto cs = constraints_from_json(R"({"constraints": {"bwc": "inf", "cc": 2, "cnc": 1, "prc": 3}})");
  EXPECT_EQ(cs.bwc, kUnbounded);
  EXPECT_EQ(cs.cc, 2);
  EXPECT_EQ(cs.parameter(), "inf213");
  EXPECT_EQ(constraints_from_json(constraints_to_json(cs)).parameter(), "inf213");
  EXPECT_THROW(constraints_from_json(R"({"bwc": 0})"), Error);
}
