#pragma once

#include <climits>
#include <string>
#include <vector>

#include "mgcomm/mask.hpp"

namespace mgcomm {

inline constexpr int kUnbounded = INT_MAX;

struct Layer {
  std::string name;
  int size = 0;
};

// Layers run sensors -> relays... -> controllers. adjacency[l](a, b) allows
// an edge from node a of layer l to node b of layer l + 1.
struct LayeredNetwork {
  std::vector<Layer> layers;
  std::vector<std::vector<std::vector<int>>> adjacency;

  static LayeredNetwork windowed(const std::vector<int>& sizes, int cc);

  int num_layers() const { return static_cast<int>(layers.size()); }
  int size(int layer) const { return layers.at(layer).size; }
  bool edge(int layer, int a, int b) const { return adjacency[layer][a][b] != 0; }
  int num_sensors() const { return layers.front().size; }
  int num_controllers() const { return layers.back().size; }

  void validate() const;
};

enum class Objective { kReliability, kCost, kUserRequirement };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

struct ConstraintSet {
  int bwc = 1;  // kUnbounded disables the bandwidth rule
  int cc = 1;
  int cnc = 0;  // 0 disables the central threshold
  int prc = 0;  // cap on the first and last controller; taken literally, 0 forbids them
  // Layer carrying the resource or requirement constraint: 0 (sensors) or
  // the controller layer.
  int constrained_layer = 0;
  // Required controller fan-out per node of the layer next to the
  // controllers; empty means every adjacent controller.
  std::vector<int> user_requirement;

  // "bwc cc cnc prc" digits, e.g. "3303".
  std::string parameter() const;
  int digit_sum() const { return bwc + cc + cnc + prc; }
  void validate() const;
};

using Path = std::vector<int>;

struct ConnectionSet {
  std::vector<Path> paths;

  int sensor(std::size_t k) const { return paths[k].front(); }
  int controller(std::size_t k) const { return paths[k].back(); }
  int hop_count() const;
};

// All sensor -> controller paths in lexicographic order.
std::vector<Path> enumerate_paths(const LayeredNetwork& net, const ConstraintSet& cs);

// Folds the constrained layer out of every path and keeps one entry per
// distinct remaining route. With an unbounded bandwidth the input is returned.
std::vector<Path> bandwidth_filter(const std::vector<Path>& paths, const LayeredNetwork& net,
                                   const ConstraintSet& cs);

std::vector<ConnectionSet> complete_sets(const std::vector<Path>& paths,
                                         const LayeredNetwork& net, const ConstraintSet& cs,
                                         Objective objective);

SparsityMask mask_from_set(const ConnectionSet& s, int num_controllers, int num_sensors);

// 1-based digit code of a path prefix, e.g. {0, 1, 1} -> "122".
std::string path_code(const Path& p);

// Controller incoming-count vectors admitted by the cost constraints.
std::vector<std::vector<int>> cost_configurations(const ConstraintSet& cs, int ns, int nc);

// Direct sensor -> controller masks satisfying the constraint set.
std::vector<SparsityMask> cbscd(int ns, int nc, const ConstraintSet& cs);

}  // namespace mgcomm
