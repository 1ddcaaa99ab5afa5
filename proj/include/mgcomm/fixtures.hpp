#pragma once

#include <string>
#include <vector>

#include "mgcomm/grid_model.hpp"
#include "mgcomm/topology.hpp"

namespace mgcomm::fixtures {

// Raw JSON of a shipped fixture ("ch2_network", "ch5_network",
// "published_gains", "microgrid_4bus").
const std::string& document(const std::string& name);
std::vector<std::string> names();

struct NetworkFixture {
  LayeredNetwork net;
  ConstraintSet constraints;
};

NetworkFixture ch2_network();
NetworkFixture ch5_network();

// Published gains: "ch2_s1", "ch2_s2", "ch2_s3", "ch5_s4".
Matrix published_gain(const std::string& key);
double published_gamma(const std::string& key);
double published_max_eig(const std::string& key);

// Lower-bidiagonal 13-bus gain in physical units.
Matrix bus13_gain();
SparsityMask bus13_mask();

struct Zone {
  std::string name;
  double load_R = 0.0;
  double open_max_eig = 0.0;
  double closed_max_eig = 0.0;
  std::string parameter;
};

GridParams microgrid_params();
std::vector<Zone> microgrid_zones();

}  // namespace mgcomm::fixtures
