#include "mgcomm/topology.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mgcomm/error.hpp"

namespace mgcomm {

LayeredNetwork LayeredNetwork::windowed(const std::vector<int>& sizes, int cc) {
  LayeredNetwork net;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    std::string name = l == 0 ? "sensor"
                       : l + 1 == sizes.size() ? "controller"
                                               : "relay" + std::to_string(l);
    net.layers.push_back({name, sizes[l]});
  }
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    std::vector<std::vector<int>> adj(sizes[l], std::vector<int>(sizes[l + 1], 0));
    for (int a = 0; a < sizes[l]; ++a)
      for (int b = 0; b < sizes[l + 1]; ++b) adj[a][b] = std::abs(a - b) <= cc ? 1 : 0;
    net.adjacency.push_back(std::move(adj));
  }
  net.validate();
  return net;
}

void LayeredNetwork::validate() const {
  if (layers.size() < 2) throw Error(ErrorCode::kInvalidArgument, "network needs >= 2 layers");
  for (const auto& l : layers)
    if (l.size <= 0) throw Error(ErrorCode::kInvalidArgument, "layer '" + l.name + "' is empty");
  if (adjacency.size() + 1 != layers.size())
    throw Error(ErrorCode::kInvalidArgument, "need one adjacency matrix per consecutive layer pair");
  for (std::size_t l = 0; l < adjacency.size(); ++l) {
    if (static_cast<int>(adjacency[l].size()) != layers[l].size)
      throw Error(ErrorCode::kDimension, "adjacency " + std::to_string(l) + " has wrong row count");
    for (const auto& row : adjacency[l]) {
      if (static_cast<int>(row.size()) != layers[l + 1].size)
        throw Error(ErrorCode::kDimension,
                    "adjacency " + std::to_string(l) + " has wrong column count");
      for (int v : row)
        if (v != 0 && v != 1) throw Error(ErrorCode::kParse, "adjacency entries must be 0/1");
    }
  }
}

std::string to_string(Objective o) {
  switch (o) {
    case Objective::kReliability: return "reliability";
    case Objective::kCost: return "cost";
    case Objective::kUserRequirement: return "user_requirement";
  }
  return "reliability";
}

Objective objective_from_string(const std::string& s) {
  if (s == "reliability") return Objective::kReliability;
  if (s == "cost") return Objective::kCost;
  if (s == "user_requirement" || s == "user-requirement") return Objective::kUserRequirement;
  throw Error(ErrorCode::kInvalidArgument, "unknown objective '" + s + "'");
}

std::string ConstraintSet::parameter() const {
  auto digit = [](int v) { return v == kUnbounded ? std::string("inf") : std::to_string(v); };
  return digit(bwc) + digit(cc) + digit(cnc) + digit(prc);
}

void ConstraintSet::validate() const {
  if (bwc < 1) throw Error(ErrorCode::kInvalidArgument, "bwc must be >= 1");
  if (cc < 0 || cnc < 0 || prc < 0)
    throw Error(ErrorCode::kInvalidArgument, "cc, cnc and prc must be non-negative");
  for (int r : user_requirement)
    if (r < 0) throw Error(ErrorCode::kInvalidArgument, "user requirement must be non-negative");
}

int ConnectionSet::hop_count() const {
  int hops = 0;
  for (const auto& p : paths) hops += static_cast<int>(p.size()) - 1;
  return hops;
}

std::vector<Path> enumerate_paths(const LayeredNetwork& in, const ConstraintSet& cs) {
  LayeredNetwork net = in;
  if (net.adjacency.empty()) {
    std::vector<int> sizes;
    for (const auto& l : net.layers) sizes.push_back(l.size);
    net = LayeredNetwork::windowed(sizes, cs.cc);
  }
  net.validate();
  std::vector<Path> out;
  Path cur;
  const int L = net.num_layers();
  std::function<void(int, int)> walk = [&](int layer, int node) {
    cur.push_back(node);
    if (layer == L - 1) {
      out.push_back(cur);
    } else {
      for (int b = 0; b < net.size(layer + 1); ++b)
        if (net.edge(layer, node, b)) walk(layer + 1, b);
    }
    cur.pop_back();
  };
  for (int s = 0; s < net.num_sensors(); ++s) walk(0, s);
  return out;
}

namespace {

int check_constrained_layer(const LayeredNetwork& net, const ConstraintSet& cs) {
  const int h = cs.constrained_layer;
  if (h != 0 && h != net.num_layers() - 1)
    throw Error(ErrorCode::kInvalidArgument,
                "constrained layer must be the sensor or the controller layer");
  return h;
}

Path drop_layer(const Path& p, int h) {
  Path out;
  for (int k = 0; k < static_cast<int>(p.size()); ++k)
    if (k != h) out.push_back(p[k]);
  return out;
}

// Routes with the constrained layer removed, sorted and unique.
std::vector<Path> trunks_of(const std::vector<Path>& paths, const LayeredNetwork& net, int h) {
  const auto L = static_cast<std::size_t>(net.num_layers());
  std::set<Path> uniq;
  for (const auto& p : paths) {
    if (p.size() == L) {
      uniq.insert(drop_layer(p, h));
    } else if (p.size() + 1 == L) {
      uniq.insert(p);
    } else {
      throw Error(ErrorCode::kDimension, "path length does not match the network");
    }
  }
  return {uniq.begin(), uniq.end()};
}

// All subsets of items with the given size, lexicographic by index.
template <typename T>
std::vector<std::vector<T>> subsets_of_size(const std::vector<T>& items, int k) {
  std::vector<std::vector<T>> out;
  const int n = static_cast<int>(items.size());
  if (k < 0 || k > n) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<T> pick;
    for (int i : idx) pick.push_back(items[i]);
    out.push_back(std::move(pick));
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> fanout_options(const std::vector<T>& items, Objective objective,
                                           int required) {
  std::vector<std::vector<T>> out;
  switch (objective) {
    case Objective::kReliability:
      out.push_back(items);
      break;
    case Objective::kUserRequirement:
      out = subsets_of_size(items, required < 0 ? static_cast<int>(items.size()) : required);
      break;
    case Objective::kCost:
      for (int k = 0; k <= static_cast<int>(items.size()); ++k)
        for (auto& s : subsets_of_size(items, k)) out.push_back(std::move(s));
      break;
  }
  return out;
}

int requirement(const ConstraintSet& cs, int node) {
  if (cs.user_requirement.empty()) return -1;
  if (node >= static_cast<int>(cs.user_requirement.size()))
    throw Error(ErrorCode::kDimension, "user requirement shorter than the hub layer");
  return cs.user_requirement[node];
}

// Distinct sensors reaching each controller must be 0 or at least cnc on
// central controllers.
bool meets_central_threshold(const ConnectionSet& set, int nc, int cnc) {
  if (cnc <= 0) return true;
  std::vector<std::set<int>> incoming(nc);
  for (std::size_t k = 0; k < set.paths.size(); ++k)
    incoming[set.controller(k)].insert(set.sensor(k));
  for (int i = 1; i + 1 < nc; ++i) {
    const int c = static_cast<int>(incoming[i].size());
    if (c != 0 && c < cnc) return false;
  }
  return true;
}

// Injective choices, one option per slot, with no repeated key; emitted in
// lexicographic order of option indices.
template <typename Option, typename KeyFn>
void injective_product(const std::vector<std::vector<Option>>& options, KeyFn keys,
                       const std::function<void(const std::vector<Option>&)>& emit) {
  std::vector<Option> chosen;
  std::multiset<std::pair<int, int>> used;
  std::function<void(std::size_t)> rec = [&](std::size_t slot) {
    if (slot == options.size()) {
      emit(chosen);
      return;
    }
    for (const auto& opt : options[slot]) {
      const auto ks = keys(opt);
      bool clash = false;
      for (const auto& k : ks)
        if (used.count(k)) clash = true;
      if (clash) continue;
      for (const auto& k : ks) used.insert(k);
      chosen.push_back(opt);
      rec(slot + 1);
      chosen.pop_back();
      for (const auto& k : ks) used.erase(used.find(k));
    }
  };
  rec(0);
}

// Maximum-cardinality matchings sensor -> division, as a division index per
// sensor (-1 for unmatched).
std::vector<std::vector<int>> sensor_matchings(const LayeredNetwork& net,
                                               const std::vector<int>& divisions) {
  const int ns = net.num_sensors();
  std::vector<std::vector<int>> all;
  std::vector<int> cur(ns, -1);
  std::vector<bool> taken(divisions.size(), false);
  int best = 0;
  std::function<void(int, int)> rec = [&](int s, int size) {
    if (s == ns) {
      if (size > best) {
        best = size;
        all.clear();
      }
      if (size == best) all.push_back(cur);
      return;
    }
    for (std::size_t d = 0; d < divisions.size(); ++d) {
      if (taken[d] || !net.edge(0, s, divisions[d])) continue;
      taken[d] = true;
      cur[s] = static_cast<int>(d);
      rec(s + 1, size + 1);
      cur[s] = -1;
      taken[d] = false;
    }
    rec(s + 1, size);
  };
  rec(0, 0);
  return all;
}

void append_unique(std::vector<ConnectionSet>& out, std::set<std::vector<Path>>& seen,
                   ConnectionSet set) {
  std::sort(set.paths.begin(), set.paths.end());
  if (set.paths.empty()) return;
  if (seen.insert(set.paths).second) out.push_back(std::move(set));
}

// Resource constraint on the sensors: divisions are the first relay layer
// and each picks one hub in the layer after it.
std::vector<ConnectionSet> sets_sensor_side(const std::vector<Path>& trunks,
                                            const LayeredNetwork& net, const ConstraintSet& cs,
                                            Objective objective) {
  std::map<int, std::map<int, std::vector<Path>>> groups;  // division -> hub -> trunks
  for (const auto& t : trunks) {
    const int hub = t.size() >= 2 ? t[1] : -1;
    groups[t[0]][hub].push_back(t);
  }
  std::vector<int> divisions;
  for (const auto& [d, _] : groups) divisions.push_back(d);

  struct Subgroup {
    int hub;
    std::vector<Path> trunks;
  };
  std::vector<std::vector<Subgroup>> options;
  for (int d : divisions) {
    std::vector<Subgroup> opts;
    for (const auto& [hub, ts] : groups[d])
      for (auto& pick : fanout_options(ts, objective, hub < 0 ? -1 : requirement(cs, hub)))
        opts.push_back({hub, std::move(pick)});
    options.push_back(std::move(opts));
  }
  const auto matchings = sensor_matchings(net, divisions);
  std::vector<ConnectionSet> out;
  std::set<std::vector<Path>> seen;
  injective_product<Subgroup>(
      options,
      [](const Subgroup& g) {
        return g.hub < 0 ? std::vector<std::pair<int, int>>{}
                         : std::vector<std::pair<int, int>>{{1, g.hub}};
      },
      [&](const std::vector<Subgroup>& v) {
        for (const auto& w : matchings) {
          ConnectionSet set;
          for (int s = 0; s < static_cast<int>(w.size()); ++s) {
            if (w[s] < 0) continue;
            for (const auto& t : v[w[s]].trunks) {
              Path p{s};
              p.insert(p.end(), t.begin(), t.end());
              set.paths.push_back(std::move(p));
            }
          }
          if (objective == Objective::kCost &&
              !meets_central_threshold(set, net.num_controllers(), cs.cnc))
            continue;
          append_unique(out, seen, std::move(set));
        }
      });
  return out;
}

// Requirement on the controllers: divisions are the hubs next to the
// controllers, each takes one trunk and a controller fan-out.
std::vector<ConnectionSet> sets_controller_side(const std::vector<Path>& trunks,
                                                const LayeredNetwork& net,
                                                const ConstraintSet& cs, Objective objective) {
  const int hub_layer = net.num_layers() - 2;
  std::map<int, std::vector<Path>> groups;
  for (const auto& t : trunks) groups[t.back()].push_back(t);

  std::vector<std::vector<Path>> options;
  std::vector<int> divisions;
  for (const auto& [hub, ts] : groups) {
    divisions.push_back(hub);
    options.push_back(ts);
  }
  std::vector<std::vector<std::vector<int>>> fanouts;
  for (int hub : divisions) {
    std::vector<int> adj;
    for (int c = 0; c < net.num_controllers(); ++c)
      if (net.edge(hub_layer, hub, c)) adj.push_back(c);
    fanouts.push_back(fanout_options(adj, objective, requirement(cs, hub)));
    if (fanouts.back().empty()) return {};
  }

  std::vector<ConnectionSet> out;
  std::set<std::vector<Path>> seen;
  injective_product<Path>(
      options,
      [](const Path& t) {
        std::vector<std::pair<int, int>> keys;
        for (std::size_t k = 0; k + 1 < t.size(); ++k) keys.emplace_back(static_cast<int>(k), t[k]);
        return keys;
      },
      [&](const std::vector<Path>& v) {
        std::vector<std::size_t> pick(divisions.size(), 0);
        while (true) {
          ConnectionSet set;
          for (std::size_t d = 0; d < divisions.size(); ++d)
            for (int c : fanouts[d][pick[d]]) {
              Path p = v[d];
              p.push_back(c);
              set.paths.push_back(std::move(p));
            }
          if (objective != Objective::kCost ||
              meets_central_threshold(set, net.num_controllers(), cs.cnc))
            append_unique(out, seen, std::move(set));
          std::size_t d = divisions.size();
          while (d > 0) {
            --d;
            if (++pick[d] < fanouts[d].size()) break;
            pick[d] = 0;
            if (d == 0) return;
          }
          if (divisions.empty()) return;
        }
      });
  return out;
}

}  // namespace

std::vector<Path> bandwidth_filter(const std::vector<Path>& paths, const LayeredNetwork& net,
                                   const ConstraintSet& cs) {
  if (cs.bwc == kUnbounded) return paths;
  const int h = check_constrained_layer(net, cs);
  return trunks_of(paths, net, h);
}

std::vector<ConnectionSet> complete_sets(const std::vector<Path>& paths,
                                         const LayeredNetwork& net, const ConstraintSet& cs,
                                         Objective objective) {
  net.validate();
  const int h = check_constrained_layer(net, cs);
  const auto trunks = trunks_of(paths, net, h);
  if (trunks.empty()) return {};
  auto out = h == 0 ? sets_sensor_side(trunks, net, cs, objective)
                    : sets_controller_side(trunks, net, cs, objective);
  if (objective == Objective::kCost)
    std::stable_sort(out.begin(), out.end(), [](const ConnectionSet& a, const ConnectionSet& b) {
      return a.paths.size() < b.paths.size();
    });
  return out;
}

SparsityMask mask_from_set(const ConnectionSet& s, int num_controllers, int num_sensors) {
  SparsityMask m(num_controllers, num_sensors);
  for (std::size_t k = 0; k < s.paths.size(); ++k) m.set(s.controller(k), s.sensor(k));
  return m;
}

std::string path_code(const Path& p) {
  std::string s;
  for (int v : p) s += std::to_string(v + 1);
  return s;
}

}  // namespace mgcomm
