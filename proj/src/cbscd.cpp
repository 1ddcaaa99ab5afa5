#include <algorithm>
#include <functional>

#include "mgcomm/error.hpp"
#include "mgcomm/topology.hpp"

namespace mgcomm {

namespace {

bool peripheral(int i, int nc) { return i == 0 || i == nc - 1; }

int window_size(int i, int ns, int cc) {
  int w = 0;
  for (int j = 0; j < ns; ++j) w += std::abs(i - j) <= cc;
  return w;
}

bool count_allowed(int i, int count, int nc, const ConstraintSet& cs) {
  if (peripheral(i, nc)) return count <= cs.prc;
  return count == 0 || count >= cs.cnc;
}

}  // namespace

std::vector<std::vector<int>> cost_configurations(const ConstraintSet& cs, int ns, int nc) {
  cs.validate();
  if (ns < 1 || nc < 1) throw Error(ErrorCode::kInvalidArgument, "need sensors and controllers");
  std::vector<std::vector<int>> out;
  if (cs.bwc == kUnbounded || cs.bwc > nc) return out;
  const int total = ns * cs.bwc;
  std::vector<int> cur(nc, 0);
  std::function<void(int, int)> rec = [&](int i, int remaining) {
    if (i == nc) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    const int cap = std::min(remaining, window_size(i, ns, cs.cc));
    for (int c = 0; c <= cap; ++c) {
      if (!count_allowed(i, c, nc, cs)) continue;
      cur[i] = c;
      rec(i + 1, remaining - c);
    }
    cur[i] = 0;
  };
  rec(0, total);
  return out;
}

std::vector<SparsityMask> cbscd(int ns, int nc, const ConstraintSet& cs) {
  const auto configs = cost_configurations(cs, ns, nc);
  if (configs.empty()) return {};
  std::vector<std::vector<std::vector<int>>> choices(ns);
  for (int j = 0; j < ns; ++j) {
    std::vector<int> window;
    for (int i = 0; i < nc; ++i)
      if (std::abs(i - j) <= cs.cc) window.push_back(i);
    const int k = cs.bwc;
    if (k > static_cast<int>(window.size())) return {};
    std::vector<int> pick;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
      if (static_cast<int>(pick.size()) == k) {
        choices[j].push_back(pick);
        return;
      }
      for (std::size_t a = start; a < window.size(); ++a) {
        pick.push_back(window[a]);
        rec(a + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }

  std::vector<SparsityMask> out;
  std::vector<int> counts(nc, 0);
  SparsityMask mask(nc, ns);
  std::function<void(int)> assign = [&](int j) {
    if (j == ns) {
      if (std::find(configs.begin(), configs.end(), counts) != configs.end()) out.push_back(mask);
      return;
    }
    for (const auto& pick : choices[j]) {
      for (int i : pick) {
        mask.set(i, j);
        ++counts[i];
      }
      assign(j + 1);
      for (int i : pick) {
        mask.set(i, j, false);
        --counts[i];
      }
    }
  };
  assign(0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mgcomm
