#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "mgcomm/error.hpp"
#include "mgcomm/synthesis.hpp"

namespace mgcomm {

std::vector<ConstraintSet> default_constraint_grid(int n) {
  std::vector<ConstraintSet> grid;
  for (int bwc = 1; bwc <= n; ++bwc)
    for (int cc = 0; cc < n; ++cc)
      for (int cnc = 0; cnc <= n; ++cnc)
        for (int prc = 0; prc <= n; ++prc) {
          ConstraintSet cs;
          cs.bwc = bwc;
          cs.cc = cc;
          cs.cnc = cnc;
          cs.prc = prc;
          grid.push_back(cs);
        }
  return grid;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = next++; k < count; k = next++) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

SynthesisResult evaluate(const StateSpaceModel& model, const SparsityMask& mask,
                         const ZoneDesignOptions& opt) {
  SynthesisProblem prob;
  prob.model = model;
  prob.mask = mask;
  prob.beta = opt.beta;
  prob.rho = opt.rho;
  prob.norm = opt.norm;
  if (opt.delay_seconds) {
    prob.delay = DelayBound{std::nullopt, DelaySpec::uniform(mask, *opt.delay_seconds)};
    return max_gamma_delay(prob);
  }
  return max_gamma(prob);
}

bool config_less(const ConstraintSet& a, const ConstraintSet& b) {
  if (a.bwc != b.bwc) return a.bwc < b.bwc;
  if (a.cc != b.cc) return a.cc < b.cc;
  if (a.digit_sum() != b.digit_sum()) return a.digit_sum() < b.digit_sum();
  return a.parameter() < b.parameter();
}

}  // namespace

std::vector<ZoneChoice> zone_design(const std::vector<StateSpaceModel>& zones,
                                    const std::vector<ConstraintSet>& grid,
                                    const std::vector<double>& epsilons,
                                    const ZoneDesignOptions& options) {
  if (zones.empty()) throw Error(ErrorCode::kInvalidArgument, "no zones given");
  if (epsilons.size() != zones.size())
    throw Error(ErrorCode::kInvalidArgument, "need one tolerance per zone");
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty constraint grid");

  std::vector<ZoneChoice> out;
  for (std::size_t z = 0; z < zones.size(); ++z) {
    const auto& model = zones[z];
    const int nc = model.m(), ns = model.p();

    // Candidate masks per configuration, with failed links taken out.
    std::vector<std::vector<std::size_t>> config_masks(grid.size());
    std::vector<SparsityMask> unique;
    std::map<SparsityMask, std::size_t> index;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (auto mask : cbscd(ns, nc, grid[g])) {
        for (const auto& [i, j] : options.failed_links)
          if (i < nc && j < ns) mask.set(i, j, false);
        auto [it, fresh] = index.emplace(mask, unique.size());
        if (fresh) unique.push_back(mask);
        auto& list = config_masks[g];
        if (std::find(list.begin(), list.end(), it->second) == list.end())
          list.push_back(it->second);
      }
    }

    std::vector<SynthesisResult> results(unique.size());
    parallel_for(unique.size(), options.threads,
                 [&](std::size_t k) { results[k] = evaluate(model, unique[k], options); });

    ZoneChoice choice;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (config_masks[g].empty()) continue;
      std::size_t best = config_masks[g].front();
      for (std::size_t k : config_masks[g])
        if (results[k].gamma > results[best].gamma) best = k;
      choice.evaluated.push_back({grid[g], config_masks[g].size(), unique[best], results[best]});
    }
    if (choice.evaluated.empty())
      throw Error(ErrorCode::kInfeasible, "no constraint configuration admits a mask");

    double target = choice.evaluated.front().result.max_real_eig();
    for (const auto& c : choice.evaluated) target = std::min(target, c.result.max_real_eig());
    const ConfigurationResult* pick = nullptr;
    for (const auto& c : choice.evaluated) {
      if (c.result.max_real_eig() > target + epsilons[z]) continue;
      if (!pick || config_less(c.constraints, pick->constraints)) pick = &c;
    }
    choice.constraints = pick->constraints;
    choice.mask = pick->mask;
    choice.result = pick->result;
    choice.target_max_eig = target;
    // Roundoff on a singular loop lands near zero with either sign; demand a
    // margin scaled by the model before calling the zone stabilized.
    const double margin = 1e-9 * std::max(1.0, spectral_norm(model.A));
    choice.meets_tolerance = pick->result.max_real_eig() < -margin;
    out.push_back(std::move(choice));
  }
  return out;
}

}  // namespace mgcomm
