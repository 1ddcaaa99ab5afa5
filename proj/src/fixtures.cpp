#include "mgcomm/fixtures.hpp"

#include <map>

#include "json.hpp"
#include "mgcomm/error.hpp"
#include "mgcomm/serialize.hpp"

namespace mgcomm::detail {
const std::map<std::string, const char*>& embedded_fixtures();
}

namespace mgcomm::fixtures {

namespace {

const nlohmann::json& parsed(const std::string& name) {
  static const std::map<std::string, nlohmann::json> cache = [] {
    std::map<std::string, nlohmann::json> m;
    for (const auto& [key, raw] : detail::embedded_fixtures()) m[key] = nlohmann::json::parse(raw);
    return m;
  }();
  auto it = cache.find(name);
  if (it == cache.end()) throw Error(ErrorCode::kNotFound, "no fixture named '" + name + "'");
  return it->second;
}

const nlohmann::json& gain_entry(const std::string& key) {
  const auto& gains = parsed("published_gains").at("gains");
  if (!gains.contains(key)) throw Error(ErrorCode::kNotFound, "no published gain '" + key + "'");
  return gains.at(key);
}

NetworkFixture network(const std::string& name) {
  const std::string& raw = document(name);
  return {network_from_json(raw), constraints_from_json(raw)};
}

}  // namespace

const std::string& document(const std::string& name) {
  static const std::map<std::string, std::string> docs = [] {
    std::map<std::string, std::string> m;
    for (const auto& [key, raw] : detail::embedded_fixtures()) m[key] = raw;
    return m;
  }();
  auto it = docs.find(name);
  if (it == docs.end()) throw Error(ErrorCode::kNotFound, "no fixture named '" + name + "'");
  return it->second;
}

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (const auto& [key, raw] : detail::embedded_fixtures()) out.push_back(key);
  return out;
}

NetworkFixture ch2_network() { return network("ch2_network"); }
NetworkFixture ch5_network() { return network("ch5_network"); }

Matrix published_gain(const std::string& key) {
  return matrix_from_rows(gain_entry(key).at("K").get<std::vector<std::vector<double>>>());
}

double published_gamma(const std::string& key) { return gain_entry(key).at("gamma").get<double>(); }

double published_max_eig(const std::string& key) {
  return gain_entry(key).at("max_eig").get<double>();
}

Matrix bus13_gain() {
  const auto& b = parsed("published_gains").at("bus13");
  const auto diag = b.at("diag").get<std::vector<double>>();
  const auto sub = b.at("subdiag").get<std::vector<double>>();
  const double scale = b.at("scale").get<double>();
  const int n = static_cast<int>(diag.size());
  Matrix K = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) K(i, i) = scale * diag[i];
  for (int i = 0; i + 1 < n; ++i) K(i + 1, i) = scale * sub[i];
  return K;
}

SparsityMask bus13_mask() {
  const int n = static_cast<int>(bus13_gain().rows());
  SparsityMask mask(n, n);
  for (int i = 0; i < n; ++i) {
    mask.set(i, i);
    if (i + 1 < n) mask.set(i + 1, i);
  }
  return mask;
}

GridParams microgrid_params() { return grid_params_from_json(document("microgrid_4bus")); }

std::vector<Zone> microgrid_zones() {
  std::vector<Zone> out;
  for (const auto& z : parsed("microgrid_4bus").at("zones"))
    out.push_back({z.at("name").get<std::string>(), z.at("load_R").get<double>(),
                   z.at("open_max_eig").get<double>(), z.at("closed_max_eig").get<double>(),
                   z.at("parameter").get<std::string>()});
  return out;
}

}  // namespace mgcomm::fixtures
