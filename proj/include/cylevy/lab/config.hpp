#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cylevy/io/json.hpp"
#include "cylevy/io/csv.hpp"
#include "cylevy/lab/registry.hpp"

namespace cylevy::lab {

using io::json;

struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  unsigned workers = 1;
  std::size_t truncation = 8;
  double p = 2.0;
  json params = json::object();
  std::string out_dir;
};

/// Command-line values that take precedence over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_paths;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

/// {"experiment": id, "seed": u64, "n_paths": n, "workers": w, "truncation": K,
///  "p": p, "params": {...}, "out": dir}. The seed is mandatory.
inline ExperimentConfig parse_config(const json& j, const Overrides& o = {}) {
  const std::string w = "config";
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  c.id = io::detail::get<std::string>(j, "experiment", w);
  const auto& info = find_experiment(c.id);
  if (o.seed) c.seed = *o.seed;
  else if (j.contains("seed")) c.seed = io::detail::get<std::uint64_t>(j, "seed", w);
  else throw ConfigError("config: 'seed' is required");
  c.n_paths = o.n_paths.value_or(io::detail::get_or<std::size_t>(j, "n_paths", info.default_paths, w));
  c.workers = o.workers.value_or(io::detail::get_or<unsigned>(j, "workers", 1u, w));
  if (c.workers == 0) throw ConfigError("config: workers must be >= 1");
  c.truncation = io::detail::get_or<std::size_t>(j, "truncation", 8, w);
  c.p = io::detail::get_or(j, "p", 2.0, w);
  if (!(c.p >= 1.0 && c.p <= 2.0)) throw ConfigError("config: p must lie in [1, 2]");
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("config: 'params' must be an object");
    c.params = j.at("params");
  }
  c.out_dir = o.out_dir.value_or(io::detail::get_or<std::string>(j, "out", "out/" + c.id, w));
  return c;
}

/// Canonical echo of the effective configuration.
inline json to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.id}, {"seed", c.seed},         {"n_paths", c.n_paths}, {"workers", c.workers},
              {"truncation", c.truncation}, {"p", c.p}, {"params", c.params}};
}

}  // namespace cylevy::lab
