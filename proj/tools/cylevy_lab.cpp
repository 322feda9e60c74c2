// Command-line driver for the experiment registry.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cylevy/lab/run.hpp"

int main(int argc, char** argv) {
  using namespace cylevy;
  CLI::App app{"Run a registered experiment from a JSON config"};
  std::string config_path;
  bool list = false;
  lab::Overrides o;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  unsigned workers = 0;
  std::string out;
  app.add_option("-c,--config", config_path, "experiment config (JSON)");
  app.add_flag("--list", list, "print the experiment registry and exit");
  auto* seed_opt = app.add_option("--seed", seed, "override the config seed");
  auto* paths_opt = app.add_option("--paths", paths, "override the number of Monte Carlo paths");
  auto* workers_opt = app.add_option("--workers", workers, "override the number of worker threads");
  auto* out_opt = app.add_option("--out", out, "output directory");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& e : lab::list_experiments())
      std::cout << e.id << "\t" << e.runtime << "\t" << e.default_paths << "\t" << e.summary << "\n";
    return lab::kExitOk;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return lab::kExitConfig;
  }
  if (*seed_opt) o.seed = seed;
  if (*paths_opt) o.n_paths = paths;
  if (*workers_opt) o.workers = workers;
  if (*out_opt) o.out_dir = out;

  lab::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open " + config_path);
    lab::json j;
    try {
      j = lab::json::parse(in);
    } catch (const lab::json::exception& e) {
      throw ConfigError(config_path + ": " + e.what());
    }
    cfg = lab::parse_config(j, o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return lab::kExitConfig;
  }

  const auto outcome = lab::run_and_write(cfg);
  if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << "\n";
  for (const auto& v : outcome.result.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << (v.kind == lab::VerdictKind::check ? "[check]   " : "[finding] ")
              << v.name << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
  std::cout << "artifacts in " << cfg.out_dir << "\n";
  return outcome.exit_code;
}
