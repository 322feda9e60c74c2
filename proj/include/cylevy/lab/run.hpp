#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "cylevy/lab/experiments.hpp"

namespace cylevy::lab {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitAssumption = 3,
  kExitCheckFailed = 4,
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return s.str();
}

inline json to_json(const Verdict& v) {
  return json{{"name", v.name},
              {"pass", v.pass},
              {"kind", v.kind == VerdictKind::check ? "check" : "finding"},
              {"detail", v.detail}};
}

inline bool checks_pass(const ExperimentResult& r) {
  for (const auto& v : r.verdicts)
    if (v.kind == VerdictKind::check && !v.pass) return false;
  return true;
}

struct RunOutcome {
  int exit_code = kExitOk;
  std::string error;
  ExperimentResult result;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace detail

/// Runs one experiment and writes results.csv, verdicts.json and
/// manifest.json into cfg.out_dir. Errors are mapped to exit codes; on a
/// DivergenceError the manifest still records the measured ratio.
inline RunOutcome run_and_write(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  json error_info;
  try {
    out.result = run_experiment(cfg);
    out.exit_code = checks_pass(out.result) ? kExitOk : kExitCheckFailed;
  } catch (const DivergenceError& e) {
    out.exit_code = kExitCheckFailed;
    out.error = e.what();
    error_info = {{"type", "divergence"}, {"message", e.what()}, {"measured_ratio", e.measured_ratio()}};
  } catch (const AssumptionError& e) {
    out.exit_code = kExitAssumption;
    out.error = e.what();
    error_info = {{"type", "assumption"}, {"message", e.what()}};
  } catch (const MeasurabilityError& e) {
    out.exit_code = kExitConfig;
    out.error = e.what();
    error_info = {{"type", "measurability"}, {"message", e.what()}};
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfig;
    out.error = e.what();
    error_info = {{"type", "config"}, {"message", e.what()}};
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  json verdicts = json::array();
  for (const auto& v : out.result.verdicts) verdicts.push_back(to_json(v));
  const std::string csv = io::to_csv(out.result.table);
  const std::string verdict_text = verdicts.dump(2) + "\n";
  json manifest{{"config", to_json(cfg)},
                {"exit_code", out.exit_code},
                {"wall_seconds", wall},
                {"verdicts", verdicts},
                {"artifacts", {{"results.csv", sha256_hex(csv)}, {"verdicts.json", sha256_hex(verdict_text)}}}};
  if (!error_info.is_null()) manifest["error"] = error_info;
  detail::write_file(dir / "results.csv", csv);
  detail::write_file(dir / "verdicts.json", verdict_text);
  detail::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return out;
}

}  // namespace cylevy::lab
