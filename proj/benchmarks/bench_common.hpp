#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "flowscope/ingest.hpp"
#include "flowscope/synth.hpp"

namespace flowscope::bench {

// Generated on first use under the build tree and reused across runs.
inline const Dataset& scenario(const std::string& name) {
  static std::map<std::string, Dataset> cache;
  auto it = cache.find(name);
  if (it != cache.end()) return it->second;
  const auto dir = std::filesystem::path(FLOWSCOPE_BENCH_WORK_DIR) / name;
  if (!std::filesystem::exists(dir / "manifest.json")) {
    generate(load_scenario(std::filesystem::path(FLOWSCOPE_BENCH_DATA_DIR) / "scenarios" / (name + ".toml")), dir);
  }
  return cache.emplace(name, load_directory(dir)).first->second;
}

inline std::filesystem::path scenario_dir(const std::string& name) {
  scenario(name);
  return std::filesystem::path(FLOWSCOPE_BENCH_WORK_DIR) / name;
}

}  // namespace flowscope::bench
