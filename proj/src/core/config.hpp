#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/agent.hpp"
#include "core/protocols.hpp"

namespace pacnav {

using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;

/// Everything needed to reproduce a run.
struct RunConfig {
  TaskSpec task = default_task(TaskKind::SingleReward);
  AgentConfig agent = preset_agent(Architecture::Classic, "single");
  int n_seeds = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::string output_dir = "pacnav_out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  void validate() const;
};

Json to_json(const Activation& a);
Json to_json(const AgentConfig& a);
Json to_json(const TaskSpec& t);
Json to_json(const RunConfig& c);

Activation activation_from_json(const Json& j);
/// Keys present in j override base; unknown keys throw ConfigError.
AgentConfig agent_from_json(const Json& j, const AgentConfig& base);
TaskSpec task_from_json(const Json& j);
RunConfig run_config_from_json(const Json& j);

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical JSON of the config, excluding
/// the output directory and thread count (which do not affect results).
std::string config_hash(const RunConfig& cfg);

}  // namespace pacnav
