#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/bundle.hpp"
#include "core/config.hpp"

namespace pacnav {

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootEnv = "PACNAV_OUTPUT_ROOT";

/// Command-line overrides applied on top of a loaded config.
struct RunOverrides {
  std::optional<int> n_seeds;
  std::optional<std::uint64_t> master_seed;
  std::optional<double> dt;
  std::optional<TdScheme> scheme;
  std::optional<int> threads;
  std::optional<std::string> output_dir;
};

void apply_overrides(RunConfig& cfg, const RunOverrides& o);

/// Relative output directories resolve against $PACNAV_OUTPUT_ROOT when set.
fs::path resolve_output_dir(const std::string& dir);

struct RunSummary {
  fs::path bundle;
  std::string config_hash;
  int n_seeds = 0;
  int aborted_seeds = 0;
  std::vector<SeedResult> seeds;
};

/// Runs every seed and writes the bundle. Aborted seeds still produce a
/// (partial) bundle; callers check aborted_seeds.
RunSummary cmd_run(const RunConfig& cfg, const fs::path& out_dir,
                   std::function<void(int seed_index, const TrialRecord&)> on_trial = {});

enum class SweepAxis { ExpansionRatio, Activation, K, TauG };

std::string_view sweep_axis_name(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Returns a copy of cfg with the axis set to value (numbers or activation names).
RunConfig apply_sweep_point(const RunConfig& cfg, SweepAxis axis, const std::string& value);

struct SweepPoint {
  std::string value;
  int seed_index = 0;
  int associations_learned = 0;
  double visit_ratio = 0.0;
  int dimensionality = 0;
  std::string status = "ok";
};

struct SweepSummary {
  fs::path dir;
  std::vector<SweepPoint> points;
  int failures = 0;
};

/// One experiment per axis value; per-point failures are recorded and the
/// sweep continues.
SweepSummary cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<std::string>& values,
                       const fs::path& out_dir);

/// Value/td/policy maps of each cue for one probe block and seed. Writes
/// map_b<block>_s<seed>_cue<cue>.json (and .svg when requested) into out_dir.
std::vector<fs::path> cmd_maps(const fs::path& bundle, int probe_block, int seed_index, bool svg,
                               const fs::path& out_dir);

struct DimsSummary {
  fs::path dir;
  std::vector<DimReport> reports;  // one per seed
};

/// Hidden-layer dimensionality for n_seeds independently drawn layers.
DimsSummary cmd_dims(const RunConfig& cfg, const fs::path& out_dir, int n_samples = 500);

/// A directory is validated as a bundle, a file as a run config.
ValidationReport cmd_validate(const fs::path& path);

}  // namespace pacnav
