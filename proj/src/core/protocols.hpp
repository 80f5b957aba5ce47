#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/agent.hpp"
#include "core/env.hpp"

namespace pacnav {

enum class TaskKind { SingleReward, DisplacedReward, MultiPa, TransientCuePa };

std::string_view task_kind_name(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

struct CueLocation {
  int cue = 1;
  Vec2 location;

  friend bool operator==(const CueLocation&, const CueLocation&) = default;
};

/// Trial-based tasks (single, displaced) schedule `training_trials` rewarded
/// trials with probe trials inserted at the 1-based slot positions in
/// `probe_trials`. Session-based tasks (multi_pa, transient_cue_pa) do the
/// same with whole sessions, each session presenting every cue once in random
/// order.
struct TaskSpec {
  TaskKind kind = TaskKind::SingleReward;
  int displacement_index = 1;  // 1..7, displaced_reward only
  int n_pairs = 6;
  std::vector<CueLocation> associations;  // cue -> reward centre
  double reward = 1.0;
  double t_max = 300.0;
  double probe_duration = 60.0;
  double cue_duration = 5.0;  // transient_cue_pa cue phase
  bool cue_reappears = true;  // transient cue shown again on the reward step
  double near_radius = 0.1;
  double learned_threshold = 0.4;
  int training_trials = 42;
  std::vector<int> probe_trials;
  int training_sessions = 77;
  std::vector<int> probe_sessions;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;

  bool session_based() const {
    return kind == TaskKind::MultiPa || kind == TaskKind::TransientCuePa;
  }
  /// Throws ConfigError on inconsistent schedules or associations.
  void validate() const;
};

/// Defaults for each task kind: 42 trials with probe blocks at 7-12, 25-30 and
/// 55-60; 6-PA probe sessions 10, 45, 80; 16-PA 100 sessions + probe 101;
/// transient cue R = 4 with probe sessions 2, 9, 16.
TaskSpec default_task(TaskKind kind, int n_pairs = 6);

/// Cue -> location presets: single reward in the north-west, six or sixteen
/// well separated grid points for the paired-association tasks.
std::vector<CueLocation> preset_associations(TaskKind kind, int n_pairs);

/// Location k (1..7) on the diagonal from the original toward the opposite
/// corner, k - 1 steps of 0.28 m, snapped to the reward grid.
Vec2 displaced_location(Vec2 original, int index);

struct TrialSlot {
  int index = 0;          // 0-based position in the whole run
  int phase = 0;          // 0, or 1 after displacement
  int slot = 1;           // 1-based position within the phase (trial tasks) or session number
  int session = 0;        // 1-based session number, 0 for trial tasks
  int cue_id = 1;
  Vec2 reward;
  Vec2 start;
  bool probe = false;
  int probe_block = 0;    // 1-based probe block / probe session ordinal, 0 for training
};

/// Expands the task into its trial sequence. Start positions and cue orders
/// come from task_rng.
std::vector<TrialSlot> build_schedule(const TaskSpec& task, Rng& task_rng);

struct TrialRecord {
  TrialSlot meta;
  double dt = 0.1;
  std::vector<Vec2> positions;
  std::vector<Vec2> actions;
  std::vector<double> values;
  std::vector<double> td_errors;
  std::vector<double> reward_rates;
  int steps = 0;           // navigation steps taken
  double latency = 0.0;    // s; t_max (training) or probe duration when not found
  bool found = false;
  bool aborted = false;
  std::string error;

  bool has_trace() const { return !positions.empty(); }
};

/// Runs one trial. Training trials stop once 99.99% of the reward has been
/// consumed or at t_max; probe trials run for the probe duration with
/// plasticity and reward off. Dynamics failures are caught and recorded.
TrialRecord run_trial(Agent& agent, const TaskSpec& task, const TrialSlot& slot,
                      bool keep_trace = true);

// --- metrics ---------------------------------------------------------------

/// Dwell time within radius of center.
double time_near(const TrialRecord& record, Vec2 center, double radius = 0.1);

/// Dwell near the correct centre over dwell near any centre; 0 when the agent
/// never came near any of them.
double visit_ratio(const TrialRecord& record, std::span<const Vec2> locations, std::size_t correct,
                   double radius = 0.1);

/// Number of ratios strictly above the threshold.
int associations_learned(std::span<const double> per_cue_ratios, double threshold = 0.4);

struct ProbeMetrics {
  int trial_index = 0;
  int probe_block = 0;
  int session = 0;
  int cue_id = 1;
  double latency = 0.0;
  double time_near_correct = 0.0;
  std::vector<double> time_near_each;
  double time_near_any = 0.0;
  double visit_ratio = 0.0;
};

ProbeMetrics probe_metrics(const TrialRecord& record, const TaskSpec& task);

struct ProbeSessionScore {
  int probe_block = 0;
  int session = 0;
  int associations_learned = 0;
  double mean_visit_ratio = 0.0;
  double mean_time_near = 0.0;
};

// --- experiments -------------------------------------------------------------

struct SeedResult {
  int seed_index = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> trials;   // traces kept for probe trials only
  std::vector<ProbeMetrics> probes;
  std::vector<ProbeSessionScore> probe_scores;
  bool aborted = false;
  std::string error;
};

struct ExperimentOptions {
  int n_seeds = 1;
  std::uint64_t master_seed = 0;
  int threads = 1;
  bool keep_training_traces = false;
  /// Called after each finished trial; invoked from worker threads.
  std::function<void(int seed_index, const TrialRecord&)> on_trial;
};

/// Runs one simulation: fresh agent (seeded from seed) through the full
/// schedule. Stops early at the first dynamics abort.
SeedResult run_seed(const TaskSpec& task, const AgentConfig& agent, int seed_index,
                    std::uint64_t seed, const ExperimentOptions& options = {});

/// Seeds run in parallel; results are ordered by seed index and identical to
/// a serial run.
std::vector<SeedResult> run_experiment(const TaskSpec& task, const AgentConfig& agent,
                                       const ExperimentOptions& options);

/// One value per seed for the given probe block (seeds without it are skipped).
std::vector<double> block_values(const std::vector<SeedResult>& seeds, int probe_block,
                                 const std::function<double(const ProbeSessionScore&)>& field);

}  // namespace pacnav
