#include "core/protocols.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

namespace pacnav {

namespace {
struct NamedTask {
  std::string_view name;
  TaskKind kind;
};
constexpr NamedTask kTasks[] = {
    {"single_reward", TaskKind::SingleReward},
    {"displaced_reward", TaskKind::DisplacedReward},
    {"multi_pa", TaskKind::MultiPa},
    {"transient_cue_pa", TaskKind::TransientCuePa},
};

std::vector<int> consecutive(int first, int last) {
  std::vector<int> v(static_cast<std::size_t>(last - first + 1));
  std::iota(v.begin(), v.end(), first);
  return v;
}

void check_slots(const std::vector<int>& probes, int training, std::string_view what) {
  if (training < 0) throw ConfigError(std::string(what) + ": training count must be >= 0");
  const int total = training + static_cast<int>(probes.size());
  std::set<int> seen;
  for (int p : probes) {
    if (p < 1 || p > total) {
      throw ConfigError(std::string(what) + ": probe position " + std::to_string(p) +
                        " outside [1, " + std::to_string(total) + "]");
    }
    if (!seen.insert(p).second) {
      throw ConfigError(std::string(what) + ": duplicate probe position " + std::to_string(p));
    }
  }
}

bool is_probe(const std::vector<int>& probes, int position) {
  return std::find(probes.begin(), probes.end(), position) != probes.end();
}
}  // namespace

std::string_view task_kind_name(TaskKind kind) {
  for (const auto& t : kTasks) {
    if (t.kind == kind) return t.name;
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  for (const auto& t : kTasks) {
    if (t.name == name) return t.kind;
  }
  throw ConfigError("unknown task kind '" + std::string(name) + "'");
}

std::vector<CueLocation> preset_associations(TaskKind kind, int n_pairs) {
  if (kind == TaskKind::SingleReward || kind == TaskKind::DisplacedReward) {
    return {{1, {-0.6, 0.6}}};
  }
  if (n_pairs == 6) {
    return {{1, {-0.4, 0.4}}, {2, {0.2, 0.6}},   {3, {0.6, 0.0}},
            {4, {0.2, -0.2}}, {5, {-0.6, -0.2}}, {6, {-0.2, -0.6}}};
  }
  if (n_pairs == 16) {
    std::vector<CueLocation> out;
    const double coords[] = {-0.6, -0.2, 0.2, 0.6};
    int cue = 1;
    for (double y : {0.6, 0.2, -0.2, -0.6}) {
      for (double x : coords) out.push_back({cue++, {x, y}});
    }
    return out;
  }
  throw ConfigError("no association preset for " + std::to_string(n_pairs) +
                    " pairs; list them explicitly");
}

TaskSpec default_task(TaskKind kind, int n_pairs) {
  TaskSpec t;
  t.kind = kind;
  switch (kind) {
    case TaskKind::SingleReward:
    case TaskKind::DisplacedReward:
      t.n_pairs = 1;
      t.training_trials = 42;
      t.probe_trials = consecutive(7, 12);
      for (int v : consecutive(25, 30)) t.probe_trials.push_back(v);
      for (int v : consecutive(55, 60)) t.probe_trials.push_back(v);
      t.training_sessions = 0;
      break;
    case TaskKind::MultiPa:
      t.n_pairs = n_pairs;
      t.training_trials = 0;
      if (n_pairs == 16) {
        t.training_sessions = 100;
        t.probe_sessions = {101};
      } else {
        t.training_sessions = 77;
        t.probe_sessions = {10, 45, 80};
      }
      break;
    case TaskKind::TransientCuePa:
      t.n_pairs = n_pairs;
      t.reward = 4.0;
      t.training_trials = 0;
      t.training_sessions = 13;
      t.probe_sessions = {2, 9, 16};
      break;
  }
  t.associations = preset_associations(kind, t.n_pairs);
  return t;
}

void TaskSpec::validate() const {
  if (!(reward > 0.0)) throw ConfigError("reward must be positive");
  if (!(t_max > 0.0) || !(probe_duration > 0.0)) {
    throw ConfigError("t_max and probe_duration must be positive");
  }
  if (cue_duration < 0.0) throw ConfigError("cue_duration must be >= 0");
  if (associations.empty()) throw ConfigError("task needs at least one cue-location pair");
  std::set<int> cues;
  for (std::size_t i = 0; i < associations.size(); ++i) {
    const auto& a = associations[i];
    if (a.cue < 1 || a.cue > kCueLength) throw ConfigError("association cue outside [1, 18]");
    if (!cues.insert(a.cue).second) throw ConfigError("cue listed twice in associations");
    if (!Arena{}.contains(a.location)) throw ConfigError("association location outside arena");
    for (std::size_t j = 0; j < i; ++j) {
      if (associations[j].location == a.location) {
        throw ConfigError("two cues share a reward location");
      }
    }
  }
  if (session_based()) {
    if (n_pairs != static_cast<int>(associations.size())) {
      throw ConfigError("n_pairs does not match the association table");
    }
    check_slots(probe_sessions, training_sessions, "probe_sessions");
  } else {
    if (associations.size() != 1) throw ConfigError("single-reward tasks take one association");
    if (kind == TaskKind::DisplacedReward && (displacement_index < 1 || displacement_index > 7)) {
      throw ConfigError("displacement_index must be in 1..7");
    }
    check_slots(probe_trials, training_trials, "probe_trials");
  }
}

Vec2 displaced_location(Vec2 original, int index) {
  if (index < 1 || index > 7) throw ConfigError("displacement index must be in 1..7");
  const double sx = original.x > 0.0 ? -1.0 : 1.0;
  const double sy = original.y > 0.0 ? -1.0 : 1.0;
  const double step = (index - 1) * 0.28 / std::sqrt(2.0);
  auto snap = [](double v) { return std::clamp(std::round(v / 0.2) * 0.2, -0.6, 0.6); };
  Vec2 p{snap(original.x + sx * step), snap(original.y + sy * step)};
  // pick the exact grid instance so comparisons against reward_grid() are exact
  const auto& grid = Arena::reward_grid();
  return *std::min_element(grid.begin(), grid.end(), [&](Vec2 a, Vec2 b) {
    return distance(a, p) < distance(b, p);
  });
}

std::vector<TrialSlot> build_schedule(const TaskSpec& task, Rng& task_rng) {
  task.validate();
  std::uniform_int_distribution<int> pick_start(0, 3);
  std::vector<TrialSlot> out;
  auto start = [&] { return start_positions()[static_cast<std::size_t>(pick_start(task_rng))]; };
  int probe_block = 0;

  if (!task.session_based()) {
    const int phases = task.kind == TaskKind::DisplacedReward ? 2 : 1;
    const int total = task.training_trials + static_cast<int>(task.probe_trials.size());
    for (int phase = 0; phase < phases; ++phase) {
      const Vec2 reward = phase == 0 ? task.associations[0].location
                                     : displaced_location(task.associations[0].location,
                                                          task.displacement_index);
      bool previous_probe = false;
      for (int s = 1; s <= total; ++s) {
        TrialSlot slot;
        slot.index = static_cast<int>(out.size());
        slot.phase = phase;
        slot.slot = s;
        slot.cue_id = task.associations[0].cue;
        slot.reward = reward;
        slot.start = start();
        slot.probe = is_probe(task.probe_trials, s);
        if (slot.probe && !previous_probe) ++probe_block;
        slot.probe_block = slot.probe ? probe_block : 0;
        previous_probe = slot.probe;
        out.push_back(slot);
      }
    }
    return out;
  }

  const int total = task.training_sessions + static_cast<int>(task.probe_sessions.size());
  std::vector<std::size_t> order(task.associations.size());
  for (int s = 1; s <= total; ++s) {
    const bool probe = is_probe(task.probe_sessions, s);
    if (probe) ++probe_block;
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), task_rng);
    for (std::size_t i : order) {
      TrialSlot slot;
      slot.index = static_cast<int>(out.size());
      slot.slot = s;
      slot.session = s;
      slot.cue_id = task.associations[i].cue;
      slot.reward = task.associations[i].location;
      slot.start = start();
      slot.probe = probe;
      slot.probe_block = probe ? probe_block : 0;
      out.push_back(slot);
    }
  }
  return out;
}

TrialRecord run_trial(Agent& agent, const TaskSpec& task, const TrialSlot& slot, bool keep_trace) {
  const double dt = agent.config().dt;
  const bool transient = task.kind == TaskKind::TransientCuePa;
  const bool learn = !slot.probe;

  TrialRecord rec;
  rec.meta = slot;
  rec.dt = dt;
  const long max_steps = std::lround((slot.probe ? task.probe_duration : task.t_max) / dt);
  if (keep_trace) {
    const auto reserve = static_cast<std::size_t>(std::min(max_steps, 4000L));
    rec.positions.reserve(reserve);
    rec.actions.reserve(reserve);
    rec.values.reserve(reserve);
    rec.td_errors.reserve(reserve);
    rec.reward_rates.reserve(reserve);
  }

  agent.reset_trial();
  TrialState state;
  state.position = slot.start;
  state.t_max = slot.probe ? task.probe_duration : task.t_max;
  RewardKernel kernel;
  kernel.total = task.reward;
  std::optional<double> probe_hit;

  try {
    if (transient) {
      // cue presentation in the start box: no place input, no movement
      const long cue_steps = std::lround(task.cue_duration / dt);
      Observation obs{state.position, slot.cue_id, true, true};
      for (long i = 0; i < cue_steps; ++i) agent.step(obs, 0.0, learn);
    }

    for (long step = 0; step < max_steps || state.reward_found_at; ++step) {
      bool acquired = false;
      if (!state.reward_found_at && at_reward(state.position, slot.reward)) {
        if (slot.probe) {
          if (!probe_hit) probe_hit = state.elapsed;
        } else {
          state.reward_found_at = state.elapsed;
          acquired = true;
        }
      }
      const RewardStep rs = reward_step(kernel, dt, acquired);
      kernel = rs.kernel;

      Observation obs{state.position, slot.cue_id, !transient || (acquired && task.cue_reappears),
                      false};
      const StepTelemetry tel = agent.step(obs, rs.rate, learn);
      if (keep_trace) {
        rec.positions.push_back(state.position);
        rec.actions.push_back(tel.action);
        rec.values.push_back(tel.value);
        rec.td_errors.push_back(tel.td_error);
        rec.reward_rates.push_back(rs.rate);
      }
      ++rec.steps;
      state = step_position(state, tel.action, dt);
      state.elapsed = static_cast<double>(step + 1) * dt;
      if (state.reward_found_at) {
        state.consumed_fraction = 1.0 - kernel.remaining() / kernel.total;
        if (state.consumed_fraction >= kConsumedThreshold) {
          state.terminated = true;
          break;
        }
      }
    }
  } catch (const NumericalError& e) {
    rec.aborted = true;
    rec.error = e.what();
  }

  if (slot.probe) {
    rec.found = probe_hit.has_value();
    rec.latency = probe_hit.value_or(task.probe_duration);
  } else {
    rec.found = state.reward_found_at.has_value() && !rec.aborted;
    rec.latency = rec.found ? *state.reward_found_at : task.t_max;
  }
  return rec;
}

// ---------------------------------------------------------------------------

double time_near(const TrialRecord& record, Vec2 center, double radius) {
  std::size_t n = 0;
  for (const Vec2& p : record.positions) n += distance(p, center) <= radius ? 1 : 0;
  return static_cast<double>(n) * record.dt;
}

double visit_ratio(const TrialRecord& record, std::span<const Vec2> locations, std::size_t correct,
                   double radius) {
  std::size_t near_correct = 0;
  std::size_t near_any = 0;
  for (const Vec2& p : record.positions) {
    bool any = false;
    for (std::size_t i = 0; i < locations.size(); ++i) {
      if (distance(p, locations[i]) <= radius) {
        any = true;
        if (i == correct) ++near_correct;
      }
    }
    near_any += any ? 1 : 0;
  }
  return near_any == 0 ? 0.0 : static_cast<double>(near_correct) / static_cast<double>(near_any);
}

int associations_learned(std::span<const double> per_cue_ratios, double threshold) {
  return static_cast<int>(std::count_if(per_cue_ratios.begin(), per_cue_ratios.end(),
                                        [threshold](double r) { return r > threshold; }));
}

ProbeMetrics probe_metrics(const TrialRecord& record, const TaskSpec& task) {
  ProbeMetrics m;
  m.trial_index = record.meta.index;
  m.probe_block = record.meta.probe_block;
  m.session = record.meta.session;
  m.cue_id = record.meta.cue_id;
  m.latency = record.latency;

  std::vector<Vec2> locations;
  std::size_t correct = 0;
  for (const auto& a : task.associations) {
    locations.push_back(a.location);
  }
  // the displaced phase rewards a location outside the table
  auto it = std::find(locations.begin(), locations.end(), record.meta.reward);
  if (it == locations.end()) {
    locations.push_back(record.meta.reward);
    it = locations.end() - 1;
  }
  correct = static_cast<std::size_t>(it - locations.begin());

  m.time_near_correct = time_near(record, record.meta.reward, task.near_radius);
  for (const Vec2& loc : locations) m.time_near_each.push_back(time_near(record, loc, task.near_radius));
  std::size_t any = 0;
  for (const Vec2& p : record.positions) {
    any += std::any_of(locations.begin(), locations.end(),
                       [&](Vec2 l) { return distance(p, l) <= task.near_radius; })
               ? 1
               : 0;
  }
  m.time_near_any = static_cast<double>(any) * record.dt;
  m.visit_ratio = visit_ratio(record, locations, correct, task.near_radius);
  return m;
}

// ---------------------------------------------------------------------------

SeedResult run_seed(const TaskSpec& task, const AgentConfig& agent_cfg, int seed_index,
                    std::uint64_t seed, const ExperimentOptions& options) {
  SeedResult result;
  result.seed_index = seed_index;
  result.seed = seed;

  AgentConfig cfg = agent_cfg;
  cfg.seed = seed;
  Agent agent(cfg);
  Rng task_rng = make_stream(seed, Stream::Task);
  const std::vector<TrialSlot> schedule = build_schedule(task, task_rng);

  for (const TrialSlot& slot : schedule) {
    const bool trace = slot.probe || options.keep_training_traces;
    TrialRecord rec = run_trial(agent, task, slot, /*keep_trace=*/true);
    if (slot.probe) result.probes.push_back(probe_metrics(rec, task));
    if (!trace) {
      rec.positions.clear();
      rec.positions.shrink_to_fit();
      rec.actions = {};
      rec.values = {};
      rec.td_errors = {};
      rec.reward_rates = {};
    }
    if (options.on_trial) options.on_trial(seed_index, rec);
    const bool aborted = rec.aborted;
    std::string error = rec.error;
    result.trials.push_back(std::move(rec));
    if (aborted) {
      result.aborted = true;
      result.error = "trial " + std::to_string(slot.index) + ": " + error;
      break;
    }
  }

  // aggregate probe blocks
  std::vector<int> blocks;
  for (const auto& p : result.probes) {
    if (blocks.empty() || blocks.back() != p.probe_block) blocks.push_back(p.probe_block);
  }
  for (int b : blocks) {
    ProbeSessionScore score;
    score.probe_block = b;
    std::vector<double> ratios;
    double near = 0.0;
    for (const auto& p : result.probes) {
      if (p.probe_block != b) continue;
      score.session = p.session;
      ratios.push_back(p.visit_ratio);
      near += p.time_near_correct;
    }
    score.associations_learned = associations_learned(ratios, task.learned_threshold);
    score.mean_visit_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
    score.mean_time_near = near / ratios.size();
    result.probe_scores.push_back(score);
  }
  return result;
}

std::vector<SeedResult> run_experiment(const TaskSpec& task, const AgentConfig& agent,
                                       const ExperimentOptions& options) {
  if (options.n_seeds < 1) throw ConfigError("n_seeds must be at least 1");
  task.validate();
  agent.validate();
  std::vector<SeedResult> results(static_cast<std::size_t>(options.n_seeds));
  const int threads = std::clamp(options.threads, 1, options.n_seeds);

  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  auto worker = [&](int w) {
    try {
      for (int i = next++; i < options.n_seeds; i = next++) {
        results[static_cast<std::size_t>(i)] =
            run_seed(task, agent, i, derive_seed(options.master_seed, static_cast<std::uint64_t>(i)),
                     options);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<double> block_values(const std::vector<SeedResult>& seeds, int probe_block,
                                 const std::function<double(const ProbeSessionScore&)>& field) {
  std::vector<double> out;
  for (const auto& s : seeds) {
    for (const auto& score : s.probe_scores) {
      if (score.probe_block == probe_block) out.push_back(field(score));
    }
  }
  return out;
}

}  // namespace pacnav
