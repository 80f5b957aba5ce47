// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria.
//
//   acceptance [--only 1,4,9] [--threads N] [--verbose]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "core/analysis.hpp"
#include "core/protocols.hpp"

using namespace pacnav;

namespace {

constexpr double kChance = 1.0 / 6.0;

int g_threads = 1;
bool g_verbose = false;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& s) {
  if (g_verbose) std::fprintf(stderr, "  %s\n", s.c_str());
}

double median(std::vector<double> v) { return v.empty() ? std::nan("") : quantile(std::move(v), 0.5); }

double mean(const std::vector<double>& v) {
  return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<SeedResult> experiment(const TaskSpec& task, const AgentConfig& agent, int n_seeds,
                                   std::uint64_t master, bool keep_traces = false) {
  ExperimentOptions opts;
  opts.n_seeds = n_seeds;
  opts.master_seed = master;
  opts.threads = g_threads;
  opts.keep_training_traces = keep_traces;
  auto seeds = run_experiment(task, agent, opts);
  for (const auto& s : seeds) {
    if (s.aborted) note(fmt("seed %d aborted: %s", s.seed_index, s.error.c_str()));
  }
  return seeds;
}

/// Mean latency of training trials [from, to) in schedule order.
double training_latency(const SeedResult& s, int from, int to) {
  std::vector<double> lat;
  for (const TrialRecord& r : s.trials) {
    if (!r.meta.probe && r.meta.phase == 0) lat.push_back(r.latency);
  }
  const int n = static_cast<int>(lat.size());
  if (from < 0) from += n;
  if (to <= 0) to += n;
  double sum = 0.0;
  for (int i = from; i < to; ++i) sum += lat[static_cast<std::size_t>(i)];
  return sum / (to - from);
}

double final_visit_ratio(const SeedResult& s) {
  return s.probe_scores.empty() ? 0.0 : s.probe_scores.back().mean_visit_ratio;
}

// --- 1 -----------------------------------------------------------------------------

Outcome parameter_counts() {
  struct Row {
    Architecture arch;
    const char* task;
    std::int64_t expected;
  };
  const Row rows[] = {{Architecture::Classic, "single", 2747},
                      {Architecture::ExpandedClassic, "single", 43952},
                      {Architecture::ExpandedClassic, "multi", 337881},
                      {Architecture::NonlinearHidden, "single", 41984},
                      {Architecture::NonlinearHidden, "multi", 335872}};
  Outcome o{true, ""};
  for (const Row& r : rows) {
    const std::int64_t got = Agent(preset_agent(r.arch, r.task)).weights().actor.size() +
                             Agent(preset_agent(r.arch, r.task)).weights().critic.size();
    o.pass = o.pass && got == r.expected && preset_agent(r.arch, r.task).trainable_parameters() == got;
    o.detail += fmt("%s%lld", o.detail.empty() ? "" : " / ", static_cast<long long>(got));
  }
  return o;
}

// --- 2 -----------------------------------------------------------------------------

double integrated_reward(double dt, double total) {
  RewardKernel k;
  k.total = total;
  double sum = 0.0;
  const int steps = static_cast<int>(std::lround(20.0 / dt));
  for (int i = 0; i < steps; ++i) {
    const RewardStep rs = reward_step(k, dt, i == 0);
    sum += rs.rate * dt;
    k = rs.kernel;
  }
  return sum;
}

Outcome reward_conservation() {
  double worst_100 = 0.0;
  double worst_5 = 0.0;
  for (double total : {1.0, 4.0}) {
    worst_100 = std::max(worst_100, std::abs(integrated_reward(0.1, total) - total) / total);
    worst_5 = std::max(worst_5, std::abs(integrated_reward(0.005, total) - total) / total);
  }
  return {worst_100 <= 0.01 && worst_5 <= 0.001,
          fmt("rel. error %.2e at 100 ms, %.2e at 5 ms", worst_100, worst_5)};
}

// --- 3 -----------------------------------------------------------------------------

Outcome td_identity() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0;
  for (double dt : {0.1, 0.005}) {
    const TdConfig cfg{2.0, dt, TdScheme::Backward};
    const double gamma = 1.0 - dt / cfg.tau_g;
    for (int i = 0; i < 10000; ++i) {
      const double r = u(rng);
      const double v_prev = u(rng);
      const double v_now = u(rng);
      const double discrete = r + gamma * (v_now / dt) - v_prev / dt;
      worst = std::max(worst, std::abs(td_error(cfg, 0.0, r, v_prev, v_now) - discrete) /
                                  std::max(1.0, std::abs(discrete)));
    }
  }
  return {worst <= 1e-12, fmt("max deviation %.2e over 2 x 10^4 pairs", worst)};
}

// --- 4 -----------------------------------------------------------------------------

struct LearningEffect {
  double latency_ratio = 0.0;  // median last-6 / median first-6
  double near_ratio = 0.0;     // mean PT3 / mean PT1
  double p_latency = 1.0;      // sign test first > last
  double p_near = 1.0;         // sign test PT3 > PT1
};

LearningEffect single_reward_effect(const AgentConfig& agent, std::uint64_t master) {
  const TaskSpec task = default_task(TaskKind::SingleReward);
  const auto seeds = experiment(task, agent, 20, master);
  std::vector<double> first;
  std::vector<double> last;
  for (const auto& s : seeds) {
    first.push_back(training_latency(s, 0, 6));
    last.push_back(training_latency(s, -6, 0));
  }
  auto near = [](const ProbeSessionScore& p) { return p.mean_time_near; };
  const auto pt1 = block_values(seeds, 1, near);
  const auto pt3 = block_values(seeds, 3, near);
  LearningEffect e;
  e.latency_ratio = median(last) / median(first);
  e.near_ratio = mean(pt3) / std::max(mean(pt1), 1e-12);
  e.p_latency = sign_test(first, last).p_greater;
  e.p_near = sign_test(pt3, pt1).p_greater;
  note(fmt("latency first %.1f last %.1f s, time_near PT1 %.2f PT3 %.2f s", median(first), median(last),
           mean(pt1), mean(pt3)));
  return e;
}

Outcome single_reward_learning() {
  const AgentConfig learner = preset_agent(Architecture::Classic, "single");
  AgentConfig control = learner;
  control.rates.plasticity_enabled = false;
  const LearningEffect l = single_reward_effect(learner, 4);
  const LearningEffect c = single_reward_effect(control, 4);
  const bool learner_ok = l.latency_ratio < 0.5 && l.near_ratio > 2.0 && l.p_latency < 0.01 && l.p_near < 0.01;
  const bool control_flat = !(c.latency_ratio < 0.5 && c.p_latency < 0.01) && !(c.near_ratio > 2.0 && c.p_near < 0.01);
  return {learner_ok && control_flat,
          fmt("latency last/first %.2f (p %.1e), PT3/PT1 %.2f (p %.1e); control %.2f (p %.2f), %.2f (p %.2f)",
              l.latency_ratio, l.p_latency, l.near_ratio, l.p_near, c.latency_ratio, c.p_latency,
              c.near_ratio, c.p_near)};
}

// --- 5 -----------------------------------------------------------------------------

Outcome displacement_ordering() {
  auto near_pt4 = [](int index) {
    TaskSpec task = default_task(TaskKind::DisplacedReward);
    task.displacement_index = index;
    const auto seeds = experiment(task, preset_agent(Architecture::Classic, "single"), 20, 5);
    return block_values(seeds, 4, [](const ProbeSessionScore& p) { return p.mean_time_near; });
  };
  const auto near2 = near_pt4(2);
  const auto near7 = near_pt4(7);
  const TestResult t = welch_t_test(near2, near7);
  return {mean(near2) > mean(near7) && t.p_greater < 0.05,
          fmt("PT4 time_near index 2 %.2f s vs index 7 %.2f s, one-sided p %.1e", mean(near2), mean(near7),
              t.p_greater)};
}

// --- 6 -----------------------------------------------------------------------------

TaskSpec six_pairs() { return default_task(TaskKind::MultiPa, 6); }

AgentConfig multi_agent(Architecture arch) {
  AgentConfig a = preset_agent(arch, "multi");
  if (arch == Architecture::LinearHidden || arch == Architecture::NonlinearHidden) {
    a.n_hidden = 2048;
    a.rates.eta_actor = a.rates.eta_critic = 1e-5;
  }
  return a;
}

Outcome multi_pa_separation() {
  const TaskSpec task = six_pairs();
  auto ratios = [&](Architecture arch) {
    const auto seeds = experiment(task, multi_agent(arch), 10, 6);
    std::vector<double> v;
    for (const auto& s : seeds) v.push_back(final_visit_ratio(s));
    note(fmt("%s final visit ratio %.3f", std::string(architecture_name(arch)).c_str(), mean(v)));
    return v;
  };
  const auto nonlinear = ratios(Architecture::NonlinearHidden);
  const auto classic = ratios(Architecture::Classic);
  const auto linear = ratios(Architecture::LinearHidden);
  const Summary s = summarize(nonlinear, kChance);
  const bool ok = s.mean > 0.25 && s.p_greater < 0.01 && std::abs(mean(classic) - kChance) <= 0.05 &&
                  std::abs(mean(linear) - kChance) <= 0.05;
  return {ok, fmt("visit ratio nonlinear %.3f (p %.1e), classic %.3f, linear %.3f", s.mean, s.p_greater,
                  mean(classic), mean(linear))};
}

// --- 7 -----------------------------------------------------------------------------

Outcome dimensionality() {
  int worst_linear = 0;
  for (int width : {16, 67, 512, 2048, 8192}) {
    AgentConfig cfg = preset_agent(Architecture::LinearHidden, "single");
    cfg.n_hidden = width;
    cfg.seed = derive_seed(7, static_cast<std::uint64_t>(width));
    Rng rng = make_stream(cfg.seed, Stream::Analysis);
    worst_linear = std::max(worst_linear, hidden_dimensionality(cfg, rng).n_components);
  }
  AgentConfig relu = preset_agent(Architecture::NonlinearHidden, "multi");
  relu.n_hidden = 8192;
  relu.seed = derive_seed(7, 8192);
  Rng rng = make_stream(relu.seed, Stream::Analysis);
  const int relu_dims = hidden_dimensionality(relu, rng).n_components;
  return {worst_linear <= 67 && relu_dims >= 55 && relu_dims <= 110,
          fmt("linear max %d components, relu width 8192 %d components", worst_linear, relu_dims)};
}

// --- 8 -----------------------------------------------------------------------------

bool same_records(const SeedResult& a, const SeedResult& b) {
  if (a.trials.size() != b.trials.size()) return false;
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    const TrialRecord& x = a.trials[i];
    const TrialRecord& y = b.trials[i];
    if (x.positions.size() != y.positions.size() || x.latency != y.latency) return false;
    for (std::size_t k = 0; k < x.positions.size(); ++k) {
      if (!(x.positions[k] == y.positions[k]) || x.values[k] != y.values[k] ||
          x.td_errors[k] != y.td_errors[k]) {
        return false;
      }
    }
  }
  return true;
}

Outcome activation_family() {
  const TaskSpec task = six_pairs();
  AgentConfig sigmoid = preset_agent(Architecture::NonlinearHidden, "multi");
  sigmoid.activation = Activation{ActivationKind::Sigmoid, 0.0, 1.0};
  const auto seeds = experiment(task, sigmoid, 5, 8);
  std::vector<double> learned;
  for (const auto& s : seeds) {
    learned.push_back(s.probe_scores.empty() ? -1.0 : s.probe_scores.back().associations_learned);
  }
  const double max_learned = *std::max_element(learned.begin(), learned.end());

  TaskSpec short_task = task;
  short_task.training_sessions = 3;
  short_task.probe_sessions = {4};
  AgentConfig relu = multi_agent(Architecture::NonlinearHidden);
  relu.n_hidden = 512;
  AgentConfig phi_a = relu;
  phi_a.activation = Activation{ActivationKind::PhiA, 0.0, 1.0};
  const auto r = experiment(short_task, relu, 2, 8, true);
  const auto p = experiment(short_task, phi_a, 2, 8, true);
  const bool identical = same_records(r[0], p[0]) && same_records(r[1], p[1]);
  return {max_learned == 0.0 && identical,
          fmt("sigmoid associations learned mean %.2f max %.0f over %zu seeds; phiA(.,0) vs relu %s",
              mean(learned), max_learned, learned.size(), identical ? "bit-identical" : "DIFFER")};
}

// --- 9 -----------------------------------------------------------------------------

Outcome bump_persistence() {
  const BumpAttractor bump;
  const int seeds = 30;
  int held = 0;
  std::mt19937_64 pick(9);
  for (int seed = 0; seed < seeds; ++seed) {
    Noise noise(derive_seed(9, static_cast<std::uint64_t>(seed)));
    const int cue_id = static_cast<int>(pick() % 18) + 1;
    BumpState s = bump.zero_state();
    Eigen::VectorXd cue = Eigen::VectorXd::Zero(18);
    cue[cue_id - 1] = 3.0;
    for (int i = 0; i < 50; ++i) bump.step(s, cue, 0.1, noise);
    cue.setZero();
    for (int i = 0; i < 300; ++i) bump.step(s, cue, 0.1, noise);
    int best = 0;
    double best_rate = -1.0;
    for (int t = 0; t < 18; ++t) {
      const double r = s.rates.segment(3 * t, 3).sum();
      if (r > best_rate) {
        best_rate = r;
        best = t;
      }
    }
    held += best == cue_id - 1;
  }
  const double frac = static_cast<double>(held) / seeds;
  return {frac >= 0.7, fmt("cued triplet on top after 30 s in %d/%d seeds (%.0f%%)", held, seeds, 100 * frac)};
}

// --- 10 ----------------------------------------------------------------------------

/// First session whose mean training latency is at or below the threshold;
/// sessions + 1 when never reached.
double sessions_to_threshold(const SeedResult& s, double threshold, int sessions) {
  std::vector<double> sum(static_cast<std::size_t>(sessions + 2), 0.0);
  std::vector<int> n(static_cast<std::size_t>(sessions + 2), 0);
  for (const TrialRecord& r : s.trials) {
    if (r.meta.probe || r.meta.session < 1 || r.meta.session > sessions) continue;
    sum[static_cast<std::size_t>(r.meta.session)] += r.latency;
    ++n[static_cast<std::size_t>(r.meta.session)];
  }
  for (int k = 1; k <= sessions; ++k) {
    if (n[static_cast<std::size_t>(k)] > 0 && sum[static_cast<std::size_t>(k)] / n[static_cast<std::size_t>(k)] <= threshold) {
      return k;
    }
  }
  return sessions + 1;
}

constexpr double kLatencyThreshold = 60.0;

Outcome transient_cue_advantage() {
  const TaskSpec task = default_task(TaskKind::TransientCuePa);
  const int last_session = task.training_sessions + static_cast<int>(task.probe_sessions.size());
  AgentConfig wm = preset_agent(Architecture::Reservoir, "multi");
  wm.working_memory = true;
  AgentConfig no_wm = wm;
  no_wm.working_memory = false;
  AgentConfig ff = preset_agent(Architecture::NonlinearHidden, "multi");
  ff.working_memory = true;
  ff.n_hidden = wm.n_hidden;
  ff.activation = Activation{ActivationKind::PhiA, 3.0, 1.0};

  auto run = [&](const AgentConfig& a, const char* name) {
    auto seeds = experiment(task, a, 10, 10);
    std::vector<double> v;
    std::vector<double> sessions;
    for (const auto& s : seeds) {
      v.push_back(final_visit_ratio(s));
      sessions.push_back(sessions_to_threshold(s, kLatencyThreshold, last_session));
    }
    note(fmt("%s: visit ratio %.3f, sessions to %.0f s median %.1f", name, mean(v), kLatencyThreshold,
             median(sessions)));
    return std::pair{v, sessions};
  };
  const auto [v_wm, s_wm] = run(wm, "reservoir+wm");
  const auto [v_no, s_no] = run(no_wm, "reservoir");
  const auto [v_ff, s_ff] = run(ff, "feedforward+wm");
  const Summary chance = summarize(v_wm, kChance);
  const double gap = mean(v_wm) - mean(v_no);
  const bool ok = gap >= 0.10 && chance.p_greater < 0.05 && median(s_wm) < median(s_ff);
  return {ok, fmt("visit ratio wm %.3f vs no-wm %.3f (gap %.1f pts, p vs chance %.1e); sessions to %.0f s: "
                  "reservoir %.1f vs feedforward %.1f",
                  mean(v_wm), mean(v_no), 100 * gap, chance.p_greater, kLatencyThreshold, median(s_wm),
                  median(s_ff))};
}

// --- 11 ----------------------------------------------------------------------------

Outcome property_suites() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const char* name) {
    if (!ok) failed.emplace_back(name);
  };

  {  // determinism
    const TaskSpec task = default_task(TaskKind::SingleReward);
    const AgentConfig a = preset_agent(Architecture::Classic, "single");
    ExperimentOptions o;
    o.n_seeds = 3;
    o.master_seed = 11;
    o.keep_training_traces = true;
    const auto x = run_experiment(task, a, o);
    o.threads = 3;
    const auto y = run_experiment(task, a, o);
    bool same = true;
    for (int i = 0; i < 3; ++i) same = same && same_records(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
    expect(same, "determinism");
  }
  {  // probe purity
    AgentConfig cfg = preset_agent(Architecture::Classic, "single");
    cfg.seed = 12;
    Agent agent(cfg);
    Rng rng(12);
    std::normal_distribution<double> n(0.0, 0.01);
    for (int i = 0; i < agent.mutable_weights().actor.size(); ++i) agent.mutable_weights().actor.data()[i] = n(rng);
    for (int i = 0; i < agent.mutable_weights().critic.size(); ++i) agent.mutable_weights().critic.data()[i] = n(rng);
    const WeightStore before = agent.weights();
    const TaskSpec task = default_task(TaskKind::SingleReward);
    TrialSlot slot;
    slot.probe = true;
    slot.reward = task.associations.front().location;
    slot.start = start_positions()[0];
    run_trial(agent, task, slot);
    expect(agent.weights() == before, "probe purity");
  }
  {  // OU variance
    for (double alpha : {2.0 / 3.0, 0.1}) {
      Noise noise(std::uint64_t{13});
      double x = 0.0;
      double s1 = 0.0;
      double s2 = 0.0;
      const int n = 1000000;
      for (int i = 0; i < n; ++i) {
        x = em_update(x, 0.0, alpha, 0.25, noise);
        s1 += x;
        s2 += x * x;
      }
      const double var = s2 / n - (s1 / n) * (s1 / n);
      const double expected = alpha * 0.0625 / (1.0 - (1.0 - alpha) * (1.0 - alpha));
      expect(std::abs(var / expected - 1.0) <= 0.05, "OU variance");
    }
  }
  {  // ring and bump identities
    const Eigen::MatrixXd w = ring_weights(40, -1.0, 1.0, 20.0);
    expect(w.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12, "actor ring row sums");
    expect((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12, "actor ring symmetry");
    const BumpAttractor bump;
    expect((bump.ring().rowwise().sum().array() - 0.25).abs().maxCoeff() <= 1e-12, "bump row sums");
    expect((bump.ring() - bump.ring().transpose()).cwiseAbs().maxCoeff() <= 1e-12, "bump symmetry");
  }
  {  // containment
    std::mt19937_64 rng(14);
    std::normal_distribution<double> big(0.0, 5.0);
    TrialState s;
    bool inside = true;
    for (int i = 0; i < 100000; ++i) {
      s = step_position(s, {big(rng), big(rng)}, 0.1);
      inside = inside && std::abs(s.position.x) <= 0.8 && std::abs(s.position.y) <= 0.8;
    }
    expect(inside, "containment");
  }
  {  // zero init, control invariance
    const TaskSpec task = default_task(TaskKind::SingleReward);
    for (Architecture arch : {Architecture::Classic, Architecture::NonlinearHidden, Architecture::Reservoir}) {
      AgentConfig cfg = preset_agent(arch, "single");
      cfg.seed = 15;
      Agent agent(cfg);
      expect(agent.weights().actor.isZero() && agent.weights().critic.isZero(), "zero init");
      cfg.rates.plasticity_enabled = false;
      Agent control(cfg);
      control.mutable_weights().critic.setConstant(0.01);
      const WeightStore before = control.weights();
      TrialSlot slot;
      slot.reward = task.associations.front().location;
      slot.start = start_positions()[1];
      run_trial(control, task, slot);
      expect(control.weights() == before, "control invariance");
    }
  }
  std::string detail = "determinism, probe purity, OU variance, ring/bump identities, containment, zero init, control";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // runtime budget on a 4-core machine
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pacnav acceptance checks"};
  std::vector<int> only;
  g_threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  app.add_option("--only", only, "Criteria to run")->delimiter(',');
  app.add_option("--threads", g_threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--verbose,-v", g_verbose, "Print intermediate numbers");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "parameter counts", 1, parameter_counts},
      {2, "reward conservation", 1, reward_conservation},
      {3, "td discretization identity", 1, td_identity},
      {4, "single-reward learning", 300, single_reward_learning},
      {5, "displacement ordering", 600, displacement_ordering},
      {6, "multi-pa separation", 1800, multi_pa_separation},
      {7, "dimensionality", 60, dimensionality},
      {8, "activation family", 900, activation_family},
      {9, "bump persistence", 60, bump_persistence},
      {10, "transient-cue advantage", 1800, transient_cue_advantage},
      {11, "property suites", 120, property_suites},
  };
  // Budgets are for four cores; scale them when fewer are available.
  const double budget_scale = 4.0 / std::min(4, g_threads);
  const std::set<int> selected(only.begin(), only.end());

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double budget = c.budget_s * budget_scale;
    if (secs > budget) {
      o.pass = false;
      o.detail += fmt("; over runtime budget %.0f s", budget);
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2d %s %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
