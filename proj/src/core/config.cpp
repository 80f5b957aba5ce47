#include "core/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace pacnav {

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view context) {
  if (!j.is_object()) throw ConfigError(std::string(context) + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + std::string(context));
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, std::string_view context) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + std::string(context));
  }
}

std::string read_string(const Json& j, const char* key, std::string fallback,
                        std::string_view context) {
  read(j, key, fallback, context);
  return fallback;
}

}  // namespace

// --- activation --------------------------------------------------------------

Json to_json(const Activation& a) {
  return Json{{"kind", activation_name(a.kind)}, {"theta", a.theta}, {"gain", a.gain}};
}

Activation activation_from_json(const Json& j) {
  Activation a;
  if (j.is_string()) {
    a.kind = parse_activation_kind(j.get<std::string>());
    return a;
  }
  check_keys(j, {"kind", "theta", "gain"}, "activation");
  a.kind = parse_activation_kind(read_string(j, "kind", "relu", "activation"));
  read(j, "theta", a.theta, "activation");
  read(j, "gain", a.gain, "activation");
  return a;
}

// --- agent -------------------------------------------------------------------

Json to_json(const AgentConfig& a) {
  Json j;
  j["architecture"] = architecture_name(a.architecture);
  j["n_hidden"] = a.n_hidden;
  j["expanded_copies"] = a.expanded_copies;
  j["activation"] = to_json(a.activation);
  j["linear_gain"] = a.linear_gain;
  j["hidden_init"] = a.hidden_init == HiddenInit::Uniform ? "uniform" : "k_split";
  j["k_excitatory"] = a.k_excitatory;
  j["working_memory"] = a.working_memory;
  j["dt"] = a.dt;
  j["tau_g"] = a.tau_g;
  j["td_scheme"] = td_scheme_name(a.td_scheme);
  j["eta_critic"] = a.rates.eta_critic;
  j["eta_actor"] = a.rates.eta_actor;
  j["plasticity"] = a.rates.plasticity_enabled;
  j["seed"] = a.seed;
  j["noise"] = a.noise;
  j["velocity_scale"] = a.velocity_scale;
  j["actor"] = Json{{"m", a.actor.m},         {"tau", a.actor.tau},
                    {"sigma", a.actor.sigma}, {"a0", a.actor.a0},
                    {"w_minus", a.actor.w_minus}, {"w_plus", a.actor.w_plus},
                    {"phi", a.actor.phi}};
  j["critic"] = Json{{"tau", a.critic.tau}, {"sigma", a.critic.sigma}};
  j["reservoir"] = Json{{"lambda", a.reservoir.lambda},
                        {"tau", a.reservoir.tau},
                        {"sigma", a.reservoir.sigma},
                        {"p", a.reservoir.p},
                        {"readout", to_json(a.reservoir.readout)}};
  j["bump"] = Json{{"n", a.bump.n},         {"tau", a.bump.tau},
                   {"sigma", a.bump.sigma}, {"w_minus", a.bump.w_minus},
                   {"phi", a.bump.phi},     {"units_per_cue", a.bump.units_per_cue}};
  return j;
}

AgentConfig agent_from_json(const Json& j, const AgentConfig& base) {
  constexpr std::string_view ctx = "agent";
  check_keys(j,
             {"architecture", "preset", "n_hidden", "expanded_copies", "activation",
              "linear_gain", "hidden_init", "k_excitatory", "working_memory", "dt", "tau_g",
              "td_scheme", "eta_critic", "eta_actor", "eta", "plasticity", "seed", "noise",
              "velocity_scale", "actor", "critic", "reservoir", "bump"},
             ctx);
  AgentConfig a = base;
  if (j.contains("architecture") || j.contains("preset")) {
    const Architecture arch =
        parse_architecture(read_string(j, "architecture", std::string(architecture_name(base.architecture)), ctx));
    if (j.contains("preset")) {
      a = preset_agent(arch, read_string(j, "preset", "single", ctx));
    } else if (arch != base.architecture) {
      // keep the same sizing regime as the base
      const bool multi = base.n_hidden > 1024 || base.expanded_copies > 16;
      a = preset_agent(arch, multi ? "multi" : "single");
    }
  }
  read(j, "n_hidden", a.n_hidden, ctx);
  read(j, "expanded_copies", a.expanded_copies, ctx);
  if (j.contains("activation")) a.activation = activation_from_json(j["activation"]);
  read(j, "linear_gain", a.linear_gain, ctx);
  if (j.contains("hidden_init")) {
    const std::string init = read_string(j, "hidden_init", "uniform", ctx);
    if (init == "uniform") {
      a.hidden_init = HiddenInit::Uniform;
    } else if (init == "k_split") {
      a.hidden_init = HiddenInit::KSplit;
    } else {
      throw ConfigError("hidden_init must be 'uniform' or 'k_split'");
    }
  }
  read(j, "k_excitatory", a.k_excitatory, ctx);
  read(j, "working_memory", a.working_memory, ctx);
  read(j, "dt", a.dt, ctx);
  read(j, "tau_g", a.tau_g, ctx);
  if (j.contains("td_scheme")) a.td_scheme = parse_td_scheme(read_string(j, "td_scheme", "", ctx));
  if (j.contains("eta")) {
    double eta = 0.0;
    read(j, "eta", eta, ctx);
    a.rates.eta_actor = a.rates.eta_critic = eta;
  }
  read(j, "eta_critic", a.rates.eta_critic, ctx);
  read(j, "eta_actor", a.rates.eta_actor, ctx);
  read(j, "plasticity", a.rates.plasticity_enabled, ctx);
  read(j, "seed", a.seed, ctx);
  read(j, "noise", a.noise, ctx);
  read(j, "velocity_scale", a.velocity_scale, ctx);
  if (j.contains("actor")) {
    const Json& s = j["actor"];
    check_keys(s, {"m", "tau", "sigma", "a0", "w_minus", "w_plus", "phi"}, "agent.actor");
    read(s, "m", a.actor.m, "agent.actor");
    read(s, "tau", a.actor.tau, "agent.actor");
    read(s, "sigma", a.actor.sigma, "agent.actor");
    read(s, "a0", a.actor.a0, "agent.actor");
    read(s, "w_minus", a.actor.w_minus, "agent.actor");
    read(s, "w_plus", a.actor.w_plus, "agent.actor");
    read(s, "phi", a.actor.phi, "agent.actor");
  }
  if (j.contains("critic")) {
    const Json& s = j["critic"];
    check_keys(s, {"tau", "sigma"}, "agent.critic");
    read(s, "tau", a.critic.tau, "agent.critic");
    read(s, "sigma", a.critic.sigma, "agent.critic");
  }
  if (j.contains("reservoir")) {
    const Json& s = j["reservoir"];
    check_keys(s, {"lambda", "tau", "sigma", "p", "readout"}, "agent.reservoir");
    read(s, "lambda", a.reservoir.lambda, "agent.reservoir");
    read(s, "tau", a.reservoir.tau, "agent.reservoir");
    read(s, "sigma", a.reservoir.sigma, "agent.reservoir");
    read(s, "p", a.reservoir.p, "agent.reservoir");
    if (s.contains("readout")) a.reservoir.readout = activation_from_json(s["readout"]);
  }
  if (j.contains("bump")) {
    const Json& s = j["bump"];
    check_keys(s, {"n", "tau", "sigma", "w_minus", "phi", "units_per_cue"}, "agent.bump");
    read(s, "n", a.bump.n, "agent.bump");
    read(s, "tau", a.bump.tau, "agent.bump");
    read(s, "sigma", a.bump.sigma, "agent.bump");
    read(s, "w_minus", a.bump.w_minus, "agent.bump");
    read(s, "phi", a.bump.phi, "agent.bump");
    read(s, "units_per_cue", a.bump.units_per_cue, "agent.bump");
  }
  a.reservoir.n = a.n_hidden;
  return a;
}

// --- task --------------------------------------------------------------------

Json to_json(const TaskSpec& t) {
  Json assoc = Json::array();
  for (const auto& a : t.associations) {
    assoc.push_back(Json{{"cue", a.cue}, {"x", a.location.x}, {"y", a.location.y}});
  }
  Json j;
  j["kind"] = task_kind_name(t.kind);
  j["n_pairs"] = t.n_pairs;
  j["displacement_index"] = t.displacement_index;
  j["associations"] = assoc;
  j["reward"] = t.reward;
  j["t_max"] = t.t_max;
  j["probe_duration"] = t.probe_duration;
  j["cue_duration"] = t.cue_duration;
  j["cue_reappears"] = t.cue_reappears;
  j["near_radius"] = t.near_radius;
  j["learned_threshold"] = t.learned_threshold;
  j["training_trials"] = t.training_trials;
  j["probe_trials"] = t.probe_trials;
  j["training_sessions"] = t.training_sessions;
  j["probe_sessions"] = t.probe_sessions;
  return j;
}

TaskSpec task_from_json(const Json& j) {
  constexpr std::string_view ctx = "task";
  check_keys(j,
             {"kind", "n_pairs", "displacement_index", "associations", "reward", "t_max",
              "probe_duration", "cue_duration", "cue_reappears", "near_radius",
              "learned_threshold", "training_trials", "probe_trials", "training_sessions",
              "probe_sessions"},
             ctx);
  const TaskKind kind = parse_task_kind(read_string(j, "kind", "single_reward", ctx));
  int n_pairs = 6;
  read(j, "n_pairs", n_pairs, ctx);
  TaskSpec t = (kind == TaskKind::MultiPa || kind == TaskKind::TransientCuePa) && !j.contains("associations")
                   ? default_task(kind, n_pairs)
                   : default_task(kind, (n_pairs == 16) ? 16 : 6);
  t.n_pairs = (kind == TaskKind::SingleReward || kind == TaskKind::DisplacedReward) ? 1 : n_pairs;
  if (j.contains("associations")) {
    t.associations.clear();
    for (const Json& a : j["associations"]) {
      check_keys(a, {"cue", "x", "y"}, "task.associations[]");
      CueLocation c;
      read(a, "cue", c.cue, "task.associations[]");
      read(a, "x", c.location.x, "task.associations[]");
      read(a, "y", c.location.y, "task.associations[]");
      t.associations.push_back(c);
    }
  }
  read(j, "displacement_index", t.displacement_index, ctx);
  read(j, "reward", t.reward, ctx);
  read(j, "t_max", t.t_max, ctx);
  read(j, "probe_duration", t.probe_duration, ctx);
  read(j, "cue_duration", t.cue_duration, ctx);
  read(j, "cue_reappears", t.cue_reappears, ctx);
  read(j, "near_radius", t.near_radius, ctx);
  read(j, "learned_threshold", t.learned_threshold, ctx);
  read(j, "training_trials", t.training_trials, ctx);
  read(j, "probe_trials", t.probe_trials, ctx);
  read(j, "training_sessions", t.training_sessions, ctx);
  read(j, "probe_sessions", t.probe_sessions, ctx);
  return t;
}

// --- run config --------------------------------------------------------------

void RunConfig::validate() const {
  if (n_seeds < 1) throw ConfigError("n_seeds must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  task.validate();
  agent.validate();
}

Json to_json(const RunConfig& c) {
  Json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["task"] = to_json(c.task);
  j["agent"] = to_json(c.agent);
  j["n_seeds"] = c.n_seeds;
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  check_keys(j, {"schema_version", "task", "agent", "n_seeds", "master_seed", "threads", "output_dir"},
             "run config");
  int version = kConfigSchemaVersion;
  read(j, "schema_version", version, "run config");
  if (version != kConfigSchemaVersion) {
    throw ConfigError("unsupported config schema_version " + std::to_string(version));
  }
  RunConfig c;
  if (j.contains("task")) c.task = task_from_json(j["task"]);
  const bool multi = c.task.session_based();
  AgentConfig base = preset_agent(Architecture::Classic, multi ? "multi" : "single");
  if (j.contains("agent")) {
    const Json& aj = j["agent"];
    if (aj.is_object() && aj.contains("architecture") && !aj.contains("preset")) {
      base = preset_agent(parse_architecture(aj["architecture"].get<std::string>()),
                          multi ? "multi" : "single");
    }
    c.agent = agent_from_json(aj, base);
  } else {
    c.agent = base;
  }
  read(j, "n_seeds", c.n_seeds, "run config");
  read(j, "master_seed", c.master_seed, "run config");
  read(j, "threads", c.threads, "run config");
  read(j, "output_dir", c.output_dir, "run config");
  c.validate();
  return c;
}

RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return run_config_from_json(j);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const RunConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("output_dir");
  j.erase("threads");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pacnav
