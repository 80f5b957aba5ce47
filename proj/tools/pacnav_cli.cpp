// pacnav command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pacnav/pacnav.h"

namespace {

struct Common {
  std::string config;
  std::string task = "single_reward";
  std::string arch = "classic";
  std::optional<int> seeds;
  std::optional<std::uint64_t> master_seed;
  std::optional<double> dt;
  std::optional<std::string> scheme;
  std::optional<int> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c, bool run_flags) {
  cmd->add_option("--config", c.config, "Run config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--task", c.task, "Task preset when no config is given")
      ->check(CLI::IsMember({"single_reward", "displaced_reward", "multi_pa", "transient_cue_pa"}));
  cmd->add_option("--arch", c.arch, "Architecture preset when no config is given")
      ->check(CLI::IsMember({"classic", "expanded_classic", "linear_hidden", "nonlinear_hidden", "reservoir"}));
  cmd->add_option("--seeds", c.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--master-seed", c.master_seed, "Master seed");
  cmd->add_option("--out", c.out, "Output directory");
  if (run_flags) {
    cmd->add_option("--dt", c.dt, "Time step in seconds")->check(CLI::PositiveNumber);
    cmd->add_option("--scheme", c.scheme, "TD discretization")
        ->check(CLI::IsMember({"forward", "backward"}));
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  }
}

int report(pacnav_status st) {
  if (st != PACNAV_OK) {
    std::fprintf(stderr, "pacnav: %s: %s\n", pacnav_status_name(st), pacnav_last_error());
  }
  return static_cast<int>(st);
}

struct ConfigHandle {
  pacnav_config* ptr = nullptr;
  ~ConfigHandle() { pacnav_config_free(ptr); }
};

pacnav_status build_config(const Common& c, ConfigHandle& h) {
  pacnav_status st = c.config.empty() ? pacnav_config_default(c.task.c_str(), c.arch.c_str(), &h.ptr)
                                      : pacnav_config_load(c.config.c_str(), &h.ptr);
  if (st != PACNAV_OK) return st;
  if (c.seeds && (st = pacnav_config_set_seeds(h.ptr, *c.seeds)) != PACNAV_OK) return st;
  if (c.master_seed && (st = pacnav_config_set_master_seed(h.ptr, *c.master_seed)) != PACNAV_OK) return st;
  if (c.dt && (st = pacnav_config_set_dt(h.ptr, *c.dt)) != PACNAV_OK) return st;
  if (c.scheme && (st = pacnav_config_set_scheme(h.ptr, c.scheme->c_str())) != PACNAV_OK) return st;
  if (c.threads && (st = pacnav_config_set_threads(h.ptr, *c.threads)) != PACNAV_OK) return st;
  if (c.out && (st = pacnav_config_set_output_dir(h.ptr, c.out->c_str())) != PACNAV_OK) return st;
  return pacnav_config_validate(h.ptr);
}

void print_trial(int seed_index, int trial_index, int probe, double latency, int found, void* user) {
  if (*static_cast<bool*>(user)) return;
  std::fprintf(stderr, "seed %d trial %d%s latency %.1f s%s\n", seed_index, trial_index,
               probe ? " (probe)" : "", latency, found ? "" : " (not found)");
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  pacnav_string_free(s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pacnav: actor-critic navigation experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pacnav_version());
  app.footer(
      "Relative output directories resolve against $PACNAV_OUTPUT_ROOT when it is set.\n"
      "Exit codes: 0 ok, 1 invalid argument, 2 config, 3 io, 4 numerical, 5 partial, 6 validation.");

  Common run_opts;
  bool quiet = false;
  bool print_config = false;
  auto* run = app.add_subcommand("run", "Run an experiment and write a result bundle");
  add_common(run, run_opts, true);
  run->add_flag("--quiet,-q", quiet, "No per-trial progress");
  run->add_flag("--print-config", print_config, "Print the resolved config and exit");

  Common sweep_opts;
  std::string axis;
  std::string values;
  auto* sweep = app.add_subcommand("sweep", "Sweep one hyperparameter axis");
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--axis", axis, "Axis to sweep")
      ->required()
      ->check(CLI::IsMember({"expansion_ratio", "activation", "K", "tau_g"}));
  sweep->add_option("--values", values, "Comma separated axis values")->required();

  std::string bundle;
  int probe = 1;
  int seed_index = 0;
  bool svg = false;
  std::optional<std::string> maps_out;
  auto* maps = app.add_subcommand("maps", "Value, TD and policy maps from a run bundle");
  maps->add_option("bundle", bundle, "Run bundle directory")->required()->check(CLI::ExistingDirectory);
  maps->add_option("--probe", probe, "Probe block / probe session ordinal (1-based)");
  maps->add_option("--seed-index", seed_index, "Seed within the bundle");
  maps->add_flag("--svg", svg, "Also write SVG heatmap + arrow images");
  maps->add_option("--out", maps_out, "Output directory (default <bundle>/maps)");

  Common dims_opts;
  auto* dims = app.add_subcommand("dims", "Hidden-layer dimensionality (PCA, 95% variance)");
  add_common(dims, dims_opts, false);

  std::string target;
  auto* validate = app.add_subcommand("validate", "Check a config file or a result bundle");
  validate->add_option("path", target, "Config file or bundle directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    ConfigHandle cfg;
    if (const auto st = build_config(run_opts, cfg); st != PACNAV_OK) return report(st);
    if (print_config) {
      char* text = nullptr;
      const auto st = pacnav_config_to_json(cfg.ptr, &text);
      if (st == PACNAV_OK) std::printf("%s\n", take(text).c_str());
      return report(st);
    }
    char* path = nullptr;
    const auto st = pacnav_run(cfg.ptr, nullptr, print_trial, &quiet, &path);
    const std::string dir = take(path);
    if (!dir.empty()) std::printf("%s\n", dir.c_str());
    return report(st);
  }
  if (*sweep) {
    ConfigHandle cfg;
    if (const auto st = build_config(sweep_opts, cfg); st != PACNAV_OK) return report(st);
    char* path = nullptr;
    const auto st = pacnav_sweep(cfg.ptr, axis.c_str(), values.c_str(), nullptr, &path);
    const std::string dir = take(path);
    if (!dir.empty()) std::printf("%s\n", dir.c_str());
    return report(st);
  }
  if (*maps) {
    int n = 0;
    const auto st =
        pacnav_maps(bundle.c_str(), probe, seed_index, svg ? 1 : 0, maps_out ? maps_out->c_str() : nullptr, &n);
    if (st == PACNAV_OK) std::printf("%d files\n", n);
    return report(st);
  }
  if (*dims) {
    ConfigHandle cfg;
    if (const auto st = build_config(dims_opts, cfg); st != PACNAV_OK) return report(st);
    char* json = nullptr;
    const auto st = pacnav_dims(cfg.ptr, nullptr, &json);
    if (st == PACNAV_OK) std::printf("%s\n", take(json).c_str());
    return report(st);
  }
  if (*validate) {
    char* text = nullptr;
    const auto st = pacnav_validate(target.c_str(), &text);
    const std::string problems = take(text);
    if (st == PACNAV_OK) {
      std::printf("ok\n");
    } else {
      std::fputs(problems.c_str(), stderr);
    }
    return report(st);
  }
  return 0;
}
