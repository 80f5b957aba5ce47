#include "pacnav/pacnav.h"

#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "core/commands.hpp"

struct pacnav_config {
  pacnav::RunConfig cfg;
};

struct pacnav_agent {
  pacnav::Agent agent;
};

namespace {

thread_local std::string g_last_error;

pacnav_status fail(pacnav_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void hand_out(char** out, const std::string& s) {
  if (out != nullptr) *out = dup_string(s);
}

// Runs f, translating exceptions into status codes.
template <typename F>
pacnav_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const pacnav::ConfigError& e) {
    return fail(PACNAV_ERR_CONFIG, e.what());
  } catch (const pacnav::IoError& e) {
    return fail(PACNAV_ERR_IO, e.what());
  } catch (const pacnav::NumericalError& e) {
    return fail(PACNAV_ERR_NUMERICAL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(PACNAV_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(PACNAV_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PACNAV_ERR_INTERNAL, "unknown error");
  }
}

#define PACNAV_REQUIRE(ptr)                                                     \
  do {                                                                          \
    if ((ptr) == nullptr) return fail(PACNAV_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

pacnav::fs::path output_for(const pacnav_config* cfg, const char* out_dir) {
  return out_dir != nullptr ? pacnav::fs::path(out_dir) : pacnav::resolve_output_dir(cfg->cfg.output_dir);
}

}  // namespace

extern "C" {

const char* pacnav_version(void) { return pacnav::kCodeVersion; }

const char* pacnav_status_name(pacnav_status status) {
  switch (status) {
    case PACNAV_OK:
      return "ok";
    case PACNAV_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case PACNAV_ERR_CONFIG:
      return "config error";
    case PACNAV_ERR_IO:
      return "io error";
    case PACNAV_ERR_NUMERICAL:
      return "numerical error";
    case PACNAV_ERR_PARTIAL:
      return "partial result";
    case PACNAV_ERR_VALIDATION:
      return "validation failed";
    case PACNAV_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* pacnav_last_error(void) { return g_last_error.c_str(); }

void pacnav_string_free(char* s) { std::free(s); }

// --- config ---------------------------------------------------------------------

pacnav_status pacnav_config_default(const char* task_kind, const char* architecture, pacnav_config** out) {
  PACNAV_REQUIRE(task_kind);
  PACNAV_REQUIRE(architecture);
  PACNAV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<pacnav_config>();
    c->cfg.task = pacnav::default_task(pacnav::parse_task_kind(task_kind));
    c->cfg.agent = pacnav::preset_agent(pacnav::parse_architecture(architecture),
                                        c->cfg.task.session_based() ? "multi" : "single");
    c->cfg.agent.working_memory = c->cfg.task.kind == pacnav::TaskKind::TransientCuePa;
    *out = c.release();
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_load(const char* path, pacnav_config** out) {
  PACNAV_REQUIRE(path);
  PACNAV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<pacnav_config>();
    c->cfg = pacnav::load_run_config(path);
    *out = c.release();
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_parse(const char* json_text, pacnav_config** out) {
  PACNAV_REQUIRE(json_text);
  PACNAV_REQUIRE(out);
  return guarded([&] {
    auto c = std::make_unique<pacnav_config>();
    c->cfg = pacnav::parse_run_config(json_text);
    *out = c.release();
    return PACNAV_OK;
  });
}

void pacnav_config_free(pacnav_config* cfg) { delete cfg; }

pacnav_status pacnav_config_set_seeds(pacnav_config* cfg, int n_seeds) {
  PACNAV_REQUIRE(cfg);
  if (n_seeds < 1) return fail(PACNAV_ERR_CONFIG, "n_seeds must be at least 1");
  cfg->cfg.n_seeds = n_seeds;
  return PACNAV_OK;
}

pacnav_status pacnav_config_set_master_seed(pacnav_config* cfg, uint64_t seed) {
  PACNAV_REQUIRE(cfg);
  cfg->cfg.master_seed = seed;
  return PACNAV_OK;
}

pacnav_status pacnav_config_set_dt(pacnav_config* cfg, double dt) {
  PACNAV_REQUIRE(cfg);
  if (!(dt > 0.0)) return fail(PACNAV_ERR_CONFIG, "dt must be positive");
  cfg->cfg.agent.dt = dt;
  return PACNAV_OK;
}

pacnav_status pacnav_config_set_scheme(pacnav_config* cfg, const char* scheme) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(scheme);
  return guarded([&] {
    cfg->cfg.agent.td_scheme = pacnav::parse_td_scheme(scheme);
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_set_threads(pacnav_config* cfg, int threads) {
  PACNAV_REQUIRE(cfg);
  if (threads < 1) return fail(PACNAV_ERR_CONFIG, "threads must be at least 1");
  cfg->cfg.threads = threads;
  return PACNAV_OK;
}

pacnav_status pacnav_config_set_output_dir(pacnav_config* cfg, const char* dir) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(dir);
  cfg->cfg.output_dir = dir;
  return PACNAV_OK;
}

pacnav_status pacnav_config_validate(const pacnav_config* cfg) {
  PACNAV_REQUIRE(cfg);
  return guarded([&] {
    cfg->cfg.validate();
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_to_json(const pacnav_config* cfg, char** out_json) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(out_json);
  return guarded([&] {
    hand_out(out_json, pacnav::to_json(cfg->cfg).dump(2));
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_hash(const pacnav_config* cfg, char* buf, size_t buf_len) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(buf);
  if (buf_len < 17) return fail(PACNAV_ERR_INVALID_ARGUMENT, "hash buffer needs 17 bytes");
  return guarded([&] {
    const std::string h = pacnav::config_hash(cfg->cfg);
    std::memcpy(buf, h.c_str(), h.size() + 1);
    return PACNAV_OK;
  });
}

pacnav_status pacnav_config_output_path(const pacnav_config* cfg, char** out_path) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(out_path);
  return guarded([&] {
    hand_out(out_path, pacnav::resolve_output_dir(cfg->cfg.output_dir).string());
    return PACNAV_OK;
  });
}

// --- commands ----------------------------------------------------------------------

pacnav_status pacnav_run(const pacnav_config* cfg, const char* out_dir, pacnav_trial_callback on_trial,
                         void* user, char** out_path) {
  PACNAV_REQUIRE(cfg);
  return guarded([&] {
    std::function<void(int, const pacnav::TrialRecord&)> cb;
    if (on_trial != nullptr) {
      cb = [on_trial, user](int seed_index, const pacnav::TrialRecord& r) {
        on_trial(seed_index, r.meta.index, r.meta.probe ? 1 : 0, r.latency, r.found ? 1 : 0, user);
      };
    }
    const pacnav::fs::path dir = output_for(cfg, out_dir);
    const pacnav::RunSummary s = pacnav::cmd_run(cfg->cfg, dir, cb);
    hand_out(out_path, dir.string());
    if (s.aborted_seeds > 0) {
      std::string msg = std::to_string(s.aborted_seeds) + " of " + std::to_string(s.n_seeds) +
                        " seeds aborted";
      for (const auto& seed : s.seeds) {
        if (seed.aborted) {
          msg += "; seed " + std::to_string(seed.seed_index) + ": " + seed.error;
          break;
        }
      }
      return fail(PACNAV_ERR_PARTIAL, msg);
    }
    return PACNAV_OK;
  });
}

pacnav_status pacnav_sweep(const pacnav_config* cfg, const char* axis, const char* values,
                           const char* out_dir, char** out_path) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(axis);
  PACNAV_REQUIRE(values);
  return guarded([&] {
    std::vector<std::string> list;
    std::stringstream in(values);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (!item.empty()) list.push_back(item);
    }
    const pacnav::fs::path dir = output_for(cfg, out_dir);
    const pacnav::SweepSummary s = pacnav::cmd_sweep(cfg->cfg, pacnav::parse_sweep_axis(axis), list, dir);
    hand_out(out_path, dir.string());
    if (s.failures > 0) {
      return fail(PACNAV_ERR_PARTIAL, std::to_string(s.failures) + " sweep points failed");
    }
    return PACNAV_OK;
  });
}

pacnav_status pacnav_maps(const char* bundle_dir, int probe_block, int seed_index, int svg,
                          const char* out_dir, int* n_files) {
  PACNAV_REQUIRE(bundle_dir);
  return guarded([&] {
    const pacnav::fs::path bundle(bundle_dir);
    const pacnav::fs::path dir = out_dir != nullptr ? pacnav::fs::path(out_dir) : bundle / "maps";
    const auto files = pacnav::cmd_maps(bundle, probe_block, seed_index, svg != 0, dir);
    if (n_files != nullptr) *n_files = static_cast<int>(files.size());
    return PACNAV_OK;
  });
}

pacnav_status pacnav_dims(const pacnav_config* cfg, const char* out_dir, char** out_report_json) {
  PACNAV_REQUIRE(cfg);
  return guarded([&] {
    const pacnav::DimsSummary s = pacnav::cmd_dims(cfg->cfg, output_for(cfg, out_dir));
    if (out_report_json != nullptr) {
      pacnav::Json j = pacnav::Json::array();
      for (std::size_t i = 0; i < s.reports.size(); ++i) {
        const auto& r = s.reports[i];
        j.push_back(pacnav::Json{{"seed_index", i},
                                 {"width", r.width},
                                 {"n_samples", r.n_samples},
                                 {"n_components", r.n_components},
                                 {"degenerate", r.degenerate}});
      }
      hand_out(out_report_json, j.dump());
    }
    return PACNAV_OK;
  });
}

pacnav_status pacnav_validate(const char* path, char** out_report) {
  PACNAV_REQUIRE(path);
  return guarded([&] {
    const pacnav::ValidationReport rep = pacnav::cmd_validate(path);
    std::string text;
    for (const auto& p : rep.problems) text += p + "\n";
    hand_out(out_report, text);
    if (!rep.ok()) return fail(PACNAV_ERR_VALIDATION, rep.problems.front());
    return PACNAV_OK;
  });
}

// --- agent -------------------------------------------------------------------------

pacnav_status pacnav_agent_create(const pacnav_config* cfg, uint64_t seed, pacnav_agent** out) {
  PACNAV_REQUIRE(cfg);
  PACNAV_REQUIRE(out);
  return guarded([&] {
    pacnav::AgentConfig a = cfg->cfg.agent;
    a.seed = seed;
    *out = new pacnav_agent{pacnav::Agent(a)};
    return PACNAV_OK;
  });
}

void pacnav_agent_free(pacnav_agent* agent) { delete agent; }

pacnav_status pacnav_agent_reset(pacnav_agent* agent) {
  PACNAV_REQUIRE(agent);
  return guarded([&] {
    agent->agent.reset_trial();
    return PACNAV_OK;
  });
}

pacnav_status pacnav_agent_step(pacnav_agent* agent, double x, double y, int cue_id, int cue_active,
                                double reward_rate, int learn, pacnav_step_result* out) {
  PACNAV_REQUIRE(agent);
  PACNAV_REQUIRE(out);
  return guarded([&] {
    const pacnav::Observation obs{{x, y}, cue_id, cue_active != 0, false};
    const pacnav::StepTelemetry t = agent->agent.step(obs, reward_rate, learn != 0);
    out->velocity_x = t.action.x;
    out->velocity_y = t.action.y;
    out->value = t.value;
    out->td_error = t.td_error;
    return PACNAV_OK;
  });
}

pacnav_status pacnav_agent_param_count(const pacnav_agent* agent, int64_t* out) {
  PACNAV_REQUIRE(agent);
  PACNAV_REQUIRE(out);
  *out = agent->agent.config().trainable_parameters();
  return PACNAV_OK;
}

}  // extern "C"
