/* pacnav: actor-critic navigation agents with place-cell, hidden-layer,
 * reservoir and working-memory front ends. Plain C interface.
 *
 * Every function returns a pacnav_status. On failure pacnav_last_error()
 * describes the problem; the message is per-thread and valid until the next
 * call on that thread. Strings handed out by the library are released with
 * pacnav_string_free().
 */
#ifndef PACNAV_PACNAV_H
#define PACNAV_PACNAV_H

#include <stddef.h>
#include <stdint.h>

#if defined(PACNAV_BUILDING_LIBRARY)
#define PACNAV_API __attribute__((visibility("default")))
#else
#define PACNAV_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pacnav_status {
  PACNAV_OK = 0,
  PACNAV_ERR_INVALID_ARGUMENT = 1, /* null pointer or out-of-range argument */
  PACNAV_ERR_CONFIG = 2,           /* invalid configuration */
  PACNAV_ERR_IO = 3,               /* file system or output schema failure */
  PACNAV_ERR_NUMERICAL = 4,        /* non-finite dynamics */
  PACNAV_ERR_PARTIAL = 5,          /* run finished but some seeds aborted */
  PACNAV_ERR_VALIDATION = 6,       /* validate found problems */
  PACNAV_ERR_INTERNAL = 7
} pacnav_status;

PACNAV_API const char* pacnav_version(void);
PACNAV_API const char* pacnav_status_name(pacnav_status status);
PACNAV_API const char* pacnav_last_error(void);
PACNAV_API void pacnav_string_free(char* s);

/* ---- run configuration ---------------------------------------------------- */

typedef struct pacnav_config pacnav_config;

/* Defaults for a task kind ("single_reward", "displaced_reward", "multi_pa",
 * "transient_cue_pa") and architecture ("classic", "expanded_classic",
 * "linear_hidden", "nonlinear_hidden", "reservoir"). */
PACNAV_API pacnav_status pacnav_config_default(const char* task_kind, const char* architecture,
                                               pacnav_config** out);
PACNAV_API pacnav_status pacnav_config_load(const char* path, pacnav_config** out);
PACNAV_API pacnav_status pacnav_config_parse(const char* json_text, pacnav_config** out);
PACNAV_API void pacnav_config_free(pacnav_config* cfg);

PACNAV_API pacnav_status pacnav_config_set_seeds(pacnav_config* cfg, int n_seeds);
PACNAV_API pacnav_status pacnav_config_set_master_seed(pacnav_config* cfg, uint64_t seed);
PACNAV_API pacnav_status pacnav_config_set_dt(pacnav_config* cfg, double dt);
/* "forward" or "backward" */
PACNAV_API pacnav_status pacnav_config_set_scheme(pacnav_config* cfg, const char* scheme);
PACNAV_API pacnav_status pacnav_config_set_threads(pacnav_config* cfg, int threads);
PACNAV_API pacnav_status pacnav_config_set_output_dir(pacnav_config* cfg, const char* dir);

/* Checks the configuration without running anything. */
PACNAV_API pacnav_status pacnav_config_validate(const pacnav_config* cfg);
PACNAV_API pacnav_status pacnav_config_to_json(const pacnav_config* cfg, char** out_json);
/* Writes 16 hex digits and a terminating NUL; buf must hold 17 bytes. */
PACNAV_API pacnav_status pacnav_config_hash(const pacnav_config* cfg, char* buf, size_t buf_len);
PACNAV_API pacnav_status pacnav_config_output_path(const pacnav_config* cfg, char** out_path);

/* ---- commands ---------------------------------------------------------------
 * out_dir may be NULL to use the config's output_dir (relative paths resolve
 * against $PACNAV_OUTPUT_ROOT). out_path, when non-NULL, receives the
 * directory written. */

typedef void (*pacnav_trial_callback)(int seed_index, int trial_index, int probe, double latency,
                                      int found, void* user);

PACNAV_API pacnav_status pacnav_run(const pacnav_config* cfg, const char* out_dir,
                                    pacnav_trial_callback on_trial, void* user, char** out_path);

/* axis: "expansion_ratio", "activation", "K" or "tau_g"; values are
 * comma separated. */
PACNAV_API pacnav_status pacnav_sweep(const pacnav_config* cfg, const char* axis,
                                      const char* values, const char* out_dir, char** out_path);

/* Maps for one probe block (1-based) and seed of a run bundle. out_dir NULL
 * writes into <bundle>/maps. */
PACNAV_API pacnav_status pacnav_maps(const char* bundle_dir, int probe_block, int seed_index,
                                     int svg, const char* out_dir, int* n_files);

/* Dimensionality report per seed as JSON. */
PACNAV_API pacnav_status pacnav_dims(const pacnav_config* cfg, const char* out_dir,
                                     char** out_report_json);

/* A directory is checked as a bundle, a file as a run config. The problem
 * list (one per line) is returned in out_report when non-NULL. */
PACNAV_API pacnav_status pacnav_validate(const char* path, char** out_report);

/* ---- single agent ----------------------------------------------------------- */

typedef struct pacnav_agent pacnav_agent;

typedef struct pacnav_step_result {
  double velocity_x; /* m/s */
  double velocity_y;
  double value;
  double td_error;
} pacnav_step_result;

PACNAV_API pacnav_status pacnav_agent_create(const pacnav_config* cfg, uint64_t seed,
                                             pacnav_agent** out);
PACNAV_API void pacnav_agent_free(pacnav_agent* agent);
PACNAV_API pacnav_status pacnav_agent_reset(pacnav_agent* agent);
PACNAV_API pacnav_status pacnav_agent_step(pacnav_agent* agent, double x, double y, int cue_id,
                                           int cue_active, double reward_rate, int learn,
                                           pacnav_step_result* out);
PACNAV_API pacnav_status pacnav_agent_param_count(const pacnav_agent* agent, int64_t* out);

#ifdef __cplusplus
}
#endif

#endif /* PACNAV_PACNAV_H */
