/* C interface to the uavnav library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a uavnav_status; on
 * failure uavnav_last_error() describes the problem for the calling thread.
 */
#ifndef UAVNAV_UAVNAV_H
#define UAVNAV_UAVNAV_H

#include <stdint.h>

#if defined(_WIN32)
#  if defined(UAVNAV_BUILDING_LIBRARY)
#    define UAVNAV_API __declspec(dllexport)
#  else
#    define UAVNAV_API __declspec(dllimport)
#  endif
#else
#  define UAVNAV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Codes 2, 3 and 4 double as the command-line exit codes. */
typedef enum uavnav_status {
  UAVNAV_OK = 0,
  UAVNAV_ERR_INVALID_ARGUMENT = 1,
  UAVNAV_ERR_CONFIG = 2,
  UAVNAV_ERR_DIVERGENCE = 3,
  UAVNAV_ERR_CHECKPOINT = 4,
  UAVNAV_ERR_UNSATISFIABLE_WORLD = 5,
  UAVNAV_ERR_CONTRACT = 6,
  UAVNAV_ERR_IO = 7,
  UAVNAV_ERR_SHAPE = 8,
  UAVNAV_ERR_INTERNAL = 9
} uavnav_status;

typedef enum uavnav_outcome {
  UAVNAV_IN_PROGRESS = 0,
  UAVNAV_REACHED = 1,
  UAVNAV_TIMED_OUT = 2,
  UAVNAV_CRASHED = 3
} uavnav_outcome;

typedef struct uavnav_config uavnav_config;
typedef struct uavnav_world uavnav_world;
typedef struct uavnav_agent uavnav_agent;
typedef struct uavnav_episode uavnav_episode;

typedef struct uavnav_eval_report {
  int episodes;
  int reached;
  int successes;
  int crashed_episodes;
  double completion_rate;
  double mean_steps;
  double crash_rate;
} uavnav_eval_report;

UAVNAV_API const char* uavnav_version(void);
UAVNAV_API const char* uavnav_last_error(void);
UAVNAV_API const char* uavnav_status_string(uavnav_status status);

/* Run configuration */
UAVNAV_API uavnav_status uavnav_config_load(const char* path, uavnav_config** out);
UAVNAV_API uavnav_status uavnav_config_parse(const char* json_text, uavnav_config** out);
UAVNAV_API uavnav_status uavnav_config_preset(const char* name, uavnav_config** out);
UAVNAV_API void uavnav_config_free(uavnav_config* config);
UAVNAV_API uavnav_status uavnav_config_set_seed(uavnav_config* config, uint64_t seed);
UAVNAV_API uavnav_status uavnav_config_set_output_dir(uavnav_config* config, const char* dir);
UAVNAV_API uavnav_status uavnav_config_set_episodes(uavnav_config* config, int episodes);
/* NULL clears the transfer source. */
UAVNAV_API uavnav_status uavnav_config_set_init_checkpoint(uavnav_config* config, const char* path);
UAVNAV_API uavnav_status uavnav_config_set_world(uavnav_config* config, const uavnav_world* world);
UAVNAV_API int uavnav_config_eval_episodes(const uavnav_config* config);
UAVNAV_API const char* uavnav_config_output_dir(const uavnav_config* config);
/* Writes the resolved configuration as JSON. */
UAVNAV_API uavnav_status uavnav_config_save(const uavnav_config* config, const char* path);

/* Worlds */
UAVNAV_API uavnav_status uavnav_world_load(const char* path, uavnav_world** out);
UAVNAV_API uavnav_status uavnav_world_from_config(const uavnav_config* config, uavnav_world** out);
/* Random boxes on top of `base` (may be NULL for defaults). */
UAVNAV_API uavnav_status uavnav_world_generate(uint64_t seed, int min_obstacles, int max_obstacles,
                                               const uavnav_world* base, uavnav_world** out);
UAVNAV_API uavnav_status uavnav_world_save(const uavnav_world* world, const char* path);
UAVNAV_API int uavnav_world_obstacle_count(const uavnav_world* world);
UAVNAV_API void uavnav_world_free(uavnav_world* world);

/* Episodes */
UAVNAV_API uavnav_status uavnav_episode_reset(const uavnav_world* world, uint64_t seed, uavnav_episode** out);
/* action = {rho, phi, psi}; any output pointer may be NULL. */
UAVNAV_API uavnav_status uavnav_episode_step(uavnav_episode* episode, const double action[3], double* sigma,
                                             int* reached, int* done);
UAVNAV_API uavnav_status uavnav_episode_observe(const uavnav_episode* episode, double observation[6]);
UAVNAV_API uavnav_outcome uavnav_episode_outcome(const uavnav_episode* episode);
UAVNAV_API int uavnav_episode_step_index(const uavnav_episode* episode);
UAVNAV_API void uavnav_episode_free(uavnav_episode* episode);

UAVNAV_API double uavnav_reward(const uavnav_config* config, double distance, double sigma);

/* Training. Outputs go to the configured output directory; `out` may be
 * NULL when the trained agent is not needed in memory. */
UAVNAV_API uavnav_status uavnav_train(const uavnav_config* config, uavnav_agent** out);
UAVNAV_API uavnav_status uavnav_transfer(const uavnav_config* config, uavnav_agent** out);

/* Agents */
UAVNAV_API uavnav_status uavnav_agent_load(const char* path, uavnav_agent** out);
UAVNAV_API uavnav_status uavnav_agent_save(const uavnav_agent* agent, const char* path);
/* Greedy action for an observation {uav xyz, target xyz}. */
UAVNAV_API uavnav_status uavnav_agent_act(const uavnav_agent* agent, const double observation[6], double action[3]);
UAVNAV_API void uavnav_agent_free(uavnav_agent* agent);

/* Evaluation. When out_dir is non-NULL, report.json and trajectories.csv
 * are written there. */
UAVNAV_API uavnav_status uavnav_evaluate(const uavnav_agent* agent, const uavnav_world* world,
                                         const uavnav_config* config, int episodes, uint64_t seed,
                                         const char* out_dir, uavnav_eval_report* report);
/* One greedy episode written to csv_path (plus csv_path.world.json). */
UAVNAV_API uavnav_status uavnav_rollout(const uavnav_agent* agent, const uavnav_world* world,
                                        const uavnav_config* config, uint64_t seed, const char* csv_path,
                                        uavnav_outcome* outcome);

#ifdef __cplusplus
}
#endif

#endif /* UAVNAV_UAVNAV_H */
