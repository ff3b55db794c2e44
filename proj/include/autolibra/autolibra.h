/* Copyright 2026 The AutoLibra Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the engine. Every function returns an al_status; on
 * failure al_last_error_message() holds a description for the calling
 * thread. Strings returned through `char**` out-parameters are owned by the
 * caller and released with al_string_free(). */

#ifndef AUTOLIBRA_AUTOLIBRA_H_
#define AUTOLIBRA_AUTOLIBRA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AL_API
#elif defined(AUTOLIBRA_BUILDING)
#define AL_API __attribute__((visibility("default")))
#else
#define AL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum al_status {
  AL_OK = 0,
  AL_INVALID_ARGUMENT = 1,
  AL_PARSE = 2,
  AL_VALIDATION = 3,
  AL_NOT_FOUND = 4,
  AL_SPLIT = 5,
  AL_CASSETTE_MISS = 6,
  AL_TRANSPORT = 7,
  AL_STRUCTURED_OUTPUT = 8,
  AL_GROUNDING = 9,
  AL_CARDINALITY = 10,
  AL_SCHEMA = 11,
  AL_FROZEN_DEFINITION = 12,
  AL_JUDGE_SCHEMA = 13,
  AL_EMPTY_EVALUATION = 14,
  AL_OPTIMIZER = 15,
  AL_EPISODE = 16,
  AL_STAGE_INPUT = 17,
  AL_CORRUPT_RATINGS = 18,
  AL_IO = 19,
  AL_INTERNAL = 20
} al_status;

typedef struct al_session al_session;
typedef struct al_server al_server;

AL_API const char* al_version(void);
AL_API const char* al_status_name(al_status status);
/* Message of the last failed call on this thread; "" when none. */
AL_API const char* al_last_error_message(void);
AL_API void al_string_free(char* s);
/* Log threshold ("trace" .. "off"); log lines go to stderr. */
AL_API al_status al_set_log_level(const char* level);

/* Opens a workspace directory (created if missing). `config_path` may be
 * NULL. */
AL_API al_status al_session_open(const char* workspace, const char* config_path,
                                 al_session** out);
AL_API void al_session_close(al_session* session);
/* Overrides one setting. Keys: seed, provider, cassette_mode, cassette,
 * max_parallel, holdout_fraction, optimizer.<field>, ladder.<field>,
 * server.<field>, gateway.<key>. Values are given as text. */
AL_API al_status al_session_set(al_session* session, const char* key,
                                const char* value);
AL_API al_status al_session_config_json(al_session* session, char** out_json);

/* Results come back as JSON text. */
AL_API al_status al_ingest_trajectories(al_session* session, const char* path,
                                        char** out_json);
AL_API al_status al_ingest_feedback(al_session* session, const char* path,
                                    char** out_json);
/* `fraction` <= 0 uses the configured holdout_fraction. */
AL_API al_status al_split(al_session* session, double fraction, int64_t seed,
                          char** out_json);
AL_API al_status al_ground(al_session* session, const char* run_id,
                           char** out_json);
AL_API al_status al_cluster(al_session* session, const char* run_id, size_t n,
                            char** out_json);
/* `parent` is a metric set file path or id. */
AL_API al_status al_iterate(al_session* session, const char* run_id,
                            const char* parent, char** out_json);
/* `split` is "train", "holdout" or "all". */
AL_API al_status al_judge(al_session* session, const char* run_id,
                          const char* metric_set, const char* split,
                          char** out_json);
AL_API al_status al_metaeval(al_session* session, const char* run_id,
                             const char* metric_set, const char* split,
                             char** out_json);
AL_API al_status al_optimize(al_session* session, const char* run_id,
                             char** out_json);
/* `feedback_dir` NULL: synthetic annotator. */
AL_API al_status al_ladder(al_session* session, const char* run_id,
                           const char* feedback_dir, char** out_json);
AL_API al_status al_report(al_session* session, const char* run_id,
                           char** out_json);

/* Annotation server over the session's workspace. Port 0 picks a free one. */
AL_API al_status al_server_start(al_session* session, const char* host,
                                 int port, al_server** out);
AL_API int al_server_port(const al_server* server);
/* Blocks until al_server_stop is called from another thread. */
AL_API al_status al_server_wait(al_server* server);
AL_API void al_server_stop(al_server* server);
/* Stops if needed and releases the server. */
AL_API void al_server_free(al_server* server);

/* TOML subset to JSON text. */
AL_API al_status al_toml_to_json(const char* toml, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* AUTOLIBRA_AUTOLIBRA_H_ */
