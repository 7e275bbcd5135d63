/*
 * Copyright 2026 The mflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MFLOW_MFLOW_H_
#define MFLOW_MFLOW_H_

/*
 * C interface to the mflow library. All objects are opaque handles owned by
 * the caller and released with the matching *_destroy function. Every call
 * returns an mflow_status; on failure mflow_last_error() describes the cause
 * for the calling thread.
 */

#include <stddef.h>

#if defined(_WIN32)
#define MFLOW_API __declspec(dllexport)
#elif defined(MFLOW_BUILDING)
#define MFLOW_API __attribute__((visibility("default")))
#else
#define MFLOW_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mflow_status {
  MFLOW_OK = 0,
  MFLOW_INVALID_ARGUMENT = 1,
  MFLOW_DIMENSION_MISMATCH = 2,
  MFLOW_CONFIG_ERROR = 3,
  MFLOW_EMPTY_INTERSECTION = 4,
  MFLOW_NON_FINITE = 5,
  MFLOW_IO_ERROR = 6,
  MFLOW_UNAVAILABLE = 7,
  MFLOW_INTERNAL = 8
} mflow_status;

typedef enum mflow_termination {
  MFLOW_TERM_RESIDUAL = 0,
  MFLOW_TERM_STEP = 1,
  MFLOW_TERM_FIELD_ZERO = 2,
  MFLOW_TERM_MAX_ITER = 3,
  MFLOW_TERM_HORIZON = 4,
  MFLOW_TERM_BREAKDOWN = 5
} mflow_termination;

typedef struct mflow_session mflow_session;
typedef struct mflow_trajectory mflow_trajectory;
typedef struct mflow_report mflow_report;

MFLOW_API const char* mflow_version(void);

/* Message for the last failed call on this thread; never NULL. */
MFLOW_API const char* mflow_last_error(void);

/* Frees strings returned through char** out-parameters. */
MFLOW_API void mflow_string_free(char* s);

/*
 * config_json: JSON object text (may be NULL or empty); origin names it in
 * error messages. overrides_json: keys applied on top, same format.
 */
MFLOW_API mflow_status mflow_session_create(const char* config_json, const char* origin,
                                            const char* overrides_json, mflow_session** out);
MFLOW_API void mflow_session_destroy(mflow_session* session);

/* Number of configured step sizes and the i-th of them. */
MFLOW_API size_t mflow_session_lambda_count(const mflow_session* session);
MFLOW_API double mflow_session_lambda(const mflow_session* session, size_t i);
/* Output directory from the config ("." by default). */
MFLOW_API const char* mflow_session_out_dir(const mflow_session* session);
/* 1 when the instance comes with a discrete scheme (a primal-dual instance). */
MFLOW_API int mflow_session_has_discrete(const mflow_session* session);

/* Runs the configured mode; euler uses the first lambda. */
MFLOW_API mflow_status mflow_session_solve(const mflow_session* session, mflow_trajectory** out);

/*
 * Euler with the given lambda. Instances with a closed-form solution are
 * integrated over [0, t_end]; others run until a stop criterion fires.
 */
MFLOW_API mflow_status mflow_session_integrate(const mflow_session* session, double lambda,
                                               mflow_trajectory** out);

MFLOW_API mflow_status mflow_session_check(const mflow_session* session, mflow_report** out);

MFLOW_API void mflow_trajectory_destroy(mflow_trajectory* traj);
MFLOW_API size_t mflow_trajectory_length(const mflow_trajectory* traj);
MFLOW_API size_t mflow_trajectory_dim(const mflow_trajectory* traj);
/* Copies record i into out[0..dim). */
MFLOW_API mflow_status mflow_trajectory_point(const mflow_trajectory* traj, size_t i, double* out);
MFLOW_API mflow_termination mflow_trajectory_termination(const mflow_trajectory* traj);
/* Sup-error against the closed form; returns 0 and leaves *out untouched when unknown. */
MFLOW_API int mflow_trajectory_reference_error(const mflow_trajectory* traj, double* out);
MFLOW_API mflow_status mflow_trajectory_write_csv(const mflow_trajectory* traj, const char* path);
MFLOW_API mflow_status mflow_trajectory_summary_json(const mflow_trajectory* traj, char** out);

MFLOW_API void mflow_report_destroy(mflow_report* report);
MFLOW_API int mflow_report_passed(const mflow_report* report);
MFLOW_API mflow_status mflow_report_table(const mflow_report* report, char** out);
MFLOW_API mflow_status mflow_report_json(const mflow_report* report, char** out);

/*
 * Projection of w onto H(w, b) n H(b, c) for n-vectors. *which_case receives
 * 1, 2 or 3 for the collinear, second-only and both-active cases.
 * MFLOW_EMPTY_INTERSECTION when the two halfspaces do not meet.
 */
MFLOW_API mflow_status mflow_project(const double* w, const double* b, const double* c, size_t n,
                                     double* out, int* which_case);

#ifdef __cplusplus
}
#endif

#endif /* MFLOW_MFLOW_H_ */
