/* Copyright 2026 The Franson Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the Franson interference toolkit: local hidden variable
 * region models, two photon interference simulation, and chained Bell
 * analysis. All functions return FRANSON_OK on success; on any other status
 * franson_last_error() describes what went wrong for the calling thread.
 * Objects returned through ** out parameters are owned by the caller and
 * released with the matching _free function.
 */

#ifndef FRANSON_H
#define FRANSON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum franson_status {
    FRANSON_OK = 0,
    FRANSON_DOMAIN_ERROR = 1,   /* argument outside its mathematical domain */
    FRANSON_INVALID_MODEL = 2,  /* region model violates its invariants */
    FRANSON_PARSE_ERROR = 3,    /* malformed model, report, or data file */
    FRANSON_IO_ERROR = 4,       /* file could not be read or written */
    FRANSON_CONVERGENCE = 5,    /* quadrature or search failed to converge */
    FRANSON_INVALID_CONFIG = 6, /* bad experiment configuration */
    FRANSON_DATA_ERROR = 7,     /* inconsistent detection or truth data */
    FRANSON_BAD_ARGUMENT = 100  /* null pointer or out of range C argument */
} franson_status;

/* Opaque handles. */
typedef struct franson_model franson_model;
typedef struct franson_report franson_report;

/* Version of this interface. Incremented on incompatible changes. */
int franson_abi_version(void);

/* Message for the most recent failure on this thread, never NULL. */
const char *franson_last_error(void);

/* ---- closed form quantities ---------------------------------------- */

/* Probability of signs l, m = +-1 in the same time slot at local phases
 * phi, psi with interference visibility v. */
franson_status franson_coincidence_probability(int l, int m, double phi, double psi, double v,
                                               double *out);

/* Local bound on the n term chained quantity. coincident_ensemble = 1 gives
 * the post-selected bound 2n-1, 0 the pre-fixed subensemble bound 2n-2. */
franson_status franson_chained_lhv_bound(int n, int coincident_ensemble, double *out);

/* Largest chained quantity quantum mechanics reaches: 2n cos(pi/2n). */
franson_status franson_chained_qm_max(int n, double *out);

/* Visibility above which the post-selected local bound is beaten. */
franson_status franson_visibility_threshold(int n, double *out);

/* ---- region models -------------------------------------------------- */

franson_status franson_model_load(const char *path, franson_model **out);

/* name = "reference" (the exact construction) or "quadrant" (a valid but
 * far-off fixture). */
franson_status franson_model_builtin(const char *name, franson_model **out);

franson_status franson_model_save(const franson_model *model, const char *path);
void franson_model_free(franson_model *model);

/* Joint outcome probabilities at one setting pair, row l cell, column m
 * cell, in the order +E, -E, +L, -L. quad_tol <= 0 picks the default. */
franson_status franson_model_table(const franson_model *model, double phi, double psi,
                                   double quad_tol, double out16[16]);

/* Full validation sweep: areas, table residual over a chi grid, no
 * signaling probes. grid_points <= 0 and quad_tol <= 0 pick defaults. */
franson_status franson_model_validate(const franson_model *model, int grid_points,
                                      double quad_tol, franson_report **out);

/* Search for a model matching the target table, starting from seed. budget
 * <= 0 and tol_max <= 0 pick defaults. On success *out_model holds the
 * found model; *out_report always holds the search summary. */
franson_status franson_model_synthesize(const franson_model *seed, uint64_t rng_seed,
                                        long long budget, double tol_max,
                                        franson_model **out_model, franson_report **out_report);

/* ---- experiments ---------------------------------------------------- */

/* Runs the simulation described by config_text (the key = value format the
 * command line tool writes) through pairing, selection, and analysis.
 * model may be NULL for the quantum engine. threads <= 0 uses one worker
 * per hardware thread. */
franson_status franson_run(const char *config_text, const franson_model *model, int threads,
                           franson_report **out);

/* Configuration text for a named demonstration: "loophole" (local model
 * reproducing the quantum correlations under slow switching) or "nogo-qm" /
 * "nogo-lhv" (fast switching with anchored selection). The text is written
 * into buffer (size bytes, NUL terminated); *needed receives the full
 * length including the terminator. */
franson_status franson_demo_config(const char *name, uint64_t rng_seed, char *buffer, size_t size,
                                   size_t *needed);

/* Runs the configured simulation once, holding all detections in memory,
 * and writes them as CSV. truth_path (requires a truth-logging config) and
 * settings_path may be NULL to skip those files. The summary report counts
 * what was written. */
franson_status franson_simulate_csv(const char *config_text, const franson_model *model,
                                    int threads, const char *detections_path,
                                    const char *truth_path, const char *settings_path,
                                    franson_report **out_summary);

/* Pairs and analyzes detections read back from CSV. Schedules come from the
 * config seed unless settings_path names a schedule dump; truth_path
 * optionally supplies the truth log for the whitebox sections. */
franson_status franson_analyze_csv(const char *config_text, const char *detections_path,
                                   const char *truth_path, const char *settings_path,
                                   franson_report **out);

/* ---- reports --------------------------------------------------------- */

size_t franson_report_size(const franson_report *report);

/* Key at position index, or NULL when out of range. */
const char *franson_report_key(const franson_report *report, size_t index);

int franson_report_has(const franson_report *report, const char *key);

franson_status franson_report_number(const franson_report *report, const char *key, double *out);

/* Text value for key, or NULL when missing or numeric. */
const char *franson_report_text(const franson_report *report, const char *key);

/* Renders the whole report as "key = value" lines. Same buffer contract as
 * franson_demo_config. */
franson_status franson_report_render(const franson_report *report, char *buffer, size_t size,
                                     size_t *needed);

void franson_report_free(franson_report *report);

#ifdef __cplusplus
}
#endif

#endif
