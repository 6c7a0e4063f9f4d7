/*
 * Copyright 2026 The infograd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INFOGRAD_INFOGRAD_H
#define INFOGRAD_INFOGRAD_H

#include <stddef.h>
#include <stdint.h>

#if defined(INFOGRAD_BUILDING_LIBRARY)
#define INFOGRAD_API __attribute__((visibility("default")))
#else
#define INFOGRAD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; INFOGRAD_OK is zero. On failure the
 * message is available from infograd_last_error() on the calling thread
 * until the next failing call. Output handles are written only on success. */
typedef enum infograd_status
{
    INFOGRAD_OK = 0,
    INFOGRAD_ERR_INVALID = 1,    /* malformed or out-of-domain input */
    INFOGRAD_ERR_INFEASIBLE = 2, /* valid request too large to evaluate */
    INFOGRAD_ERR_NUMERICAL = 3,  /* non-finite intermediate value */
    INFOGRAD_ERR_IO = 4,         /* file could not be read or written */
    INFOGRAD_ERR_INTERNAL = 5
} infograd_status;

INFOGRAD_API const char* infograd_last_error(void);
INFOGRAD_API const char* infograd_version(void);
INFOGRAD_API const char* infograd_status_name(infograd_status status);

/* Worker cap for parallel sums; 0 restores the default. Results do not
 * depend on the cap. */
INFOGRAD_API void infograd_set_threads(size_t threads);
INFOGRAD_API size_t infograd_get_threads(void);

/* Strings returned through char** are owned by the caller. */
INFOGRAD_API void infograd_string_free(char* s);

/* ---- dense matrices (row-major) ---------------------------------------- */

typedef struct infograd_matrix infograd_matrix;

INFOGRAD_API infograd_status infograd_matrix_create(size_t rows,
                                                    size_t cols,
                                                    const double* data,
                                                    infograd_matrix** out);
INFOGRAD_API infograd_status infograd_matrix_load_csv(const char* path, infograd_matrix** out);
INFOGRAD_API infograd_status infograd_matrix_parse_csv(const char* text, infograd_matrix** out);
INFOGRAD_API infograd_status infograd_matrix_to_csv(const infograd_matrix* m, char** out);
INFOGRAD_API infograd_status infograd_matrix_save_csv(const infograd_matrix* m, const char* path);
INFOGRAD_API size_t infograd_matrix_rows(const infograd_matrix* m);
INFOGRAD_API size_t infograd_matrix_cols(const infograd_matrix* m);
INFOGRAD_API const double* infograd_matrix_data(const infograd_matrix* m);
INFOGRAD_API void infograd_matrix_free(infograd_matrix* m);

/* ---- input prior ------------------------------------------------------- */

typedef struct infograd_prior infograd_prior;

/* atoms is count x dim, row-major. */
INFOGRAD_API infograd_status infograd_prior_create(size_t count,
                                                   size_t dim,
                                                   const double* atoms,
                                                   const double* probs,
                                                   infograd_prior** out);
/* JSON file {"atoms": [[...], ...], "probs": [...]}. */
INFOGRAD_API infograd_status infograd_prior_load(const char* path, infograd_prior** out);
INFOGRAD_API size_t infograd_prior_size(const infograd_prior* p);
INFOGRAD_API size_t infograd_prior_dim(const infograd_prior* p);
INFOGRAD_API void infograd_prior_free(infograd_prior* p);

/* ---- channels ---------------------------------------------------------- */

typedef enum infograd_channel_kind
{
    INFOGRAD_CHANNEL_POISSON = 0,
    INFOGRAD_CHANNEL_GAUSSIAN = 1
} infograd_channel_kind;

typedef struct infograd_channel infograd_channel;

/* phi is m x n row-major; dark has m entries. */
INFOGRAD_API infograd_status infograd_channel_create_poisson(size_t m,
                                                             size_t n,
                                                             const double* phi,
                                                             const double* dark,
                                                             infograd_channel** out);
INFOGRAD_API infograd_status infograd_channel_create_gaussian(size_t m,
                                                              size_t n,
                                                              const double* phi,
                                                              infograd_channel** out);
/* JSON file {"type": "poisson"|"gaussian", "phi": <csv path|rows>, "dark": ...}. */
INFOGRAD_API infograd_status infograd_channel_load(const char* path, infograd_channel** out);
INFOGRAD_API infograd_channel_kind infograd_channel_kind_of(const infograd_channel* ch);
INFOGRAD_API void infograd_channel_free(infograd_channel* ch);

/* ---- mutual information ------------------------------------------------ */

typedef enum infograd_mi_method
{
    INFOGRAD_MI_ENUMERATION = 0, /* Poisson only */
    INFOGRAD_MI_QUADRATURE = 1,  /* Gaussian only, m <= 2 */
    INFOGRAD_MI_MONTE_CARLO = 2
} infograd_mi_method;

typedef struct infograd_mi_options
{
    infograd_mi_method method;
    double epsilon;   /* enumeration truncation mass */
    double max_cells; /* enumeration grid cap */
    uint64_t budget;  /* MC samples, or quadrature nodes per axis */
    uint64_t seed;
} infograd_mi_options;

typedef struct infograd_mi_result
{
    double value; /* nats */
    double error_bound;
    double truncation_mass_deficit;
    uint64_t budget;
    infograd_mi_method method;
} infograd_mi_result;

INFOGRAD_API void infograd_mi_options_default(infograd_mi_options* opts);
INFOGRAD_API infograd_status infograd_mi(const infograd_channel* ch,
                                         const infograd_prior* prior,
                                         const infograd_mi_options* opts,
                                         infograd_mi_result* out);

/* ---- gradients --------------------------------------------------------- */

typedef enum infograd_grad_method
{
    INFOGRAD_GRAD_THEOREM = 0,     /* exact enumeration (Poisson) or MMSE (Gaussian) */
    INFOGRAD_GRAD_FINITE_DIFF = 1, /* central differences of MI */
    INFOGRAD_GRAD_MONTE_CARLO = 2
} infograd_grad_method;

typedef enum infograd_grad_wrt
{
    INFOGRAD_WRT_PHI = 0,
    INFOGRAD_WRT_DARK = 1
} infograd_grad_wrt;

typedef struct infograd_grad_options
{
    infograd_grad_method method;
    infograd_grad_wrt wrt;
    double epsilon;
    double max_cells;
    uint64_t budget; /* MC samples */
    uint64_t seed;
    double fd_step;          /* <= 0 selects 1e-4 * max(1, |v|) */
    int fd_central_only;     /* nonzero: leaving the domain is an error */
    uint64_t quadrature_nodes;
} infograd_grad_options;

typedef struct infograd_gradient infograd_gradient;

INFOGRAD_API void infograd_grad_options_default(infograd_grad_options* opts);
INFOGRAD_API infograd_status infograd_grad(const infograd_channel* ch,
                                           const infograd_prior* prior,
                                           const infograd_grad_options* opts,
                                           infograd_gradient** out);
/* m x n gradient and per-entry error (bound or standard error). */
INFOGRAD_API infograd_status infograd_gradient_phi(const infograd_gradient* g,
                                                   infograd_matrix** value,
                                                   infograd_matrix** error);
/* m x 1; INFOGRAD_ERR_INVALID when the dark block was not computed. */
INFOGRAD_API infograd_status infograd_gradient_dark(const infograd_gradient* g,
                                                    infograd_matrix** value,
                                                    infograd_matrix** error);
INFOGRAD_API const char* infograd_gradient_method_name(const infograd_gradient* g);
INFOGRAD_API double infograd_gradient_deficit(const infograd_gradient* g);
INFOGRAD_API uint64_t infograd_gradient_budget(const infograd_gradient* g);
INFOGRAD_API void infograd_gradient_free(infograd_gradient* g);

/* ---- Bregman divergences ----------------------------------------------- */

/* Divergence D_F(x, y). Scalar catalog generators (squared_norm,
 * half_squared_norm, negative_entropy, unnormalized_entropy, exponential,
 * burg_entropy) give a 1 x 1 result and ignore ch. "poisson" and "gaussian"
 * take their parameters from ch and return the matrix-valued divergence in
 * the generator's native orientation. x and y are vectors (one row or one
 * column). */
INFOGRAD_API infograd_status infograd_bregman(const char* generator,
                                              const infograd_matrix* x,
                                              const infograd_matrix* y,
                                              const infograd_channel* ch,
                                              infograd_matrix** out);

/* ---- self-test --------------------------------------------------------- */

/* suite: "bregman", "gradients" or "all". Writes a JSON report to *json and
 * whether every assertion passed to *passed. */
INFOGRAD_API infograd_status infograd_verify(const char* suite, uint64_t seed, char** json, int* passed);

/* ---- projection design ------------------------------------------------- */

typedef struct infograd_design_problem infograd_design_problem;
typedef struct infograd_design_result infograd_design_result;

typedef struct infograd_design_options
{
    uint64_t max_iters;
    double tol;
    infograd_mi_method mi_method; /* enumeration or Monte Carlo */
    uint64_t budget;
    uint64_t seed;
    double epsilon;
    double max_cells;
} infograd_design_options;

typedef struct infograd_design_iteration
{
    uint64_t iteration;
    double mi;
    double grad_norm;
    double projected_grad_norm;
    double step;
    int accepted;
} infograd_design_iteration;

INFOGRAD_API void infograd_design_options_default(infograd_design_options* opts);
INFOGRAD_API infograd_status infograd_design_problem_load(const char* path, infograd_design_problem** out);
INFOGRAD_API void infograd_design_problem_free(infograd_design_problem* p);
INFOGRAD_API infograd_status infograd_design_run(const infograd_design_problem* p,
                                                 const infograd_design_options* opts,
                                                 infograd_design_result** out);
INFOGRAD_API size_t infograd_design_iterations(const infograd_design_result* r);
INFOGRAD_API infograd_status infograd_design_iteration_at(const infograd_design_result* r,
                                                          size_t index,
                                                          infograd_design_iteration* out);
INFOGRAD_API infograd_status infograd_design_phi(const infograd_design_result* r, infograd_matrix** out);
INFOGRAD_API double infograd_design_mi(const infograd_design_result* r);
INFOGRAD_API const char* infograd_design_stop_reason(const infograd_design_result* r);
INFOGRAD_API void infograd_design_result_free(infograd_design_result* r);

typedef struct infograd_rounding_result
{
    double relaxed_mi;
    double binary_mi;
    double gap; /* relaxed_mi - binary_mi */
} infograd_rounding_result;

/* Threshold phi at a level in (0, 1) and report the MI of both matrices. */
INFOGRAD_API infograd_status infograd_design_round(const infograd_design_problem* p,
                                                   const infograd_matrix* phi,
                                                   double threshold,
                                                   const infograd_design_options* opts,
                                                   infograd_matrix** binary,
                                                   infograd_rounding_result* out);

#ifdef __cplusplus
}
#endif

#endif /* INFOGRAD_INFOGRAD_H */
