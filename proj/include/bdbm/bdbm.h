/* BDBM public C API: bidirectional diffusion-bridge engine.
 *
 * All entry points return a bdbm_status; a non-OK status leaves a
 * human-readable message in bdbm_last_error() (thread-local).  Objects are
 * opaque handles released with the matching _free call.  Flat arrays are
 * length-d doubles unless stated otherwise.
 */
#ifndef BDBM_H
#define BDBM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bdbm_status {
  BDBM_OK = 0,
  BDBM_E_DOMAIN = 1,        /* mathematical precondition violated */
  BDBM_E_CONFIG = 2,        /* bad configuration / arguments */
  BDBM_E_NUMERIC = 3,       /* non-finite values or numeric blow-up */
  BDBM_E_IO = 4,            /* file system problem */
  BDBM_E_FORMAT = 5,        /* malformed checkpoint or data file */
  BDBM_E_VERIFY_FAILED = 6, /* a verification check did not pass */
  BDBM_E_UNKNOWN = 7
} bdbm_status;

/* Message describing the most recent failure on this thread ("" if none). */
const char* bdbm_last_error(void);
const char* bdbm_version(void);

/* ---- schedules -------------------------------------------------------- */

typedef struct bdbm_schedule bdbm_schedule;

/* steps = 0 selects continuous time; otherwise a uniform grid of `steps`
 * intervals on [0, T]. */
bdbm_status bdbm_schedule_brownian(double k, double T, uint32_t steps, bdbm_schedule** out);
/* knots: n_knots quadruples (t, alpha, beta, sigma2), t strictly increasing,
 * first knot at t = 0; the last knot defines T. */
bdbm_status bdbm_schedule_custom(const double* knots, size_t n_knots, uint32_t steps,
                                 bdbm_schedule** out);
void bdbm_schedule_free(bdbm_schedule* sched);

bdbm_status bdbm_schedule_eval(const bdbm_schedule* sched, double t, double* alpha, double* beta,
                               double* sigma2);
/* Writes a newline-separated violation report into buf (truncated to buflen,
 * always NUL-terminated); *n_violations gets the violation count. */
bdbm_status bdbm_schedule_validate(const bdbm_schedule* sched, char* buf, size_t buflen,
                                   size_t* n_violations);

/* variant: 0 = deterministic (delta = 0), 1 = beta-ratio, 2 = alpha-ratio.
 * eta in [0,1] scales the variance. */
bdbm_status bdbm_delta2(const bdbm_schedule* sched, int variant, double eta, double t, double s,
                        double* out);

/* ---- analytic kernels on flat arrays ---------------------------------- */

bdbm_status bdbm_marginal(const bdbm_schedule* sched, double t, const double* x0,
                          const double* xT, size_t d, double* mean_out, double* var_out);
bdbm_status bdbm_forward_transition(const bdbm_schedule* sched, int variant, double eta, double t,
                                    double s, const double* x_t, const double* x0,
                                    const double* xT, size_t d, double* mean_out, double* var_out);
bdbm_status bdbm_backward_transition(const bdbm_schedule* sched, int variant, double eta, double t,
                                     double s, const double* x_s, const double* x0,
                                     const double* xT, size_t d, double* mean_out,
                                     double* var_out);

/* ---- trained models ---------------------------------------------------- */

typedef struct bdbm_model bdbm_model;

bdbm_status bdbm_model_load(const char* path, bdbm_model** out);
void bdbm_model_free(bdbm_model* model);
bdbm_status bdbm_model_dim(const bdbm_model* model, uint32_t* d);
bdbm_status bdbm_model_output_dim(const bdbm_model* model, uint32_t* out_dim);

/* Query the masked network: m = 0 conditions on x0 (known = x0), m = 1 on xT.
 * out must hold output_dim doubles. */
bdbm_status bdbm_model_predict(const bdbm_model* model, double t, const double* x_t,
                               const double* known, int m, double* out);

/* Ancestral sampling through the model's own schedule and variance policy.
 * direction: 0 = forward (source is x0), 1 = backward (source is xT).
 * eta in [0,1]; eta = 0 is deterministic.  dest must hold d doubles. */
bdbm_status bdbm_model_sample(const bdbm_model* model, int direction, uint32_t nfe, double eta,
                              uint64_t seed, const double* source, double* dest);

/* ---- files ------------------------------------------------------------- */

/* 64-bit FNV-1a digest over the file bytes (the provenance hash printed in
 * output headers). */
bdbm_status bdbm_file_digest(const char* path, uint64_t* out);

/* ---- command-level entry points (the CLI is a thin shell over these) ---- */

bdbm_status bdbm_cmd_train(const char* config_path, const char* out_path);
bdbm_status bdbm_cmd_sample(const char* ckpt_path, const char* direction, uint32_t nfe, double eta,
                            uint64_t seed, const char* in_csv, const char* out_csv);
/* suite: kernels | doob | tweedie | grad | all.
 * mutation: NULL/"none", or one of backward-variance, drop-mask, delta-variant
 * (deliberate-defect modes used to prove the suite catches real bugs).
 * Returns BDBM_E_VERIFY_FAILED when any check fails. */
bdbm_status bdbm_cmd_verify(const char* suite, uint64_t seed, const char* mutation);
/* metrics_csv: comma-separated subset of energy,mse,diversity. */
bdbm_status bdbm_cmd_eval(const char* ckpt_path, const char* coupling_config,
                          const char* metrics_csv, const char* out_csv);
bdbm_status bdbm_cmd_plot(const char* in_csv, const char* out_svg);

#ifdef __cplusplus
}
#endif

#endif /* BDBM_H */
