#ifndef PHYSGUIDE_H
#define PHYSGUIDE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Values 0 to 9 match the library's error codes.
enum PgStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  PG_STATUS_OK = 0,
  PG_STATUS_DOMAIN = 1,
  PG_STATUS_SAMPLING = 2,
  PG_STATUS_CONTRACT = 3,
  PG_STATUS_ALIGNMENT = 4,
  PG_STATUS_PARSE = 5,
  PG_STATUS_CONFIG = 6,
  PG_STATUS_NUMERICAL = 7,
  PG_STATUS_IO = 8,
  PG_STATUS_SERIALIZATION = 9,
  PG_STATUS_NULL_POINTER = 10,
  // An argument is out of range or a buffer is too small.
  PG_STATUS_INVALID_ARGUMENT = 11,
  PG_STATUS_PANIC = 12,
};
#ifndef __cplusplus
typedef int32_t PgStatus;
#endif // __cplusplus

// Opaque Bayesian optimizer over `(alpha, beta)`.
typedef struct PgOptimizer PgOptimizer;

// Opaque residue-frame structure.
typedef struct PgStructure PgStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *pg_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *pg_version(void);

// # Safety
// `s` must come from this library and not have been freed.
void pg_string_free(char *s);

// The built-in 30-residue toy complex.
//
// # Safety
// `out` must be a valid pointer.
PgStatus pg_structure_toy(struct PgStructure **out);

// Parses the native JSON structure format.
//
// # Safety
// `json` must be NUL-terminated; `out` must be a valid pointer.
PgStatus pg_structure_from_json(const char *json, struct PgStructure **out);

// Loads a `.json` structure file. PDB input needs region labels and is
// only available through the CLI config.
//
// # Safety
// `path` must be NUL-terminated; `out` must be a valid pointer.
PgStatus pg_structure_load(const char *path, struct PgStructure **out);

// Serializes to the native JSON format; free the result with [`pg_string_free`].
//
// # Safety
// `s` must be a live handle; `out` must be a valid pointer.
PgStatus pg_structure_to_json(const struct PgStructure *s, char **out);

// # Safety
// `s` must come from this library and not have been freed.
void pg_structure_free(struct PgStructure *s);

// Number of residues.
//
// # Safety
// `s` must be a live handle; `out` must be a valid pointer.
PgStatus pg_structure_len(const struct PgStructure *s, size_t *out);

// Residue positions as `x0 y0 z0 x1 ...`; `len` must be at least `3·n`.
//
// # Safety
// `s` must be a live handle; `xyz` must hold `len` doubles.
PgStatus pg_structure_positions(const struct PgStructure *s, double *xyz, size_t len);

// Loss and per-residue gradient of one expert (0 clash, 1 recognition,
// 2 contact, 3 interface) under default settings. `grad` may be null when
// `grad_len` is 0; otherwise it must hold `3·n` doubles.
//
// # Safety
// `s` must be a live handle; pointers must be valid for their lengths.
PgStatus pg_expert_loss_grad(const struct PgStructure *s,
                             uint32_t expert_id,
                             double *loss,
                             double *grad,
                             size_t grad_len);

// Default-configuration severities of a structure, in expert order.
//
// # Safety
// `s` must be a live handle; `severities` must hold 4 doubles.
PgStatus pg_severities(const struct PgStructure *s, double *severities);

// Severity-proportional weights over experts above `theta_min`.
//
// # Safety
// `severities` must hold 4 doubles and `weights` room for 4.
PgStatus pg_route_weights(const double *severities, double theta_min, double *weights);

// Beta temporal factor at generation step `t` of `total`.
//
// # Safety
// `out` must be a valid pointer.
PgStatus pg_temporal_factor(size_t t,
                            size_t total,
                            double alpha,
                            double beta,
                            double lambda_peak,
                            double *out);

// Evaluated timesteps from `total` down to 0. `mode` is 0 (full),
// 1 (uniform, interval `interval`) or 2 (adaptive). `steps_len` receives
// the count; when `cap` is too small nothing is written and the call
// fails with `InvalidArgument`.
//
// # Safety
// `steps` must hold `cap` entries (may be null when `cap` is 0);
// `steps_len` must be a valid pointer.
PgStatus pg_skip_schedule(size_t total,
                          uint32_t mode,
                          size_t interval,
                          size_t *steps,
                          size_t cap,
                          size_t *steps_len);

// CDR RMSD after superposing framework residues.
//
// # Safety
// Both handles must be live; `out` must be a valid pointer.
PgStatus pg_cdr_rmsd(const struct PgStructure *candidate,
                     const struct PgStructure *reference,
                     double *out);

// Number of clashing residue pairs closer than `r_clash`.
//
// # Safety
// `s` must be a live handle; `out` must be a valid pointer.
PgStatus pg_clash_count(const struct PgStructure *s, double r_clash, size_t *out);

// `Σ weights[i]·metrics[i]/normalizers[i]`.
//
// # Safety
// The three arrays must each hold `n` doubles; `out` must be valid.
PgStatus pg_composite_loss(const double *values,
                           const double *weights,
                           const double *normalizers,
                           size_t n,
                           double *out);

// Samples one design around `reference` with the analytic denoiser and
// default guidance at shape `(alpha, beta)`. `skip_interval` 1 runs every
// step of the 50-step schedule.
//
// # Safety
// `reference` must be a live handle; `out` must be a valid pointer.
PgStatus pg_sample(const struct PgStructure *reference,
                   double alpha,
                   double beta,
                   size_t skip_interval,
                   uint64_t seed,
                   struct PgStructure **out);

// New optimizer. `config_json` may be null for defaults; otherwise it is a
// JSON object with the optimizer settings.
//
// # Safety
// `config_json` must be null or NUL-terminated; `out` must be valid.
PgStatus pg_optimizer_new(const char *config_json, struct PgOptimizer **out);

// # Safety
// `opt` must come from this library and not have been freed.
void pg_optimizer_free(struct PgOptimizer *opt);

// Records the loss observed at `(alpha, beta)`.
//
// # Safety
// `opt` must be a live handle.
PgStatus pg_optimizer_observe(struct PgOptimizer *opt, double alpha, double beta, double loss);

// Next `(alpha, beta)` to evaluate and its expected improvement. The same
// history and seed give the same proposal.
//
// # Safety
// `opt` must be a live handle; `theta` must hold 2 doubles; `ei` may be null.
PgStatus pg_optimizer_propose(const struct PgOptimizer *opt,
                              uint64_t seed,
                              double *theta,
                              double *ei);

// Observed point with the lowest posterior mean. Fails with `Contract`
// before the first observation.
//
// # Safety
// `opt` must be a live handle; `theta` must hold 2 doubles.
PgStatus pg_optimizer_incumbent(const struct PgOptimizer *opt, double *theta);

// Number of observations recorded so far.
//
// # Safety
// `opt` must be a live handle; `out` must be a valid pointer.
PgStatus pg_optimizer_len(const struct PgOptimizer *opt, size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHYSGUIDE_H */
