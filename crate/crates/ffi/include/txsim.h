#ifndef TXSIM_H
#define TXSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum TxStatus {
  TX_STATUS_OK = 0,
  TX_STATUS_NULL_POINTER = 1,
  TX_STATUS_INVALID_UTF8 = 2,
  TX_STATUS_JSON_PARSE = 3,
  TX_STATUS_SCHEMA = 4,
  TX_STATUS_NOT_NORMALIZED = 5,
  TX_STATUS_INVALID_SCENARIO = 6,
  TX_STATUS_INVALID_ARGUMENT = 7,
  TX_STATUS_DIMENSION_MISMATCH = 8,
  TX_STATUS_TRUNCATION = 9,
  TX_STATUS_EMPTY_MODE = 10,
  TX_STATUS_QUADRATURE = 11,
  TX_STATUS_OUT_OF_RANGE = 12,
  TX_STATUS_INTERNAL = 99,
} TxStatus;

/**
 * Opaque scenario handle.
 */
typedef struct TxScenario TxScenario;

/**
 * Opaque Monte Carlo result handle.
 */
typedef struct TxTrialStats TxTrialStats;

typedef struct TxTrialSummary {
  uint64_t trials;
  uint64_t no_event_count;
  uint64_t responder_total;
  double chi_square;
  size_t chi_square_dof;
  uint64_t seed_used;
} TxTrialSummary;

typedef struct TxComplex {
  double re;
  double im;
} TxComplex;

typedef struct TxGoldenRule {
  double t;
  double integral;
  double expected;
  double rel_err;
  double error_estimate;
} TxGoldenRule;

typedef struct TxPhotonStats {
  double mean;
  double variance;
} TxPhotonStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *tx_version(void);

/**
 * Message for the last failure on this thread; empty after a success.
 * Valid until the next call into the library on the same thread.
 */
const char *tx_last_error_message(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void tx_string_free(char *s);

/**
 * Parses a scenario JSON document (NUL-terminated UTF-8).
 *
 * # Safety
 * `json` must be null or a valid NUL-terminated string; `out` must be
 * null or valid for writes.
 */
enum TxStatus tx_scenario_from_json(const char *json, struct TxScenario **out);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle from `tx_scenario_from_json` not yet freed.
 */
void tx_scenario_free(struct TxScenario *s);

/**
 * Canonical JSON echo of the scenario; free with `tx_string_free`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_scenario_to_json(const struct TxScenario *s, char **out);

/**
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_scenario_absorber_count(const struct TxScenario *s, size_t *out);

/**
 * Born weight |⟨kᵢ|Ψ⟩|² of absorber `index`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_scenario_born_weight(const struct TxScenario *s, size_t index, double *out);

/**
 * Overrides the trial count and master seed.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
enum TxStatus tx_scenario_set_trials(struct TxScenario *s, uint64_t trials, uint64_t seed);

/**
 * Runs every trial. `threads == 0` uses the default pool. The result does
 * not depend on `threads`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_run_trials(const struct TxScenario *s, size_t threads, struct TxTrialStats **out);

/**
 * Releases trial statistics. Null is ignored.
 *
 * # Safety
 * `s` must be null or a handle from `tx_run_trials` not yet freed.
 */
void tx_trial_stats_free(struct TxTrialStats *s);

/**
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_trial_stats_summary(const struct TxTrialStats *s, struct TxTrialSummary *out);

/**
 * Number of trials actualized at absorber `index`.
 *
 * # Safety
 * `s` must be null or a live handle; `out` must be null or valid for writes.
 */
enum TxStatus tx_trial_stats_count(const struct TxTrialStats *s, size_t index, uint64_t *out);

/**
 * D_F = 1/(k² + iε), k² = k0² − |k|².
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_d_feynman(double k0, double k_abs, double epsilon, struct TxComplex *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_d_retarded(double k0, double k_abs, double epsilon, struct TxComplex *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_d_advanced(double k0, double k_abs, double epsilon, struct TxComplex *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_d_timesym(double k0, double k_abs, double epsilon, struct TxComplex *out);

/**
 * First-order emission time kernel.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_emission_kernel(double delta_omega,
                                 double omega_k,
                                 double t,
                                 struct TxComplex *out);

/**
 * First-order absorption time kernel, the conjugate of the emission kernel.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_absorption_kernel(double delta_omega,
                                   double omega_k,
                                   double t,
                                   struct TxComplex *out);

/**
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_joint_amplitude(struct TxComplex m_emit,
                                 double delta_omega,
                                 double omega_k,
                                 double t,
                                 double *out);

/**
 * ∫|kernel(δ, t)|² dδ against 2πt.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_golden_rule(double t, struct TxGoldenRule *out);

/**
 * Photon-number mean and variance of the coherent state |α⟩ truncated at
 * `n_max`. Fails with `Truncation` when |α|² > n_max/4.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum TxStatus tx_coherent_stats(struct TxComplex alpha, size_t n_max, struct TxPhotonStats *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TXSIM_H */
