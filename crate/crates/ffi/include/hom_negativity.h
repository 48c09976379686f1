#ifndef HOM_NEGATIVITY_H
#define HOM_NEGATIVITY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HomStatus {
  HOM_STATUS_OK = 0,
  HOM_STATUS_INVALID_STATE = 1,
  HOM_STATUS_INVALID_PARAMETER = 2,
  HOM_STATUS_INVALID_PAIRING = 3,
  HOM_STATUS_AMBIGUOUS_ROOTS = 4,
  HOM_STATUS_INVALID_Z = 5,
  HOM_STATUS_UNKNOWN_CONFIGURATION = 6,
  HOM_STATUS_MISSING_OBSERVABLE = 7,
  HOM_STATUS_IO = 8,
  HOM_STATUS_PARSE = 9,
  HOM_STATUS_NULL_POINTER = 10,
  HOM_STATUS_PANIC = 11,
} HomStatus;

typedef enum HomBell {
  HOM_BELL_PSI_PLUS = 0,
  HOM_BELL_PSI_MINUS = 1,
  HOM_BELL_PHI_PLUS = 2,
  HOM_BELL_PHI_MINUS = 3,
} HomBell;

typedef enum HomInvariantPath {
  HOM_INVARIANT_PATH_DECOMPOSITION = 0,
  HOM_INVARIANT_PATH_MULTICOPY = 1,
} HomInvariantPath;

/**
 * Opaque validated two-qubit density matrix.
 */
typedef struct HomState HomState;

/**
 * Summary of one sampled pipeline run.
 */
typedef struct HomSimulation {
  double negativity;
  double negativity_std;
  double det_pt;
  double det_pt_std;
  bool entangled;
  bool ambiguous;
} HomSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a state from 32 doubles; the matrix must be Hermitian, unit-trace
 * and positive semidefinite.
 *
 * # Safety
 * `entries` must point to 32 readable doubles; `out` must be writable.
 */
enum HomStatus hom_state_from_matrix(const double *entries, struct HomState **out);

/**
 * Parses the JSON state-file format `{"matrix": [[[re, im], ...], ...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum HomStatus hom_state_from_json(const char *json, struct HomState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum HomStatus hom_state_bell(enum HomBell kind, struct HomState **out);

/**
 * `p |Psi-><Psi-| + (1 - p) I/4`, `p` in `[0, 1]`.
 *
 * # Safety
 * `out` must be writable.
 */
enum HomStatus hom_state_werner(double p, struct HomState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum HomStatus hom_state_random_pure(uint64_t seed, struct HomState **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum HomStatus hom_state_random_mixed(uint64_t seed, struct HomState **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `state` must come from a `hom_state_*` constructor and not be used again.
 */
void hom_state_free(struct HomState *state);

/**
 * # Safety
 * `state` must be a live handle; `out` must hold 32 doubles.
 */
enum HomStatus hom_state_matrix(const struct HomState *state, double *out);

/**
 * The 13 canonical observables in field order
 * `g12 g13 g14 g24 g13_24 g13_46 g14_23 g14_36 g14_36_52 g13_46_57
 * g24_35_68 g13_46_57_28 g14_36_58`.
 *
 * # Safety
 * `state` must be a live handle; `out` must hold 13 doubles.
 */
enum HomStatus hom_g_table(const struct HomState *state, double *out);

/**
 * Expectation of the product of singlet projectors on `n_pairs` qubit pairs
 * (1-based, `2 * n_pairs` entries) over `n_copies` copies.
 *
 * # Safety
 * `state` must be a live handle; `pairs` must hold `2 * n_pairs` values.
 */
enum HomStatus hom_g(const struct HomState *state,
                     size_t n_copies,
                     const uint32_t *pairs,
                     size_t n_pairs,
                     double *out);

/**
 * Invariants `i1 i2 i3 i4 i5 i7 i8 i12 i14`.
 *
 * # Safety
 * `state` must be a live handle; `out` must hold 9 doubles.
 */
enum HomStatus hom_invariants(const struct HomState *state,
                              enum HomInvariantPath path,
                              double *out);

/**
 * Negativity from the quartic on the multicopy table.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum HomStatus hom_negativity(const struct HomState *state, double *out);

/**
 * Negativity from the eigenvalues of the partial transpose.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum HomStatus hom_negativity_oracle(const struct HomState *state, double *out);

/**
 * `det` of the partial transpose from the eight witness observables, and
 * whether it certifies entanglement.
 *
 * # Safety
 * `state` must be a live handle; both outputs must be writable.
 */
enum HomStatus hom_witness(const struct HomState *state, double *det_pt, bool *entangled);

/**
 * Exact probabilities of the 16 outcomes of configuration `'a'..'d'`;
 * bit `k` of the index is set when detector `k + 1` saw anti-coalescence.
 *
 * # Safety
 * `state` must be a live handle; `out` must hold 16 doubles.
 */
enum HomStatus hom_outcome_distribution(const struct HomState *state, char config, double *out);

/**
 * Seeded counts of `z` events in one configuration.
 *
 * # Safety
 * `state` must be a live handle; `out` must hold 16 integers.
 */
enum HomStatus hom_sample_counts(const struct HomState *state,
                                 char config,
                                 uint64_t z,
                                 uint64_t seed,
                                 uint64_t *out);

/**
 * Full sampled pipeline: four configurations with `z` events each and
 * `bootstrap` resamples.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum HomStatus hom_simulate(const struct HomState *state,
                            uint64_t z,
                            uint64_t seed,
                            uint32_t bootstrap,
                            struct HomSimulation *out);

/**
 * Message for the last failure on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *hom_last_error_message(void);

const char *hom_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOM_NEGATIVITY_H */
