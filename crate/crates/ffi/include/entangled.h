#ifndef ENTANGLED_H
#define ENTANGLED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntStatus {
  ENT_STATUS_OK = 0,
  ENT_STATUS_NULL_POINTER = 1,
  ENT_STATUS_INVALID_ARGUMENT = 2,
  ENT_STATUS_INVALID_STATE = 3,
  ENT_STATUS_DIMENSION_MISMATCH = 4,
  ENT_STATUS_ZERO_OVERLAP = 5,
  ENT_STATUS_MALFORMED_DOCUMENT = 6,
  ENT_STATUS_NUMERICAL = 7,
  ENT_STATUS_BUFFER_TOO_SMALL = 8,
  ENT_STATUS_IO = 9,
  ENT_STATUS_PANIC = 10,
} EntStatus;

typedef enum EntBasis {
  // Schmidt bases for two-qubit pure states, reduced-state eigenbases otherwise.
  ENT_BASIS_SCHMIDT = 0,
  ENT_BASIS_Z = 1,
} EntBasis;

// Opaque state handle.
typedef struct EntState EntState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL.
const char *ent_last_error(void);

// `singlet`, `triplet_m0` or `ghz:N`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum EntStatus ent_state_named(const char *name, struct EntState **out);

// `C₁|1⟩|2⟩ + C₂|2⟩|1⟩` with `|C₁|² + |C₂|² = 1`.
//
// # Safety
// `out` must be a valid pointer.
enum EntStatus ent_state_single_excitation(double c1_re,
                                           double c1_im,
                                           double c2_re,
                                           double c2_im,
                                           struct EntState **out);

// Pure state from `len` interleaved `(re, im)` pairs; `len` must be `2^n`.
//
// # Safety
// `re_im` must point to `2 * len` doubles and `out` must be valid.
enum EntStatus ent_state_from_amplitudes(const double *re_im, size_t len, struct EntState **out);

// Parses a JSON state document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum EntStatus ent_state_from_document(const char *json, struct EntState **out);

// Serializes to a JSON state document; release it with `ent_string_free`.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum EntStatus ent_state_to_document(const struct EntState *state, char **out);

// # Safety
// `s` must come from this library or be NULL.
void ent_string_free(char *s);

// # Safety
// `state` must come from this library or be NULL; it is invalid afterwards.
void ent_state_free(struct EntState *state);

// Qubit count, or 0 for NULL.
//
// # Safety
// `state` must be a live handle or NULL.
size_t ent_state_n_qubits(const struct EntState *state);

// All `4^n` coefficients `Tr(ρ P_w)`, word index base 4 with qubit a most
// significant (entry 0 is the identity coefficient, always 1).
//
// # Safety
// `out` must hold `capacity` doubles; `written` may be NULL.
enum EntStatus ent_hs_decompose(const struct EntState *state,
                                double *out,
                                size_t capacity,
                                size_t *written);

// `Σ_k S(ρ_k) − S(ρ)` with each qubit a party, in nats.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum EntStatus ent_quantum_index(const struct EntState *state, double *out);

// Shannon mutual information of per-qubit outcomes; nats unless `bits` is nonzero.
//
// # Safety
// `state` must be a live handle and `out` a valid pointer.
enum EntStatus ent_shannon_index(const struct EntState *state,
                                 enum EntBasis basis,
                                 int bits,
                                 double *out);

// Schmidt coefficients (descending) across a split such as `"a|bc"`.
//
// # Safety
// `split` must be NUL-terminated; `out` must hold `capacity` doubles.
enum EntStatus ent_schmidt_coefficients(const struct EntState *state,
                                        const char *split,
                                        double *out,
                                        size_t capacity,
                                        size_t *written);

// Linear-inversion reconstruction from a JSON dataset document. With
// `repair` nonzero, negative eigenvalues are clipped and the trace restored.
// `pure_defect` and `min_eigenvalue` may be NULL.
//
// # Safety
// `dataset_json` must be NUL-terminated and `out` valid.
enum EntStatus ent_tomography_reconstruct(const char *dataset_json,
                                          int repair,
                                          struct EntState **out,
                                          double *pure_defect,
                                          double *min_eigenvalue);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTANGLED_H */
