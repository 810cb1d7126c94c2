#ifndef MODSIGMA_H
#define MODSIGMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

#define MS_OK 0

#define MS_ERR_NULL_POINTER 1

#define MS_ERR_DEGENERATE_BASIS 2

#define MS_ERR_CONVERGENCE 3

#define MS_ERR_NOT_UNIMODULAR 4

#define MS_ERR_POLE 5

#define MS_ERR_NOT_COMMENSURATE 6

#define MS_ERR_INCOMPLETE_CENSUS 7

#define MS_ERR_ON_CONTOUR 8

#define MS_ERR_COUNT_MISMATCH 9

#define MS_ERR_PARTICLE_COUNT 10

#define MS_ERR_NEAR_ZERO 11

#define MS_ERR_SINGULAR_BASIS 12

#define MS_ERR_CONSTRAINT 13

#define MS_ERR_INVALID_ARGUMENT 14

#define MS_ERR_BUFFER_TOO_SMALL 15

#define MS_ERR_PANIC 16

#define MS_FN_SIGMA 0

#define MS_FN_SIGMA_ORIG 1

#define MS_FN_ZETA 2

#define MS_FN_ZETA_ORIG 3

#define MS_FN_WP 4

#define MS_FN_WP_ORIG 5

#define MS_FN_SIGMA1 6

#define MS_FN_SIGMA2 7

#define MS_FN_SIGMA3 8

#define MS_FN_COMPLETION 9

#define MS_FN_ZFUN 10

typedef struct MsEvaluator MsEvaluator;

typedef struct MsLattice MsLattice;

typedef struct MsWavefunction MsWavefunction;

typedef struct MsComplex {
  double re;
  double im;
} MsComplex;

// `exp(log_abs + i·phase)`; `log_abs = -inf` encodes zero.
typedef struct MsLogComplex {
  double log_abs;
  double phase;
} MsLogComplex;

typedef struct MsZero {
  struct MsComplex position;
  // +1 holomorphic, −1 antiholomorphic (or the merged index).
  int64_t winding;
  double residual_norm;
  uint32_t multiplicity;
} MsZero;

// Message for the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *ms_last_error_message(void);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
int32_t ms_lattice_new(struct MsComplex omega1, struct MsComplex omega2, struct MsLattice **out);

// # Safety
// `lattice` must be null or a handle from `ms_lattice_new` not yet freed.
void ms_lattice_free(struct MsLattice *lattice);

// Area and the invariants γ₂, γ₄, γ₆. Any out-pointer may be null.
//
// # Safety
// `lattice` must be a live handle; non-null out-pointers must be writable.
int32_t ms_lattice_invariants(const struct MsLattice *lattice,
                              double *area,
                              struct MsComplex *gamma2,
                              struct MsComplex *gamma4,
                              struct MsComplex *gamma6);

// Splits `z = z_red + 2mω₁ + 2nω₂` with `z_red` in the Voronoi cell.
//
// # Safety
// `lattice` must be a live handle; out-pointers must be writable.
int32_t ms_lattice_reduce_point(const struct MsLattice *lattice,
                                struct MsComplex z,
                                struct MsComplex *z_red,
                                int64_t *m,
                                int64_t *n);

// # Safety
// `lattice` must be a live handle and `out` writable. The evaluator keeps
// its own copy of the lattice.
int32_t ms_evaluator_new(const struct MsLattice *lattice, struct MsEvaluator **out);

// # Safety
// `ev` must be null or a handle from `ms_evaluator_new` not yet freed.
void ms_evaluator_free(struct MsEvaluator *ev);

// Evaluates the `MS_FN_*` function at `z`.
//
// # Safety
// `ev` must be a live handle and `out` writable.
int32_t ms_eval(const struct MsEvaluator *ev,
                uint32_t function,
                struct MsComplex z,
                struct MsComplex *out);

// As `ms_eval` but in log-split form, which never overflows.
//
// # Safety
// `ev` must be a live handle and `out` writable.
int32_t ms_eval_log(const struct MsEvaluator *ev,
                    uint32_t function,
                    struct MsComplex z,
                    struct MsLogComplex *out);

// Zeros of the periodic completion in one cell. `count` receives the
// number found; if it exceeds `capacity`, nothing is written to `zeros`
// and `MS_ERR_BUFFER_TOO_SMALL` is returned.
//
// # Safety
// `ev` must be a live handle, `zeros` must hold `capacity` elements (or be
// null with `capacity = 0`), and `count` must be writable.
int32_t ms_find_zeros(const struct MsEvaluator *ev,
                      uint32_t grid_n,
                      struct MsZero *zeros,
                      uintptr_t capacity,
                      uintptr_t *count);

// Builds a wavefunction with `n_zeros` prescribed zeros and N_Φ = `n_phi`;
// K is derived from the zeros.
//
// # Safety
// `lattice` must be a live handle, `zeros` must point to `n_zeros`
// elements, and `out` must be writable.
int32_t ms_wavefunction_new(const struct MsLattice *lattice,
                            uintptr_t n_phi,
                            const struct MsComplex *zeros,
                            uintptr_t n_zeros,
                            struct MsWavefunction **out);

// Parses a spec from its JSON form `{lattice, nPhi, zeros, K}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
int32_t ms_wavefunction_from_json(const char *json, struct MsWavefunction **out);

// # Safety
// `spec` must be null or a handle not yet freed.
void ms_wavefunction_free(struct MsWavefunction *spec);

// Boundary parameter K.
//
// # Safety
// `spec` must be a live handle and `out` writable.
int32_t ms_wavefunction_k(const struct MsWavefunction *spec, struct MsComplex *out);

// ψ(z, z*) in log-split form.
//
// # Safety
// `spec` must be a live handle and `out` writable.
int32_t ms_wavefunction_psi_log(const struct MsWavefunction *spec,
                                struct MsComplex z,
                                struct MsLogComplex *out);

// |measured/predicted − 1| for the translation by 2mω₁ + 2nω₂.
//
// # Safety
// `spec` must be a live handle and `out` writable.
int32_t ms_wavefunction_boundary_residual(const struct MsWavefunction *spec,
                                          struct MsComplex z,
                                          int64_t m,
                                          int64_t n,
                                          double *out);

#endif /* MODSIGMA_H */
