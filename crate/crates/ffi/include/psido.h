#ifndef PSIDO_H
#define PSIDO_H

/* Generated by cbindgen from the psido-ffi crate. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by fallible entry points. Mirrors the CLI exit
// codes where applicable.
typedef enum PsidoStatus {
  PSIDO_STATUS_OK = 0,
  PSIDO_STATUS_INVALID_ARGUMENT = 1,
  PSIDO_STATUS_CONFIG_ERROR = 2,
  PSIDO_STATUS_ACCURACY_ERROR = 3,
  PSIDO_STATUS_IO_ERROR = 4,
  PSIDO_STATUS_PANIC = 5,
} PsidoStatus;

typedef struct PsidoField PsidoField;

typedef struct PsidoPotential PsidoPotential;

typedef struct PsidoState PsidoState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy the current thread's last error message into `buf` (NUL
// terminated, truncated to `cap`). Returns the full message length in
// bytes, excluding the terminator.
//
// # Safety
// `buf` must point to `cap` writable bytes, or be null (query mode).
uintptr_t psido_last_error_message(char *buf,
                                   uintptr_t cap);

// `V(x) = exp(-x^2/2)`. Never fails.
struct PsidoPotential *psido_potential_gauss_barrier(void);

// `V(x) = a (x^2 - b^2)^2`, requires `a > 0`.
//
// # Safety
// `out` must be a valid pointer.
enum PsidoStatus psido_potential_double_well(double a,
                                             double b,
                                             struct PsidoPotential **out);

// Built-in tabulated double-barrier surrogate on `[x_lo, x_hi]`.
//
// # Safety
// `out` must be a valid pointer.
enum PsidoStatus psido_potential_rtd_surrogate(uintptr_t n_samples,
                                               double x_lo,
                                               double x_hi,
                                               struct PsidoPotential **out);

// Load a two-column `x V` text file (`#` comments).
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum PsidoStatus psido_potential_from_file(const char *path,
                                           struct PsidoPotential **out);

// # Safety
// `p` must come from a psido constructor and not be freed twice.
void psido_potential_free(struct PsidoPotential *p);

// # Safety
// `p` and `out` must be valid pointers.
enum PsidoStatus psido_potential_value(const struct PsidoPotential *p,
                                       double x,
                                       double *out);

// `D_V(x,y) = V(x+y/2) - V(x-y/2)`.
//
// # Safety
// `p` and `out` must be valid pointers.
enum PsidoStatus psido_potential_dv(const struct PsidoPotential *p,
                                    double x,
                                    double y,
                                    double *out);

// The benchmark Gauss wave packet. Never fails.
struct PsidoState *psido_state_gauss_packet(void);

// Load a sampled state (`nx nk x_lo x_hi k_lo k_hi` header, row-major
// values).
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid.
enum PsidoStatus psido_state_from_file(const char *path,
                                       struct PsidoState **out);

// # Safety
// `s` must come from a psido constructor and not be freed twice.
void psido_state_free(struct PsidoState *s);

// # Safety
// `s` and `out` must be valid pointers.
enum PsidoStatus psido_state_eval(const struct PsidoState *s,
                                  double x,
                                  double k,
                                  double *out);

// `d^order f / dk^order`.
//
// # Safety
// `s` and `out` must be valid pointers.
enum PsidoStatus psido_state_k_derivative(const struct PsidoState *s,
                                          double x,
                                          double k,
                                          uintptr_t order,
                                          double *out);

// y-window truncation on an `nx` by `nk` grid. `quad_order = 0` selects
// the default order-32 rule; panels adapt to the integrand.
//
// # Safety
// Handles must be valid; `out` must be a valid pointer.
enum PsidoStatus psido_compute_y(const struct PsidoState *s,
                                 const struct PsidoPotential *p,
                                 double x_lo,
                                 double x_hi,
                                 double k_lo,
                                 double k_hi,
                                 uintptr_t nx,
                                 uintptr_t nk,
                                 double l_y,
                                 uintptr_t n_mu,
                                 uintptr_t quad_order,
                                 double hbar,
                                 struct PsidoField **out);

// Convolution-kernel truncation.
//
// # Safety
// Handles must be valid; `out` must be a valid pointer.
enum PsidoStatus psido_compute_k(const struct PsidoState *s,
                                 const struct PsidoPotential *p,
                                 double x_lo,
                                 double x_hi,
                                 double k_lo,
                                 double k_hi,
                                 uintptr_t nx,
                                 uintptr_t nk,
                                 double l_k,
                                 uintptr_t n_xi,
                                 uintptr_t quad_order,
                                 double hbar,
                                 struct PsidoField **out);

// Moyal-series truncation at order `p_order`.
//
// # Safety
// Handles must be valid; `out` must be a valid pointer.
enum PsidoStatus psido_compute_m(const struct PsidoState *s,
                                 const struct PsidoPotential *p,
                                 double x_lo,
                                 double x_hi,
                                 double k_lo,
                                 double k_hi,
                                 uintptr_t nx,
                                 uintptr_t nk,
                                 uintptr_t p_order,
                                 double hbar,
                                 struct PsidoField **out);

// Force-spectrum truncation; the spectrum is taken over the evaluation
// x-domain.
//
// # Safety
// Handles must be valid; `out` must be a valid pointer.
enum PsidoStatus psido_compute_f(const struct PsidoState *s,
                                 const struct PsidoPotential *p,
                                 double x_lo,
                                 double x_hi,
                                 double k_lo,
                                 double k_hi,
                                 uintptr_t nx,
                                 uintptr_t nk,
                                 uintptr_t n_nu,
                                 uintptr_t quad_order,
                                 double hbar,
                                 struct PsidoField **out);

// # Safety
// `f` must come from a psido constructor and not be freed twice.
void psido_field_free(struct PsidoField *f);

// # Safety
// All pointers must be valid.
enum PsidoStatus psido_field_dims(const struct PsidoField *f,
                                  uintptr_t *out_nx,
                                  uintptr_t *out_nk);

// Max |Im| over the grid; negative on a null handle.
//
// # Safety
// `f` must be a valid handle or null.
double psido_field_realness_defect(const struct PsidoField *f);

// One complex sample, row-major indexing.
//
// # Safety
// All pointers must be valid.
enum PsidoStatus psido_field_at(const struct PsidoField *f,
                                uintptr_t ix,
                                uintptr_t ik,
                                double *out_re,
                                double *out_im);

// Copy the real part of the field into `buf` (row-major, `len` must be
// `nx * nk`).
//
// # Safety
// `buf` must point to `len` writable doubles.
enum PsidoStatus psido_field_copy_re(const struct PsidoField *f,
                                     double *buf,
                                     uintptr_t len);

// Analytic quadrature reference for the Gauss barrier under the Gauss
// packet. Never fails.
double psido_reference_gauss_barrier(double x,
                                     double k,
                                     double hbar);

// Exact Moyal form for the quartic double well.
//
// # Safety
// `s` and `out` must be valid pointers.
enum PsidoStatus psido_reference_double_well(const struct PsidoState *s,
                                             double x,
                                             double k,
                                             double a,
                                             double b,
                                             double hbar,
                                             double *out);

// Dense double-quadrature reference with a built-in refinement
// self-check.
//
// # Safety
// Handles and `out` must be valid pointers.
enum PsidoStatus psido_reference_brute_force(const struct PsidoState *s,
                                             const struct PsidoPotential *p,
                                             double x,
                                             double k,
                                             double y_cut,
                                             double hbar,
                                             double *out);

// Max |reference - Re(field)| against the Gauss-barrier reference, with
// the arg-max location.
//
// # Safety
// All pointers must be valid.
enum PsidoStatus psido_linf_vs_gauss_barrier(const struct PsidoField *f,
                                             double hbar,
                                             double *out_eps,
                                             double *out_x,
                                             double *out_k);

// Prior error estimator for the k-truncation parameter.
//
// # Safety
// Handles and `out` must be valid pointers.
enum PsidoStatus psido_g_xi_estimate(const struct PsidoState *s,
                                     const struct PsidoPotential *p,
                                     double x_lo,
                                     double x_hi,
                                     double k_lo,
                                     double k_hi,
                                     double l_k,
                                     uintptr_t n_xi,
                                     double *out);

// Prior error estimator for the f-truncation parameter.
//
// # Safety
// `p` and `out` must be valid pointers.
enum PsidoStatus psido_g_nu_estimate(const struct PsidoPotential *p,
                                     double x_lo,
                                     double x_hi,
                                     uintptr_t n_nu,
                                     double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PSIDO_H */
