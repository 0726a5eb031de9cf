//! C ABI over the psido library.
//!
//! Conventions: opaque handles created by `psido_*_new`-style constructors
//! and released by the matching `psido_*_free`; fallible calls return a
//! [`PsidoStatus`] and write results through out-pointers; the last error
//! message is retrievable per thread via [`psido_last_error_message`]. All
//! entry points catch panics.

use std::cell::RefCell;
use std::ffi::CStr;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use psido::error::Error;
use psido::grid::Interval;
use psido::operators::{
    f_truncation, g_nu_estimate, g_xi_estimate, k_truncation, m_truncation, y_truncation,
    EvalGrid, FConfig, KConfig, MConfig, PsiDoField, QuadSpec, YConfig,
};
use psido::potential::Potential;
use psido::reference::{
    brute_force_reference, double_well_reference, gauss_barrier_reference, linf_error,
};
use psido::state::WignerState;

/// Status codes returned by fallible entry points. Mirrors the CLI exit
/// codes where applicable.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsidoStatus {
    Ok = 0,
    InvalidArgument = 1,
    ConfigError = 2,
    AccuracyError = 3,
    IoError = 4,
    Panic = 5,
}

pub struct PsidoPotential(Potential);
pub struct PsidoState(WignerState);
pub struct PsidoField(PsiDoField);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> PsidoStatus {
    match err.exit_code() {
        2 => PsidoStatus::ConfigError,
        3 => PsidoStatus::AccuracyError,
        4 => PsidoStatus::IoError,
        _ => PsidoStatus::ConfigError,
    }
}

fn run_status(f: impl FnOnce() -> Result<(), Error>) -> PsidoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PsidoStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside psido");
            PsidoStatus::Panic
        }
    }
}

/// Copy the current thread's last error message into `buf` (NUL
/// terminated, truncated to `cap`). Returns the full message length in
/// bytes, excluding the terminator.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn psido_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// `V(x) = exp(-x^2/2)`. Never fails.
#[no_mangle]
pub extern "C" fn psido_potential_gauss_barrier() -> *mut PsidoPotential {
    Box::into_raw(Box::new(PsidoPotential(Potential::gauss_barrier())))
}

/// `V(x) = a (x^2 - b^2)^2`, requires `a > 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_double_well(
    a: f64,
    b: f64,
    out: *mut *mut PsidoPotential,
) -> PsidoStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        let p = Potential::double_well(a, b)?;
        *out = Box::into_raw(Box::new(PsidoPotential(p)));
        Ok(())
    })
}

/// Built-in tabulated double-barrier surrogate on `[x_lo, x_hi]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_rtd_surrogate(
    n_samples: usize,
    x_lo: f64,
    x_hi: f64,
    out: *mut *mut PsidoPotential,
) -> PsidoStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        let p = Potential::make_rtd_like_tabulated(n_samples, Interval::new(x_lo, x_hi)?)?;
        *out = Box::into_raw(Box::new(PsidoPotential(p)));
        Ok(())
    })
}

/// Load a two-column `x V` text file (`#` comments).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_from_file(
    path: *const c_char,
    out: *mut *mut PsidoPotential,
) -> PsidoStatus {
    if path.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s.to_owned(),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return PsidoStatus::InvalidArgument;
        }
    };
    run_status(|| {
        let p = Potential::from_file(&path)?;
        *out = Box::into_raw(Box::new(PsidoPotential(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must come from a psido constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_free(p: *mut PsidoPotential) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_value(
    p: *const PsidoPotential,
    x: f64,
    out: *mut f64,
) -> PsidoStatus {
    if p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = (*p).0.value(x)?;
        Ok(())
    })
}

/// `D_V(x,y) = V(x+y/2) - V(x-y/2)`.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_potential_dv(
    p: *const PsidoPotential,
    x: f64,
    y: f64,
    out: *mut f64,
) -> PsidoStatus {
    if p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = (*p).0.dv(x, y)?;
        Ok(())
    })
}

/// The benchmark Gauss wave packet. Never fails.
#[no_mangle]
pub extern "C" fn psido_state_gauss_packet() -> *mut PsidoState {
    Box::into_raw(Box::new(PsidoState(WignerState::gauss_packet())))
}

/// Load a sampled state (`nx nk x_lo x_hi k_lo k_hi` header, row-major
/// values).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn psido_state_from_file(
    path: *const c_char,
    out: *mut *mut PsidoState,
) -> PsidoStatus {
    if path.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => s.to_owned(),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return PsidoStatus::InvalidArgument;
        }
    };
    run_status(|| {
        let s = WignerState::from_file(&path)?;
        *out = Box::into_raw(Box::new(PsidoState(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from a psido constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psido_state_free(s: *mut PsidoState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_state_eval(
    s: *const PsidoState,
    x: f64,
    k: f64,
    out: *mut f64,
) -> PsidoStatus {
    if s.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = (*s).0.eval(x, k)?;
        Ok(())
    })
}

/// `d^order f / dk^order`.
///
/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_state_k_derivative(
    s: *const PsidoState,
    x: f64,
    k: f64,
    order: usize,
    out: *mut f64,
) -> PsidoStatus {
    if s.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = (*s).0.k_derivative(x, k, order)?;
        Ok(())
    })
}

unsafe fn compute_common(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    nx: usize,
    nk: usize,
    out: *mut *mut PsidoField,
    f: impl FnOnce(&WignerState, &Potential, &EvalGrid) -> Result<PsiDoField, Error>,
) -> PsidoStatus {
    if s.is_null() || p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        let grid = EvalGrid::new(Interval::new(x_lo, x_hi)?, Interval::new(k_lo, k_hi)?, nx, nk)?;
        let field = f(&(*s).0, &(*p).0, &grid)?;
        *out = Box::into_raw(Box::new(PsidoField(field)));
        Ok(())
    })
}

fn quad(order: usize) -> QuadSpec {
    QuadSpec { order: if order == 0 { 32 } else { order }, panels: None }
}

/// y-window truncation on an `nx` by `nk` grid. `quad_order = 0` selects
/// the default order-32 rule; panels adapt to the integrand.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psido_compute_y(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    nx: usize,
    nk: usize,
    l_y: f64,
    n_mu: usize,
    quad_order: usize,
    hbar: f64,
    out: *mut *mut PsidoField,
) -> PsidoStatus {
    compute_common(s, p, x_lo, x_hi, k_lo, k_hi, nx, nk, out, |s, p, grid| {
        y_truncation(s, p, grid, &YConfig { l_y, n_mu, quad: quad(quad_order) }, hbar)
    })
}

/// Convolution-kernel truncation.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psido_compute_k(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    nx: usize,
    nk: usize,
    l_k: f64,
    n_xi: usize,
    quad_order: usize,
    hbar: f64,
    out: *mut *mut PsidoField,
) -> PsidoStatus {
    compute_common(s, p, x_lo, x_hi, k_lo, k_hi, nx, nk, out, |s, p, grid| {
        k_truncation(s, p, grid, &KConfig { l_k, n_xi, quad: quad(quad_order) }, hbar)
    })
}

/// Moyal-series truncation at order `p_order`.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psido_compute_m(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    nx: usize,
    nk: usize,
    p_order: usize,
    hbar: f64,
    out: *mut *mut PsidoField,
) -> PsidoStatus {
    compute_common(s, p, x_lo, x_hi, k_lo, k_hi, nx, nk, out, |s, p, grid| {
        m_truncation(s, p, grid, &MConfig { p: p_order }, hbar)
    })
}

/// Force-spectrum truncation; the spectrum is taken over the evaluation
/// x-domain.
///
/// # Safety
/// Handles must be valid; `out` must be a valid pointer.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psido_compute_f(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    nx: usize,
    nk: usize,
    n_nu: usize,
    quad_order: usize,
    hbar: f64,
    out: *mut *mut PsidoField,
) -> PsidoStatus {
    compute_common(s, p, x_lo, x_hi, k_lo, k_hi, nx, nk, out, |s, p, grid| {
        f_truncation(
            s,
            p,
            grid,
            &FConfig { n_nu, x_domain: grid.x.interval, quad: quad(quad_order) },
            hbar,
        )
    })
}

/// # Safety
/// `f` must come from a psido constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn psido_field_free(f: *mut PsidoField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn psido_field_dims(
    f: *const PsidoField,
    out_nx: *mut usize,
    out_nk: *mut usize,
) -> PsidoStatus {
    if f.is_null() || out_nx.is_null() || out_nk.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    *out_nx = (*f).0.nx();
    *out_nk = (*f).0.nk();
    PsidoStatus::Ok
}

/// Max |Im| over the grid; negative on a null handle.
///
/// # Safety
/// `f` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn psido_field_realness_defect(f: *const PsidoField) -> f64 {
    if f.is_null() {
        return -1.0;
    }
    (*f).0.realness_defect
}

/// One complex sample, row-major indexing.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn psido_field_at(
    f: *const PsidoField,
    ix: usize,
    ik: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> PsidoStatus {
    if f.is_null() || out_re.is_null() || out_im.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    let field = &(*f).0;
    if ix >= field.nx() || ik >= field.nk() {
        set_error(format!(
            "index ({ix}, {ik}) out of bounds for {} x {}",
            field.nx(),
            field.nk()
        ));
        return PsidoStatus::InvalidArgument;
    }
    let v = field.at(ix, ik);
    *out_re = v.re;
    *out_im = v.im;
    PsidoStatus::Ok
}

/// Copy the real part of the field into `buf` (row-major, `len` must be
/// `nx * nk`).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn psido_field_copy_re(
    f: *const PsidoField,
    buf: *mut f64,
    len: usize,
) -> PsidoStatus {
    if f.is_null() || buf.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    let field = &(*f).0;
    if len != field.values.len() {
        set_error(format!("buffer holds {len} values, field has {}", field.values.len()));
        return PsidoStatus::InvalidArgument;
    }
    for (i, v) in field.values.iter().enumerate() {
        *buf.add(i) = v.re;
    }
    PsidoStatus::Ok
}

/// Analytic quadrature reference for the Gauss barrier under the Gauss
/// packet. Never fails.
#[no_mangle]
pub extern "C" fn psido_reference_gauss_barrier(x: f64, k: f64, hbar: f64) -> f64 {
    match catch_unwind(|| gauss_barrier_reference(x, k, &QuadSpec::default(), 10.0, hbar)) {
        Ok(v) => v,
        Err(_) => f64::NAN,
    }
}

/// Exact Moyal form for the quartic double well.
///
/// # Safety
/// `s` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_reference_double_well(
    s: *const PsidoState,
    x: f64,
    k: f64,
    a: f64,
    b: f64,
    hbar: f64,
    out: *mut f64,
) -> PsidoStatus {
    if s.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = double_well_reference(&(*s).0, x, k, a, b, hbar)?;
        Ok(())
    })
}

/// Dense double-quadrature reference with a built-in refinement
/// self-check.
///
/// # Safety
/// Handles and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_reference_brute_force(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x: f64,
    k: f64,
    y_cut: f64,
    hbar: f64,
    out: *mut f64,
) -> PsidoStatus {
    if s.is_null() || p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = brute_force_reference(&(*s).0, &(*p).0, x, k, y_cut, &QuadSpec::default(), hbar)?;
        Ok(())
    })
}

/// Max |reference - Re(field)| against the Gauss-barrier reference, with
/// the arg-max location.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn psido_linf_vs_gauss_barrier(
    f: *const PsidoField,
    hbar: f64,
    out_eps: *mut f64,
    out_x: *mut f64,
    out_k: *mut f64,
) -> PsidoStatus {
    if f.is_null() || out_eps.is_null() || out_x.is_null() || out_k.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        let report = linf_error(&(*f).0, |x, k| {
            gauss_barrier_reference(x, k, &QuadSpec::default(), 10.0, hbar)
        });
        *out_eps = report.eps_inf;
        *out_x = report.argmax.0;
        *out_k = report.argmax.1;
        Ok(())
    })
}

/// Prior error estimator for the k-truncation parameter.
///
/// # Safety
/// Handles and `out` must be valid pointers.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn psido_g_xi_estimate(
    s: *const PsidoState,
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    k_lo: f64,
    k_hi: f64,
    l_k: f64,
    n_xi: usize,
    out: *mut f64,
) -> PsidoStatus {
    if s.is_null() || p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        let grid =
            EvalGrid::new(Interval::new(x_lo, x_hi)?, Interval::new(k_lo, k_hi)?, 201, 2)?;
        *out = g_xi_estimate(&(*s).0, &(*p).0, &grid, &KConfig {
            l_k,
            n_xi,
            quad: QuadSpec::default(),
        })?;
        Ok(())
    })
}

/// Prior error estimator for the f-truncation parameter.
///
/// # Safety
/// `p` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn psido_g_nu_estimate(
    p: *const PsidoPotential,
    x_lo: f64,
    x_hi: f64,
    n_nu: usize,
    out: *mut f64,
) -> PsidoStatus {
    if p.is_null() || out.is_null() {
        set_error("null pointer argument");
        return PsidoStatus::InvalidArgument;
    }
    run_status(|| {
        *out = g_nu_estimate(&(*p).0, &FConfig {
            n_nu,
            x_domain: Interval::new(x_lo, x_hi)?,
            quad: QuadSpec::default(),
        })?;
        Ok(())
    })
}
