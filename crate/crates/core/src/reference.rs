//! Ground-truth oracles and the L-infinity error metric.
//!
//! The brute-force oracle evaluates the untruncated convolution form by
//! dense quadrature and never reuses a truncation code path.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{panels_for, Interval};
use crate::operators::{EvalGrid, PsiDoField, QuadSpec, TruncationConfig};
use crate::potential::Potential;
use crate::state::WignerState;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Error metrics for one field against one oracle.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub scheme: TruncationConfig,
    pub eps_inf: f64,
    pub argmax: (f64, f64),
    pub estimator: Option<f64>,
    pub realness_defect: f64,
}

fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Analytic-form reference for the Gauss barrier under the Gauss packet:
///
/// `(4 / (hbar pi sqrt(2 pi))) * int_{-k_cut}^{k_cut}
///     exp(-2 (k-k')^2) sin(2 (k-k') x) exp(-x^2/4 - 4 k'^2) dk'`
///
/// kept as quadrature; `k_cut = 10` leaves the integrand below 1e-18 outside.
pub fn gauss_barrier_reference(x: f64, k: f64, quad: &QuadSpec, k_cut: f64, hbar: f64) -> f64 {
    let interval = Interval::symmetric(k_cut).expect("positive k_cut");
    let rule = quad.rule(interval, 2.0 * x.abs()).expect("valid quadrature spec");
    let mut acc = 0.0;
    for (&kp, &w) in rule.nodes.iter().zip(&rule.weights) {
        let d = k - kp;
        acc += w * (-2.0 * d * d).exp() * (2.0 * d * x).sin() * (-0.25 * x * x - 4.0 * kp * kp).exp();
    }
    4.0 / (hbar * std::f64::consts::PI * (TWO_PI).sqrt()) * acc
}

/// Exact Moyal form for the quartic double well `a (x^2 - b^2)^2`:
///
/// `4 a (x^3 - b^2 x) d_k f / hbar - a x d_k^3 f / hbar`
pub fn double_well_reference(
    s: &WignerState,
    x: f64,
    k: f64,
    a: f64,
    b: f64,
    hbar: f64,
) -> Result<f64> {
    let d1 = s.k_derivative(x, k, 1)?;
    let d3 = s.k_derivative(x, k, 3)?;
    Ok((4.0 * a * (x * x * x - b * b * x) * d1 - a * x * d3) / hbar)
}

/// k'-integration range for the brute-force convolution: the state's
/// numerical k-support padded by three decay widths.
fn bf_k_range(s: &WignerState) -> Interval {
    let sup = s.k_support();
    let pad = 3.0 * s.k_decay_width;
    Interval::new(sup.lo - pad, sup.hi + pad).unwrap()
}

/// Panel count for a y-integral of `D_V` from a (possibly tabulated)
/// potential: oscillation-resolved, and knot-sized for spline data so the
/// piecewise-cubic pieces stay resolved.
fn y_panels(p: &Potential, y_domain: Interval, order: usize, max_freq: f64) -> (usize, usize) {
    match p.knot_hint() {
        // one panel per knot interval; modest order suffices on panels that
        // contain at most one kink
        Some(h) => (8, (y_domain.len() / h).ceil() as usize),
        None => (order, panels_for(y_domain, order, max_freq)),
    }
}

fn bf_single(
    s: &WignerState,
    p: &Potential,
    x: f64,
    k: f64,
    y_cut: f64,
    quad: &QuadSpec,
    refine: usize,
    hbar: f64,
) -> Result<f64> {
    let y_domain = Interval::symmetric(y_cut)?;
    let k_range = bf_k_range(s);
    let kappa_max = k.abs() + k_range.lo.abs().max(k_range.hi.abs());
    let (y_order, y_pan) = y_panels(p, y_domain, quad.order, kappa_max);
    let y_rule = QuadSpec { order: y_order, panels: Some(y_pan * refine) }.rule(y_domain, 0.0)?;
    let k_pan = quad
        .panels
        .unwrap_or_else(|| panels_for(k_range, quad.order, y_cut));
    let k_rule = QuadSpec { order: quad.order, panels: Some(k_pan * refine) }.rule(k_range, 0.0)?;

    // cache w_j * D_V(x, y_j) once per evaluation point
    let dv_w: Vec<f64> = y_rule
        .nodes
        .iter()
        .zip(&y_rule.weights)
        .map(|(&y, &w)| Ok(w * p.dv(x, y)?))
        .collect::<Result<_>>()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&kp, &wq) in k_rule.nodes.iter().zip(&k_rule.weights) {
        let kappa = k - kp;
        let mut vw = Complex64::new(0.0, 0.0);
        for (&y, &dw) in y_rule.nodes.iter().zip(&dv_w) {
            vw += cis(-kappa * y) * dw;
        }
        acc += vw * (wq * s.eval(x, kp)?);
    }
    // V_w carries the 1/(2 pi i hbar) prefactor
    Ok((acc * Complex64::new(0.0, -1.0) / (TWO_PI * hbar)).re)
}

/// Dense double-quadrature evaluation of the untruncated convolution form
/// at one phase-space point, with a built-in 2x refinement self-check.
pub fn brute_force_reference(
    s: &WignerState,
    p: &Potential,
    x: f64,
    k: f64,
    y_cut: f64,
    quad: &QuadSpec,
    hbar: f64,
) -> Result<f64> {
    let base = bf_single(s, p, x, k, y_cut, quad, 1, hbar)?;
    let fine = bf_single(s, p, x, k, y_cut, quad, 2, hbar)?;
    let delta = (fine - base).abs();
    if delta > 1e-10 {
        return Err(Error::Accuracy {
            msg: format!("brute-force reference did not converge at (x={x}, k={k})"),
            delta,
        });
    }
    Ok(fine)
}

/// Brute-force oracle over a whole evaluation grid.
///
/// Evaluates the same untruncated double integral with the y-integral
/// outermost, which lets the k'-moment be shared across the k-row; returns
/// the field and the max pointwise change under 2x refinement.
pub fn brute_force_field(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    y_cut: f64,
    quad: &QuadSpec,
    hbar: f64,
) -> Result<(Vec<f64>, f64)> {
    let base = bf_field_single(s, p, grid, y_cut, quad, 1, hbar)?;
    let fine = bf_field_single(s, p, grid, y_cut, quad, 2, hbar)?;
    let delta = base
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if delta > 1e-10 {
        return Err(Error::Accuracy {
            msg: "brute-force field did not converge under refinement".into(),
            delta,
        });
    }
    Ok((fine, delta))
}

fn bf_field_single(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    y_cut: f64,
    quad: &QuadSpec,
    refine: usize,
    hbar: f64,
) -> Result<Vec<f64>> {
    let y_domain = Interval::symmetric(y_cut)?;
    let k_range = bf_k_range(s);
    let kappa_max = grid.max_abs_k() + k_range.lo.abs().max(k_range.hi.abs());
    let (y_order, y_pan) = y_panels(p, y_domain, quad.order, kappa_max);
    let y_rule = QuadSpec { order: y_order, panels: Some(y_pan * refine) }.rule(y_domain, 0.0)?;
    let k_pan = quad
        .panels
        .unwrap_or_else(|| panels_for(k_range, quad.order, y_cut));
    let k_rule = QuadSpec { order: quad.order, panels: Some(k_pan * refine) }.rule(k_range, 0.0)?;

    let nk = grid.k.n_points;
    let nj = y_rule.len();
    // for a separable state the k'-moment is x-independent up to the
    // x-profile and can be hoisted out of the row loop
    let shared_moment: Option<(Vec<Complex64>, Box<dyn Fn(f64) -> f64 + Send + Sync>)> =
        s.separable().map(|(x_profile, k_profile)| {
            let f_q: Vec<f64> = k_rule
                .nodes
                .iter()
                .zip(&k_rule.weights)
                .map(|(&kp, &wq)| wq * k_profile(kp))
                .collect();
            let mut m = vec![Complex64::new(0.0, 0.0); nj];
            m.par_iter_mut().enumerate().for_each(|(j, mj)| {
                let y = y_rule.nodes[j];
                let mut acc = Complex64::new(0.0, 0.0);
                for (&kp, &fw) in k_rule.nodes.iter().zip(&f_q) {
                    acc += cis(kp * y) * fw;
                }
                *mj = acc;
            });
            (m, x_profile)
        });
    let mut values = vec![0.0; grid.x.n_points * nk];
    values
        .par_chunks_mut(nk)
        .enumerate()
        .try_for_each(|(ix, row)| -> Result<()> {
            let x = grid.x.point(ix);
            // c_j = w_j D_V(x, y_j) * int exp(i k' y_j) f(x,k') dk'
            let mut c = vec![Complex64::new(0.0, 0.0); nj];
            match &shared_moment {
                Some((m, x_profile)) => {
                    let ax = x_profile(x);
                    for (j, cj) in c.iter_mut().enumerate() {
                        *cj = m[j] * (ax * y_rule.weights[j] * p.dv(x, y_rule.nodes[j])?);
                    }
                }
                None => {
                    let f_q: Vec<f64> = k_rule
                        .nodes
                        .iter()
                        .zip(&k_rule.weights)
                        .map(|(&kp, &wq)| Ok(wq * s.eval(x, kp)?))
                        .collect::<Result<_>>()?;
                    for (j, cj) in c.iter_mut().enumerate() {
                        let y = y_rule.nodes[j];
                        let mut m = Complex64::new(0.0, 0.0);
                        for (&kp, &fw) in k_rule.nodes.iter().zip(&f_q) {
                            m += cis(kp * y) * fw;
                        }
                        *cj = m * (y_rule.weights[j] * p.dv(x, y)?);
                    }
                }
            }
            for (ik, out) in row.iter_mut().enumerate() {
                let k = grid.k.point(ik);
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, cj) in c.iter().enumerate() {
                    acc += cj * cis(-k * y_rule.nodes[j]);
                }
                *out = (acc * Complex64::new(0.0, -1.0) / (TWO_PI * hbar)).re;
            }
            Ok(())
        })?;
    Ok(values)
}

/// Max pointwise deviation of the field's real part from a pointwise oracle.
pub fn linf_error(field: &PsiDoField, oracle: impl Fn(f64, f64) -> f64) -> ErrorReport {
    let mut eps = -1.0;
    let mut argmax = (0.0, 0.0);
    for ix in 0..field.nx() {
        let x = field.x_grid.point(ix);
        for ik in 0..field.nk() {
            let k = field.k_grid.point(ik);
            let d = (oracle(x, k) - field.re(ix, ik)).abs();
            if d > eps {
                eps = d;
                argmax = (x, k);
            }
        }
    }
    ErrorReport {
        scheme: field.scheme,
        eps_inf: eps.max(0.0),
        argmax,
        estimator: None,
        realness_defect: field.realness_defect,
    }
}
