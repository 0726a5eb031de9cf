//! Uniform grids, conjugate-grid duality and composite Gauss-Legendre quadrature.
//!
//! Every integral in the crate goes through [`QuadratureRule`]; every discrete
//! sum over a dual lattice goes through [`DualGridPair`], which enforces the
//! mass-conservation lock `L * spacing_dual = 2*pi`.

use std::f64::consts::PI;

use crate::error::{config_err, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return config_err(format!("interval requires lo < hi, got [{lo}, {hi}]"));
        }
        Ok(Self { lo, hi })
    }

    /// Symmetric interval `[-half, half]`.
    pub fn symmetric(half: f64) -> Result<Self> {
        Self::new(-half, half)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Uniformly spaced grid over an interval.
///
/// Closed grids include both endpoints (spacing = len/(n-1)); periodic grids
/// cover `[lo, hi)` with spacing = len/n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub interval: Interval,
    pub n_points: usize,
    pub periodic: bool,
}

impl UniformGrid {
    pub fn closed(interval: Interval, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return config_err("closed grid needs at least 2 points");
        }
        Ok(Self { interval, n_points, periodic: false })
    }

    pub fn periodic(interval: Interval, n_points: usize) -> Result<Self> {
        if n_points < 1 {
            return config_err("periodic grid needs at least 1 point");
        }
        Ok(Self { interval, n_points, periodic: true })
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.interval.len() / self.n_points as f64
        } else {
            self.interval.len() / (self.n_points - 1) as f64
        }
    }

    pub fn point(&self, i: usize) -> f64 {
        self.interval.lo + i as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }
}

/// A primal interval of length `L` paired with the spacing of its conjugate
/// lattice, locked by `L * dual_spacing = 2*pi`.
///
/// The dual lattice is indexed `-n_dual_half ..= n_dual_half`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualGridPair {
    pub primal: UniformGrid,
    pub dual_spacing: f64,
    pub n_dual_half: usize,
}

/// Build the conjugate pair for a symmetric primal domain `[-L/2, L/2]`.
pub fn make_dual_pair(l: f64, n_dual_half: usize) -> Result<DualGridPair> {
    if !(l > 0.0) || !l.is_finite() {
        return config_err(format!("primal length must be positive, got {l}"));
    }
    if n_dual_half < 1 {
        return config_err("dual half-range must be at least 1");
    }
    let interval = Interval::symmetric(0.5 * l)?;
    let primal = UniformGrid::closed(interval, 2 * n_dual_half + 1)?;
    Ok(DualGridPair { primal, dual_spacing: 2.0 * PI / l, n_dual_half })
}

impl DualGridPair {
    /// i-th dual lattice point, `i` in `-n_dual_half ..= n_dual_half`.
    pub fn dual_point(&self, i: i64) -> f64 {
        i as f64 * self.dual_spacing
    }

    /// Defect of the 2*pi lock, in units of ulp(2*pi).
    pub fn duality_defect_ulps(&self) -> f64 {
        let two_pi = 2.0 * PI;
        (self.primal.interval.len() * self.dual_spacing - two_pi).abs() / (two_pi * f64::EPSILON)
    }
}

/// Composite Gauss-Legendre rule: nodes and weights over an interval.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: Interval,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Reference Gauss-Legendre nodes/weights on [-1, 1], found by Newton
/// iteration on the Legendre recurrence. Symmetry is enforced exactly by
/// mirroring the computed half.
pub fn legendre_nodes(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "order must be at least 1");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            let step = p / d;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        // one clean-up iteration at the converged point
        let (p, d) = legendre_and_derivative(n, z);
        z -= p / d;
        let dp = legendre_and_derivative(n, z).1;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal panels, `order` nodes each.
pub fn gauss_legendre(interval: Interval, order: usize, panels: usize) -> Result<QuadratureRule> {
    if order < 1 {
        return config_err("quadrature order must be at least 1");
    }
    if panels < 1 {
        return config_err("quadrature needs at least 1 panel");
    }
    let (ref_nodes, ref_weights) = legendre_nodes(order);
    let h = interval.len() / panels as f64;
    let mut nodes = Vec::with_capacity(order * panels);
    let mut weights = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let center = interval.lo + (p as f64 + 0.5) * h;
        for (&t, &w) in ref_nodes.iter().zip(&ref_weights) {
            nodes.push(center + 0.5 * h * t);
            weights.push(0.5 * h * w);
        }
    }
    Ok(QuadratureRule { nodes, weights, interval })
}

/// Panel count that keeps an oscillation `exp(i*max_freq*x)` resolved:
/// at least one panel per unit length, and enough panels that the phase
/// advance per panel stays below `order` radians.
pub fn panels_for(interval: Interval, order: usize, max_freq: f64) -> usize {
    let len = interval.len();
    let base = len.ceil().max(1.0);
    let osc = (len * max_freq.abs() / order as f64).ceil();
    base.max(osc) as usize
}

/// Composite rule sized by [`panels_for`].
pub fn gauss_legendre_osc(
    interval: Interval,
    order: usize,
    max_freq: f64,
) -> Result<QuadratureRule> {
    gauss_legendre(interval, order, panels_for(interval, order, max_freq))
}
