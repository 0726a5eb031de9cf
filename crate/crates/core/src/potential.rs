//! Potential functions and the derived quantities the truncation schemes
//! consume: the symmetrized difference `D_V(x,y) = V(x+y/2) - V(x-y/2)`,
//! high-order derivatives, the classical force and its spectrum.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{config_err, domain_err, Error, Result};
use crate::grid::{Interval, QuadratureRule};

/// Natural cubic spline through strictly increasing sample points.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// second derivatives at the knots (natural: zero at both ends)
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 4 {
            return config_err("tabulated potential needs at least 4 samples");
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return config_err("tabulated samples must be strictly increasing in x");
            }
        }
        let n = xs.len();
        // Thomas algorithm for the natural-spline tridiagonal system.
        let mut sub = vec![0.0; n];
        let mut diag = vec![1.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            sub[i] = h0 / 6.0;
            diag[i] = (h0 + h1) / 3.0;
            sup[i] = h1 / 6.0;
            rhs[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        Ok(Self { xs, ys, m })
    }

    pub fn domain(&self) -> Interval {
        Interval { lo: self.xs[0], hi: *self.xs.last().unwrap() }
    }

    fn segment(&self, x: f64) -> Result<usize> {
        if x < self.xs[0] || x > *self.xs.last().unwrap() {
            return domain_err(format!(
                "x = {x} outside tabulated range [{}, {}]",
                self.xs[0],
                self.xs.last().unwrap()
            ));
        }
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(i) => i - 1,
        };
        Ok(i)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok(a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0)
    }

    pub fn deriv1(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok((self.ys[i + 1] - self.ys[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0)
    }

    pub fn deriv2(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok(a * self.m[i] + b * self.m[i + 1])
    }

    /// Smallest knot spacing; quadrature rules over spline data size their
    /// panels to it so piecewise-cubic kinks stay resolved.
    pub fn min_knot_spacing(&self) -> f64 {
        self.xs
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    GaussBarrier,
    DoubleWell { a: f64, b: f64 },
    Tabulated(CubicSpline),
}

/// A static potential `V(x)`.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: Kind,
    pub name: String,
}

/// Probabilists' Hermite polynomial `He_n(x)` by recurrence.
fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = x;
    for k in 1..n {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `d^n/dx^n exp(-x^2/2) = (-1)^n He_n(x) exp(-x^2/2)`.
pub(crate) fn gaussian_derivative(n: usize, x: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * hermite(n, x) * (-0.5 * x * x).exp()
}

fn rtd_profile(x: f64) -> f64 {
    // double-barrier surrogate: two bumps of height 0.3 at +-1.5, width
    // parameter 0.5 (Gaussian variance; wide enough that the kernel
    // spectrum is negligible beyond |kappa| = 2 pi)
    let two_var = 2.0 * 0.5;
    0.3 * (((x - 1.5) * (x - 1.5) / -two_var).exp() + ((x + 1.5) * (x + 1.5) / -two_var).exp())
}

impl Potential {
    /// `V(x) = exp(-x^2/2)`.
    pub fn gauss_barrier() -> Self {
        Self { kind: Kind::GaussBarrier, name: "gauss_barrier".into() }
    }

    /// `V(x) = a (x^2 - b^2)^2`.
    pub fn double_well(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return config_err("double well requires a > 0");
        }
        Ok(Self { kind: Kind::DoubleWell { a, b }, name: format!("double_well(a={a},b={b})") })
    }

    pub fn tabulated(samples: &[(f64, f64)], name: impl Into<String>) -> Result<Self> {
        Ok(Self { kind: Kind::Tabulated(CubicSpline::new(samples)?), name: name.into() })
    }

    /// Built-in double-barrier profile sampled on a closed uniform grid,
    /// returned as a tabulated potential. Stands in for device potentials
    /// known only at collocation points; used for property checks, never
    /// for golden-value comparison.
    pub fn make_rtd_like_tabulated(n_samples: usize, x_domain: Interval) -> Result<Self> {
        if n_samples < 64 {
            return config_err("rtd-like surrogate needs at least 64 samples");
        }
        let h = x_domain.len() / (n_samples - 1) as f64;
        let samples: Vec<(f64, f64)> = (0..n_samples)
            .map(|i| {
                let x = x_domain.lo + i as f64 * h;
                (x, rtd_profile(x))
            })
            .collect();
        Self::tabulated(&samples, "rtd_like")
    }

    /// Load a two-column `x V` text file; `#` starts a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path)?;
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing x", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let v: f64 = it
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing V", lineno + 1)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            samples.push((x, v));
        }
        let name = path.as_ref().display().to_string();
        Self::tabulated(&samples, name)
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self.kind, Kind::DoubleWell { .. })
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.kind, Kind::Tabulated(_))
    }

    /// Range over which the potential can be evaluated.
    pub fn support(&self) -> Option<Interval> {
        match &self.kind {
            Kind::Tabulated(s) => Some(s.domain()),
            _ => None,
        }
    }

    /// Knot spacing hint for quadrature over tabulated data.
    pub fn knot_hint(&self) -> Option<f64> {
        match &self.kind {
            Kind::Tabulated(s) => Some(s.min_knot_spacing()),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        match &self.kind {
            Kind::GaussBarrier => Ok((-0.5 * x * x).exp()),
            Kind::DoubleWell { a, b } => {
                let u = x * x - b * b;
                Ok(a * u * u)
            }
            Kind::Tabulated(s) => s.eval(x),
        }
    }

    /// `D_V(x,y) = V(x+y/2) - V(x-y/2)`.
    pub fn dv(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.value(x + 0.5 * y)? - self.value(x - 0.5 * y)?)
    }

    /// `d^order V / dx^order`, order >= 1. Closed forms for the analytic
    /// kinds; spline derivatives up to order 2 for tabulated data. Higher
    /// orders on tabulated data are refused rather than estimated.
    pub fn derivative(&self, x: f64, order: usize) -> Result<f64> {
        if order == 0 {
            return self.value(x);
        }
        match &self.kind {
            Kind::GaussBarrier => Ok(gaussian_derivative(order, x)),
            Kind::DoubleWell { a, b } => Ok(match order {
                1 => a * (4.0 * x * x * x - 4.0 * b * b * x),
                2 => a * (12.0 * x * x - 4.0 * b * b),
                3 => 24.0 * a * x,
                4 => 24.0 * a,
                _ => 0.0,
            }),
            Kind::Tabulated(s) => match order {
                1 => s.deriv1(x),
                2 => s.deriv2(x),
                _ => Err(Error::UnsupportedDerivative { kind: "tabulated potential", order }),
            },
        }
    }

    /// Classical force `F(x) = -dV/dx`.
    pub fn force(&self, x: f64) -> Result<f64> {
        Ok(-self.derivative(x, 1)?)
    }

    /// Force spectrum `F~(k) = int_{x_domain} F(x) exp(-i k x) dx` by
    /// quadrature. The rule must cover exactly `x_domain`.
    pub fn force_spectrum(
        &self,
        x_domain: Interval,
        k: f64,
        quad: &QuadratureRule,
    ) -> Result<Complex64> {
        let tol = 1e-9 * (1.0 + x_domain.len());
        if (quad.interval.lo - x_domain.lo).abs() > tol
            || (quad.interval.hi - x_domain.hi).abs() > tol
        {
            return config_err("force_spectrum: quadrature rule does not cover x_domain");
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
            let f = self.force(x)?;
            let (s, c) = (k * x).sin_cos();
            acc += Complex64::new(c, -s) * (w * f);
        }
        Ok(acc)
    }
}
