//! Wigner function evaluators: the benchmark Gauss wave packet with closed
//! form k-derivatives, plus grid-sampled states with trigonometric
//! interpolation in k and cubic-spline interpolation in x.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{config_err, domain_err, Error, Result};
use crate::grid::{Interval, UniformGrid};
use crate::potential::CubicSpline;

#[derive(Debug, Clone)]
pub struct SampledState {
    pub x_grid: UniformGrid,
    pub k_grid: UniformGrid,
    /// row-major: `values[ix * nk + ik]`
    pub values: Vec<f64>,
    /// per x-row spectral coefficients, aligned with `freq_modes`
    coeffs: Vec<Complex64>,
    modes: Vec<i64>,
}

/// A Wigner function `f(x, k)`.
#[derive(Debug, Clone)]
pub struct WignerState {
    kind: StateKind,
    /// characteristic k-scale, used by parameter-selection heuristics
    pub k_decay_width: f64,
}

#[derive(Debug, Clone)]
enum StateKind {
    /// `f(x,k) = exp(-x^2/4 - 4 k^2) / pi`
    GaussPacket,
    Sampled(SampledState),
}

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

impl WignerState {
    pub fn gauss_packet() -> Self {
        // sigma of exp(-4k^2) viewed as exp(-k^2 / (2 sigma^2))
        Self { kind: StateKind::GaussPacket, k_decay_width: 0.5 / 2.0f64.sqrt() }
    }

    /// Sample a function on a closed x-grid and a periodic k-grid.
    pub fn sampled_from_fn(
        f: impl Fn(f64, f64) -> f64,
        x_grid: UniformGrid,
        k_grid: UniformGrid,
    ) -> Result<Self> {
        if x_grid.periodic || !k_grid.periodic {
            return config_err("sampled state expects a closed x-grid and a periodic k-grid");
        }
        let nx = x_grid.n_points;
        let nk = k_grid.n_points;
        let mut values = Vec::with_capacity(nx * nk);
        for ix in 0..nx {
            let x = x_grid.point(ix);
            for ik in 0..nk {
                values.push(f(x, k_grid.point(ik)));
            }
        }
        Self::from_samples(x_grid, k_grid, values)
    }

    pub fn from_samples(
        x_grid: UniformGrid,
        k_grid: UniformGrid,
        values: Vec<f64>,
    ) -> Result<Self> {
        let nx = x_grid.n_points;
        let nk = k_grid.n_points;
        if values.len() != nx * nk {
            return config_err("sample count does not match grid dimensions");
        }
        let modes: Vec<i64> = if nk % 2 == 0 {
            (-(nk as i64) / 2..nk as i64 / 2).collect()
        } else {
            (-(nk as i64 - 1) / 2..=(nk as i64 - 1) / 2).collect()
        };
        // direct DFT per x-row; grid sizes stay small enough that O(nk^2) is fine
        let mut coeffs = vec![Complex64::new(0.0, 0.0); nx * nk];
        for ix in 0..nx {
            for (im, &m) in modes.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..nk {
                    let phase = -2.0 * std::f64::consts::PI * m as f64 * j as f64 / nk as f64;
                    let (s, c) = phase.sin_cos();
                    acc += Complex64::new(c, s) * values[ix * nk + j];
                }
                coeffs[ix * nk + im] = acc / nk as f64;
            }
        }
        // intensity-weighted RMS k-width
        let mut wsum = 0.0;
        let mut ksq = 0.0;
        let mut kmean = 0.0;
        for ix in 0..nx {
            for ik in 0..nk {
                let w = values[ix * nk + ik].abs();
                wsum += w;
                kmean += w * k_grid.point(ik);
            }
        }
        kmean /= wsum.max(f64::MIN_POSITIVE);
        for ix in 0..nx {
            for ik in 0..nk {
                let w = values[ix * nk + ik].abs();
                let d = k_grid.point(ik) - kmean;
                ksq += w * d * d;
            }
        }
        let width = (ksq / wsum.max(f64::MIN_POSITIVE)).sqrt();
        Ok(Self {
            kind: StateKind::Sampled(SampledState { x_grid, k_grid, values, coeffs, modes }),
            k_decay_width: width,
        })
    }

    /// Interval beyond which `f` is numerically negligible in k.
    pub fn k_support(&self) -> Interval {
        match &self.kind {
            StateKind::GaussPacket => Interval::symmetric(12.0 * self.k_decay_width).unwrap(),
            StateKind::Sampled(s) => s.k_grid.interval,
        }
    }

    /// `f(x,k) = X(x) * K(k)` when the state factorizes; lets grid-level
    /// consumers hoist k'-moments out of the x-loop.
    #[allow(clippy::type_complexity)]
    pub(crate) fn separable(
        &self,
    ) -> Option<(Box<dyn Fn(f64) -> f64 + Send + Sync>, Box<dyn Fn(f64) -> f64 + Send + Sync>)>
    {
        match &self.kind {
            StateKind::GaussPacket => Some((
                Box::new(|x: f64| (-0.25 * x * x).exp() / std::f64::consts::PI),
                Box::new(|k: f64| (-4.0 * k * k).exp()),
            )),
            StateKind::Sampled(_) => None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.kind, StateKind::Sampled(_))
    }

    pub fn eval(&self, x: f64, k: f64) -> Result<f64> {
        match &self.kind {
            StateKind::GaussPacket => {
                Ok((-0.25 * x * x - 4.0 * k * k).exp() / std::f64::consts::PI)
            }
            StateKind::Sampled(s) => s.eval_deriv(x, k, 0),
        }
    }

    /// `d^order f / dk^order`. Closed Hermite form for the packet, spectral
    /// differentiation for sampled states.
    pub fn k_derivative(&self, x: f64, k: f64, order: usize) -> Result<f64> {
        if order == 0 {
            return self.eval(x, k);
        }
        match &self.kind {
            StateKind::GaussPacket => {
                let s8 = 8.0f64.sqrt();
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                Ok(sign
                    * s8.powi(order as i32)
                    * hermite(order, s8 * k)
                    * (-0.25 * x * x - 4.0 * k * k).exp()
                    / std::f64::consts::PI)
            }
            StateKind::Sampled(s) => s.eval_deriv(x, k, order),
        }
    }

    /// Plain-text round trip: header `nx nk x_lo x_hi k_lo k_hi`, then
    /// row-major values.
    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let s = match &self.kind {
            StateKind::Sampled(s) => s,
            StateKind::GaussPacket => {
                return config_err("only sampled states can be written to a file")
            }
        };
        let mut text = String::new();
        text.push_str(&format!(
            "{} {} {} {} {} {}\n",
            s.x_grid.n_points,
            s.k_grid.n_points,
            s.x_grid.interval.lo,
            s.x_grid.interval.hi,
            s.k_grid.interval.lo,
            s.k_grid.interval.hi
        ));
        for row in s.values.chunks(s.k_grid.n_points) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            text.push_str(&line.join(" "));
            text.push('\n');
        }
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut tokens = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(|l| l.split_whitespace());
        let mut next = |what: &str| -> Result<f64> {
            tokens
                .next()
                .ok_or_else(|| Error::Parse(format!("state file: missing {what}")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("state file {what}: {e}")))
        };
        let nx = next("nx")? as usize;
        let nk = next("nk")? as usize;
        let x_lo = next("x_lo")?;
        let x_hi = next("x_hi")?;
        let k_lo = next("k_lo")?;
        let k_hi = next("k_hi")?;
        let x_grid = UniformGrid::closed(Interval::new(x_lo, x_hi)?, nx)?;
        let k_grid = UniformGrid::periodic(Interval::new(k_lo, k_hi)?, nk)?;
        let mut values = Vec::with_capacity(nx * nk);
        for _ in 0..nx * nk {
            values.push(next("value")?);
        }
        Self::from_samples(x_grid, k_grid, values)
    }
}

impl SampledState {
    fn eval_deriv(&self, x: f64, k: f64, order: usize) -> Result<f64> {
        if !self.x_grid.interval.contains(x) {
            return domain_err(format!(
                "x = {x} outside sampled state domain [{}, {}]",
                self.x_grid.interval.lo, self.x_grid.interval.hi
            ));
        }
        let nx = self.x_grid.n_points;
        let nk = self.k_grid.n_points;
        let period = self.k_grid.interval.len();
        let theta = k - self.k_grid.interval.lo;
        let mut row_vals = Vec::with_capacity(nx);
        for ix in 0..nx {
            let mut acc = Complex64::new(0.0, 0.0);
            for (im, &m) in self.modes.iter().enumerate() {
                let freq = 2.0 * std::f64::consts::PI * m as f64 / period;
                // the unmatched Nyquist mode of an even-length grid is dropped
                // for odd derivative orders
                if order % 2 == 1 && nk % 2 == 0 && m == -(nk as i64) / 2 {
                    continue;
                }
                let scale = Complex64::new(0.0, freq).powi(order as i32);
                let (s, c) = (freq * theta).sin_cos();
                acc += self.coeffs[ix * nk + im] * scale * Complex64::new(c, s);
            }
            row_vals.push(acc.re);
        }
        let samples: Vec<(f64, f64)> = (0..nx).map(|i| (self.x_grid.point(i), row_vals[i])).collect();
        CubicSpline::new(&samples)?.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eval_examples() {
        let s = WignerState::gauss_packet();
        assert!((s.eval(0.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert!((s.eval(2.0, 0.0).unwrap() - (-1.0f64).exp() / PI).abs() < 1e-16);
        assert!((s.k_decay_width - 0.5 / 2.0f64.sqrt()).abs() < 1e-16);
    }

    #[test]
    fn k_derivative_examples() {
        let s = WignerState::gauss_packet();
        assert_eq!(s.k_derivative(0.7, 0.0, 1).unwrap(), 0.0);
        // -8 k f at (0, 0.5)
        let want = -4.0 * (-1.0f64).exp() / PI;
        assert!((s.k_derivative(0.0, 0.5, 1).unwrap() - want).abs() < 1e-15);
        // order 3 vs Richardson-extrapolated 5-point central differences,
        // base step 1e-2
        let (x, k, h) = (1.0, 0.3, 1e-2);
        let f = |kk: f64| s.eval(x, kk).unwrap();
        let stencil = |h: f64| {
            (f(k + 2.0 * h) - 2.0 * f(k + h) + 2.0 * f(k - h) - f(k - 2.0 * h))
                / (2.0 * h * h * h)
        };
        let fd3 = (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
        let d3 = s.k_derivative(x, k, 3).unwrap();
        assert!(((d3 - fd3) / d3).abs() < 1e-5, "{d3} vs {fd3}");
    }

    #[test]
    fn derivative_consistency_richardson() {
        // relative to the largest derivative magnitude over the point set,
        // since each derivative order has zero crossings
        let s = WignerState::gauss_packet();
        let pts: Vec<(f64, f64)> = (0..10)
            .flat_map(|i| (0..10).map(move |j| (-3.0 + 0.67 * i as f64, -1.2 + 0.26 * j as f64)))
            .collect();
        for order in 1..=7usize {
            let h = 0.02;
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for &(x, k) in &pts {
                let lower = |kk: f64| {
                    if order == 1 {
                        s.eval(x, kk).unwrap()
                    } else {
                        s.k_derivative(x, kk, order - 1).unwrap()
                    }
                };
                let d_h = (lower(k + h) - lower(k - h)) / (2.0 * h);
                let d_h2 = (lower(k + 0.5 * h) - lower(k - 0.5 * h)) / h;
                let richardson = (4.0 * d_h2 - d_h) / 3.0;
                let exact = s.k_derivative(x, k, order).unwrap();
                worst = worst.max((richardson - exact).abs());
                scale = scale.max(exact.abs());
            }
            assert!(worst < 1e-5 * scale, "order {order}: defect {worst} at scale {scale}");
        }
    }

    #[test]
    fn parity() {
        let s = WignerState::gauss_packet();
        for &(x, k) in &[(0.3, 0.9), (1.7, 0.1), (2.2, 1.4)] {
            assert_eq!(s.eval(x, k).unwrap(), s.eval(-x, k).unwrap());
            assert_eq!(s.eval(x, k).unwrap(), s.eval(x, -k).unwrap());
        }
        for order in [1usize, 3, 5, 7] {
            assert_eq!(s.k_derivative(1.1, 0.0, order).unwrap(), 0.0);
        }
    }

    fn sample_packet(nx: usize, nk: usize) -> WignerState {
        let packet = WignerState::gauss_packet();
        let xg = UniformGrid::closed(Interval::new(-10.0, 10.0).unwrap(), nx).unwrap();
        let kg = UniformGrid::periodic(Interval::new(-2.0 * PI, 2.0 * PI).unwrap(), nk).unwrap();
        WignerState::sampled_from_fn(|x, k| packet.eval(x, k).unwrap(), xg, kg).unwrap()
    }

    #[test]
    fn spectral_round_trip() {
        let s = sample_packet(33, 64);
        let (xg, kg, vals) = match &s.kind {
            StateKind::Sampled(ss) => (ss.x_grid, ss.k_grid, ss.values.clone()),
            _ => unreachable!(),
        };
        for ix in (0..xg.n_points).step_by(5) {
            for ik in (0..kg.n_points).step_by(7) {
                let got = s.eval(xg.point(ix), kg.point(ik)).unwrap();
                assert!(
                    (got - vals[ix * kg.n_points + ik]).abs() < 1e-12,
                    "round trip at ({ix},{ik})"
                );
            }
        }
    }

    #[test]
    fn sampled_off_grid_accuracy() {
        // k-interpolation is spectral; x-interpolation is a cubic spline, so
        // off-grid accuracy is set by the x-sampling density
        let packet = WignerState::gauss_packet();
        let coarse = sample_packet(129, 129);
        let err = (coarse.eval(0.37, 1.21).unwrap() - packet.eval(0.37, 1.21).unwrap()).abs();
        assert!(err < 1e-4, "coarse-x sampling: {err}");
        let dense = sample_packet(2049, 129);
        for &(x, k) in &[(0.37, 1.21), (-3.3, 0.4), (5.05, -2.17)] {
            let err = (dense.eval(x, k).unwrap() - packet.eval(x, k).unwrap()).abs();
            assert!(err < 1e-10, "dense sampling at ({x},{k}): {err}");
        }
        // spectral k-derivative against the closed form
        let d = dense.k_derivative(0.37, 1.21, 1).unwrap();
        let want = packet.k_derivative(0.37, 1.21, 1).unwrap();
        assert!((d - want).abs() < 1e-8, "{d} vs {want}");
        // x outside the sampled domain is refused
        assert!(dense.eval(10.4, 0.0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let s = sample_packet(17, 16);
        let dir = std::env::temp_dir().join("psido_state_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.txt");
        s.to_file(&path).unwrap();
        let loaded = WignerState::from_file(&path).unwrap();
        for &(x, k) in &[(0.0, 0.0), (-4.4, 1.3), (7.7, -2.0)] {
            assert!((loaded.eval(x, k).unwrap() - s.eval(x, k).unwrap()).abs() < 1e-12);
        }
    }
}
