//! The four truncation schemes for the pseudo-differential term, evaluated
//! over a phase-space grid, plus the prior error estimators used for
//! parameter selection.
//!
//! All schemes accumulate in complex arithmetic; the result of a real state
//! under a real potential is real up to cancellation, and the residual
//! imaginary magnitude is recorded on the field as `realness_defect`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config_err, Error, Result};
use crate::grid::{gauss_legendre, gauss_legendre_osc, Interval, QuadratureRule, UniformGrid};
use crate::potential::Potential;
use crate::state::WignerState;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Order/panel selection for the quadrature behind a scheme. With
/// `panels: None` the panel count adapts to the integrand's oscillation
/// (at least one panel per unit length).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub order: usize,
    pub panels: Option<usize>,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { order: 32, panels: None }
    }
}

impl QuadSpec {
    pub fn rule(&self, interval: Interval, max_freq: f64) -> Result<QuadratureRule> {
        match self.panels {
            Some(p) => gauss_legendre(interval, self.order, p),
            None => gauss_legendre_osc(interval, self.order, max_freq),
        }
    }

    pub fn refined(&self, interval: Interval, max_freq: f64) -> Self {
        let panels = self
            .panels
            .unwrap_or_else(|| crate::grid::panels_for(interval, self.order, max_freq));
        Self { order: self.order, panels: Some(2 * panels) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YConfig {
    pub l_y: f64,
    pub n_mu: usize,
    pub quad: QuadSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KConfig {
    pub l_k: f64,
    pub n_xi: usize,
    pub quad: QuadSpec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MConfig {
    pub p: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FConfig {
    pub n_nu: usize,
    pub x_domain: Interval,
    pub quad: QuadSpec,
}

/// Scheme tag plus its pending parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationConfig {
    Y(YConfig),
    K(KConfig),
    M(MConfig),
    F(FConfig),
}

impl std::fmt::Display for TruncationConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TruncationConfig::Y(c) => write!(f, "y(l_y={}, n_mu={})", c.l_y, c.n_mu),
            TruncationConfig::K(c) => write!(f, "k(l_k={}, n_xi={})", c.l_k, c.n_xi),
            TruncationConfig::M(c) => write!(f, "m(p={})", c.p),
            TruncationConfig::F(c) => write!(
                f,
                "f(n_nu={}, x_domain=[{}, {}])",
                c.n_nu, c.x_domain.lo, c.x_domain.hi
            ),
        }
    }
}

/// Rectangular evaluation grid over phase space.
#[derive(Debug, Clone, Copy)]
pub struct EvalGrid {
    pub x: UniformGrid,
    pub k: UniformGrid,
}

impl EvalGrid {
    pub fn new(x_domain: Interval, k_domain: Interval, nx: usize, nk: usize) -> Result<Self> {
        Ok(Self {
            x: UniformGrid::closed(x_domain, nx)?,
            k: UniformGrid::closed(k_domain, nk)?,
        })
    }

    pub fn max_abs_k(&self) -> f64 {
        self.k.interval.lo.abs().max(self.k.interval.hi.abs())
    }
}

/// Complex samples of the pseudo-differential term on an evaluation grid.
#[derive(Debug, Clone)]
pub struct PsiDoField {
    pub x_grid: UniformGrid,
    pub k_grid: UniformGrid,
    /// row-major: `values[ix * nk + ik]`
    pub values: Vec<Complex64>,
    pub scheme: TruncationConfig,
    /// max |Im| over the grid; a numerical-health diagnostic
    pub realness_defect: f64,
}

impl PsiDoField {
    fn from_values(grid: &EvalGrid, values: Vec<Complex64>, scheme: TruncationConfig) -> Self {
        let realness_defect = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        Self { x_grid: grid.x, k_grid: grid.k, values, scheme, realness_defect }
    }

    pub fn nx(&self) -> usize {
        self.x_grid.n_points
    }

    pub fn nk(&self) -> usize {
        self.k_grid.n_points
    }

    pub fn at(&self, ix: usize, ik: usize) -> Complex64 {
        self.values[ix * self.nk() + ik]
    }

    pub fn re(&self, ix: usize, ik: usize) -> f64 {
        self.at(ix, ik).re
    }

    pub fn max_abs_re(&self) -> f64 {
        self.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max)
    }
}

fn fill_rows<F>(grid: &EvalGrid, row_fn: F) -> Result<Vec<Complex64>>
where
    F: Fn(usize, f64, &mut [Complex64]) -> Result<()> + Sync,
{
    let nk = grid.k.n_points;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.x.n_points * nk];
    values
        .par_chunks_mut(nk)
        .enumerate()
        .try_for_each(|(ix, row)| row_fn(ix, grid.x.point(ix), row))?;
    Ok(values)
}

fn cis(theta: f64) -> Complex64 {
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// Direct truncation of the y-integral to `[-L_y/2, L_y/2]` with the
/// k-lattice `k_mu = mu * 2*pi/L_y`, `|mu| <= N_mu`:
///
/// `(dk / 2 pi i hbar) * sum_mu f(x, k_mu) * int_Y exp(-i (k - k_mu) y) D_V(x, y) dy`
pub fn y_truncation(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    cfg: &YConfig,
    hbar: f64,
) -> Result<PsiDoField> {
    if !(cfg.l_y > 0.0) {
        return config_err("y-truncation: L_y must be positive");
    }
    if cfg.n_mu < 1 {
        return config_err("y-truncation: N_mu must be at least 1");
    }
    let dk = TWO_PI / cfg.l_y;
    let k_span = cfg.n_mu as f64 * dk;
    if k_span + 1e-9 < grid.max_abs_k() {
        return config_err(format!(
            "y-truncation: k_mu lattice spans {:.4} but the evaluation grid needs {:.4}; \
             increase N_mu",
            k_span,
            grid.max_abs_k()
        ));
    }
    let domain = Interval::symmetric(0.5 * cfg.l_y)?;
    let max_freq = grid.max_abs_k() + k_span;
    let rule = cfg.quad.rule(domain, max_freq)?;
    let nj = rule.len();
    let n_mu = cfg.n_mu as i64;
    let mus: Vec<i64> = (-n_mu..=n_mu).collect();

    // phase tables shared across rows
    let t_mu_y: Vec<Complex64> = mus
        .iter()
        .flat_map(|&mu| {
            let km = mu as f64 * dk;
            rule.nodes.iter().map(move |&y| cis(km * y))
        })
        .collect();
    let e_k_y: Vec<Complex64> = grid
        .k
        .points()
        .flat_map(|k| rule.nodes.iter().map(move |&y| cis(-k * y)))
        .collect();

    let prefactor = Complex64::new(0.0, -1.0) * (dk / (TWO_PI * hbar));
    let values = fill_rows(grid, |_, x, row| {
        let f_mu: Vec<f64> = mus
            .iter()
            .map(|&mu| s.eval(x, mu as f64 * dk))
            .collect::<Result<_>>()?;
        let mut c = vec![Complex64::new(0.0, 0.0); nj];
        for (imu, &fv) in f_mu.iter().enumerate() {
            if fv == 0.0 {
                continue;
            }
            let t = &t_mu_y[imu * nj..(imu + 1) * nj];
            for (cj, tj) in c.iter_mut().zip(t) {
                *cj += tj * fv;
            }
        }
        for (j, cj) in c.iter_mut().enumerate() {
            *cj *= rule.weights[j] * p.dv(x, rule.nodes[j])?;
        }
        for (ik, out) in row.iter_mut().enumerate() {
            let e = &e_k_y[ik * nj..(ik + 1) * nj];
            let mut acc = Complex64::new(0.0, 0.0);
            for (cj, ej) in c.iter().zip(e) {
                acc += cj * ej;
            }
            *out = acc * prefactor;
        }
        Ok(())
    })?;
    Ok(PsiDoField::from_values(grid, values, TruncationConfig::Y(*cfg)))
}

/// Convolution-kernel truncation: the y-lattice `y_xi = xi * 2*pi/L_k`,
/// `0 < |xi| <= N_xi` (the `xi = 0` term vanishes identically), with the
/// k'-integral over `[-L_k/2, L_k/2]`:
///
/// `(dy / 2 pi i hbar) * sum_xi D_V(x, y_xi) * int_K exp(-i (k - k') y_xi) f(x, k') dk'`
pub fn k_truncation(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    cfg: &KConfig,
    hbar: f64,
) -> Result<PsiDoField> {
    let (dy, rule, xis) = k_truncation_setup(grid, cfg)?;
    let nq = rule.len();
    let t_xi_q: Vec<Complex64> = xis
        .iter()
        .flat_map(|&xi| {
            let y = xi as f64 * dy;
            rule.nodes.iter().map(move |&kq| cis(kq * y))
        })
        .collect();
    let e_k_xi: Vec<Complex64> = grid
        .k
        .points()
        .flat_map(|k| xis.iter().map(move |&xi| cis(-k * xi as f64 * dy)))
        .collect();

    let n_terms = xis.len();
    let prefactor = Complex64::new(0.0, -1.0) * (dy / (TWO_PI * hbar));
    let values = fill_rows(grid, |_, x, row| {
        let f_q: Vec<f64> = rule.nodes.iter().map(|&kq| s.eval(x, kq)).collect::<Result<_>>()?;
        let mut c = vec![Complex64::new(0.0, 0.0); n_terms];
        for (i, &xi) in xis.iter().enumerate() {
            let t = &t_xi_q[i * nq..(i + 1) * nq];
            let mut m = Complex64::new(0.0, 0.0);
            for ((w, f), tq) in rule.weights.iter().zip(&f_q).zip(t) {
                m += tq * (w * f);
            }
            c[i] = m * p.dv(x, xi as f64 * dy)?;
        }
        for (ik, out) in row.iter_mut().enumerate() {
            let e = &e_k_xi[ik * n_terms..(ik + 1) * n_terms];
            let mut acc = Complex64::new(0.0, 0.0);
            for (ci, ei) in c.iter().zip(e) {
                acc += ci * ei;
            }
            *out = acc * prefactor;
        }
        Ok(())
    })?;
    Ok(PsiDoField::from_values(grid, values, TruncationConfig::K(*cfg)))
}

fn k_truncation_setup(
    grid: &EvalGrid,
    cfg: &KConfig,
) -> Result<(f64, QuadratureRule, Vec<i64>)> {
    if !(cfg.l_k > 0.0) {
        return config_err("k-truncation: L_k must be positive");
    }
    let half = 0.5 * cfg.l_k;
    if grid.k.interval.lo < -half - 1e-9 || grid.k.interval.hi > half + 1e-9 {
        return config_err(format!(
            "k-truncation: evaluation k-domain [{}, {}] must lie inside [-L_k/2, L_k/2] = [{}, {}]",
            grid.k.interval.lo, grid.k.interval.hi, -half, half
        ));
    }
    let dy = TWO_PI / cfg.l_k;
    let domain = Interval::symmetric(half)?;
    let y_max = cfg.n_xi as f64 * dy;
    let rule = cfg.quad.rule(domain, y_max)?;
    let n = cfg.n_xi as i64;
    let xis: Vec<i64> = (-n..=n).filter(|&xi| xi != 0).collect();
    Ok((dy, rule, xis))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Moyal-series truncation at order `P`:
///
/// `sum_{l=0}^{P} (-1)^l / (hbar 4^l) * V^(2l+1)(x) / (2l+1)! * d^{2l+1} f / dk^{2l+1}`
pub fn m_truncation(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    cfg: &MConfig,
    hbar: f64,
) -> Result<PsiDoField> {
    if p.is_tabulated() && 2 * cfg.p + 1 > 2 {
        return Err(Error::UnsupportedDerivative {
            kind: "tabulated potential (m-truncation needs odd derivatives beyond the spline)",
            order: 2 * cfg.p + 1,
        });
    }
    let coeffs: Vec<f64> = (0..=cfg.p)
        .map(|l| {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            sign / (hbar * 4.0f64.powi(l as i32) * factorial(2 * l + 1))
        })
        .collect();
    let values = fill_rows(grid, |_, x, row| {
        let vder: Vec<f64> = (0..=cfg.p)
            .map(|l| p.derivative(x, 2 * l + 1))
            .collect::<Result<_>>()?;
        for (ik, out) in row.iter_mut().enumerate() {
            let k = grid.k.point(ik);
            let mut acc = 0.0;
            for l in 0..=cfg.p {
                acc += coeffs[l] * vder[l] * s.k_derivative(x, k, 2 * l + 1)?;
            }
            *out = Complex64::new(acc, 0.0);
        }
        Ok(())
    })?;
    Ok(PsiDoField::from_values(grid, values, TruncationConfig::M(*cfg)))
}

/// Force-spectrum truncation with the x-lattice `k'_nu = nu * 2*pi/L_x`:
///
/// `-(dk / 2 pi hbar) F~(0) d_k f(x,k)
///  - (dk / 2 pi hbar) sum_{nu != 0} F~(k'_nu) e^{i k'_nu x}
///        [f(x, k + k'_nu/2) - f(x, k - k'_nu/2)] / k'_nu`
pub fn f_truncation(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    cfg: &FConfig,
    hbar: f64,
) -> Result<PsiDoField> {
    let dk = TWO_PI / cfg.x_domain.len();
    let n = cfg.n_nu as i64;
    let max_freq = cfg.n_nu as f64 * dk;
    let rule = cfg.quad.rule(cfg.x_domain, max_freq)?;
    let spectrum: Vec<Complex64> = (-n..=n)
        .map(|nu| p.force_spectrum(cfg.x_domain, nu as f64 * dk, &rule))
        .collect::<Result<_>>()?;
    let scale = dk / (TWO_PI * hbar);
    let values = fill_rows(grid, |_, x, row| {
        let phases: Vec<Complex64> = (-n..=n).map(|nu| cis(nu as f64 * dk * x)).collect();
        for (ik, out) in row.iter_mut().enumerate() {
            let k = grid.k.point(ik);
            let mut acc = -spectrum[n as usize] * (scale * s.k_derivative(x, k, 1)?);
            for (i, nu) in (-n..=n).enumerate() {
                if nu == 0 {
                    continue;
                }
                let knu = nu as f64 * dk;
                let diff = s.eval(x, k + 0.5 * knu)? - s.eval(x, k - 0.5 * knu)?;
                acc -= spectrum[i] * phases[i] * (scale * diff / knu);
            }
            *out = acc;
        }
        Ok(())
    })?;
    Ok(PsiDoField::from_values(grid, values, TruncationConfig::F(*cfg)))
}

/// Prior error estimator for the k-truncation parameter `N_xi`:
/// the largest magnitude of the boundary term of the xi-sum,
///
/// `g = max_x | dy * D_V(x, y_{N_xi}) * int_K exp(-i (k - k') y_{N_xi}) f(x,k') dk' |`.
///
/// The k-dependence is a unit-modulus phase, so the maximum over the grid
/// reduces to a scan over x.
pub fn g_xi_estimate(
    s: &WignerState,
    p: &Potential,
    grid: &EvalGrid,
    cfg: &KConfig,
) -> Result<f64> {
    let (dy, rule, _) = k_truncation_setup(grid, cfg)?;
    if cfg.n_xi == 0 {
        return Ok(0.0);
    }
    let y_n = cfg.n_xi as f64 * dy;
    let phases: Vec<Complex64> = rule.nodes.iter().map(|&kq| cis(kq * y_n)).collect();
    let mut best: f64 = 0.0;
    for x in grid.x.points() {
        let mut m = Complex64::new(0.0, 0.0);
        for ((&w, &kq), ph) in rule.weights.iter().zip(&rule.nodes).zip(&phases) {
            m += ph * (w * s.eval(x, kq)?);
        }
        best = best.max((dy * p.dv(x, y_n)?).abs() * m.norm());
    }
    Ok(best)
}

/// Prior error estimator for the f-truncation parameter `N_nu`:
/// `g = | dk * F~(k_{N_nu}) / k_{N_nu} |` with `dk = 2*pi/L_x`.
pub fn g_nu_estimate(p: &Potential, cfg: &FConfig) -> Result<f64> {
    if cfg.n_nu < 1 {
        return config_err("g_nu estimate needs N_nu >= 1");
    }
    let dk = TWO_PI / cfg.x_domain.len();
    let k_n = cfg.n_nu as f64 * dk;
    let rule = cfg.quad.rule(cfg.x_domain, k_n)?;
    let ft = p.force_spectrum(cfg.x_domain, k_n, &rule)?;
    Ok(dk * ft.norm() / k_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn packet() -> WignerState {
        WignerState::gauss_packet()
    }

    fn grid_1010(nx: usize, nk: usize) -> EvalGrid {
        EvalGrid::new(
            Interval::new(-10.0, 10.0).unwrap(),
            Interval::new(-2.0 * PI, 2.0 * PI).unwrap(),
            nx,
            nk,
        )
        .unwrap()
    }

    fn zero_potential() -> Potential {
        let samples: Vec<(f64, f64)> = (0..512)
            .map(|i| (-60.0 + 120.0 * i as f64 / 511.0, 0.0))
            .collect();
        Potential::tabulated(&samples, "zero").unwrap()
    }

    fn default_y(l_y: f64, n_mu: usize) -> YConfig {
        YConfig { l_y, n_mu, quad: QuadSpec::default() }
    }

    fn default_k(l_k: f64, n_xi: usize) -> KConfig {
        KConfig { l_k, n_xi, quad: QuadSpec::default() }
    }

    #[test]
    fn zero_potential_gives_zero_field() {
        let g = grid_1010(21, 21);
        let s = packet();
        let p = zero_potential();
        let fy = y_truncation(&s, &p, &g, &default_y(40.0, 40), 1.0).unwrap();
        assert!(fy.values.iter().all(|v| v.norm() <= 1e-15));
        let fk = k_truncation(&s, &p, &g, &default_k(4.0 * PI, 40), 1.0).unwrap();
        assert!(fk.values.iter().all(|v| v.norm() <= 1e-15));
        let gxi = g_xi_estimate(&s, &p, &g, &default_k(4.0 * PI, 20)).unwrap();
        assert_eq!(gxi, 0.0);
    }

    #[test]
    fn config_preconditions() {
        let g = grid_1010(11, 11);
        let s = packet();
        let p = Potential::gauss_barrier();
        // k_mu lattice not spanning the evaluation k-domain
        assert!(y_truncation(&s, &p, &g, &default_y(40.0, 10), 1.0).is_err());
        // evaluation k-domain outside [-L_k/2, L_k/2]
        assert!(k_truncation(&s, &p, &g, &default_k(2.0 * PI, 20), 1.0).is_err());
        // tabulated potential cannot feed Moyal terms beyond the spline
        let tab = zero_potential();
        assert!(matches!(
            m_truncation(&s, &tab, &g, &MConfig { p: 1 }, 1.0),
            Err(Error::UnsupportedDerivative { .. })
        ));
        assert!(m_truncation(&s, &tab, &g, &MConfig { p: 0 }, 1.0).is_ok());
    }

    #[test]
    fn m_truncation_vanishes_where_force_does() {
        // gauss barrier has V'(0) = 0, so the P=0 field is zero along x = 0
        let g = grid_1010(21, 21);
        let field = m_truncation(&packet(), &Potential::gauss_barrier(), &g, &MConfig { p: 0 }, 1.0)
            .unwrap();
        let ix0 = 10; // x = 0 on this grid
        for ik in 0..field.nk() {
            assert_eq!(field.re(ix0, ik), 0.0);
        }
    }

    #[test]
    fn parity_and_realness() {
        let g = grid_1010(41, 41);
        let s = packet();
        let p = Potential::gauss_barrier();
        let fields = [
            y_truncation(&s, &p, &g, &default_y(40.0, 40), 1.0).unwrap(),
            k_truncation(&s, &p, &g, &default_k(4.0 * PI, 40), 1.0).unwrap(),
            m_truncation(&s, &p, &g, &MConfig { p: 2 }, 1.0).unwrap(),
            f_truncation(
                &s,
                &p,
                &g,
                &FConfig {
                    n_nu: 30,
                    x_domain: Interval::new(-10.0, 10.0).unwrap(),
                    quad: QuadSpec::default(),
                },
                1.0,
            )
            .unwrap(),
        ];
        for field in &fields {
            let scale = field.max_abs_re();
            assert!(
                field.realness_defect <= 1e-10 * (1.0 + scale),
                "{}: defect {} vs scale {}",
                field.scheme,
                field.realness_defect,
                scale
            );
            let (nx, nk) = (field.nx(), field.nk());
            for ix in 0..nx {
                for ik in 0..nk {
                    let v = field.re(ix, ik);
                    let vx = field.re(nx - 1 - ix, ik);
                    let vk = field.re(ix, nk - 1 - ik);
                    assert!((v + vx).abs() <= 1e-10 * (1.0 + scale), "{}: x-parity", field.scheme);
                    assert!((v + vk).abs() <= 1e-10 * (1.0 + scale), "{}: k-parity", field.scheme);
                }
            }
        }
    }

    #[test]
    fn mass_conservation_k() {
        // (nk-1) * grid spacing = L_k, so each lattice mode sums to zero over
        // the open period
        let g = grid_1010(31, 101);
        let field =
            k_truncation(&packet(), &Potential::gauss_barrier(), &g, &default_k(4.0 * PI, 40), 1.0)
                .unwrap();
        let dk_grid = g.k.spacing();
        let scale = field.max_abs_re();
        for ix in 0..field.nx() {
            let mass: f64 = (0..field.nk() - 1).map(|ik| field.re(ix, ik)).sum::<f64>() * dk_grid;
            assert!(mass.abs() <= 1e-12 * scale, "row {ix}: mass {mass}");
        }
    }

    #[test]
    fn mass_conservation_y() {
        // sum over the scheme's own dual lattice k_i = i * 2pi/L_y; the
        // lattice extends past the state's support so the tail is negligible
        let l_y = 40.0;
        let dk = TWO_PI / l_y;
        let i_max = ((2.0 * PI + 6.0) / dk).ceil() as usize;
        let g = EvalGrid::new(
            Interval::new(-10.0, 10.0).unwrap(),
            Interval::symmetric(i_max as f64 * dk).unwrap(),
            31,
            2 * i_max + 1,
        )
        .unwrap();
        let field =
            y_truncation(&packet(), &Potential::gauss_barrier(), &g, &default_y(l_y, i_max), 1.0)
                .unwrap();
        let scale = field.max_abs_re();
        for ix in 0..field.nx() {
            let mass: f64 = (0..field.nk()).map(|ik| field.re(ix, ik)).sum::<f64>() * dk;
            assert!(mass.abs() <= 1e-12 * scale, "row {ix}: mass {mass}");
        }
    }

    #[test]
    fn cross_scheme_agreement() {
        let g = grid_1010(41, 41);
        let s = packet();
        let p = Potential::gauss_barrier();
        let fy = y_truncation(&s, &p, &g, &default_y(40.0, 40), 1.0).unwrap();
        let fk = k_truncation(&s, &p, &g, &default_k(4.0 * PI, 40), 1.0).unwrap();
        let ff = f_truncation(
            &s,
            &p,
            &g,
            &FConfig {
                n_nu: 30,
                x_domain: Interval::new(-10.0, 10.0).unwrap(),
                quad: QuadSpec::default(),
            },
            1.0,
        )
        .unwrap();
        for i in 0..fy.values.len() {
            assert!((fy.values[i].re - fk.values[i].re).abs() <= 1e-10);
            assert!((fy.values[i].re - ff.values[i].re).abs() <= 1e-10);
        }
    }

    #[test]
    fn f_truncation_on_linear_ramp_matches_classical_term() {
        // V = c x tabulated on the x-domain: every nonzero lattice mode of
        // F~ vanishes (sin(nu pi) = 0) and the nu = 0 limit reproduces the
        // leading Moyal term exactly
        let samples: Vec<(f64, f64)> = (0..101)
            .map(|i| {
                let x = -10.0 + 20.0 * i as f64 / 100.0;
                (x, 0.25 * x)
            })
            .collect();
        let ramp = Potential::tabulated(&samples, "ramp").unwrap();
        let g = grid_1010(41, 21);
        let s = packet();
        let ff = f_truncation(
            &s,
            &ramp,
            &g,
            &FConfig {
                n_nu: 20,
                x_domain: Interval::new(-10.0, 10.0).unwrap(),
                quad: QuadSpec::default(),
            },
            1.0,
        )
        .unwrap();
        let fm = m_truncation(&s, &ramp, &g, &MConfig { p: 0 }, 1.0).unwrap();
        for ix in 0..g.x.n_points {
            let x = g.x.point(ix);
            if x.abs() > 5.0 {
                continue;
            }
            for ik in 0..g.k.n_points {
                let d = (ff.re(ix, ik) - fm.re(ix, ik)).abs();
                assert!(d <= 1e-6, "at x={x}: {d}");
            }
        }
    }

    #[test]
    fn g_nu_scales_linearly_in_dk() {
        // same physical wavenumber k_N = pi, halved domain doubles dk
        let p = Potential::gauss_barrier();
        let g_full = g_nu_estimate(
            &p,
            &FConfig {
                n_nu: 10,
                x_domain: Interval::new(-10.0, 10.0).unwrap(),
                quad: QuadSpec::default(),
            },
        )
        .unwrap();
        let g_half = g_nu_estimate(
            &p,
            &FConfig {
                n_nu: 5,
                x_domain: Interval::new(-5.0, 5.0).unwrap(),
                quad: QuadSpec::default(),
            },
        )
        .unwrap();
        // the half-domain F~ differs only by the force tail beyond x = 5
        assert!((g_half / g_full - 2.0).abs() < 2e-3, "ratio {}", g_half / g_full);
    }

    #[test]
    fn g_estimates_validate_input() {
        let p = Potential::gauss_barrier();
        assert!(g_nu_estimate(
            &p,
            &FConfig {
                n_nu: 0,
                x_domain: Interval::new(-10.0, 10.0).unwrap(),
                quad: QuadSpec::default(),
            }
        )
        .is_err());
        let g = grid_1010(11, 11);
        let zero_n = g_xi_estimate(&packet(), &p, &g, &default_k(4.0 * PI, 0)).unwrap();
        assert_eq!(zero_n, 0.0);
    }
}
