//! Experiment runner: parameter sweeps over the truncation schemes against a
//! chosen oracle, estimator-guided parameter advice, and CSV/JSON emission.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{config_err, Error, Result};
use crate::grid::Interval;
use crate::operators::{
    f_truncation, g_nu_estimate, g_xi_estimate, k_truncation, m_truncation, y_truncation,
    EvalGrid, FConfig, KConfig, MConfig, QuadSpec, TruncationConfig, YConfig,
};
use crate::reference::{
    brute_force_field, double_well_reference, gauss_barrier_reference, linf_error,
};
use crate::potential::Potential;
use crate::state::WignerState;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    GaussBarrier,
    DoubleWell { a: f64, b: f64 },
    File(PathBuf),
    RtdSurrogate { n_samples: usize, domain: Interval },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        match self {
            PotentialSpec::GaussBarrier => Ok(Potential::gauss_barrier()),
            PotentialSpec::DoubleWell { a, b } => Potential::double_well(*a, *b),
            PotentialSpec::File(path) => Potential::from_file(path),
            PotentialSpec::RtdSurrogate { n_samples, domain } => {
                Potential::make_rtd_like_tabulated(*n_samples, *domain)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    GaussPacket,
    File(PathBuf),
}

impl StateSpec {
    pub fn build(&self) -> Result<WignerState> {
        match self {
            StateSpec::GaussPacket => Ok(WignerState::gauss_packet()),
            StateSpec::File(path) => WignerState::from_file(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleKind {
    Analytic,
    Moyal,
    BruteForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Ly,
    NMu,
    Lk,
    NXi,
    NNu,
    P,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Ly => "ly",
            SweepParam::NMu => "nmu",
            SweepParam::Lk => "lk",
            SweepParam::NXi => "nxi",
            SweepParam::NNu => "nnu",
            SweepParam::P => "p",
        }
    }

    fn belongs_to(&self, scheme: &TruncationConfig) -> bool {
        matches!(
            (self, scheme),
            (SweepParam::Ly | SweepParam::NMu, TruncationConfig::Y(_))
                | (SweepParam::Lk | SweepParam::NXi, TruncationConfig::K(_))
                | (SweepParam::NNu, TruncationConfig::F(_))
                | (SweepParam::P, TruncationConfig::M(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

/// One benchmark: a (potential, state, scheme) triple swept over one
/// parameter and compared against an oracle on a fixed evaluation grid.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub potential: PotentialSpec,
    pub state: StateSpec,
    pub x_domain: Interval,
    pub k_domain: Interval,
    pub scheme: TruncationConfig,
    pub sweep: (SweepParam, Vec<f64>),
    pub oracle: OracleKind,
    pub grid: (usize, usize),
    pub hbar: f64,
    pub format: EmitFormat,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub eps_inf: Option<f64>,
    pub estimator: Option<f64>,
    pub realness_defect: Option<f64>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if !self.sweep.0.belongs_to(&self.scheme) {
            return config_err(format!(
                "sweep parameter '{}' does not belong to scheme {}",
                self.sweep.0.name(),
                self.scheme
            ));
        }
        match self.oracle {
            OracleKind::Analytic => {
                if self.potential != PotentialSpec::GaussBarrier {
                    return config_err("analytic oracle is only available for the gauss barrier");
                }
            }
            OracleKind::Moyal => {
                if !matches!(self.potential, PotentialSpec::DoubleWell { .. }) {
                    return config_err("moyal oracle needs a polynomial potential");
                }
            }
            OracleKind::BruteForce => {}
        }
        Ok(())
    }

    fn config_for(&self, value: f64) -> TruncationConfig {
        let k_hi = self.k_domain.lo.abs().max(self.k_domain.hi.abs());
        match (&self.scheme, self.sweep.0) {
            (TruncationConfig::Y(c), SweepParam::Ly) => {
                // the k_mu lattice keeps covering the evaluation k-domain
                let n_mu = (k_hi * value / TWO_PI - 1e-12).ceil() as usize;
                TruncationConfig::Y(YConfig { l_y: value, n_mu: n_mu.max(1), ..*c })
            }
            (TruncationConfig::Y(c), SweepParam::NMu) => {
                TruncationConfig::Y(YConfig { n_mu: value as usize, ..*c })
            }
            (TruncationConfig::K(c), SweepParam::Lk) => {
                TruncationConfig::K(KConfig { l_k: value, ..*c })
            }
            (TruncationConfig::K(c), SweepParam::NXi) => {
                TruncationConfig::K(KConfig { n_xi: value as usize, ..*c })
            }
            (TruncationConfig::F(c), SweepParam::NNu) => {
                TruncationConfig::F(FConfig { n_nu: value as usize, ..*c })
            }
            (TruncationConfig::M(_), SweepParam::P) => {
                TruncationConfig::M(MConfig { p: value as usize })
            }
            _ => self.scheme,
        }
    }
}

/// Default y-range for the brute-force oracle: wide enough that either the
/// potential has decayed below 1e-18 at every reachable `x +- y/2`, or the
/// tabulated support is exhausted. Polynomial potentials use the saturation
/// range of the y-truncation instead.
pub fn default_y_cut(p: &Potential, x_max: f64) -> f64 {
    if p.is_polynomial() {
        return 50.0;
    }
    if let Some(sup) = p.support() {
        return 2.0 * (sup.hi.min(-sup.lo) - x_max).max(1.0);
    }
    let mut reach = 1.0;
    while reach < 200.0 {
        if p.value(reach).map(f64::abs).unwrap_or(0.0) < 1e-18
            && p.value(-reach).map(f64::abs).unwrap_or(0.0) < 1e-18
        {
            break;
        }
        reach += 1.0;
    }
    2.0 * (reach + x_max)
}

/// Largest |V| at x = +- L_y/4: the magnitude of the potential at the edge
/// of the y-window as seen through `D_V` around x = 0. Local potentials
/// need this at machine zero for the y-truncation to reach machine
/// precision. Tabulated potentials are read at the edge of their support
/// when the window reaches past it.
pub fn y_window_tail(p: &Potential, l_y: f64) -> Result<f64> {
    let mut probe = 0.25 * l_y;
    if let Some(sup) = p.support() {
        probe = probe.min(sup.hi).min(-sup.lo);
    }
    Ok(p.value(probe)?.abs().max(p.value(-probe)?.abs()))
}

fn oracle_values(
    spec: &ExperimentSpec,
    p: &Potential,
    s: &WignerState,
    grid: &EvalGrid,
) -> Result<Vec<f64>> {
    let nx = grid.x.n_points;
    let nk = grid.k.n_points;
    match spec.oracle {
        OracleKind::Analytic => {
            let mut vals = vec![0.0; nx * nk];
            vals.par_chunks_mut(nk).enumerate().for_each(|(ix, row)| {
                let x = grid.x.point(ix);
                for (ik, out) in row.iter_mut().enumerate() {
                    *out = gauss_barrier_reference(
                        x,
                        grid.k.point(ik),
                        &QuadSpec::default(),
                        10.0,
                        spec.hbar,
                    );
                }
            });
            Ok(vals)
        }
        OracleKind::Moyal => {
            let (a, b) = match spec.potential {
                PotentialSpec::DoubleWell { a, b } => (a, b),
                _ => unreachable!("validated"),
            };
            let mut vals = vec![0.0; nx * nk];
            for ix in 0..nx {
                for ik in 0..nk {
                    vals[ix * nk + ik] = double_well_reference(
                        s,
                        grid.x.point(ix),
                        grid.k.point(ik),
                        a,
                        b,
                        spec.hbar,
                    )?;
                }
            }
            Ok(vals)
        }
        OracleKind::BruteForce => {
            let x_max = grid.x.interval.lo.abs().max(grid.x.interval.hi.abs());
            let y_cut = default_y_cut(p, x_max);
            let (vals, _delta) =
                brute_force_field(s, p, grid, y_cut, &QuadSpec::default(), spec.hbar)?;
            Ok(vals)
        }
    }
}

/// Run the sweep: one row per parameter value, deterministic given the spec.
/// Scheme/potential incompatibilities are reported per row, not as a crash.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let p = spec.potential.build()?;
    let s = spec.state.build()?;
    let grid = EvalGrid::new(spec.x_domain, spec.k_domain, spec.grid.0, spec.grid.1)?;
    if spec.sweep.1.is_empty() {
        return Ok(Vec::new());
    }
    let oracle = oracle_values(spec, &p, &s, &grid)?;
    let nk = grid.k.n_points;
    let mut rows = Vec::with_capacity(spec.sweep.1.len());
    for &value in &spec.sweep.1 {
        let t0 = Instant::now();
        let cfg = spec.config_for(value);
        let outcome = (|| -> Result<(f64, Option<f64>, f64)> {
            let field = match &cfg {
                TruncationConfig::Y(c) => y_truncation(&s, &p, &grid, c, spec.hbar)?,
                TruncationConfig::K(c) => k_truncation(&s, &p, &grid, c, spec.hbar)?,
                TruncationConfig::M(c) => m_truncation(&s, &p, &grid, c, spec.hbar)?,
                TruncationConfig::F(c) => f_truncation(&s, &p, &grid, c, spec.hbar)?,
            };
            let report = linf_error(&field, |x, k| {
                let ix = ((x - grid.x.interval.lo) / grid.x.spacing()).round() as usize;
                let ik = ((k - grid.k.interval.lo) / grid.k.spacing()).round() as usize;
                oracle[ix * nk + ik]
            });
            let estimator = match &cfg {
                TruncationConfig::K(c) if c.n_xi > 0 => Some(g_xi_estimate(&s, &p, &grid, c)?),
                TruncationConfig::F(c) if c.n_nu > 0 => Some(g_nu_estimate(&p, c)?),
                _ => None,
            };
            Ok((report.eps_inf, estimator, report.realness_defect))
        })();
        let wall = t0.elapsed().as_secs_f64();
        rows.push(match outcome {
            Ok((eps, est, defect)) => SweepRow {
                param: value,
                eps_inf: Some(eps),
                estimator: est,
                realness_defect: Some(defect),
                wall_time_s: wall,
                error: None,
            },
            Err(e) => SweepRow {
                param: value,
                eps_inf: None,
                estimator: None,
                realness_defect: None,
                wall_time_s: wall,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Y,
    K,
    M,
    F,
}

#[derive(Debug, Clone)]
pub struct Advice {
    pub config: TruncationConfig,
    pub warnings: Vec<String>,
}

/// Pick scheme parameters for a target accuracy.
///
/// y: smallest even L_y whose window tail sits below the target (local
/// potentials), or an error scan against the exact Moyal form (polynomial
/// potentials, where the tail criterion does not apply). k: lock L_k to the
/// evaluation k-domain and scan the g estimator. f: scan the g estimator.
/// m: exact order for polynomials, refused otherwise.
pub fn advise_parameters(
    p: &Potential,
    s: &WignerState,
    x_domain: Interval,
    k_domain: Interval,
    scheme: SchemeKind,
    target_eps: f64,
) -> Result<Advice> {
    if !(target_eps > 0.0) {
        return config_err("target accuracy must be positive");
    }
    let k_hi = k_domain.lo.abs().max(k_domain.hi.abs());
    let mut warnings = Vec::new();
    let config = match scheme {
        SchemeKind::Y => {
            if p.is_polynomial() {
                warnings.push(
                    "the window-tail criterion does not apply to unbounded potentials; \
                     scanning the error against the exact Moyal form instead"
                        .into(),
                );
                let grid = EvalGrid::new(x_domain, k_domain, 41, 41)?;
                let mut best: Option<(f64, usize, f64)> = None;
                let mut l = 10.0f64;
                while l <= 120.0 {
                    let n_mu = ((k_hi * l / TWO_PI - 1e-12).ceil() as usize).max(1);
                    let cfg = YConfig { l_y: l, n_mu, quad: QuadSpec::default() };
                    let field = y_truncation(s, p, &grid, &cfg, 1.0)?;
                    let report = linf_error(&field, |x, k| {
                        moyal_exact(p, s, x, k).unwrap_or(f64::NAN)
                    });
                    if best.map_or(true, |(e, _, _)| report.eps_inf < e) {
                        best = Some((report.eps_inf, n_mu, l));
                    }
                    if report.eps_inf <= target_eps {
                        break;
                    }
                    l += 2.0;
                }
                let (eps, n_mu, l) = best.unwrap();
                if eps > target_eps {
                    warnings.push(format!(
                        "error saturates at {eps:.3e} before reaching the target; returning the best L_y"
                    ));
                }
                TruncationConfig::Y(YConfig { l_y: l, n_mu, quad: QuadSpec::default() })
            } else {
                let mut l = 2.0f64;
                while y_window_tail(p, l)? > target_eps && l < 400.0 {
                    l += 2.0;
                }
                let n_mu = ((k_hi * l / TWO_PI - 1e-12).ceil() as usize).max(1);
                TruncationConfig::Y(YConfig { l_y: l, n_mu, quad: QuadSpec::default() })
            }
        }
        SchemeKind::K => {
            let l_k = 2.0 * k_hi;
            let grid = EvalGrid::new(x_domain, k_domain, 201, 2)?;
            let mut n_xi = 0usize;
            for n in 1..=400usize {
                let g = g_xi_estimate(s, p, &grid, &KConfig { l_k, n_xi: n, quad: QuadSpec::default() })?;
                if g <= target_eps {
                    // an identically zero first term means a zero potential:
                    // the minimal configuration suffices
                    n_xi = if n == 1 && g == 0.0 { 0 } else { n };
                    break;
                }
                n_xi = n;
                if n == 400 {
                    warnings.push(format!(
                        "estimator still {g:.3e} at N_xi = 400; returning the cap"
                    ));
                }
            }
            TruncationConfig::K(KConfig { l_k, n_xi, quad: QuadSpec::default() })
        }
        SchemeKind::F => {
            let mut n_nu = 0usize;
            for n in 1..=400usize {
                let cfg = FConfig { n_nu: n, x_domain, quad: QuadSpec::default() };
                let g = g_nu_estimate(p, &cfg)?;
                if g <= target_eps {
                    n_nu = if n == 1 && g == 0.0 { 0 } else { n };
                    break;
                }
                n_nu = n;
                if n == 400 {
                    warnings.push(format!(
                        "estimator still {g:.3e} at N_nu = 400; returning the cap"
                    ));
                }
            }
            TruncationConfig::F(FConfig { n_nu, x_domain, quad: QuadSpec::default() })
        }
        SchemeKind::M => {
            if !p.is_polynomial() {
                return config_err(
                    "the Moyal series shows no convergence trend for non-polynomial potentials; \
                     refusing to advise an order",
                );
            }
            // quartic: derivatives vanish beyond order 4, so 2P+1 = 3 terms suffice
            TruncationConfig::M(MConfig { p: 1 })
        }
    };
    Ok(Advice { config, warnings })
}

fn moyal_exact(p: &Potential, s: &WignerState, x: f64, k: f64) -> Result<f64> {
    // exact for quartic potentials; used by the advisor's fallback scan
    let d1 = s.k_derivative(x, k, 1)?;
    let d3 = s.k_derivative(x, k, 3)?;
    Ok(p.derivative(x, 1)? * d1 - p.derivative(x, 3)? / 24.0 * d3)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.5e}")).unwrap_or_default()
}

/// Write sweep rows. CSV: fixed header, 6-significant-digit scientific
/// floats, empty cell for an absent estimator, `#` comment lines for notes
/// and per-row errors. JSON: array of row objects with the same keys.
pub fn emit(
    rows: &[SweepRow],
    format: EmitFormat,
    note: Option<&str>,
    out: &mut impl Write,
) -> Result<()> {
    match format {
        EmitFormat::Csv => {
            if let Some(note) = note {
                writeln!(out, "# {note}")?;
            }
            writeln!(out, "param,eps_inf,estimator,realness_defect,wall_time_s")?;
            for row in rows {
                if let Some(err) = &row.error {
                    writeln!(out, "# error at param={}: {err}", row.param)?;
                    continue;
                }
                writeln!(
                    out,
                    "{},{},{},{},{:.5e}",
                    row.param,
                    fmt_opt(row.eps_inf),
                    fmt_opt(row.estimator),
                    fmt_opt(row.realness_defect),
                    row.wall_time_s
                )?;
            }
        }
        EmitFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)
                .map_err(|e| Error::Parse(format!("json emit: {e}")))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Built-in experiment presets covering both benchmark potentials and the
/// tabulated surrogate.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let x1010 = Interval::new(-10.0, 10.0).unwrap();
    let x1515 = Interval::new(-15.0, 15.0).unwrap();
    let k2pi = Interval::new(-TWO_PI, TWO_PI).unwrap();
    let quad = QuadSpec::default();
    let spec = match name {
        "table1" => ExperimentSpec {
            potential: PotentialSpec::GaussBarrier,
            state: StateSpec::GaussPacket,
            x_domain: x1010,
            k_domain: k2pi,
            scheme: TruncationConfig::Y(YConfig { l_y: 40.0, n_mu: 40, quad }),
            sweep: (SweepParam::Ly, vec![20.0, 24.0, 28.0, 32.0, 36.0, 40.0]),
            oracle: OracleKind::Analytic,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table2" => ExperimentSpec {
            potential: PotentialSpec::GaussBarrier,
            state: StateSpec::GaussPacket,
            x_domain: x1010,
            k_domain: k2pi,
            scheme: TruncationConfig::K(KConfig { l_k: 2.0 * TWO_PI, n_xi: 40, quad }),
            sweep: (SweepParam::NXi, vec![20.0, 24.0, 28.0, 32.0, 36.0, 40.0]),
            oracle: OracleKind::Analytic,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table3" => ExperimentSpec {
            potential: PotentialSpec::GaussBarrier,
            state: StateSpec::GaussPacket,
            x_domain: x1010,
            k_domain: k2pi,
            scheme: TruncationConfig::F(FConfig { n_nu: 30, x_domain: x1010, quad }),
            sweep: (SweepParam::NNu, vec![10.0, 14.0, 18.0, 22.0, 26.0, 30.0]),
            oracle: OracleKind::Analytic,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table4" => ExperimentSpec {
            potential: PotentialSpec::DoubleWell { a: 1.0, b: 2.0 },
            state: StateSpec::GaussPacket,
            x_domain: x1515,
            k_domain: k2pi,
            scheme: TruncationConfig::Y(YConfig { l_y: 55.0, n_mu: 55, quad }),
            sweep: (SweepParam::Ly, vec![30.0, 35.0, 40.0, 45.0, 50.0, 55.0]),
            oracle: OracleKind::Moyal,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table5" => ExperimentSpec {
            potential: PotentialSpec::DoubleWell { a: 1.0, b: 2.0 },
            state: StateSpec::GaussPacket,
            x_domain: x1515,
            k_domain: k2pi,
            scheme: TruncationConfig::K(KConfig { l_k: 2.0 * TWO_PI, n_xi: 70, quad }),
            sweep: (SweepParam::NXi, vec![20.0, 30.0, 40.0, 50.0, 60.0, 70.0]),
            oracle: OracleKind::Moyal,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table6" => ExperimentSpec {
            potential: PotentialSpec::DoubleWell { a: 1.0, b: 2.0 },
            state: StateSpec::GaussPacket,
            x_domain: x1515,
            k_domain: k2pi,
            scheme: TruncationConfig::F(FConfig { n_nu: 120, x_domain: x1515, quad }),
            sweep: (
                SweepParam::NNu,
                vec![30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0],
            ),
            oracle: OracleKind::Moyal,
            grid: (201, 201),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: None,
        },
        "table7" => ExperimentSpec {
            potential: PotentialSpec::RtdSurrogate {
                n_samples: 16641,
                domain: Interval::new(-26.0, 26.0).unwrap(),
            },
            state: StateSpec::GaussPacket,
            x_domain: x1010,
            k_domain: k2pi,
            scheme: TruncationConfig::K(KConfig { l_k: 2.0 * TWO_PI, n_xi: 60, quad }),
            sweep: (SweepParam::NXi, vec![20.0, 30.0, 40.0, 45.0, 50.0, 60.0]),
            oracle: OracleKind::BruteForce,
            // the dense-quadrature oracle sets the cost; a 41x41 grid keeps
            // the preset interactive while the fields stay smooth
            grid: (41, 41),
            hbar: 1.0,
            format: EmitFormat::Csv,
            note: Some(
                "property-check only: tabulated double-barrier surrogate, not device data"
                    .into(),
            ),
        },
        other => return config_err(format!("unknown preset '{other}'")),
    };
    Ok(spec)
}

/// Parse a `key=value` experiment file. `#` starts a comment. Unknown keys
/// are rejected. CLI flags override file keys by calling [`apply_kv`]
/// again on the parsed spec.
pub fn spec_from_kv(text: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec {
        potential: PotentialSpec::GaussBarrier,
        state: StateSpec::GaussPacket,
        x_domain: Interval::new(-10.0, 10.0).unwrap(),
        k_domain: Interval::new(-TWO_PI, TWO_PI).unwrap(),
        scheme: TruncationConfig::K(KConfig {
            l_k: 2.0 * TWO_PI,
            n_xi: 40,
            quad: QuadSpec::default(),
        }),
        sweep: (SweepParam::NXi, Vec::new()),
        oracle: OracleKind::Analytic,
        grid: (201, 201),
        hbar: 1.0,
        format: EmitFormat::Csv,
        note: None,
    };
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{line}'")))?;
        apply_kv(&mut spec, key.trim(), value.trim())?;
    }
    Ok(spec)
}

/// Parse a float that may carry a `pi` suffix (`2pi`, `-0.5pi`).
pub fn parse_pi_float(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Some(prefix) = t.strip_suffix("pi") {
        let factor = match prefix {
            "" => 1.0,
            "-" => -1.0,
            p => p
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad float '{s}': {e}")))?,
        };
        return Ok(factor * std::f64::consts::PI);
    }
    t.parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad float '{s}': {e}")))
}

fn parse_pair(value: &str) -> Result<(f64, f64)> {
    let (a, b) = value
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected 'a,b', got '{value}'")))?;
    Ok((parse_pi_float(a)?, parse_pi_float(b)?))
}

/// Apply one `key=value` setting to a spec.
pub fn apply_kv(spec: &mut ExperimentSpec, key: &str, value: &str) -> Result<()> {
    match key {
        "potential" => {
            spec.potential = match value {
                "gauss" => PotentialSpec::GaussBarrier,
                "dwell" => PotentialSpec::DoubleWell { a: 1.0, b: 2.0 },
                "rtd" => PotentialSpec::RtdSurrogate {
                    n_samples: 16641,
                    domain: Interval::new(-26.0, 26.0).unwrap(),
                },
                other => {
                    if let Some(path) = other.strip_prefix("file:") {
                        PotentialSpec::File(PathBuf::from(path))
                    } else {
                        return Err(Error::Parse(format!("unknown potential '{other}'")));
                    }
                }
            };
        }
        "dwell_a" | "dwell_b" => {
            let v = parse_pi_float(value)?;
            if let PotentialSpec::DoubleWell { a, b } = &mut spec.potential {
                if key == "dwell_a" {
                    *a = v;
                } else {
                    *b = v;
                }
            } else {
                return config_err(format!("{key} requires potential=dwell"));
            }
        }
        "state" => {
            spec.state = match value {
                "gauss" => StateSpec::GaussPacket,
                other => {
                    if let Some(path) = other.strip_prefix("file:") {
                        StateSpec::File(PathBuf::from(path))
                    } else {
                        return Err(Error::Parse(format!("unknown state '{other}'")));
                    }
                }
            };
        }
        "scheme" => {
            let quad = QuadSpec::default();
            let k_hi = spec.k_domain.lo.abs().max(spec.k_domain.hi.abs());
            spec.scheme = match value {
                "y" => TruncationConfig::Y(YConfig { l_y: 40.0, n_mu: 40, quad }),
                "k" => TruncationConfig::K(KConfig { l_k: 2.0 * k_hi, n_xi: 40, quad }),
                "m" => TruncationConfig::M(MConfig { p: 1 }),
                "f" => TruncationConfig::F(FConfig { n_nu: 30, x_domain: spec.x_domain, quad }),
                other => return Err(Error::Parse(format!("unknown scheme '{other}'"))),
            };
            spec.sweep.0 = match value {
                "y" => SweepParam::Ly,
                "k" => SweepParam::NXi,
                "m" => SweepParam::P,
                _ => SweepParam::NNu,
            };
        }
        "sweep" => {
            spec.sweep.0 = match value {
                "ly" => SweepParam::Ly,
                "nmu" => SweepParam::NMu,
                "lk" => SweepParam::Lk,
                "nxi" => SweepParam::NXi,
                "nnu" => SweepParam::NNu,
                "p" => SweepParam::P,
                other => return Err(Error::Parse(format!("unknown sweep parameter '{other}'"))),
            };
        }
        "values" => {
            spec.sweep.1 = value
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(parse_pi_float)
                .collect::<Result<_>>()?;
        }
        "ly" => {
            if let TruncationConfig::Y(c) = &mut spec.scheme {
                c.l_y = parse_pi_float(value)?;
            }
        }
        "nmu" => {
            if let TruncationConfig::Y(c) = &mut spec.scheme {
                c.n_mu = value.parse().map_err(|e| Error::Parse(format!("nmu: {e}")))?;
            }
        }
        "lk" => {
            if let TruncationConfig::K(c) = &mut spec.scheme {
                c.l_k = parse_pi_float(value)?;
            }
        }
        "nxi" => {
            if let TruncationConfig::K(c) = &mut spec.scheme {
                c.n_xi = value.parse().map_err(|e| Error::Parse(format!("nxi: {e}")))?;
            }
        }
        "nnu" => {
            if let TruncationConfig::F(c) = &mut spec.scheme {
                c.n_nu = value.parse().map_err(|e| Error::Parse(format!("nnu: {e}")))?;
            }
        }
        "p" => {
            if let TruncationConfig::M(c) = &mut spec.scheme {
                c.p = value.parse().map_err(|e| Error::Parse(format!("p: {e}")))?;
            }
        }
        "xdomain" => {
            let (a, b) = parse_pair(value)?;
            spec.x_domain = Interval::new(a, b)?;
            if let TruncationConfig::F(c) = &mut spec.scheme {
                c.x_domain = spec.x_domain;
            }
        }
        "kdomain" => {
            let (a, b) = parse_pair(value)?;
            spec.k_domain = Interval::new(a, b)?;
        }
        "grid" => {
            let (a, b) = value
                .split_once(',')
                .ok_or_else(|| Error::Parse("grid expects NX,NK".into()))?;
            spec.grid = (
                a.trim().parse().map_err(|e| Error::Parse(format!("grid: {e}")))?,
                b.trim().parse().map_err(|e| Error::Parse(format!("grid: {e}")))?,
            );
        }
        "oracle" => {
            spec.oracle = match value {
                "analytic" => OracleKind::Analytic,
                "moyal" => OracleKind::Moyal,
                "brute" | "brute_force" => OracleKind::BruteForce,
                other => return Err(Error::Parse(format!("unknown oracle '{other}'"))),
            };
        }
        "order" => {
            let order = value.parse().map_err(|e| Error::Parse(format!("order: {e}")))?;
            for_quad(&mut spec.scheme, |q| q.order = order);
        }
        "panels" => {
            let panels = if value == "auto" {
                None
            } else {
                Some(value.parse().map_err(|e| Error::Parse(format!("panels: {e}")))?)
            };
            for_quad(&mut spec.scheme, |q| q.panels = panels);
        }
        "hbar" => spec.hbar = parse_pi_float(value)?,
        "format" => {
            spec.format = match value {
                "csv" => EmitFormat::Csv,
                "json" => EmitFormat::Json,
                other => return Err(Error::Parse(format!("unknown format '{other}'"))),
            };
        }
        "note" => spec.note = Some(value.to_string()),
        other => return Err(Error::Parse(format!("unknown key '{other}'"))),
    }
    Ok(())
}

fn for_quad(scheme: &mut TruncationConfig, f: impl Fn(&mut QuadSpec)) {
    match scheme {
        TruncationConfig::Y(c) => f(&mut c.quad),
        TruncationConfig::K(c) => f(&mut c.quad),
        TruncationConfig::F(c) => f(&mut c.quad),
        TruncationConfig::M(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep_is_empty() {
        let mut spec = preset("table2").unwrap();
        spec.sweep.1.clear();
        assert!(run_sweep(&spec).unwrap().is_empty());
    }

    #[test]
    fn sweep_param_must_belong_to_scheme() {
        let mut spec = preset("table2").unwrap();
        spec.sweep.0 = SweepParam::NNu;
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn oracle_compatibility_is_checked() {
        let mut spec = preset("table2").unwrap();
        spec.potential = PotentialSpec::DoubleWell { a: 1.0, b: 2.0 };
        // analytic oracle only covers the gauss barrier
        assert!(run_sweep(&spec).is_err());
    }

    #[test]
    fn incompatible_scheme_is_a_row_error_not_a_crash() {
        let mut spec = preset("table5").unwrap();
        spec.potential = PotentialSpec::RtdSurrogate {
            n_samples: 512,
            domain: Interval::new(-26.0, 26.0).unwrap(),
        };
        spec.oracle = OracleKind::BruteForce;
        spec.scheme = TruncationConfig::M(MConfig { p: 2 });
        spec.sweep = (SweepParam::P, vec![1.0, 2.0]);
        spec.grid = (5, 5);
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.error.is_some()));
    }

    #[test]
    fn emit_csv_shapes() {
        let rows = vec![SweepRow {
            param: 20.0,
            eps_inf: Some(2.8064e-6),
            estimator: None,
            realness_defect: Some(1.0e-17),
            wall_time_s: 0.25,
            error: None,
        }];
        let mut buf = Vec::new();
        emit(&rows, EmitFormat::Csv, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "param,eps_inf,estimator,realness_defect,wall_time_s");
        // absent estimator leaves an empty cell
        assert!(lines[1].contains(",,"), "{}", lines[1]);
        let mut buf = Vec::new();
        emit(&rows, EmitFormat::Json, None, &mut buf).unwrap();
        let parsed: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(parsed[0]["estimator"].is_null());
        assert!((parsed[0]["eps_inf"].as_f64().unwrap() - 2.8064e-6).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip_six_digits() {
        let mut spec = preset("table2").unwrap();
        spec.sweep.1 = vec![12.0, 20.0];
        spec.grid = (41, 41);
        let rows = run_sweep(&spec).unwrap();
        let mut buf = Vec::new();
        emit(&rows, EmitFormat::Csv, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for (line, row) in text.lines().skip(1).zip(&rows) {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), 5);
            let eps: f64 = cells[1].parse().unwrap();
            let rel = (eps - row.eps_inf.unwrap()).abs() / row.eps_inf.unwrap().max(1e-300);
            assert!(rel < 1e-5, "6 significant digits survive the round trip");
            let est: f64 = cells[2].parse().unwrap();
            let rel = (est - row.estimator.unwrap()).abs() / row.estimator.unwrap().max(1e-300);
            assert!(rel < 1e-5);
        }
    }

    #[test]
    fn determinism_excluding_wall_time() {
        let mut spec = preset("table2").unwrap();
        spec.sweep.1 = vec![16.0, 24.0];
        spec.grid = (31, 31);
        let strip = |rows: &[SweepRow]| -> Vec<String> {
            let mut buf = Vec::new();
            emit(rows, EmitFormat::Csv, None, &mut buf).unwrap();
            String::from_utf8(buf)
                .unwrap()
                .lines()
                .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap())
                .collect()
        };
        let a = strip(&run_sweep(&spec).unwrap());
        let b = strip(&run_sweep(&spec).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn presets_exist() {
        for name in ["table1", "table2", "table3", "table4", "table5", "table6", "table7"] {
            let spec = preset(name).unwrap();
            spec.validate().unwrap();
        }
        assert!(preset("table8").is_err());
        assert!(preset("table7").unwrap().note.unwrap().contains("property-check only"));
    }

    #[test]
    fn advisor_zero_potential_minimal_config() {
        let samples: Vec<(f64, f64)> = (0..128)
            .map(|i| (-40.0 + 80.0 * i as f64 / 127.0, 0.0))
            .collect();
        let p = Potential::tabulated(&samples, "zero").unwrap();
        let s = WignerState::gauss_packet();
        let x = Interval::new(-10.0, 10.0).unwrap();
        let k = Interval::new(-TWO_PI, TWO_PI).unwrap();
        let adv = advise_parameters(&p, &s, x, k, SchemeKind::K, 1e-12).unwrap();
        match adv.config {
            TruncationConfig::K(c) => assert_eq!(c.n_xi, 0),
            _ => panic!("expected k config"),
        }
        let adv = advise_parameters(&p, &s, x, k, SchemeKind::F, 1e-12).unwrap();
        match adv.config {
            TruncationConfig::F(c) => assert_eq!(c.n_nu, 0),
            _ => panic!("expected f config"),
        }
    }

    #[test]
    fn advisor_examples_gauss() {
        let p = Potential::gauss_barrier();
        let s = WignerState::gauss_packet();
        let x = Interval::new(-10.0, 10.0).unwrap();
        let k = Interval::new(-TWO_PI, TWO_PI).unwrap();
        let adv = advise_parameters(&p, &s, x, k, SchemeKind::Y, 1e-15).unwrap();
        let l_y = match adv.config {
            TruncationConfig::Y(c) => c.l_y,
            _ => panic!(),
        };
        assert!((30.0..=44.0).contains(&l_y), "advised L_y = {l_y}");
        let adv = advise_parameters(&p, &s, x, k, SchemeKind::K, 1e-15).unwrap();
        let n_xi = match adv.config {
            TruncationConfig::K(c) => c.n_xi,
            _ => panic!(),
        };
        assert!((33..=40).contains(&n_xi), "advised N_xi = {n_xi}");
        // m-truncation is refused for the gauss barrier
        assert!(advise_parameters(&p, &s, x, k, SchemeKind::M, 1e-6).is_err());
    }

    #[test]
    fn advisor_soundness_gauss() {
        // running the scheme at the advised config lands within two decades
        // of the target
        let p = Potential::gauss_barrier();
        let s = WignerState::gauss_packet();
        let x = Interval::new(-10.0, 10.0).unwrap();
        let k = Interval::new(-TWO_PI, TWO_PI).unwrap();
        let target = 1e-10;
        let grid = EvalGrid::new(x, k, 81, 81).unwrap();
        for kind in [SchemeKind::Y, SchemeKind::K, SchemeKind::F] {
            let adv = advise_parameters(&p, &s, x, k, kind, target).unwrap();
            let field = match &adv.config {
                TruncationConfig::Y(c) => y_truncation(&s, &p, &grid, c, 1.0).unwrap(),
                TruncationConfig::K(c) => k_truncation(&s, &p, &grid, c, 1.0).unwrap(),
                TruncationConfig::F(c) => f_truncation(&s, &p, &grid, c, 1.0).unwrap(),
                TruncationConfig::M(_) => unreachable!(),
            };
            let report = linf_error(&field, |x, k| {
                gauss_barrier_reference(x, k, &QuadSpec::default(), 10.0, 1.0)
            });
            assert!(
                report.eps_inf <= 100.0 * target,
                "{:?}: eps {} vs target {target}",
                kind,
                report.eps_inf
            );
        }
    }

    #[test]
    fn kv_spec_parsing() {
        let text = "\
# demo
potential=gauss
scheme=k
sweep=nxi
values=20,24
kdomain=-2pi,2pi
grid=41,41
oracle=analytic
";
        let spec = spec_from_kv(text).unwrap();
        assert_eq!(spec.grid, (41, 41));
        assert_eq!(spec.sweep.1.len(), 2);
        assert!((spec.k_domain.hi - TWO_PI).abs() < 1e-15);
        assert!(spec_from_kv("bogus=1").is_err());
        assert!((parse_pi_float("-0.5pi").unwrap() + 0.5 * std::f64::consts::PI).abs() < 1e-16);
    }
}
