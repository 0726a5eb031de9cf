use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use psido::error::{Error, Result};
use psido::grid::Interval;
use psido::harness::{
    self, advise_parameters, default_y_cut, emit, parse_pi_float, preset, run_sweep, EmitFormat,
    PotentialSpec, SchemeKind,
};
use psido::operators::{
    f_truncation, k_truncation, m_truncation, y_truncation, EvalGrid, FConfig, KConfig, MConfig,
    QuadSpec, TruncationConfig, YConfig,
};
use psido::reference::{brute_force_reference, double_well_reference, gauss_barrier_reference};
use psido::state::WignerState;

/// Pseudo-differential term of the Wigner equation: truncation schemes,
/// reference oracles and benchmark sweeps.
#[derive(Parser)]
#[command(name = "psido", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one truncation scheme on a phase-space grid and write the
    /// field.
    Compute {
        /// gauss | dwell | rtd | file:PATH
        #[arg(long)]
        potential: String,
        /// y | k | m | f
        #[arg(long)]
        scheme: String,
        /// x-domain as "a,b" (accepts pi literals like -2pi)
        #[arg(long, default_value = "-10,10")]
        xdomain: String,
        /// k-domain as "a,b"
        #[arg(long, default_value = "-2pi,2pi")]
        kdomain: String,
        /// evaluation grid as "NX,NK"
        #[arg(long, default_value = "201,201")]
        grid: String,
        #[arg(long)]
        ly: Option<f64>,
        #[arg(long)]
        nmu: Option<usize>,
        #[arg(long)]
        lk: Option<String>,
        #[arg(long)]
        nxi: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        nnu: Option<usize>,
        /// Gauss-Legendre order per panel
        #[arg(long, default_value_t = 32)]
        order: usize,
        /// panel count; omit for oscillation-adaptive panels
        #[arg(long)]
        panels: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// output path for the field grid
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep from a preset or a key=value spec file.
    Sweep {
        /// table1 .. table7
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// key=value spec file
        #[arg(long)]
        spec: Option<PathBuf>,
        /// csv | json (overrides the spec file)
        #[arg(long)]
        format: Option<String>,
        /// additional key=value overrides applied after the spec file
        #[arg(long = "set", value_name = "KEY=VALUE")]
        sets: Vec<String>,
        /// output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Suggest truncation parameters for a target accuracy.
    Advise {
        #[arg(long)]
        potential: String,
        /// y | k | m | f
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        target: f64,
        #[arg(long, default_value = "-10,10")]
        xdomain: String,
        #[arg(long, default_value = "-2pi,2pi")]
        kdomain: String,
    },
    /// Print the best available reference value at one phase-space point.
    Oracle {
        #[arg(long)]
        potential: String,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value = "-10,10")]
        xdomain: String,
    },
}

fn parse_domain(s: &str) -> Result<Interval> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected 'a,b', got '{s}'")))?;
    Interval::new(parse_pi_float(a)?, parse_pi_float(b)?)
}

fn parse_potential_spec(s: &str) -> Result<PotentialSpec> {
    Ok(match s {
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
    })
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Compute {
            potential,
            scheme,
            xdomain,
            kdomain,
            grid,
            ly,
            nmu,
            lk,
            nxi,
            p,
            nnu,
            order,
            panels,
            hbar,
            out,
        } => {
            let x_domain = parse_domain(&xdomain)?;
            let k_domain = parse_domain(&kdomain)?;
            let (nx, nk) = {
                let (a, b) = grid
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("grid expects NX,NK".into()))?;
                (
                    a.parse::<usize>().map_err(|e| Error::Parse(format!("grid: {e}")))?,
                    b.parse::<usize>().map_err(|e| Error::Parse(format!("grid: {e}")))?,
                )
            };
            let pot = parse_potential_spec(&potential)?.build()?;
            let state = WignerState::gauss_packet();
            let eval = EvalGrid::new(x_domain, k_domain, nx, nk)?;
            let quad = QuadSpec { order, panels };
            let k_hi = k_domain.lo.abs().max(k_domain.hi.abs());
            let cfg = match scheme.as_str() {
                "y" => {
                    let l_y = ly.unwrap_or(40.0);
                    let auto = ((k_hi * l_y / (2.0 * std::f64::consts::PI) - 1e-12).ceil()
                        as usize)
                        .max(1);
                    TruncationConfig::Y(YConfig { l_y, n_mu: nmu.unwrap_or(auto), quad })
                }
                "k" => {
                    let l_k = match lk {
                        Some(s) => parse_pi_float(&s)?,
                        None => 2.0 * k_hi,
                    };
                    TruncationConfig::K(KConfig { l_k, n_xi: nxi.unwrap_or(40), quad })
                }
                "m" => TruncationConfig::M(MConfig { p: p.unwrap_or(1) }),
                "f" => TruncationConfig::F(FConfig { n_nu: nnu.unwrap_or(30), x_domain, quad }),
                other => return Err(Error::Parse(format!("unknown scheme '{other}'"))),
            };
            let field = match &cfg {
                TruncationConfig::Y(c) => y_truncation(&state, &pot, &eval, c, hbar)?,
                TruncationConfig::K(c) => k_truncation(&state, &pot, &eval, c, hbar)?,
                TruncationConfig::M(c) => m_truncation(&state, &pot, &eval, c, hbar)?,
                TruncationConfig::F(c) => f_truncation(&state, &pot, &eval, c, hbar)?,
            };
            let mut text = String::new();
            text.push_str("# psido field\n");
            text.push_str(&format!("# potential: {}\n", pot.name));
            text.push_str(&format!("# scheme: {}\n", field.scheme));
            text.push_str(&format!("# realness_defect: {:.5e}\n", field.realness_defect));
            text.push_str(&format!(
                "# x: {} {} {}\n# k: {} {} {}\n",
                x_domain.lo, x_domain.hi, nx, k_domain.lo, k_domain.hi, nk
            ));
            text.push_str("# columns: x k re im\n");
            for ix in 0..nx {
                for ik in 0..nk {
                    let v = field.at(ix, ik);
                    text.push_str(&format!(
                        "{:.12e} {:.12e} {:.12e} {:.12e}\n",
                        eval.x.point(ix),
                        eval.k.point(ik),
                        v.re,
                        v.im
                    ));
                }
            }
            std::fs::write(&out, text)?;
            eprintln!("wrote {} ({} x {})", out.display(), nx, nk);
        }
        Command::Sweep { preset: preset_name, spec, format, sets, out } => {
            let mut experiment = match (&preset_name, &spec) {
                (Some(name), None) => preset(name)?,
                (None, Some(path)) => harness::spec_from_kv(&std::fs::read_to_string(path)?)?,
                _ => {
                    return Err(Error::Config(
                        "sweep needs exactly one of --preset or --spec".into(),
                    ))
                }
            };
            for kv in &sets {
                let (key, value) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("--set expects KEY=VALUE, got '{kv}'")))?;
                harness::apply_kv(&mut experiment, key.trim(), value.trim())?;
            }
            if let Some(fmt) = format {
                experiment.format = match fmt.as_str() {
                    "csv" => EmitFormat::Csv,
                    "json" => EmitFormat::Json,
                    other => return Err(Error::Parse(format!("unknown format '{other}'"))),
                };
            }
            let rows = run_sweep(&experiment)?;
            match out {
                Some(path) => {
                    let mut file = std::fs::File::create(path)?;
                    emit(&rows, experiment.format, experiment.note.as_deref(), &mut file)?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    emit(&rows, experiment.format, experiment.note.as_deref(), &mut lock)?;
                    lock.flush()?;
                }
            }
        }
        Command::Advise { potential, scheme, target, xdomain, kdomain } => {
            let pot = parse_potential_spec(&potential)?.build()?;
            let state = WignerState::gauss_packet();
            let x_domain = parse_domain(&xdomain)?;
            let k_domain = parse_domain(&kdomain)?;
            let kind = match scheme.as_str() {
                "y" => SchemeKind::Y,
                "k" => SchemeKind::K,
                "m" => SchemeKind::M,
                "f" => SchemeKind::F,
                other => return Err(Error::Parse(format!("unknown scheme '{other}'"))),
            };
            let advice = advise_parameters(&pot, &state, x_domain, k_domain, kind, target)?;
            match advice.config {
                TruncationConfig::Y(c) => {
                    println!("scheme=y");
                    println!("ly={}", c.l_y);
                    println!("nmu={}", c.n_mu);
                }
                TruncationConfig::K(c) => {
                    println!("scheme=k");
                    println!("lk={}", c.l_k);
                    println!("nxi={}", c.n_xi);
                }
                TruncationConfig::M(c) => {
                    println!("scheme=m");
                    println!("p={}", c.p);
                }
                TruncationConfig::F(c) => {
                    println!("scheme=f");
                    println!("nnu={}", c.n_nu);
                    println!("xdomain={},{}", c.x_domain.lo, c.x_domain.hi);
                }
            }
            for w in advice.warnings {
                println!("warning={w}");
            }
        }
        Command::Oracle { potential, x, k, xdomain } => {
            let spec = parse_potential_spec(&potential)?;
            let pot = spec.build()?;
            let state = WignerState::gauss_packet();
            let x_domain = parse_domain(&xdomain)?;
            let (value, which) = match spec {
                PotentialSpec::GaussBarrier => (
                    gauss_barrier_reference(x, k, &QuadSpec::default(), 10.0, 1.0),
                    "analytic-quadrature (gauss barrier)",
                ),
                PotentialSpec::DoubleWell { a, b } => (
                    double_well_reference(&state, x, k, a, b, 1.0)?,
                    "moyal (exact for polynomial potentials)",
                ),
                _ => {
                    let x_max = x_domain.lo.abs().max(x_domain.hi.abs()).max(x.abs());
                    let y_cut = default_y_cut(&pot, x_max);
                    (
                        brute_force_reference(&state, &pot, x, k, y_cut, &QuadSpec::default(), 1.0)?,
                        "brute-force (dense double quadrature)",
                    )
                }
            };
            println!("value={value:.16e}");
            println!("oracle={which}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
