//! Numerical treatments of the nonlocal potential term of the Wigner
//! equation.
//!
//! The crate evaluates the pseudo-differential term of a Wigner function
//! under four truncation schemes (y-window, convolution-kernel, Moyal-series
//! and force-spectrum truncation), compares them against analytic and
//! brute-force reference oracles in the max norm, and computes the prior
//! error estimators used to pick truncation parameters. A benchmark harness
//! with CSV/JSON emission and a CLI sit on top.

pub mod error;
pub mod grid;
pub mod harness;
pub mod operators;
pub mod potential;
pub mod reference;
pub mod state;

pub use error::{Error, Result};
pub use grid::{gauss_legendre, gauss_legendre_osc, make_dual_pair, DualGridPair, Interval,
    QuadratureRule, UniformGrid};
pub use operators::{
    f_truncation, g_nu_estimate, g_xi_estimate, k_truncation, m_truncation, y_truncation,
    EvalGrid, FConfig, KConfig, MConfig, PsiDoField, QuadSpec, TruncationConfig, YConfig,
};
pub use potential::Potential;
pub use reference::{
    brute_force_field, brute_force_reference, double_well_reference, gauss_barrier_reference,
    linf_error, ErrorReport,
};
pub use state::WignerState;
