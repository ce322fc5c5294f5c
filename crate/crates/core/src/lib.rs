//! Numerical core for the one-dimensional wave equation
//!
//! ```text
//! z_tt = z_xx − √a(x)·σ(√a(x)·z_t),   z(t,0) = z(t,1) = 0,
//! ```
//!
//! with a possibly nonmonotone scalar damping `σ`.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! - [`damping`]: damping functions, their validation and sector bounds;
//! - [`extension`]: odd/even 2-periodic views of grid functions;
//! - [`charsolver`]: D'Alembert representation plus Picard iteration on time slabs;
//! - [`fdsolver`]: an explicit finite-difference solver used as an independent check;
//! - [`diagnostics`]: `H_p`/`D_p` norms, the Haraux functional, bound checks and decay fits;
//! - [`ltv`]: Lyapunov certificates for linear time-varying modal truncations.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod charsolver;
pub mod damping;
pub mod diagnostics;
pub mod extension;
pub mod fdsolver;
pub mod ltv;
pub mod state;

pub use damping::{DampingForm, DampingKind, DampingSpec};
pub use extension::{GridFunction, PeriodicView};
pub use state::{Trace, WaveState};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid damping: {0}")]
    InvalidDamping(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("{got} samples requested, at least {min} required")]
    TooFewSamples { got: usize, min: usize },
    #[error("sector lower bound d0 = {d0} is not positive (d1 = {d1})")]
    NonPositiveSector { d0: f64, d1: f64 },
    #[error("grid mismatch: expected {expected} nodes, got {got}")]
    GridMismatch { expected: usize, got: usize },
    #[error("initial data must vanish at x = 0 and x = 1")]
    BoundaryData,
    #[error("Picard iteration is not contracting on the slab starting at t = {t_start} (ratio {ratio})")]
    NonContraction { t_start: f64, ratio: f64 },
    #[error("Picard iteration did not reach tolerance in {iterations} iterations at t = {t_start} (residual {residual})")]
    MaxIters { t_start: f64, iterations: usize, residual: f64 },
    #[error("slab length underflow at t = {t_start}: damping is not Lipschitz on the reached range")]
    SlabUnderflow { t_start: f64 },
    #[error("finite-difference run unstable at t = {t}: norm {norm} exceeds {limit}")]
    Instability { t: f64, norm: f64, limit: f64 },
    #[error("exponent p = {0} outside [2, ∞]")]
    InvalidExponent(f64),
    #[error("history decayed below 1e-14 of its initial value; shrink the horizon")]
    DegenerateFit,
    #[error("A is not dissipative: largest eigenvalue of the symmetric part is {max_eig}")]
    NotDissipative { max_eig: f64 },
    #[error("A − d0·B·Bᵀ is not Hurwitz: spectral abscissa {abscissa}")]
    NotHurwitz { abscissa: f64 },
    #[error("sector bounds must satisfy 0 < d0 ≤ d1 (got d0 = {d0}, d1 = {d1})")]
    InvalidSector { d0: f64, d1: f64 },
    #[error("d(t) = {value} at t = {t} leaves the sector [{d0}, {d1}]")]
    SignalOutOfSector { t: f64, value: f64, d0: f64, d1: f64 },
    #[error("Lyapunov solution is not positive definite (smallest eigenvalue {min_eig})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("linear system is singular")]
    Singular,
}
