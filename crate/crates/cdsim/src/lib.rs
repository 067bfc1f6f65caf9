//! Counterdiabatic sweep engineering for spin-orbit-mixed few-level systems.
//!
//! The crate models coherent population transfer between the spin-orbit-mixed
//! levels of a driven four-level system: a pump-coupled pair (|1>, |S>) and a
//! control-dressed pair (|T>, |2>). It provides
//!
//! - Hamiltonian builders for the full four-level model, its three-level
//!   adiabatic reduction, and the control-dressed basis ([`model`]),
//! - detuning sweep protocols with analytic rates ([`protocols`]),
//! - gauge-continuous instantaneous eigendecompositions ([`spectral`]),
//! - counterdiabatic corrections with term masking ([`counterdiabatic`]),
//! - a norm-preserving adaptive propagator ([`propagator`]),
//! - scenario running, time sweeps, and dataset emission ([`harness`]).
//!
//! All energies, couplings, and detunings are angular frequencies in ns^-1
//! (divide by 2*pi for GHz); times are in ns.
//!
//! Core numerics are generic over the real scalar through [`Scalar`]; the
//! aliases below pin the default double precision used by the harness and the
//! command-line interface.

// Validation deliberately writes `!(x > 0)` instead of `x <= 0`: the negated
// form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use num_complex::Complex;

pub mod counterdiabatic;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod protocols;
pub mod spectral;

/// Real scalar the numerics are generic over.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + fmt::Debug + fmt::Display + Send + Sync + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for converting an `f64` literal into the working scalar type.
pub(crate) fn r<R: Scalar>(x: f64) -> R {
    R::from_f64(x).expect("f64 literal must convert into the scalar type")
}

/// Lossy view of a scalar for diagnostics.
pub(crate) fn as_f64<R: Scalar>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Default precision used by the harness and the CLI.
pub type Real = f64;
/// Dense complex matrix at default precision.
pub type Matrix = linalg::CMatrix<Real>;
/// Complex state amplitudes at default precision.
pub type Vector = linalg::CVector<Real>;
/// Labeled Hermitian operator at default precision.
pub type Hermitian = model::HermitianMatrix<Real>;
/// Detuning sweep at default precision.
pub type Sweep = protocols::SweepProtocol<Real>;
/// Gauge-continuous eigendecomposition at default precision.
pub type Flow = spectral::SpectralFlow<Real>;
/// Propagated state history at default precision.
pub type History = propagator::Trajectory<Real>;

/// Errors surfaced by the simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Adiabatic elimination attempted at zero control detuning.
    #[error("singular reduction: delta_c = 0 leaves no adiabatic elimination")]
    SingularReduction,
    /// The control-dressed pair is undefined because the block is degenerate.
    #[error("degenerate dressing: dressed splitting {splitting:.3e} ns^-1 below floor")]
    DegenerateDressing { splitting: f64 },
    /// Instantaneous spectrum too close to degeneracy for a counterdiabatic
    /// construction.
    #[error(
        "degenerate spectrum at tau = {tau:.6}: levels {lo} and {hi} split by {gap:.3e} ns^-1"
    )]
    DegenerateSpectrum {
        tau: f64,
        lo: usize,
        hi: usize,
        gap: f64,
    },
    /// Eigenvector continuity could not be restored by grid refinement.
    #[error(
        "spectral flow unresolved on tau in [{left:.9}, {right:.9}] after {levels} refinement levels"
    )]
    Unresolved { left: f64, right: f64, levels: u32 },
    /// The adaptive step size collapsed below the resolvable scale.
    #[error("stiffness: step size underflow at t = {t:.6} ns")]
    Stiffness { t: f64 },
    /// The scanned range contains no interior gap minimum.
    #[error("no interior gap minimum between branches {lo} and {hi}")]
    NoGapMinimum { lo: usize, hi: usize },
    /// Operands refer to different bases or dimensions.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    /// A label does not name a basis state of the active model.
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    /// A scenario file is malformed or inconsistent.
    #[error("scenario: {0}")]
    Scenario(String),
    /// Dataset or scenario I/O failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
