//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures surfaced by the numeric kernels.
///
/// The variants split into three control-flow classes, which the CLI maps to
/// exit codes: pole signals ([`Error::PoleHit`]), tolerance/validation
/// failures (most of the rest), and plain input errors.
#[derive(Debug, Error)]
pub enum Error {
    /// Precision budget outside the supported range (`digits ≥ 15`,
    /// `guard ≥ 10`).
    #[error("invalid precision budget: digits = {digits} (min 15), guard = {guard} (min 10)")]
    InvalidPrecision { digits: u32, guard: u32 },

    /// Division by a value whose absolute value is below `10^-digits`.
    #[error("division by a value smaller than 10^-{digits} in absolute value")]
    TinyDivisor { digits: u32 },

    /// An operation required a point of the upper half-plane.
    #[error("{what} requires Im > 0 (got Im = {im})")]
    NotInUpperHalfPlane { what: &'static str, im: String },

    /// A lattice basis with Im(ω₂/ω₁) = 0 (or numerically indistinguishable
    /// from 0) cannot span a rank-2 lattice.
    #[error("degenerate lattice basis: omega2/omega1 is real within working precision")]
    DegenerateLattice,

    /// An evaluation point sits on (or too close to) the theta divisor /
    /// period lattice, where ζ* has a pole.
    #[error("pole: component {component} lies within {distance} of the lattice")]
    PoleHit { component: usize, distance: String },

    /// Lattice recovery could not express the generators as integer (or
    /// bounded-denominator rational) combinations of a rank-2 basis.
    #[error("period-lattice recovery failed: {0}")]
    LatticeRecovery(String),

    /// A q-expansion operation was asked for a component it does not support.
    #[error("component {0} unsupported: only E_(f,0) has a 1-periodic q-expansion")]
    UnsupportedComponent(usize),

    /// A cusp form was evaluated deeper than its stored coefficients allow
    /// and no exact regeneration recipe is attached.
    #[error("q-expansion needs {needed} coefficients but only {have} are available")]
    InsufficientCoefficients { needed: usize, have: usize },

    /// Malformed numeric or structural input (bad decimal string, det ≠ 1, …).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
