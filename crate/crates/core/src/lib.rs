//! Arbitrary-precision machinery for vector-valued Jacobi–Weierstrass polar
//! harmonic weak Maass forms.
//!
//! From a cusp form `f` of even weight `k ≥ 2` the crate derives, numerically
//! and at configurable precision:
//!
//! - the period lattice `Λ_f ⊂ ℂ` spanned by modular-symbol pairings
//!   ([`periods`]),
//! - the Eichler integrals `E_{f,ℓ}(τ) = ∫_τ^{i∞} f(t) t^ℓ dt` ([`periods`]),
//! - the completed Jacobi–Weierstrass ζ-function `ζ*_Λ`, which is genuinely
//!   doubly periodic ([`weierstrass`], built on Jacobi theta kernels from
//!   [`theta`]),
//! - the assembled vector-valued form `F(τ, M)` together with its modularity,
//!   ellipticity and `ξ₀`-shadow verification ([`mockform`]).
//!
//! Supporting modules: [`precision`] (complex arithmetic with an explicit digit
//! budget), [`qforms`] (q-expansions: Dedekind η, built-in cusp forms,
//! Eisenstein series), [`symrep`] (the `Sym^{k-2}` representation matrices
//! `N(M)`), and [`report`] (machine-readable JSON records).
//!
//! All kernels are pure functions of their inputs; every public type is
//! immutable after construction and safe to share across threads.

pub mod error;
pub mod mockform;
pub mod periods;
pub mod precision;
pub mod qforms;
pub mod report;
pub mod symrep;
pub mod theta;
pub mod weierstrass;

pub use error::Error;
pub use mockform::{FValue, MockFormContext};
pub use periods::{EichlerValue, PeriodGenerator, PeriodLattice};
pub use precision::{BigComplex, PrecisionContext, TauPolynomial};
pub use qforms::{CuspForm, GroupDescriptor, QExpansion};
pub use symrep::{SymRepMatrix, SymVector, SL2Z};
pub use theta::GramMatrix;
pub use weierstrass::{Lattice2D, LaurentExpansion};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
