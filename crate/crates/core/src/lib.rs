//! Numerical laboratory for the two-dimensional discrete Schrödinger operator
//!
//! ```text
//! (Hψ)_{n,m} = -(ψ_{n+1,m} + ψ_{n-1,m} + ψ_{n,m+1} + ψ_{n,m-1}) + V_n ψ_{n,m}
//! ```
//!
//! whose potential depends only on `n`. Such an operator is a family of
//! identical chains (indexed by `m`) coupled by a free hopping term, and it
//! splits as `H = A₁ ⊗ I + I ⊗ (-Δ_m)`. The crate exploits that splitting:
//!
//! - [`potential`], [`operator`], [`lattice`]: potentials, 1D truncations and
//!   2D states with matrix-free application of `H`.
//! - [`spectral`]: tridiagonal eigensolver, spectral measures and their
//!   convolution, which realises the 2D spectral measure from 1D ones.
//! - [`evolution`]: the factorized propagator `e^{iHt} = e^{iA₁t} e^{i(-Δ_m)t}`
//!   and an independent direct propagator for the assembled 2D operator.
//! - [`diagnostics`]: dispersive decay traces and fits, mixed norms,
//!   transfer-matrix Lyapunov exponents, spreading moments.
//! - [`harness`]: configuration files and the batch runner behind the
//!   `coupled-chains` binary.

pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod lattice;
pub mod operator;
pub mod potential;
pub mod spectral;

pub use error::{Error, Result};
pub use lattice::{apply_h2d, LatticeState2D};
pub use operator::{build_operator_1d, Boundary, Operator1D};
pub use potential::{sample_potential, Potential1D, PotentialSpec, Window};

pub use num_complex::Complex64;

/// The golden mean `(√5 - 1)/2`, default frequency of quasi-periodic families.
pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;

/// Japanese bracket `⟨t⟩ = √(1 + t²)`.
pub fn japanese_bracket(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}
