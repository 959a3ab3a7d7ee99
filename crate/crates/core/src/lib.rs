//! Pseudo-spectral laboratory for the two-dimensional Kuramoto–Sivashinsky
//! system on a periodic torus `[0, L1] x [0, L2]`.
//!
//! The evolved unknown is the gradient pair `(u, v) = ∇φ`, which satisfies
//!
//! ```text
//! u_t + u u_x + v v_x = -Δ²u - Δu
//! v_t + u u_y + v v_y = -Δ²v - Δv
//! ```
//!
//! The crate is organised around the objects of the mild-solution theory:
//!
//! - [`spectral`]: lattice bookkeeping, the symbol `σ(k̃) = |k̃|⁴ - |k̃|²`,
//!   growing modes and the spectral gap `A`.
//! - [`linear`]: the semigroup `e^{-tℒ}`, the Duhamel operators `I₁`, `I₂`
//!   with their operator-norm bounds, and smoothing-estimate checks.
//! - [`dynamics`]: the integrating-factor RK4 stepper, the Picard iteration
//!   for the mild solution and the complexified `(U, V)` hierarchy.
//! - [`analysis`]: Wiener, space-time Wiener and Sobolev norms, smallness
//!   thresholds, analyticity-radius estimation and the continuation monitor.
//! - [`harness`]: scenario configuration, initial data, orchestration and
//!   result persistence.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod harness;
pub mod io;
pub mod linear;
pub mod spectral;
pub mod transform;

pub use error::{KsError, Result};
pub use field::SpectralField;
pub use linear::Trajectory;
pub use spectral::{SymbolTable, TorusSpec};

/// Complex scalar used for every Fourier coefficient.
pub type C64 = num_complex::Complex64;
