//! Finite-truncation laboratory for nonlinear pseudo-bosonic operator systems.
//!
//! The crate builds biorthogonal basis pairs on a truncated space, the rank-one
//! family `R_k = ψ_k ⊗ φ̄_k`, the deformation operator `X = Σ α_k R_k`, and
//! generalized ladder operators `S`, `T` obeying the weak identity
//!
//! ```text
//! ⟨Tξ, S†η⟩ − ⟨Sξ, T†η⟩ = ⟨ξ, Xη⟩
//! ```
//!
//! Every checker returns a [`CheckReport`] with named residuals compared
//! against a tolerance.
//!
//! # Conventions
//!
//! The inner product is linear in the **first** slot and conjugate-linear in
//! the second: `⟨x, y⟩ = Σ xᵢ ȳᵢ`. With this choice the rank-one operator
//! `ψ ⊗ φ̄` acts as `ξ ↦ ⟨ξ, φ⟩ ψ`, i.e. it is the matrix `ψ φ*`.
//!
//! Truncation: lowering operators are exact. A raising operator loses its
//! action on the top index. Identities involving up to `g` raising steps are
//! exact on indices `0..=N-1-g`, where `g` is the guard band of the
//! [`space::TruncatedSpace`].
//!
//! Adjoints in the partial *-algebra sense (`S†`, `T†*`, ...) all collapse to
//! the plain conjugate transpose at finite dimension: `S† = S*`, `S†* = S`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commutator;
pub mod error;
pub mod intertwine;
pub mod ladder;
pub mod linalg;
pub mod rankone;
pub mod report;
pub mod semigroup;
pub mod space;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, Operator};
pub use report::{CheckReport, Fingerprint};

pub use num_complex::Complex64;
