//! Symbolic verification and conditional reduction for λ-variational
//! symmetries of second-order Euler–Lagrange equations.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`]: exact symbolic expressions, parsing, printing, differentiation
//!   and a sound zero test;
//! * [`jet`]: jet coordinates and the total derivatives `Dx`, `D̄x`, `D̃x`;
//! * [`geometry`]: vector fields, prolongations, one-forms, Lie derivatives
//!   and contact-ideal membership;
//! * [`variational`]: Euler–Lagrange equations, the Poincaré–Cartan form, the
//!   λ-variational symmetry checks and the first integral `Ĩ = e^w I`;
//! * [`numverify`]: fixed-step RK4 cross-checks of the symbolic claims;
//! * [`cli`]: problem files, the check/reduce/verify pipeline and reports.

pub mod cli;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod jet;
pub mod numverify;
pub mod variational;

pub use error::{Error, Result};
