//! Exhaustive and constructive tools for classifying extension data of
//! fusion categories graded by `Z/p` with trivial component `Vec_A`.
//!
//! The crate is organised bottom-up:
//!
//! * [`finab`]: finite abelian groups, homomorphisms, Pontryagin pairing.
//! * [`orthogroup`]: the orthogonal group of the hyperbolic form on `A ⊕ A*`.
//! * [`fusering`]: based fusion rings, Frobenius-Perron dimensions, gradings.
//! * [`formsolve`]: normal forms of the bilinear maps `γ: A → A*`.
//! * [`classify`]: the census drivers for `dim = pq²` and for `R_{3,A}`.
//! * [`oracle`]: brute-force enumerations used to cross-check everything.
//! * [`cli`]: argument parsing and dispatch for the `fusion-census` binary.

pub mod classify;
pub mod cli;
pub mod error;
pub mod finab;
pub mod formsolve;
pub mod fusering;
pub mod oracle;
pub mod orthogroup;

pub use error::{Error, Result};
