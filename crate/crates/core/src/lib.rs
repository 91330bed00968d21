//! Exact symbolic engine for λ-brackets in Poisson vertex algebras.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar`]: Laurent polynomials in named parameters with rational
//!   coefficients; the coefficient field of everything else.
//! * [`diffpoly`]: differential polynomials in `N` generators and `D`
//!   commuting derivations, with abstract order-zero function symbols.
//! * [`lambda`]: λ-polynomials, the Master Formula, skew-symmetry and Jacobi
//!   residuals, Hamiltonian flows.
//! * [`liealg`]: matrix realizations of simple Lie algebras of type
//!   A, B, C, D and G₂, sl₂-triples and the graded bases attached to them.
//! * [`walg`]: generators and λ-brackets of classical affine W-algebras.
//! * [`text`]: the textual form of differential polynomials and
//!   λ-polynomials.
//!
//! Everything is exact; there is no floating point anywhere. The crate is
//! `no_std` (it needs `alloc`); the `parallel` feature pulls in `std` and
//! spreads residual and bracket computations over a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod diffpoly;
pub mod error;
pub mod lambda;
pub mod liealg;
pub mod scalar;
pub mod text;
pub mod walg;

mod linalg;

pub use diffpoly::{Algebra, DerivKey, DiffPoly, FuncSym, Monomial};
pub use error::{Error, Result};
pub use lambda::{BracketMatrix, Formal, LambdaExpr};
pub use scalar::{Rational, Scalar, Symbol};
