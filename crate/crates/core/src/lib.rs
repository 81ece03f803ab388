//! Exact symbolic toolkit for local generic CR submanifolds through the origin.
//!
//! The crate has three layers:
//! - [`series`]: sparse truncated multivariate power series over ℚ(i);
//! - [`manifold`]: the complexified submanifold, its CR vector fields, Lie
//!   brackets and the finite type (minimality) test;
//! - [`constancy`]: the constancy certificate for pairs `(f, g)` satisfying
//!   `f(t)ḡ(τ) ≡ g(t)f̄(τ)` on the manifold.

pub mod constancy;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod number;
pub mod series;

pub use error::{Error, Result};
pub use number::GaussianRational;
pub use series::{Exponent, FrameKind, TruncatedSeries, Variable, VariableFrame, Witness};
