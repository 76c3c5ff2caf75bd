//! Numerical duality theory for real submanifolds of the complex projective
//! plane.
//!
//! Coordinates on ℂ² are `(x, y)` with `x = x1 + i x2`, `y = y1 + i y2`; real
//! vectors are stored in the order `(x1, x2, y1, y2)` and that basis is taken
//! to be direct. Slopes of complex lines `y = λx` live on the Riemann sphere
//! and are always handled homogeneously.

pub mod census;
pub mod contact;
pub mod duality;
mod error;
pub mod export;
pub mod jets;
pub mod linalg;
pub mod planes;
pub mod surfaces;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
