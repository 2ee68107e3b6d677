//! Exact arithmetic for the p-adic interpolation of half-integral weight
//! Siegel modular forms at desk scale.

pub mod arith;
pub mod chars;
pub mod eisen;
pub mod error;
pub mod hecke;
pub mod measures;
pub mod padic;
pub mod qexp;
pub mod symlat;

pub use arith::Q;
pub use chars::{CycloNumber, DirichletChar};
pub use error::{Error, Result};
pub use symlat::HalfIntSymMatrix;
pub use qexp::{ExtCoeff, FourierExpansion};
