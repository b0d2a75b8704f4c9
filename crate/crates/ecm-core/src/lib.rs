//! Verification workbench for moment conjectures of elliptic-curve L-functions.
//!
//! The crate is organised bottom-up: exact per-curve arithmetic (`curves`),
//! family enumeration (`families`), Chebyshev and Sato–Tate tools
//! (`chebyshev`), Hecke traces and class numbers (`hecke`), exact
//! orthogonality sums (`orthogonality`), special functions (`special`),
//! arithmetic-factor Euler products (`euler`), numerical L-values
//! (`lvalues`) and the conjectural predictions (`predict`).

pub mod arith;
pub mod chebyshev;
pub mod curves;
pub mod error;
pub mod euler;
pub mod families;
pub mod surd;
pub mod hecke;
pub mod lvalues;
pub mod orthogonality;
pub mod predict;
pub mod series;
pub mod special;

pub use error::{EcmError, Result};
