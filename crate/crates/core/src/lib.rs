//! Numerical laboratory for ladder-based mean-value constructions on the
//! critical line: Hardy's Z-function, the Hardy–Littlewood integral and the
//! ladder φ₁, the mean-value operator Ĥ, and symbolic crossbreeding of
//! factorization formulas into complete hybrid formulas.

pub mod crossbreed;
pub mod error;
pub mod falgebra;
pub mod harness;
pub mod hop;
pub mod ladder;
pub mod quad;
pub mod roots;
pub mod zcore;

pub use error::{Error, Result};
