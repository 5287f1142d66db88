//! Exact differential algebra over ordered rational-function fields.

pub mod error;
pub mod poly;
pub mod ratfunc;
pub mod scalar;
pub mod sysio;
pub mod unipoly;
pub mod matrix;
pub mod system;
pub mod tower;
pub mod linalg;
pub mod galois;
pub mod gradient;
#[cfg(feature = "testkit")]
pub mod testkit;
