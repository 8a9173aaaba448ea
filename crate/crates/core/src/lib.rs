pub mod approx;
pub mod bernstein;
pub mod corpus;
pub mod error;
pub mod kernels;
pub mod numerics;
pub mod phase;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use phase::PhaseParam;
