#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod interp;
pub mod kernels;
pub mod operators;
pub mod par;
pub mod quad;
pub mod reproduce;
pub mod smoothness;
pub mod specfn;
pub mod spectral;
pub mod tolerance;

pub use error::{Error, Result};
pub use kernels::{BuhmannParams, DiffParams, Family, RadialKernel};
pub use par::Exec;
pub use quad::Estimate;
pub use tolerance::Tolerance;
