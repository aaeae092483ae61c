//! Exact BSS machines over the ordered reals, hereditarily finite sets over
//! real atoms with Δ₀/Σ formula evaluation, compilers between the two, and
//! certified decimal-stream and logarithm kernels.

pub mod cli;
pub mod hf;
pub mod machine;
pub mod real_param;
pub mod scalar;
pub mod translate;

pub use scalar::Scalar;
