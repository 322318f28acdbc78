//! Numerical atomic decompositions in two coorbit settings.
//!
//! The Shannon setting works with band-limited functions on the real line,
//! reproduced by the kernel `K(b) = 2ω sinc(2ωb)`. The modulation setting
//! works on the time-frequency plane with the box-window short-time Fourier
//! transform and the twisted convolution.
//!
//! Throughout, `sinc(x) = sin(πx)/(πx)`. The only exception is
//! [`kernels::shannon_kernel_derivative`], which differentiates the
//! unnormalized `sin(x)/x`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atoms;
pub mod convolve;
pub mod diagnostics;
pub mod discretize;
pub mod error;
pub mod kernels;
pub mod pou;
pub mod sampling;
pub mod spectral;
pub mod voice;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use sampling::{Grid1D, Grid2D, SampledFunction1D, SampledFunction2D, SeminormFamily};
pub use weights::{Weight, WeightPair};

/// Version string embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
