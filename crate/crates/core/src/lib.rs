//! Numerical laboratory for mesoscopic linear statistics of the CUE and the
//! sine process, their exact Laplace transforms, and the log-correlated
//! Gaussian field with its multiplicative chaos.
//!
//! Module map:
//! - [`specfun`]: Γ, Barnes G, Cin/Ci, Selberg and Dyson integrals.
//! - [`transforms`]: Fourier, Hilbert and Cauchy transforms on uniform grids,
//!   and the three forms of the H^{1/2} inner product.
//! - [`covariance`]: mollifiers, the kernels Q, Q_ε, Q̂ and the exact
//!   regularized covariance T_{ε,δ}.
//! - [`gaussian_field`]: spectral synthesis of the field and its chaos measure.
//! - [`cue`]: Haar eigenangles, Toeplitz determinants, Borodin–Okounkov.
//! - [`sine`]: Nyström Fredholm determinants and a window DPP sampler.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod covariance;
pub mod cue;
pub mod error;
pub mod gaussian_field;
pub mod quad;
pub mod rng;
pub mod sine;
pub mod specfun;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
