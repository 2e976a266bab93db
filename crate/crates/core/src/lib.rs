//! Random-matrix samplers, spectral statistics, Hamilton–Jacobi characteristics
//! and closed-form Brown measures for additive and multiplicative Brownian
//! motions on matrices.

pub mod brown_analytic;
pub mod ensembles;
pub mod error;
pub mod free_moments;
pub mod hj_engine;
pub mod matrix;
pub mod quadrature;
pub mod rng;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use rng::RngHandle;
