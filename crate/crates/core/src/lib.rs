//! Lévy-driven growth models for planar star-shaped objects.
//!
//! A boundary is a radial function R_t(φ) on the circle. Its randomness
//! comes from integrals of deterministic kernels over ambit sets against a
//! Lévy basis on the cylinder [−π, π) × time.

pub mod ambit;
pub mod circle_cov;
pub mod discretize;
pub mod error;
pub mod export;
pub mod fourier_radial;
pub mod growth;
pub mod inference;
pub mod levy;
pub mod moments;
pub mod quadrature;
pub mod rng;
pub mod schedule;
pub mod weight;

pub use error::{Error, Result};
