//! Numerical harmonic analysis on `R^n` built around the Gauss kernel
//! `G_a(x) = exp(-4 pi^2 a |x|^2)` and the Weierstrass kernel
//! `W_a(x) = (4 pi a)^(-n/2) exp(-|x|^2 / 4a)`.
//!
//! The crate evaluates Fourier and inverse Fourier integrals, Gauss means,
//! Gauss-summable Fourier inversion, Weierstrass mollification `W_a * f` and
//! the same operations on bounded measures made of point masses plus a
//! continuous density. Every integral goes through [`quadrature`], which
//! reports a closed-form truncation bound alongside a discretization estimate.

pub mod error;
pub mod functions;
pub mod kernels;
pub mod measures;
pub mod numerics;
pub mod quadrature;
pub mod transforms;

#[cfg(feature = "cli")]
pub mod harness;

pub use error::{Error, Result};
pub use kernels::KernelScale;
pub use numerics::{ComplexPoint, ComplexScalar, RealPoint};
pub use quadrature::{DecayEnvelope, GridSpec, Quadrature, QuadratureResult, TestFunction};
