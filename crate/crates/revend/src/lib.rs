//! Ends of revolution in the three conformal space-form models: build the
//! warped-product metric `ds^2 + w(s)^2 dtheta^2` of a rotated profile curve,
//! classify the end as parabolic or non-parabolic, test stochastic
//! completeness, and cross-check the integral verdicts against geometric
//! criteria and a radial-diffusion Monte Carlo oracle.
//!
//! Organization:
//! - [`quad`]: adaptive Gauss-Kronrod quadrature, the numeric workhorse.
//! - [`geometry`]: curvature selector, profile curves, arc-length
//!   reparametrization, the built-in end catalog, meshes.
//! - [`warp`]: warping functions, cumulative integrals, cap extension,
//!   centroid, Gaussian curvature.
//! - [`classify`]: the improper-integral divergence classifier.
//! - [`criteria`]: parabolicity / stochastic-completeness tests and the
//!   per-end report combinator.
//! - [`stochastic`]: exact scale-function hitting probabilities and the
//!   Euler-Maruyama simulator.
//! - [`expr`], [`report`], [`cli`]: the text surfaces (curve files, JSON/CSV
//!   reports, command line).

pub mod classify;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod quad;
pub mod report;
pub mod stochastic;
pub mod warp;

pub use error::{Error, Result};
