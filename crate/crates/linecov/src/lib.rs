//! Single and double line integrals of the squared-exponential covariance
//! function, for Gaussian-process regression on line-integral observations.
//!
//! A measurement is a straight segment together with the integral of an
//! unknown scalar field along it. Conditioning a GP with a
//! squared-exponential kernel on such data needs two kinds of kernel
//! integrals: the covariance between a segment and a point (a single
//! integral with a closed form) and the covariance between two segments (a
//! double integral over the unit square with no closed form in general).
//!
//! This crate provides three interchangeable evaluators for the double
//! integral — an erf reduction to a single numerically integrated dimension,
//! a bivariate-normal reformulation with full colinear case handling, and a
//! composite 2D Simpson rule — together with the special functions and
//! quadrature engines they are built on, and a small GP layer that assembles
//! covariance matrices and posteriors from line datasets.
//!
//! The crate is `no_std`-compatible (with `alloc`); disable the default
//! `std` feature to build without the standard library. Deterministic
//! benchmark-set generation lives in [`bench`](mod@bench); the timing harness and CLI
//! live in the companion `linecov-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bench;
pub mod double_integral;
mod error;
pub mod gp;
pub mod kernel;
mod math;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};

/// Shared degeneracy threshold on the norm of `V w`: spans below it are
/// treated as point measurements by both the single- and double-integral
/// paths.
pub const DEFAULT_EPS_W: f64 = 1e-12;

/// Default relative threshold on `|ac - b^2|` below which the
/// bivariate-normal method switches to its colinear branch.
pub const DEFAULT_EPS_DET: f64 = 1e-10;
