//! Spectral analysis of gradient-descent dynamics for two-layer ReLU networks
//! on the unit sphere.
//!
//! The crate samples data, trains a fixed-output-layer ReLU network with
//! full-batch gradient descent, builds the time-varying Gram matrices that
//! govern the residual dynamics, and compares them with the spherical-harmonic
//! eigendecomposition of the limiting kernel.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harmonics;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod linalg;
pub mod relu_net;
pub mod rng;
pub mod spectral;
pub mod sphere_data;
pub mod theory;

pub use error::{Error, Result};
pub use linalg::Mat;
