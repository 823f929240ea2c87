//! Numerical laboratory for Dirichlet-to-Neumann maps of linear and
//! fully nonlinear uniformly elliptic equations on smooth planar domains.
//!
//! Pipeline: [`geometry`] → [`domain`] → [`operator`] → [`solver`] →
//! [`dtn`] → [`levy`] → [`estimates`], driven by [`config`] and [`pipeline`].

pub mod config;
pub mod domain;
pub mod dtn;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod levy;
pub mod operator;
pub mod pipeline;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
