//! Uniformly accurate oscillatory integrators for the Klein-Gordon-Zakharov
//! system
//!
//! ```text
//! c^{-2} z_tt - Laplace z + c^2 z = -n z,    n_tt - Laplace n = Laplace |z|^2
//! ```
//!
//! on the one-dimensional torus, with a Fourier pseudospectral discretization
//! in space. The first- and second-order schemes keep their error constants
//! bounded as the plasma frequency `c` grows.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod integrator_uaosc1;
pub mod integrator_uaosc2;
pub mod kgz_model;
pub mod oscillatory_kernels;
pub mod spectral_core;
pub mod zakharov_limit;

pub use error::{KgzError, Result};
pub use num_complex::Complex64;
