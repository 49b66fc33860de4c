//! Pseudo-spectral incompressible Navier–Stokes on the periodic box `[0, 2π)³`,
//! built around an exact spectral calculus for the curl operator.
//!
//! On the torus every divergence-free Fourier mode splits into two curl
//! eigenvectors with eigenvalues `±|k|`. That makes the spectral resolution
//! of curl, the positive/negative helical projections, and the operator
//! `A = |curl|` finite, exactly computable objects. The crate uses them to
//! evaluate vorticity-based regularity integrands along simulated flows.
//!
//! Layout:
//! - [`spectral`]: grids, transforms, Fourier multipliers, norms, dealiased products
//! - [`helical`]: curl eigenbasis, helical decomposition, band projections, `A^s`
//! - [`flows`]: canonical initial conditions (ABC, Taylor–Green, random helical)
//! - [`solver`]: integrating-factor Runge–Kutta time stepping
//! - [`criteria`]: regularity integrands, identity residuals, band inequalities, probes
//! - [`io`]: snapshot/CSV/config formats
//! - [`cli`], [`verify`]: command-line surface and the invariant suite

pub mod cli;
pub mod criteria;
pub mod error;
pub mod flows;
pub mod helical;
pub mod io;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use helical::{HelicalBasis, HelicalDecomposition, SpectralInterval};
pub use spectral::{Dealias, GridSpec, PhysicalVectorField, SpectralScalarField, SpectralVectorField};

/// Volume of the periodic box, `(2π)³`.
pub const BOX_VOLUME: f64 = 8.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI;
