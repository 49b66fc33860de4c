//! Transforms and Fourier-multiplier calculus on the periodic box.

pub mod fft;
mod field;
mod grid;
mod ops;

pub use field::{PhysicalVectorField, SpectralField, SpectralScalarField, SpectralVectorField, DIVERGENCE_TOL};
pub use grid::{Dealias, GridSpec};
pub(crate) use grid::{k_sq, kf};
pub use ops::{
    cross_two_thirds, curl, dealiased_cross, grad_norm_sq, inner_product, l2_norm, l2_norm_sq, l3_norm,
    l3_norm_physical, leray_project, neg_laplacian_pow, pointwise_cross, truncate_two_thirds,
};
#[cfg(test)]
pub(crate) use ops::cross_c;
pub(crate) use ops::{cross_physical, physical_many, two_thirds_product};
pub(crate) use field::split;
