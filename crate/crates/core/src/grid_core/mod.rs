//! Wavefunctions and probability densities on uniform power-of-two grids:
//! Fourier transforms, moments, overall widths, convolution and smearing.

pub mod density;
mod fft;
pub mod grid;
pub mod probe;
pub mod wave;

pub use density::{
    convolve, l1_distance, mean, overall_width, reflect, smear, variance, Density,
};
pub use grid::{make_grid, GridSpec};
pub use probe::{sample_wavefunction, ProbeFamily};
pub use wave::{density_of, momentum_density, WaveFunction};
