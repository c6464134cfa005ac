//! Eigendecomposition of 1D truncations, spectral measures, and the
//! tensor-convolution construction of 2D spectral measures.

pub mod convolution;
pub mod eigen;
pub mod measure;

pub use convolution::{
    convolve_measures, spectral_measure_1d, spectral_measure_2d, spectral_measure_2d_cross,
    PureTensorTerm,
};
pub use eigen::{dense_symmetric_eigen, eigh_tridiagonal, EigenSystem};
pub use measure::{
    atom_discrepancy, max_atom_weight, Atom, Density, EnergyGrid, SpectralMeasure, MERGE_TOLERANCE,
};
