//! Dense complex linear algebra and random-matrix ensembles.

pub mod dense;
pub mod ensemble;

pub use dense::{
    eig_general, eig_real, eig_with_vectors, hermitian_eigenvalues, log_det, ComplexMatrix,
    LogDet,
};
pub use ensemble::{
    mean_level_spacing, sample_gaussian_hermitian, sample_haar_unitary, spacing_of_levels,
    EnsembleClass, EnsembleSpec,
};
