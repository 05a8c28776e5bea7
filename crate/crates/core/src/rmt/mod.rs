//! Random matrices `X`, the product `W = X^m (X^*)^m` and its spectrum.

pub mod ecdf;
pub mod eigen;
pub mod ensemble;
pub mod matrix;
pub mod moments;
pub mod truncation;

pub use ecdf::{kolmogorov_distance, Cdf, EmpiricalCdf};
pub use eigen::{hermitian_eigenvalues, hermitian_eigenvalues_with, EigenMethod, Spectrum};
pub use ensemble::{sample_matrix, scalar_moments, EnsembleSpec, Family, ScalarMoments};
pub use matrix::{power_product, ComplexMatrix, PowerProduct};
pub use moments::{monte_carlo_moments, trace_moments, MomentReport, MomentRow};
pub use truncation::{alpha_schedule, lindeberg_statistic, truncate, TruncationInfo};
