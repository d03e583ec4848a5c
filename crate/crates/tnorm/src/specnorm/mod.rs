//! Norm estimation from an exact moment table: Hankel determinants, Jacobi
//! recursion coefficients, tridiagonal top eigenvalues, the five-column
//! estimator table, and the power-law extrapolation of the eigenvalue
//! sequence.

pub mod estimator;
pub mod fit;
pub mod hankel;
pub mod jacobi;

pub use estimator::{estimator_table, EstimatorRow};
pub use fit::{fit_power_law, FitResult};
pub use hankel::{alpha_squares, alpha_squares_by_recurrence, hankel_dets, HankelSeq};
pub use jacobi::{count_below, top_eigenvalue};
