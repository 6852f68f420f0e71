//! Single-qubit and rebit tomography estimators with exact frequentist risk.
//!
//! The crate compares estimators that sometimes report pure states
//! (constrained least squares, maximum likelihood) against hedged variants
//! that never do. Risk is computed by summing over every dataset a Pauli
//! measurement design can produce, so comparisons carry no sampling noise.
//!
//! - [`states`]: Bloch vectors, density matrices and conversions.
//! - [`losses`]: squared Hilbert-Schmidt distance, relative entropy, infidelity.
//! - [`estimators`]: measurement designs, datasets and estimator maps.
//! - [`risk`]: dataset enumeration, exact risk, sweeps and hedging scans.
//! - [`bayes`]: grid priors, posteriors and grid-search Bayes estimates.

pub mod bayes;
pub mod error;
pub mod estimators;
pub mod losses;
pub mod risk;
pub mod states;

pub use error::{Error, Result};
pub use estimators::{Dataset, EstimatorSpec, MeasurementDesign, PauliAxis};
pub use losses::LossSpec;
pub use risk::RiskEngine;
pub use states::{BlochVector, DensityMatrix};
