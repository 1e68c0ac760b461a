//! Receiver operating characteristics for binary quantum hypothesis testing:
//! exact Neyman-Pearson curves, analytic bounds, Gaussian-state support,
//! many-copy asymptotics and sequential measurement strategies.

pub mod asymptotics;
pub mod bounds;
pub mod curve;
pub mod error;
pub mod exact;
pub mod gaussian;
pub mod linalg;
pub mod optimize;
pub mod sequences;
pub mod states;

pub use curve::{BoundKind, PointKind, RocCurve, RocPoint};
pub use error::{QrocError, Result};
pub use gaussian::{GaussianQs, GaussianState};
pub use linalg::{CMatrix, HermitianMatrix};
pub use states::{DensityMatrix, EntropyUnit, OverlapDecomposition, QsEvaluator};
