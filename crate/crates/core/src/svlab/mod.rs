//! Least singular values, small-ball probabilities and the geometry of
//! compressible vectors.

mod concentration;
mod distance;
mod lsv;
mod vectors;

pub use concentration::{levy_concentration, sbp_clt_experiment, ConcentrationEstimate, SbpConfig, SbpOutcome};
pub use distance::{distance_identity_check, DistanceIdentity};
pub use lsv::{least_singular_mc, lsv_trial, LsvTrial, LsvTrialBatch};
pub use vectors::{classify_vector, spread_check, SpreadCheck, VectorClass, VectorLabel};
