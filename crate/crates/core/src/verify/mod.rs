//! Ensemble verification: random instances, bound checks, interlacing
//! audits, genericity perturbation and a finite-difference oracle.

mod cut;
mod ensemble;
mod fd;
mod interlace;
mod perturb;
mod random;

use thiserror::Error;

use crate::discrete::DiscreteError;
use crate::metric::MetricError;

pub use cut::{metric_cut_audit, CutAudit};
pub use ensemble::{
    instance_rng, run_discrete_ensemble, run_ensemble, run_metric_ensemble, EnsembleConfig,
    EnsembleReport, EnsembleSummary, InstanceSummary, Model, VerificationRecord,
};
pub use fd::{fd_elements, fd_oracle, fd_oracle_elements};
pub use interlace::{
    complement_basis, interlacing_audit, restricted_spectrum, InterlaceAudit, InterlaceMode,
    INTERLACE_SLACK,
};
pub use perturb::{perturb_discrete_to_generic, perturb_metric_to_generic, PerturbationLog};
pub use random::{max_cycle_dimension, random_connected_graph, random_leaf, random_tree, Uniform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no generic perturbation found up to magnitude {magnitude} after {retries} draws")]
    PerturbationExhausted { magnitude: f64, retries: usize },
    #[error("eigenvalue {lambda} missing from the cut tree spectrum")]
    CutLostEigenvalue { lambda: f64 },
    #[error("eigenvalue {lambda} stays degenerate on the cut tree under position jitter")]
    CutDegenerate { lambda: f64 },
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
