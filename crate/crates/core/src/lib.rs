//! Uncertainty quantification with proper scoring rules.
//!
//! A finite second-order belief (an ensemble of class-probability vectors)
//! is decomposed into total, aleatoric and epistemic uncertainty under the
//! log, Brier, zero-one or spherical scoring rule. The resulting measures are
//! evaluated on three downstream tasks: selective prediction
//! ([`selective`]), out-of-distribution detection ([`ood`]) and pool-based
//! active learning ([`active`]).

pub mod active;
pub mod error;
pub mod fuzz;
pub mod measures;
pub mod ood;
pub mod selective;
pub mod verify;

pub use active::{
    acquire, fit, make_blobs, make_epistemic_gap, run_active_learning, AcquisitionStrategy,
    ActiveLearningTrace, DataSplit, EnsembleLearner, LearnerConfig, TabularDataset,
};
pub use error::{Result, UqError};
pub use measures::{
    decompose, divergence, entropy, expected_loss, generic_triple, loss, mean_distribution,
    validate_simplex, CategoricalDistribution, Component, ScoringRule, SecondOrderSample,
    UncertaintyTriple, SIMPLEX_TOLERANCE,
};
pub use ood::{auroc, auroc_pairwise, run_ood, AurocResult, ScoreSplit};
pub use selective::{
    aulc, aulc_weighted, optimal_aulc_bruteforce, order_by_uncertainty, run_selective_prediction,
    AulcResult, CurvePoint, Direction, InstanceLosses, Ordering,
};
