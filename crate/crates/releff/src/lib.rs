//! Estimate, from an external dataset, the relative efficiency of
//! covariate-adjusted versus unadjusted treatment-effect estimators for a
//! planned randomized trial.
//!
//! The crate covers fully observed outcomes (continuous and ordinal;
//! estimands ATE, DIM, MW, LOR) and right-censored survival outcomes on a
//! discrete time grid (RD/RR at a time point and RMST), with analytic
//! Wald-type confidence intervals, a degeneracy-robust two-step confidence
//! set, a double-bootstrap interval for working-model estimators, and a
//! Monte Carlo harness with exact population-truth oracles for the built-in
//! data-generating processes.

pub mod bootstrap;
pub mod dataset;
pub mod fully_observed;
pub mod inference;
pub mod nuisance;
pub mod rng;
pub mod simulation;
pub mod survival;
pub mod trial;

pub use dataset::{
    bin_survival, empirical_summary, load_csv, validate_trial, ColumnKind, ContinuousDataset,
    ContinuousTrial, CovariateSchema, Covariate, DataError, Dataset, Empirical, GridSpec,
    OrdinalDataset, OrdinalTrial, OutcomeSpec, SurvivalDataset,
};
pub use rng::RngStream;
