//! Nuisance-function estimation: least squares, the proportional-odds working
//! model, flexible conditional means / conditional CDFs, and discrete-time
//! conditional survival, hazard, and censoring fits.

mod linear;
mod logit;
mod propodds;
mod survfit;

pub use linear::{
    fit_conditional_cdf, fit_conditional_mean, fit_ols, ConditionalCdfModel, ConditionalMeanModel,
    CondMeanStrategy, LinearFit, PolyBasis,
};
pub use logit::{expit, GroupedLogitFit};
pub use propodds::{fit_proportional_odds, fit_proportional_odds_weighted, WorkingModelFit};
pub use survfit::{fit_discrete_survival, DiscreteSurvivalFit, SurvStrategy, SurvivalTables};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NuisanceError {
    #[error("design matrix is singular")]
    SingularDesign,
    #[error("optimizer did not converge within {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        last: Option<Box<WorkingModelFit>>,
    },
    #[error("separation detected: coefficients diverging")]
    SeparationDetected { last: Option<Box<WorkingModelFit>> },
    #[error("empty risk set at grid index {0}")]
    EmptyRiskSet(usize),
    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },
    #[error("polynomial strategy requires at least one continuous covariate")]
    NoContinuousCovariate,
    #[error("group-mean strategy requires all-discrete covariates")]
    NotAllDiscrete,
}
