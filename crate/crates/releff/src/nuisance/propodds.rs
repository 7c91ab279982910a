//! Proportional-odds working model for ordinal outcomes.
//!
//! The model sets logit P(Y <= k | W = w) = alpha(k) + beta' w for
//! k = 1..K-1 and is fit by minimizing the sum of the K-1 binary
//! log-likelihood losses, which is jointly convex in (alpha, beta). Levels
//! with no observations on one side get alpha(k) = +/-inf and the conventions
//! expit(-inf) = 0, expit(inf) = 1.

use super::logit::{dot, fit_grouped_logit, GroupedLogitFit, LogitError, LogitRow};
use super::NuisanceError;
use crate::dataset::OrdinalDataset;
use serde_json::json;

/// Fitted proportional-odds coefficients.
#[derive(Debug, Clone)]
pub struct WorkingModelFit {
    /// Thresholds alpha(1..K-1); entries may be +/-inf for degenerate levels.
    pub alpha: Vec<f64>,
    /// Coefficients on the one-hot design encoding of the covariates.
    pub beta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// False when the unconstrained optimum violates alpha(1) <= ... <= alpha(K-1),
    /// which signals severe misspecification but does not invalidate anything.
    pub alpha_monotone: bool,
}

impl WorkingModelFit {
    pub(crate) fn from_logit(fit: GroupedLogitFit) -> Self {
        let alpha_monotone = fit
            .alpha
            .windows(2)
            .all(|p| p[0].is_nan() || p[1].is_nan() || p[0] <= p[1]);
        WorkingModelFit {
            alpha: fit.alpha,
            beta: fit.beta,
            converged: fit.converged,
            iterations: fit.iterations,
            alpha_monotone,
        }
    }

    /// Number of outcome levels.
    pub fn k(&self) -> usize {
        self.alpha.len() + 1
    }

    /// Model CDF theta(k, w) for k in 0..=K, with theta(0, w) = 0 and
    /// theta(K, w) = 1.
    pub fn theta(&self, k: usize, x: &[f64]) -> f64 {
        if k == 0 {
            return 0.0;
        }
        if k >= self.k() {
            return 1.0;
        }
        let a = self.alpha[k - 1];
        if a == f64::NEG_INFINITY {
            return 0.0;
        }
        if a == f64::INFINITY {
            return 1.0;
        }
        super::logit::expit(a + dot(&self.beta, x))
    }

    /// Whether level k (1-based, k < K) was finite in the optimization.
    pub fn level_active(&self, k: usize) -> bool {
        self.alpha[k - 1].is_finite()
    }

    /// JSON summary for audit output; infinite thresholds are rendered as
    /// strings because JSON has no infinity literal.
    pub fn summary_json(&self) -> serde_json::Value {
        let alpha: Vec<serde_json::Value> = self
            .alpha
            .iter()
            .map(|a| {
                if a.is_finite() {
                    json!(a)
                } else if *a > 0.0 {
                    json!("inf")
                } else {
                    json!("-inf")
                }
            })
            .collect();
        json!({
            "model": "proportional_odds",
            "alpha": alpha,
            "beta": self.beta,
            "converged": self.converged,
            "iterations": self.iterations,
            "alpha_monotone": self.alpha_monotone,
        })
    }
}

fn map_logit_error(err: LogitError) -> NuisanceError {
    match err {
        LogitError::Singular => NuisanceError::SingularDesign,
        LogitError::NonConvergence { iterations, last } => NuisanceError::NonConvergence {
            iterations,
            last: Some(Box::new(WorkingModelFit::from_logit(last))),
        },
        LogitError::Separation { last } => NuisanceError::SeparationDetected {
            last: Some(Box::new(WorkingModelFit::from_logit(last))),
        },
    }
}

/// Fit the proportional-odds model on an ordinal dataset.
pub fn fit_proportional_odds(data: &OrdinalDataset) -> Result<WorkingModelFit, NuisanceError> {
    let designs: Vec<Vec<f64>> = data.w.iter().map(|w| data.schema.design_row(w)).collect();
    let weights = vec![1.0; data.n()];
    fit_proportional_odds_weighted(data.k, &data.y, &designs, &weights)
}

/// Weighted fit on pre-encoded design rows. Weights need not be integers;
/// population-level solves pass probabilities.
pub fn fit_proportional_odds_weighted(
    k: usize,
    y: &[usize],
    designs: &[Vec<f64>],
    weights: &[f64],
) -> Result<WorkingModelFit, NuisanceError> {
    assert!(k >= 2);
    assert_eq!(y.len(), designs.len());
    assert_eq!(y.len(), weights.len());
    let dim = designs.first().map_or(0, |d| d.len());
    let mut rows = Vec::with_capacity(y.len() * (k - 1));
    for (i, (&yi, &wi)) in y.iter().zip(weights).enumerate() {
        if wi <= 0.0 {
            continue;
        }
        for level in 1..k {
            rows.push(LogitRow {
                group: level - 1,
                x: i,
                resp: if yi <= level { 1.0 } else { 0.0 },
                weight: wi,
            });
        }
    }
    fit_grouped_logit(k - 1, designs, &rows, dim, 100)
        .map(WorkingModelFit::from_logit)
        .map_err(map_logit_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ColumnKind, Covariate, CovariateSchema, OrdinalDataset};
    use crate::rng::RngStream;
    use std::sync::Arc;

    fn continuous_schema() -> Arc<CovariateSchema> {
        Arc::new(CovariateSchema::new(vec![("x".into(), ColumnKind::Continuous)]).unwrap())
    }

    /// Independent IRLS logistic regression used as an oracle for K = 2.
    fn irls_logistic(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len();
        let mut a = 0.0;
        let mut b = 0.0;
        for _ in 0..200 {
            let mut s_w = 0.0;
            let mut s_wx = 0.0;
            let mut s_wxx = 0.0;
            let mut s_wz = 0.0;
            let mut s_wxz = 0.0;
            for i in 0..n {
                let eta = a + b * x[i];
                let mu = super::super::logit::expit(eta);
                let wt = (mu * (1.0 - mu)).max(1e-12);
                let z = eta + (y[i] - mu) / wt;
                s_w += wt;
                s_wx += wt * x[i];
                s_wxx += wt * x[i] * x[i];
                s_wz += wt * z;
                s_wxz += wt * x[i] * z;
            }
            let det = s_w * s_wxx - s_wx * s_wx;
            let new_a = (s_wxx * s_wz - s_wx * s_wxz) / det;
            let new_b = (s_w * s_wxz - s_wx * s_wz) / det;
            let done = (new_a - a).abs() < 1e-12 && (new_b - b).abs() < 1e-12;
            a = new_a;
            b = new_b;
            if done {
                break;
            }
        }
        (a, b)
    }

    #[test]
    fn k2_matches_irls_oracle() {
        let mut stream = RngStream::new(17);
        let schema = continuous_schema();
        for rep in 0..50 {
            let n = 40 + stream.index(40);
            let truth_b = stream.uniform() * 2.0 - 1.0;
            let xs: Vec<f64> = (0..n).map(|_| stream.uniform() * 2.0 - 1.0).collect();
            let y: Vec<usize> = xs
                .iter()
                .map(|&x| {
                    let p = super::super::logit::expit(-0.2 + truth_b * x);
                    if stream.uniform() < p {
                        1
                    } else {
                        2
                    }
                })
                .collect();
            if y.iter().all(|&v| v == y[0]) {
                continue;
            }
            let w: Vec<_> = xs.iter().map(|&x| vec![Covariate::Continuous(x)]).collect();
            let data = OrdinalDataset::new(2, schema.clone(), y.clone(), w).unwrap();
            let fit = fit_proportional_odds(&data).unwrap();

            // In this coding the model is logit P(Y <= 1 | x) = alpha + beta x,
            // i.e. a logistic regression on the indicator I{Y = 1}.
            let resp: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { 0.0 }).collect();
            let (oa, ob) = irls_logistic(&xs, &resp);
            assert!(
                (fit.alpha[0] - oa).abs() < 1e-6 && (fit.beta[0] - ob).abs() < 1e-6,
                "rep {rep}: ({}, {}) vs oracle ({oa}, {ob})",
                fit.alpha[0],
                fit.beta[0]
            );
        }
    }

    #[test]
    fn all_level_one_gives_infinite_threshold() {
        let schema = continuous_schema();
        let w: Vec<_> = (0..6)
            .map(|i| vec![Covariate::Continuous(i as f64)])
            .collect();
        let data = OrdinalDataset::new(2, schema, vec![1; 6], w).unwrap();
        let fit = fit_proportional_odds(&data).unwrap();
        assert_eq!(fit.alpha[0], f64::INFINITY);
        assert_eq!(fit.theta(1, &[3.0]), 1.0);
    }

    #[test]
    fn score_equations_hold_at_optimum() {
        let mut stream = RngStream::new(23);
        let schema = continuous_schema();
        let n = 120;
        let xs: Vec<f64> = (0..n).map(|_| stream.uniform()).collect();
        let y: Vec<usize> = xs
            .iter()
            .map(|&x| {
                let u = stream.uniform();
                if u < 0.3 + 0.2 * x {
                    1
                } else if u < 0.6 + 0.2 * x {
                    2
                } else {
                    3
                }
            })
            .collect();
        let w: Vec<_> = xs.iter().map(|&x| vec![Covariate::Continuous(x)]).collect();
        let data = OrdinalDataset::new(3, schema, y.clone(), w).unwrap();
        let fit = fit_proportional_odds(&data).unwrap();
        assert!(fit.converged);

        for level in 1..3 {
            let score: f64 = (0..n)
                .map(|i| {
                    let ind = if y[i] <= level { 1.0 } else { 0.0 };
                    ind - fit.theta(level, &[xs[i]])
                })
                .sum();
            assert!(score.abs() <= 1e-7 * n as f64, "level {level}: {score}");
        }
        let score_beta: f64 = (0..n)
            .map(|i| {
                xs[i]
                    * (1..3)
                        .map(|level| {
                            let ind = if y[i] <= level { 1.0 } else { 0.0 };
                            ind - fit.theta(level, &[xs[i]])
                        })
                        .sum::<f64>()
            })
            .sum();
        assert!(score_beta.abs() <= 1e-7 * n as f64);
    }

    #[test]
    fn independent_outcome_recovers_marginal_cdf() {
        // With a balanced two-point design and Y independent of W by
        // construction (identical outcome pattern in both cells), the fit
        // reproduces beta = 0 and theta(k, w) = F(k) exactly.
        let schema = Arc::new(
            CovariateSchema::new(vec![(
                "g".into(),
                ColumnKind::Discrete {
                    levels: vec!["a".into(), "b".into()],
                },
            )])
            .unwrap(),
        );
        let mut y = Vec::new();
        let mut w = Vec::new();
        for cell in 0..2usize {
            for &yi in &[1usize, 1, 2, 3, 3, 3] {
                y.push(yi);
                w.push(vec![Covariate::Discrete(cell)]);
            }
        }
        let data = OrdinalDataset::new(3, schema, y, w).unwrap();
        let fit = fit_proportional_odds(&data).unwrap();
        assert!(fit.beta[0].abs() < 1e-8);
        let f1 = 2.0 / 6.0;
        let f2 = 3.0 / 6.0;
        assert!((fit.theta(1, &[0.0]) - f1).abs() < 1e-8);
        assert!((fit.theta(2, &[1.0]) - f2).abs() < 1e-8);
    }
}
