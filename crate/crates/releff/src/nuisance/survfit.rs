//! Discrete-time conditional survival, hazard, and censoring fits.
//!
//! The event hazard h(t_j, w) = P(T = t_j | T >= t_j, W = w) is fit by
//! maximizing the binomial likelihood over person-time rows: an observation
//! is at risk at t_j iff y >= t_j and the response is I{y = t_j, delta = 1}.
//! The censoring hazard is fit the same way with response I{y = t_j,
//! delta = 0}; under the events-before-censoring tie convention an event at
//! t_j leaves the censoring risk set at t_j, so those rows are excluded.
//! Survivor functions come from the product formula.

use super::linear::PolyBasis;
use super::logit::{fit_grouped_logit, GroupedLogitFit, LogitError, LogitRow};
use super::NuisanceError;
use crate::dataset::{cell_key, SurvivalDataset};
use std::collections::HashMap;

/// Strategy for the conditional hazard fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvStrategy {
    /// Separate binomial MLE d_j / R_j within each discrete covariate cell.
    Stratified,
    /// Logistic model with one intercept per time bin and a shared
    /// BIC-selected polynomial basis in the covariates.
    Polynomial { q_max: usize },
}

#[derive(Debug)]
enum HazardModel {
    Stratified {
        /// hazard per cell, indexed [cell][j-1]; NaN marks undefined entries
        cells: HashMap<Vec<usize>, Vec<f64>>,
    },
    Logistic {
        basis: PolyBasis,
        fit: GroupedLogitFit,
        selected_degree: usize,
    },
}

impl HazardModel {
    fn hazard(&self, j: usize, w: &crate::dataset::CovRow) -> f64 {
        match self {
            HazardModel::Stratified { cells } => {
                let key = cell_key(w).expect("stratified fit requires discrete covariates");
                cells.get(&key).map_or(f64::NAN, |h| h[j - 1])
            }
            HazardModel::Logistic { basis, fit, .. } => {
                let a = fit.alpha[j - 1];
                if a.is_nan() {
                    return f64::NAN;
                }
                fit.prob(j - 1, &basis.row(w))
            }
        }
    }
}

/// Fitted conditional event hazard, censoring hazard, and derived survivor
/// functions on the time grid.
#[derive(Debug)]
pub struct DiscreteSurvivalFit {
    pub horizon: usize,
    event: HazardModel,
    censor: HazardModel,
}

impl DiscreteSurvivalFit {
    /// Event hazard h(t_j, w), 1-based j.
    pub fn hazard(&self, j: usize, w: &crate::dataset::CovRow) -> f64 {
        self.event.hazard(j, w)
    }

    /// Censoring hazard P(C = t_j | C >= t_j, W = w), 1-based j.
    pub fn censor_hazard(&self, j: usize, w: &crate::dataset::CovRow) -> f64 {
        self.censor.hazard(j, w)
    }

    /// Conditional survivor S(t_j, w) with S(t_0, w) = 1.
    pub fn survivor(&self, j: usize, w: &crate::dataset::CovRow) -> f64 {
        (1..=j).map(|l| 1.0 - self.hazard(l, w)).product()
    }

    /// Conditional censoring survivor H(t_j, w) = P(C >= t_j | w), with
    /// H(t_1, w) = 1.
    pub fn censor_survivor(&self, j: usize, w: &crate::dataset::CovRow) -> f64 {
        (1..j).map(|l| 1.0 - self.censor_hazard(l, w)).product()
    }

    /// Tabulate h, S, and H for every data row out to the fit horizon.
    pub fn tabulate(&self, data: &SurvivalDataset) -> SurvivalTables {
        let n = data.n();
        let horizon = self.horizon;
        let mut h = vec![vec![0.0; horizon + 1]; n];
        let mut s = vec![vec![1.0; horizon + 1]; n];
        let mut big_h = vec![vec![1.0; horizon + 1]; n];
        for (i, w) in data.w.iter().enumerate() {
            for j in 1..=horizon {
                let hj = self.hazard(j, w);
                h[i][j] = hj;
                s[i][j] = s[i][j - 1] * (1.0 - hj);
                big_h[i][j] = if j == 1 {
                    1.0
                } else {
                    big_h[i][j - 1] * (1.0 - self.censor_hazard(j - 1, w))
                };
            }
        }
        SurvivalTables {
            horizon,
            h,
            s,
            big_h,
        }
    }
}

/// Per-observation tabulation of the fitted nuisance functions; index 0 is
/// the baseline time t_0.
#[derive(Debug, Clone)]
pub struct SurvivalTables {
    pub horizon: usize,
    /// h[i][j] = event hazard at t_j for observation i (h[i][0] unused).
    pub h: Vec<Vec<f64>>,
    /// s[i][j] = S(t_j, W_i), s[i][0] = 1.
    pub s: Vec<Vec<f64>>,
    /// big_h[i][j] = H(t_j, W_i) = P(C >= t_j | W_i), big_h[i][1] = 1.
    pub big_h: Vec<Vec<f64>>,
}

/// Fit the event and censoring hazards out to `horizon` grid points.
///
/// Fails with `EmptyRiskSet(j)` when some hazard needed at or before the
/// horizon has an empty risk set.
pub fn fit_discrete_survival(
    data: &SurvivalDataset,
    strategy: SurvStrategy,
    horizon: usize,
) -> Result<DiscreteSurvivalFit, NuisanceError> {
    assert!(horizon >= 1 && horizon <= data.k());
    let event = fit_hazard(data, strategy, horizon, true)?;
    // H(t_j) is only needed through j = horizon, so the censoring hazard is
    // only needed through horizon - 1.
    let censor = if horizon > 1 {
        fit_hazard(data, strategy, horizon - 1, false)?
    } else {
        match strategy {
            SurvStrategy::Stratified => HazardModel::Stratified {
                cells: HashMap::new(),
            },
            SurvStrategy::Polynomial { .. } => HazardModel::Stratified {
                cells: HashMap::new(),
            },
        }
    };
    Ok(DiscreteSurvivalFit {
        horizon,
        event,
        censor,
    })
}

fn at_risk(event_side: bool, y: usize, delta: u8, j: usize) -> bool {
    if event_side {
        y >= j
    } else {
        // events at t_j precede censoring and leave the censoring risk set
        y > j || (y == j && delta == 0)
    }
}

fn response(event_side: bool, y: usize, delta: u8, j: usize) -> f64 {
    let hit = if event_side {
        y == j && delta == 1
    } else {
        y == j && delta == 0
    };
    if hit {
        1.0
    } else {
        0.0
    }
}

fn fit_hazard(
    data: &SurvivalDataset,
    strategy: SurvStrategy,
    horizon: usize,
    event_side: bool,
) -> Result<HazardModel, NuisanceError> {
    match strategy {
        SurvStrategy::Stratified => {
            if !data.schema.all_discrete() {
                return Err(NuisanceError::NotAllDiscrete);
            }
            let mut risk: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
            let mut hits: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
            for i in 0..data.n() {
                let key = cell_key(&data.w[i]).unwrap();
                let r = risk.entry(key.clone()).or_insert_with(|| vec![0.0; horizon]);
                let d = hits.entry(key).or_insert_with(|| vec![0.0; horizon]);
                for j in 1..=horizon {
                    if at_risk(event_side, data.y[i], data.delta[i], j) {
                        r[j - 1] += 1.0;
                        d[j - 1] += response(event_side, data.y[i], data.delta[i], j);
                    }
                }
            }
            let mut cells = HashMap::new();
            for (key, r) in risk {
                let d = &hits[&key];
                let mut hz = Vec::with_capacity(horizon);
                for j in 1..=horizon {
                    if r[j - 1] <= 0.0 {
                        return Err(NuisanceError::EmptyRiskSet(j));
                    }
                    hz.push(d[j - 1] / r[j - 1]);
                }
                cells.insert(key, hz);
            }
            Ok(HazardModel::Stratified { cells })
        }
        SurvStrategy::Polynomial { q_max } => {
            if !data
                .schema
                .columns
                .iter()
                .any(|(_, k)| matches!(k, crate::dataset::ColumnKind::Continuous))
            {
                return Err(NuisanceError::NoContinuousCovariate);
            }
            // risk-set check
            for j in 1..=horizon {
                let any = (0..data.n()).any(|i| at_risk(event_side, data.y[i], data.delta[i], j));
                if !any {
                    return Err(NuisanceError::EmptyRiskSet(j));
                }
            }
            let mut best: Option<(f64, usize, PolyBasis, GroupedLogitFit)> = None;
            for q in 1..=q_max.max(1) {
                let basis = PolyBasis::build(&data.schema, &data.w, q);
                let designs: Vec<Vec<f64>> = data.w.iter().map(|r| basis.row(r)).collect();
                let mut rows = Vec::new();
                for i in 0..data.n() {
                    for j in 1..=horizon {
                        if at_risk(event_side, data.y[i], data.delta[i], j) {
                            rows.push(LogitRow {
                                group: j - 1,
                                x: i,
                                resp: response(event_side, data.y[i], data.delta[i], j),
                                weight: 1.0,
                            });
                        }
                    }
                }
                let n_rows = rows.len() as f64;
                let fit = match fit_grouped_logit(horizon, &designs, &rows, basis.dim(), 100) {
                    Ok(f) => f,
                    Err(LogitError::Singular) => continue,
                    Err(LogitError::NonConvergence { .. }) | Err(LogitError::Separation { .. }) => {
                        continue
                    }
                };
                let active = fit.alpha.iter().filter(|a| a.is_finite()).count();
                let params = active + basis.dim();
                let bic = 2.0 * fit.neg_loglik + params as f64 * n_rows.ln();
                if best.as_ref().map_or(true, |(b, _, _, _)| bic < *b) {
                    best = Some((bic, q, basis, fit));
                }
            }
            let (_, q, basis, fit) = best.ok_or(NuisanceError::NonConvergence {
                iterations: 100,
                last: None,
            })?;
            Ok(HazardModel::Logistic {
                basis,
                fit,
                selected_degree: q,
            })
        }
    }
}

impl DiscreteSurvivalFit {
    /// Selected polynomial degrees (event, censoring), when applicable.
    pub fn selected_degrees(&self) -> (Option<usize>, Option<usize>) {
        let get = |m: &HazardModel| match m {
            HazardModel::Logistic {
                selected_degree, ..
            } => Some(*selected_degree),
            HazardModel::Stratified { .. } => None,
        };
        (get(&self.event), get(&self.censor))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ColumnKind, Covariate, CovariateSchema, SurvivalDataset};
    use std::sync::Arc;

    fn two_cell_schema() -> Arc<CovariateSchema> {
        Arc::new(
            CovariateSchema::new(vec![(
                "g".into(),
                ColumnKind::Discrete {
                    levels: vec!["a".into(), "b".into()],
                },
            )])
            .unwrap(),
        )
    }

    #[test]
    fn single_stratum_hazard_is_events_over_risk() {
        let schema = two_cell_schema();
        // 5 subjects in one cell: events at t1, t2, t2; censored at t2; survives to t3
        let y = vec![1, 2, 2, 2, 3];
        let delta = vec![1, 1, 1, 0, 0];
        let w = vec![vec![Covariate::Discrete(0)]; 5];
        let data = SurvivalDataset::new(vec![1.0, 2.0, 3.0], schema, y, delta, w).unwrap();
        let fit = fit_discrete_survival(&data, SurvStrategy::Stratified, 3).unwrap();
        let w0 = vec![Covariate::Discrete(0)];
        assert!((fit.hazard(1, &w0) - 1.0 / 5.0).abs() < 1e-15);
        assert!((fit.hazard(2, &w0) - 2.0 / 4.0).abs() < 1e-15);
        assert!((fit.hazard(3, &w0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn no_censoring_matches_kaplan_meier_within_stratum() {
        let mut stream = crate::rng::RngStream::new(9);
        let schema = two_cell_schema();
        let n = 80;
        let mut y = Vec::new();
        let mut delta = Vec::new();
        let mut w = Vec::new();
        for _ in 0..n {
            let cell = stream.index(2);
            y.push(1 + stream.index(4));
            delta.push(1);
            w.push(vec![Covariate::Discrete(cell)]);
        }
        let data =
            SurvivalDataset::new(vec![1.0, 2.0, 3.0, 4.0], schema, y.clone(), delta, w.clone())
                .unwrap();
        let fit = fit_discrete_survival(&data, SurvStrategy::Stratified, 4).unwrap();

        for cell in 0..2usize {
            let members: Vec<usize> = (0..n)
                .filter(|&i| w[i] == vec![Covariate::Discrete(cell)])
                .collect();
            let m = members.len() as f64;
            let wrow = vec![Covariate::Discrete(cell)];
            for j in 1..=4usize {
                // without censoring the KM product equals the empirical survivor
                let frac = members.iter().filter(|&&i| y[i] > j).count() as f64 / m;
                assert!(
                    (fit.survivor(j, &wrow) - frac).abs() < 1e-12,
                    "cell {cell} t{j}"
                );
            }
        }
    }

    #[test]
    fn all_censored_at_t1_gives_empty_risk_set() {
        let schema = two_cell_schema();
        let y = vec![1, 1, 1];
        let delta = vec![0, 0, 1]; // one event so the dataset is valid
        let w = vec![vec![Covariate::Discrete(0)]; 3];
        let data = SurvivalDataset::new(vec![1.0, 2.0, 3.0], schema, y, delta, w).unwrap();
        let err = fit_discrete_survival(&data, SurvStrategy::Stratified, 3).unwrap_err();
        assert!(matches!(err, NuisanceError::EmptyRiskSet(2)));
    }

    #[test]
    fn censoring_hazard_ignores_tied_events() {
        let schema = two_cell_schema();
        // at t1: 2 events, 1 censored, 2 move on
        let y = vec![1, 1, 1, 2, 2];
        let delta = vec![1, 1, 0, 1, 0];
        let w = vec![vec![Covariate::Discrete(0)]; 5];
        let data = SurvivalDataset::new(vec![1.0, 2.0], schema, y, delta, w).unwrap();
        let fit = fit_discrete_survival(&data, SurvStrategy::Stratified, 2).unwrap();
        let w0 = vec![Covariate::Discrete(0)];
        // censoring risk set at t1 excludes the two events: 1 censored of 3
        assert!((fit.censor_hazard(1, &w0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((fit.censor_survivor(2, &w0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_fit_recovers_w_independent_hazard() {
        let mut stream = crate::rng::RngStream::new(31);
        let schema = Arc::new(
            CovariateSchema::new(vec![("x".into(), ColumnKind::Continuous)]).unwrap(),
        );
        let n = 4000;
        let grid: Vec<f64> = (1..=3).map(|j| j as f64).collect();
        let mut y = Vec::new();
        let mut delta = Vec::new();
        let mut w = Vec::new();
        for _ in 0..n {
            // constant discrete hazard 0.3, no censoring before horizon
            let mut t = 3usize;
            for j in 1..=3usize {
                if stream.uniform() < 0.3 {
                    t = j;
                    break;
                }
            }
            let d = if t < 3 || stream.uniform() < 0.3 { 1 } else { 0 };
            y.push(t);
            delta.push(if t < 3 { 1 } else { d });
            w.push(vec![Covariate::Continuous(stream.uniform())]);
        }
        let data = SurvivalDataset::new(grid, schema, y, delta, w).unwrap();
        let fit =
            fit_discrete_survival(&data, SurvStrategy::Polynomial { q_max: 2 }, 3).unwrap();
        let probe = vec![Covariate::Continuous(0.5)];
        for j in 1..=2usize {
            assert!(
                (fit.hazard(j, &probe) - 0.3).abs() < 0.05,
                "hazard at {j}: {}",
                fit.hazard(j, &probe)
            );
        }
    }
}
