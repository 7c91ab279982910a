//! Least-squares fits: ordinary least squares for the linear working model,
//! conditional-mean estimators (cell means or BIC-selected polynomial
//! regressions), and conditional-CDF estimators for the log-odds-ratio case.

use super::logit::{dot, fit_grouped_logit, solve_spd, LogitError, LogitRow};
use super::NuisanceError;
use crate::dataset::{cell_key, ColumnKind, ContinuousDataset, CovRow, CovariateSchema, OrdinalDataset};
use nalgebra::{DMatrix, DVector};
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};

/// Fitted linear model y ~ alpha + beta' x on the one-hot design encoding.
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub alpha: f64,
    pub beta: Vec<f64>,
}

impl LinearFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.alpha + dot(&self.beta, x)
    }
}

/// OLS via the normal equations. Fails with `SingularDesign` when the design
/// `[1, X]` is rank-deficient.
pub fn fit_ols(data: &ContinuousDataset) -> Result<LinearFit, NuisanceError> {
    let designs: Vec<Vec<f64>> = data.w.iter().map(|w| data.schema.design_row(w)).collect();
    let weights = vec![1.0; data.n()];
    fit_ols_weighted(&designs, &data.y, &weights)
}

/// Weighted OLS on pre-encoded design rows.
pub fn fit_ols_weighted(
    designs: &[Vec<f64>],
    y: &[f64],
    weights: &[f64],
) -> Result<LinearFit, NuisanceError> {
    let d = designs.first().map_or(0, |r| r.len());
    let p = d + 1;
    let mut xtx = DMatrix::zeros(p, p);
    let mut xty = DVector::zeros(p);
    for ((x, &yi), &wi) in designs.iter().zip(y).zip(weights) {
        if wi <= 0.0 {
            continue;
        }
        let mut full = Vec::with_capacity(p);
        full.push(1.0);
        full.extend_from_slice(x);
        for a in 0..p {
            xty[a] += wi * full[a] * yi;
            for b in 0..p {
                xtx[(a, b)] += wi * full[a] * full[b];
            }
        }
    }
    // Rank check before the ridge-assisted solve: a genuinely collinear
    // design must surface as SingularDesign, not be papered over.
    let svd = xtx.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > smax * 1e-12) {
        return Err(NuisanceError::SingularDesign);
    }
    let sol = solve_spd(&xtx, &xty).ok_or(NuisanceError::SingularDesign)?;
    Ok(LinearFit {
        alpha: sol[0],
        beta: (1..p).map(|j| sol[j]).collect(),
    })
}

/// Polynomial basis over the covariates: powers 1..=degree of each
/// standardized continuous column, plus one-hot dummies for discrete columns.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    degree: usize,
    /// (column index, mean, sd) per continuous column.
    continuous: Vec<(usize, f64, f64)>,
    /// (column index, number of levels) per discrete column.
    discrete: Vec<(usize, usize)>,
}

impl PolyBasis {
    /// Build the basis of the given degree from the schema and the fitting
    /// rows (which supply standardization constants).
    pub fn build(schema: &CovariateSchema, rows: &[CovRow], degree: usize) -> Self {
        let mut continuous = Vec::new();
        let mut discrete = Vec::new();
        for (col, (_, kind)) in schema.columns.iter().enumerate() {
            match kind {
                ColumnKind::Continuous => {
                    let vals: Vec<f64> = rows
                        .iter()
                        .map(|r| match r[col] {
                            crate::dataset::Covariate::Continuous(v) => v,
                            _ => unreachable!("schema mismatch"),
                        })
                        .collect();
                    let n = vals.len() as f64;
                    let mean = vals.iter().sum::<f64>() / n;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                    let sd = var.sqrt().max(1e-12);
                    continuous.push((col, mean, sd));
                }
                ColumnKind::Discrete { levels } => discrete.push((col, levels.len())),
            }
        }
        PolyBasis {
            degree,
            continuous,
            discrete,
        }
    }

    pub fn dim(&self) -> usize {
        self.continuous.len() * self.degree
            + self.discrete.iter().map(|(_, l)| l - 1).sum::<usize>()
    }

    pub fn row(&self, w: &CovRow) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for &(col, mean, sd) in &self.continuous {
            let v = match w[col] {
                crate::dataset::Covariate::Continuous(v) => (v - mean) / sd,
                _ => unreachable!("schema mismatch"),
            };
            let mut pow = 1.0;
            for _ in 0..self.degree {
                pow *= v;
                out.push(pow);
            }
        }
        for &(col, levels) in &self.discrete {
            let idx = match w[col] {
                crate::dataset::Covariate::Discrete(i) => i,
                _ => unreachable!("schema mismatch"),
            };
            for l in 1..levels {
                out.push(if idx == l { 1.0 } else { 0.0 });
            }
        }
        out
    }
}

/// Strategy for conditional-mean (and conditional-CDF) estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CondMeanStrategy {
    /// Sample averages within each exact discrete covariate cell.
    GroupMean,
    /// Polynomial least squares with the degree chosen from 1..=q_max by BIC.
    Polynomial { q_max: usize },
}

#[derive(Debug)]
enum CondMeanInner {
    GroupMean {
        cells: HashMap<Vec<usize>, f64>,
        grand_mean: f64,
    },
    Polynomial {
        basis: PolyBasis,
        fit: LinearFit,
        clamp: (f64, f64),
    },
}

/// A fitted conditional-mean function r(w).
#[derive(Debug)]
pub struct ConditionalMeanModel {
    inner: CondMeanInner,
    pub selected_degree: Option<usize>,
    fallbacks: AtomicUsize,
}

impl ConditionalMeanModel {
    pub fn predict(&self, w: &CovRow) -> f64 {
        match &self.inner {
            CondMeanInner::GroupMean { cells, grand_mean } => {
                let key = cell_key(w).expect("group-mean model requires discrete covariates");
                match cells.get(&key) {
                    Some(&m) => m,
                    None => {
                        self.fallbacks.fetch_add(1, Ordering::Relaxed);
                        *grand_mean
                    }
                }
            }
            CondMeanInner::Polynomial { basis, fit, clamp } => {
                fit.predict(&basis.row(w)).clamp(clamp.0, clamp.1)
            }
        }
    }

    /// Number of predictions that fell back to the grand mean because the
    /// covariate cell was unseen during fitting.
    pub fn fallback_count(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }
}

/// Fit a conditional-mean model of `targets` on the covariates.
pub fn fit_conditional_mean(
    targets: &[f64],
    w: &[CovRow],
    schema: &CovariateSchema,
    strategy: CondMeanStrategy,
) -> Result<ConditionalMeanModel, NuisanceError> {
    if targets.len() < 2 {
        return Err(NuisanceError::TooFewObservations {
            need: 2,
            got: targets.len(),
        });
    }
    match strategy {
        CondMeanStrategy::GroupMean => {
            if !schema.all_discrete() {
                return Err(NuisanceError::NotAllDiscrete);
            }
            let mut sums: HashMap<Vec<usize>, (f64, f64)> = HashMap::new();
            for (row, &t) in w.iter().zip(targets) {
                let e = sums.entry(cell_key(row).unwrap()).or_insert((0.0, 0.0));
                e.0 += t;
                e.1 += 1.0;
            }
            let cells = sums
                .into_iter()
                .map(|(k, (s, c))| (k, s / c))
                .collect();
            let grand_mean = targets.iter().sum::<f64>() / targets.len() as f64;
            Ok(ConditionalMeanModel {
                inner: CondMeanInner::GroupMean { cells, grand_mean },
                selected_degree: None,
                fallbacks: AtomicUsize::new(0),
            })
        }
        CondMeanStrategy::Polynomial { q_max } => {
            if !schema
                .columns
                .iter()
                .any(|(_, k)| matches!(k, ColumnKind::Continuous))
            {
                return Err(NuisanceError::NoContinuousCovariate);
            }
            let n = targets.len() as f64;
            let mean_sq = targets.iter().map(|t| t * t).sum::<f64>() / n;
            let rss_floor = n * 1e-20 * (1.0 + mean_sq);
            let mut best: Option<(f64, usize, PolyBasis, LinearFit)> = None;
            for q in 1..=q_max.max(1) {
                let basis = PolyBasis::build(schema, w, q);
                let designs: Vec<Vec<f64>> = w.iter().map(|r| basis.row(r)).collect();
                let weights = vec![1.0; targets.len()];
                let fit = match fit_ols_weighted(&designs, targets, &weights) {
                    Ok(f) => f,
                    Err(NuisanceError::SingularDesign) => continue,
                    Err(e) => return Err(e),
                };
                let rss: f64 = designs
                    .iter()
                    .zip(targets)
                    .map(|(x, &t)| (t - fit.predict(x)).powi(2))
                    .sum();
                let params = 1 + basis.dim();
                let bic = n * (rss.max(rss_floor) / n).ln() + params as f64 * n.ln();
                if best.as_ref().map_or(true, |(b, _, _, _)| bic < *b) {
                    best = Some((bic, q, basis, fit));
                }
            }
            let (_, q, basis, fit) = best.ok_or(NuisanceError::SingularDesign)?;
            let lo = targets.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = targets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok(ConditionalMeanModel {
                inner: CondMeanInner::Polynomial {
                    basis,
                    fit,
                    clamp: (lo, hi),
                },
                selected_degree: Some(q),
                fallbacks: AtomicUsize::new(0),
            })
        }
    }
}

#[derive(Debug)]
enum CondCdfInner {
    /// Conditional CDF tabulated per discrete cell; unseen cells fall back to
    /// the marginal CDF.
    GroupFreq {
        cells: HashMap<Vec<usize>, Vec<f64>>,
        marginal: Vec<f64>,
    },
    /// One logistic fit of I{Y <= k} per level on a BIC-selected polynomial
    /// basis.
    PerLevelLogistic { fits: Vec<LevelLogistic> },
}

#[derive(Debug)]
struct LevelLogistic {
    basis: PolyBasis,
    alpha: f64,
    beta: Vec<f64>,
}

/// A fitted conditional CDF theta(k, w), k = 1..K-1.
#[derive(Debug)]
pub struct ConditionalCdfModel {
    k: usize,
    inner: CondCdfInner,
    fallbacks: AtomicUsize,
}

impl ConditionalCdfModel {
    pub fn k(&self) -> usize {
        self.k
    }

    /// theta(k, w) for k in 0..=K with the boundary conventions.
    pub fn prob(&self, k: usize, w: &CovRow) -> f64 {
        if k == 0 {
            return 0.0;
        }
        if k >= self.k {
            return 1.0;
        }
        match &self.inner {
            CondCdfInner::GroupFreq { cells, marginal } => {
                let key = cell_key(w).expect("group-frequency model requires discrete covariates");
                match cells.get(&key) {
                    Some(f) => f[k - 1],
                    None => {
                        self.fallbacks.fetch_add(1, Ordering::Relaxed);
                        marginal[k - 1]
                    }
                }
            }
            CondCdfInner::PerLevelLogistic { fits } => {
                let f = &fits[k - 1];
                if f.alpha == f64::NEG_INFINITY {
                    return 0.0;
                }
                if f.alpha == f64::INFINITY {
                    return 1.0;
                }
                super::logit::expit(f.alpha + dot(&f.beta, &f.basis.row(w)))
            }
        }
    }

    pub fn fallback_count(&self) -> usize {
        self.fallbacks.load(Ordering::Relaxed)
    }
}

/// Fit a conditional-CDF model for the ordinal outcome.
pub fn fit_conditional_cdf(
    data: &OrdinalDataset,
    strategy: CondMeanStrategy,
) -> Result<ConditionalCdfModel, NuisanceError> {
    let k = data.k;
    match strategy {
        CondMeanStrategy::GroupMean => {
            if !data.schema.all_discrete() {
                return Err(NuisanceError::NotAllDiscrete);
            }
            let mut counts: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
            for (row, &yi) in data.w.iter().zip(&data.y) {
                let e = counts
                    .entry(cell_key(row).unwrap())
                    .or_insert_with(|| vec![0.0; k]);
                e[yi - 1] += 1.0;
            }
            let mut cells = HashMap::new();
            for (key, level_counts) in counts {
                let total: f64 = level_counts.iter().sum();
                let mut cum = 0.0;
                let mut f = Vec::with_capacity(k - 1);
                for lvl in 0..k - 1 {
                    cum += level_counts[lvl];
                    f.push(cum / total);
                }
                cells.insert(key, f);
            }
            let emp = crate::dataset::empirical_summary(data);
            let marginal = emp.f_cdf[..k - 1].to_vec();
            Ok(ConditionalCdfModel {
                k,
                inner: CondCdfInner::GroupFreq { cells, marginal },
                fallbacks: AtomicUsize::new(0),
            })
        }
        CondMeanStrategy::Polynomial { q_max } => {
            if !data
                .schema
                .columns
                .iter()
                .any(|(_, kd)| matches!(kd, ColumnKind::Continuous))
            {
                return Err(NuisanceError::NoContinuousCovariate);
            }
            let n = data.n() as f64;
            let mut fits = Vec::with_capacity(k - 1);
            for level in 1..k {
                let resp: Vec<f64> = data
                    .y
                    .iter()
                    .map(|&yi| if yi <= level { 1.0 } else { 0.0 })
                    .collect();
                let mut best: Option<(f64, LevelLogistic)> = None;
                for q in 1..=q_max.max(1) {
                    let basis = PolyBasis::build(&data.schema, &data.w, q);
                    let designs: Vec<Vec<f64>> = data.w.iter().map(|r| basis.row(r)).collect();
                    let rows: Vec<LogitRow> = resp
                        .iter()
                        .enumerate()
                        .map(|(i, &r)| LogitRow {
                            group: 0,
                            x: i,
                            resp: r,
                            weight: 1.0,
                        })
                        .collect();
                    let fit = match fit_grouped_logit(1, &designs, &rows, basis.dim(), 100) {
                        Ok(f) => f,
                        Err(LogitError::Singular) => continue,
                        Err(LogitError::Separation { last }) | Err(LogitError::NonConvergence { last, .. }) => {
                            // keep searching other degrees; a simpler basis may behave
                            let _ = last;
                            continue;
                        }
                    };
                    let params = 1 + basis.dim();
                    let bic = 2.0 * fit.neg_loglik + params as f64 * n.ln();
                    if best.as_ref().map_or(true, |(b, _)| bic < *b) {
                        best = Some((
                            bic,
                            LevelLogistic {
                                basis,
                                alpha: fit.alpha[0],
                                beta: fit.beta,
                            },
                        ));
                    }
                }
                let (_, fit) = best.ok_or(NuisanceError::SingularDesign)?;
                fits.push(fit);
            }
            Ok(ConditionalCdfModel {
                k,
                inner: CondCdfInner::PerLevelLogistic { fits },
                fallbacks: AtomicUsize::new(0),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ColumnKind, Covariate, CovariateSchema};
    use std::sync::Arc;

    fn continuous_schema() -> CovariateSchema {
        CovariateSchema::new(vec![("x".into(), ColumnKind::Continuous)]).unwrap()
    }

    #[test]
    fn ols_exact_line() {
        let schema = Arc::new(continuous_schema());
        let w: Vec<_> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&x| vec![Covariate::Continuous(x)])
            .collect();
        let data = ContinuousDataset::new(schema, vec![0.0, 1.0, 2.0], w).unwrap();
        let fit = fit_ols(&data).unwrap();
        assert!(fit.alpha.abs() < 1e-12);
        assert!((fit.beta[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ols_constant_outcome() {
        let schema = Arc::new(continuous_schema());
        let w: Vec<_> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&x| vec![Covariate::Continuous(x)])
            .collect();
        let data = ContinuousDataset::new(schema, vec![5.0, 5.0, 5.0], w).unwrap();
        let fit = fit_ols(&data).unwrap();
        assert!((fit.alpha - 5.0).abs() < 1e-12);
        assert!(fit.beta[0].abs() < 1e-12);
    }

    #[test]
    fn ols_hand_solved_normal_equations() {
        let schema = Arc::new(continuous_schema());
        let w: Vec<_> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&x| vec![Covariate::Continuous(x)])
            .collect();
        let data = ContinuousDataset::new(schema, vec![0.0, 1.0, 1.0], w).unwrap();
        let fit = fit_ols(&data).unwrap();
        assert!((fit.beta[0] - 0.5).abs() < 1e-12);
        assert!((fit.alpha - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ols_residuals_orthogonal_to_design() {
        let mut stream = crate::rng::RngStream::new(3);
        let schema = Arc::new(continuous_schema());
        let n = 60;
        let xs: Vec<f64> = (0..n).map(|_| stream.uniform()).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| 1.0 + 2.0 * x + stream.uniform() - 0.5)
            .collect();
        let w: Vec<_> = xs.iter().map(|&x| vec![Covariate::Continuous(x)]).collect();
        let data = ContinuousDataset::new(schema, ys.clone(), w).unwrap();
        let fit = fit_ols(&data).unwrap();
        let resid: Vec<f64> = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| y - fit.predict(&[x]))
            .collect();
        let s0: f64 = resid.iter().sum();
        let s1: f64 = resid.iter().zip(&xs).map(|(r, x)| r * x).sum();
        assert!(s0.abs() < 1e-10 * n as f64);
        assert!(s1.abs() < 1e-10 * n as f64);
        // fitted values uncorrelated with residuals
        let fitted: Vec<f64> = xs.iter().map(|&x| fit.predict(&[x])).collect();
        let fbar = fitted.iter().sum::<f64>() / n as f64;
        let cov: f64 = fitted
            .iter()
            .zip(&resid)
            .map(|(f, r)| (f - fbar) * r)
            .sum::<f64>()
            / n as f64;
        assert!(cov.abs() < 1e-10);
    }

    #[test]
    fn singular_design_is_detected() {
        let schema = Arc::new(
            CovariateSchema::new(vec![
                ("x1".into(), ColumnKind::Continuous),
                ("x2".into(), ColumnKind::Continuous),
            ])
            .unwrap(),
        );
        // x2 = 2 x1 exactly
        let w: Vec<_> = [0.0, 1.0, 2.0, 3.0]
            .iter()
            .map(|&x| vec![Covariate::Continuous(x), Covariate::Continuous(2.0 * x)])
            .collect();
        let data = ContinuousDataset::new(schema, vec![0.0, 1.0, 2.0, 3.0], w).unwrap();
        assert!(matches!(fit_ols(&data), Err(NuisanceError::SingularDesign)));
    }

    #[test]
    fn group_mean_cell_means_and_fallback() {
        let schema = CovariateSchema::new(vec![(
            "g".into(),
            ColumnKind::Discrete {
                levels: vec!["a".into(), "b".into(), "c".into()],
            },
        )])
        .unwrap();
        let w = vec![
            vec![Covariate::Discrete(0)],
            vec![Covariate::Discrete(0)],
            vec![Covariate::Discrete(1)],
        ];
        let model =
            fit_conditional_mean(&[1.0, 3.0, 2.0], &w, &schema, CondMeanStrategy::GroupMean)
                .unwrap();
        assert!((model.predict(&vec![Covariate::Discrete(0)]) - 2.0).abs() < 1e-15);
        assert!((model.predict(&vec![Covariate::Discrete(1)]) - 2.0).abs() < 1e-15);
        // unseen cell falls back to the grand mean and is counted
        assert!((model.predict(&vec![Covariate::Discrete(2)]) - 2.0).abs() < 1e-15);
        assert_eq!(model.fallback_count(), 1);
    }

    #[test]
    fn constant_targets_are_constant_predictions() {
        let schema = continuous_schema();
        let w: Vec<_> = (0..10)
            .map(|i| vec![Covariate::Continuous(i as f64 / 10.0)])
            .collect();
        let targets = vec![4.2; 10];
        let model = fit_conditional_mean(
            &targets,
            &w,
            &schema,
            CondMeanStrategy::Polynomial { q_max: 3 },
        )
        .unwrap();
        for row in &w {
            assert!((model.predict(row) - 4.2).abs() < 1e-9);
        }
    }

    #[test]
    fn bic_recovers_quadratic() {
        let schema = continuous_schema();
        let xs: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
        let w: Vec<_> = xs.iter().map(|&x| vec![Covariate::Continuous(x)]).collect();
        let targets: Vec<f64> = xs.iter().map(|&x| x * x).collect();
        let model = fit_conditional_mean(
            &targets,
            &w,
            &schema,
            CondMeanStrategy::Polynomial { q_max: 3 },
        )
        .unwrap();
        assert_eq!(model.selected_degree, Some(2));
        for (row, &t) in w.iter().zip(&targets) {
            assert!((model.predict(row) - t).abs() < 1e-8);
        }
    }

    #[test]
    fn conditional_cdf_group_freq() {
        let schema = Arc::new(
            CovariateSchema::new(vec![(
                "g".into(),
                ColumnKind::Discrete {
                    levels: vec!["a".into(), "b".into()],
                },
            )])
            .unwrap(),
        );
        let y = vec![1, 2, 3, 3, 1, 1];
        let w = vec![
            vec![Covariate::Discrete(0)],
            vec![Covariate::Discrete(0)],
            vec![Covariate::Discrete(0)],
            vec![Covariate::Discrete(1)],
            vec![Covariate::Discrete(1)],
            vec![Covariate::Discrete(1)],
        ];
        let data = OrdinalDataset::new(3, schema, y, w).unwrap();
        let model = fit_conditional_cdf(&data, CondMeanStrategy::GroupMean).unwrap();
        let a = vec![Covariate::Discrete(0)];
        assert!((model.prob(1, &a) - 1.0 / 3.0).abs() < 1e-15);
        assert!((model.prob(2, &a) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(model.prob(3, &a), 1.0);
    }
}
