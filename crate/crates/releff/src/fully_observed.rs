//! Variance components and influence values for fully observed outcomes:
//! ATE (continuous) and DIM, MW, LOR (ordinal), assembled into relative
//! efficiency estimates.
//!
//! All empirical variances use divisor n. Each estimator comes with its
//! per-observation influence values; the working-model variants carry the
//! estimating-equation correction for the fitted coefficients and the MW/LOR
//! variants the corrections for the estimated marginal distribution.

use crate::dataset::{empirical_summary, ContinuousDataset, Empirical, OrdinalDataset};
use crate::nuisance::{
    ConditionalCdfModel, ConditionalMeanModel, LinearFit, NuisanceError, WorkingModelFit,
};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReleffError {
    #[error("outcome is degenerate: unadjusted variance is zero")]
    DegenerateOutcome,
    #[error("empirical CDF hits the boundary at level {level}")]
    BoundaryCdf { level: usize },
    #[error("working-model fit did not converge")]
    NonConvergedFit,
    #[error("conditional-mean prediction falls outside the transformed outcome range")]
    ModelRangeViolation,
    #[error("variance bundles were computed on different observations")]
    MismatchedBundles,
    #[error("invalid outcome transform: {0}")]
    BadTransform(String),
    #[error(transparent)]
    Nuisance(#[from] NuisanceError),
}

/// Ordinal treatment-effect estimands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrdinalEstimand {
    Dim,
    Mw,
    Lor,
}

/// Which estimator a variance component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleLabel {
    Unadjusted,
    FullyAdjusted,
    WorkingModel,
}

/// Pre-specified monotone transformation u(1..K) for the DIM estimand.
#[derive(Debug, Clone, Serialize)]
pub struct TransformU {
    pub values: Vec<f64>,
}

impl TransformU {
    pub fn new(values: Vec<f64>) -> Result<Self, ReleffError> {
        if values.len() < 2 {
            return Err(ReleffError::BadTransform("need at least two levels".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ReleffError::BadTransform("values must be finite".into()));
        }
        let nondec = values.windows(2).all(|p| p[0] <= p[1]);
        let noninc = values.windows(2).all(|p| p[0] >= p[1]);
        if !nondec && !noninc {
            return Err(ReleffError::BadTransform("values must be monotone".into()));
        }
        Ok(TransformU { values })
    }

    pub fn identity(k: usize) -> Self {
        TransformU {
            values: (1..=k).map(|v| v as f64).collect(),
        }
    }

    pub fn apply(&self, y: usize) -> f64 {
        self.values[y - 1]
    }

    /// b_k = u(k) - u(k+1) for k = 1..K-1.
    pub fn diffs(&self) -> Vec<f64> {
        self.values.windows(2).map(|p| p[0] - p[1]).collect()
    }
}

/// One variance component together with its per-observation influence values.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceBundle {
    pub sigma2: f64,
    pub if_values: Vec<f64>,
    pub label: BundleLabel,
    pub estimand: &'static str,
}

impl VarianceBundle {
    pub fn n(&self) -> usize {
        self.if_values.len()
    }

    /// Mean of the squared influence values (the variance of the component's
    /// estimator, up to 1/n).
    pub fn if_second_moment(&self) -> f64 {
        self.if_values.iter().map(|v| v * v).sum::<f64>() / self.n() as f64
    }
}

/// A relative-efficiency estimate with its delta-method influence values.
#[derive(Debug, Clone, Serialize)]
pub struct RelEffEstimate {
    pub phi: f64,
    pub if_values: Vec<f64>,
    pub se: f64,
    pub kind: BundleLabel,
    pub n: usize,
}

/// phi = num / den with influence values (IF_num - phi IF_den) / den.sigma2.
pub fn releff(num: &VarianceBundle, den: &VarianceBundle) -> Result<RelEffEstimate, ReleffError> {
    if num.n() != den.n() {
        return Err(ReleffError::MismatchedBundles);
    }
    if !(den.sigma2 > 0.0) {
        return Err(ReleffError::DegenerateOutcome);
    }
    let phi = num.sigma2 / den.sigma2;
    let if_values: Vec<f64> = num
        .if_values
        .iter()
        .zip(&den.if_values)
        .map(|(a, b)| (a - phi * b) / den.sigma2)
        .collect();
    let n = if_values.len() as f64;
    let mean = if_values.iter().sum::<f64>() / n;
    let var = if_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(RelEffEstimate {
        phi,
        se: (var / n).sqrt(),
        if_values,
        kind: num.label,
        n: num.n(),
    })
}

fn estimand_name(e: OrdinalEstimand) -> &'static str {
    match e {
        OrdinalEstimand::Dim => "dim",
        OrdinalEstimand::Mw => "mw",
        OrdinalEstimand::Lor => "lor",
    }
}

fn resolve_u(
    estimand: OrdinalEstimand,
    k: usize,
    u: Option<&TransformU>,
) -> Result<TransformU, ReleffError> {
    match u {
        Some(t) => {
            if t.values.len() != k {
                return Err(ReleffError::BadTransform(format!(
                    "transform has {} values but K = {k}",
                    t.values.len()
                )));
            }
            if estimand != OrdinalEstimand::Dim {
                return Err(ReleffError::BadTransform(
                    "a transform applies to the DIM estimand only".into(),
                ));
            }
            Ok(t.clone())
        }
        None => Ok(TransformU::identity(k)),
    }
}

fn lor_denominators(emp: &Empirical) -> Result<Vec<f64>, ReleffError> {
    let k = emp.k();
    let mut c = Vec::with_capacity(k - 1);
    for level in 1..k {
        let f = emp.f_cdf[level - 1];
        if !(f > 0.0 && f < 1.0) {
            return Err(ReleffError::BoundaryCdf { level });
        }
        c.push(f * (1.0 - f));
    }
    Ok(c)
}

/// Plug-in unadjusted variance and influence values.
pub fn unadjusted_variance(
    data: &OrdinalDataset,
    estimand: OrdinalEstimand,
    u: Option<&TransformU>,
) -> Result<VarianceBundle, ReleffError> {
    let emp = empirical_summary(data);
    let n = data.n() as f64;
    let bundle = match estimand {
        OrdinalEstimand::Dim => {
            let u = resolve_u(estimand, data.k, u)?;
            let vals: Vec<f64> = data.y.iter().map(|&y| u.apply(y)).collect();
            variance_of(&vals, BundleLabel::Unadjusted, "dim")
        }
        OrdinalEstimand::Mw => {
            let sigma2 = (1.0 - emp.p.iter().map(|p| p.powi(3)).sum::<f64>()) / 12.0;
            let if_values: Vec<f64> = data
                .y
                .iter()
                .map(|&y| {
                    -(0..emp.k())
                        .map(|k| {
                            let ind = if y == k + 1 { 1.0 } else { 0.0 };
                            emp.p[k].powi(2) * (ind - emp.p[k])
                        })
                        .sum::<f64>()
                        / 4.0
                })
                .collect();
            VarianceBundle {
                sigma2,
                if_values,
                label: BundleLabel::Unadjusted,
                estimand: "mw",
            }
        }
        OrdinalEstimand::Lor => {
            let c = lor_denominators(&emp)?;
            let km1 = (data.k - 1) as f64;
            let bracket: Vec<f64> = data
                .y
                .iter()
                .map(|&y| {
                    (1..data.k)
                        .map(|k| {
                            let ind = if y <= k { 1.0 } else { 0.0 };
                            (ind - emp.f_cdf[k - 1]) / c[k - 1]
                        })
                        .sum::<f64>()
                        / km1
                })
                .collect();
            let sigma2 = bracket.iter().map(|b| b * b).sum::<f64>() / n;
            // correction for the estimated marginal CDF
            let mut coef = vec![0.0; data.k - 1];
            for (i, &y) in data.y.iter().enumerate() {
                for k in 1..data.k {
                    let ind = if y <= k { 1.0 } else { 0.0 };
                    let resid = ind - emp.f_cdf[k - 1];
                    coef[k - 1] += -2.0 / km1 * bracket[i] * resid * resid / (c[k - 1] * c[k - 1]);
                }
            }
            for v in coef.iter_mut() {
                *v /= n;
            }
            let if_values: Vec<f64> = data
                .y
                .iter()
                .zip(&bracket)
                .map(|(&y, &b)| {
                    let mut v = b * b - sigma2;
                    for k in 1..data.k {
                        let ind = if y <= k { 1.0 } else { 0.0 };
                        v += coef[k - 1] * (ind - emp.f_cdf[k - 1]);
                    }
                    v
                })
                .collect();
            VarianceBundle {
                sigma2,
                if_values,
                label: BundleLabel::Unadjusted,
                estimand: "lor",
            }
        }
    };
    if !(bundle.sigma2 > 0.0) {
        return Err(ReleffError::DegenerateOutcome);
    }
    Ok(bundle)
}

fn variance_of(vals: &[f64], label: BundleLabel, estimand: &'static str) -> VarianceBundle {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sigma2 = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let if_values = vals.iter().map(|v| (v - mean).powi(2) - sigma2).collect();
    VarianceBundle {
        sigma2,
        if_values,
        label,
        estimand,
    }
}

/// Nuisance model for the fully adjusted variance: a conditional mean of the
/// transformed outcome (DIM, MW) or a conditional CDF (LOR).
pub enum FullyAdjustedModel<'a> {
    Mean(&'a ConditionalMeanModel),
    Cdf(&'a ConditionalCdfModel),
}

/// One-step / plug-in fully adjusted variance and influence values.
///
/// For DIM the model must be fit on u(Y), for MW on the estimated midranks
/// eta(Y); for LOR a conditional-CDF model is required.
pub fn fully_adjusted_variance(
    data: &OrdinalDataset,
    estimand: OrdinalEstimand,
    model: &FullyAdjustedModel,
    u: Option<&TransformU>,
) -> Result<VarianceBundle, ReleffError> {
    let n = data.n() as f64;
    let emp = empirical_summary(data);
    match (estimand, model) {
        (OrdinalEstimand::Dim, FullyAdjustedModel::Mean(m)) => {
            let u = resolve_u(estimand, data.k, u)?;
            let targets: Vec<f64> = data.y.iter().map(|&y| u.apply(y)).collect();
            check_range(data, m, &targets)?;
            let resid: Vec<f64> = data
                .w
                .iter()
                .zip(&targets)
                .map(|(w, &t)| t - m.predict(w))
                .collect();
            let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / n;
            let if_values = resid.iter().map(|r| r * r - sigma2).collect();
            Ok(VarianceBundle {
                sigma2,
                if_values,
                label: BundleLabel::FullyAdjusted,
                estimand: "dim",
            })
        }
        (OrdinalEstimand::Mw, FullyAdjustedModel::Mean(m)) => {
            let targets: Vec<f64> = data.y.iter().map(|&y| emp.eta[y - 1]).collect();
            check_range(data, m, &targets)?;
            let resid: Vec<f64> = data
                .w
                .iter()
                .zip(&targets)
                .map(|(w, &t)| t - m.predict(w))
                .collect();
            let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / n;
            // cross term from the estimated midrank transform:
            // 2 E_n[ resid_j * h(y, Y_j) ] with h(y, v) = I{y < v} + I{y = v}/2
            let mut level_resid = vec![0.0; data.k];
            for (i, &y) in data.y.iter().enumerate() {
                level_resid[y - 1] += resid[i];
            }
            let mut suffix = vec![0.0; data.k + 1];
            for lvl in (0..data.k).rev() {
                suffix[lvl] = suffix[lvl + 1] + level_resid[lvl];
            }
            let cross = |y: usize| (suffix[y] + 0.5 * level_resid[y - 1]) / n;
            let if_values = data
                .y
                .iter()
                .zip(&resid)
                .map(|(&y, &r)| r * r + 2.0 * cross(y) - 3.0 * sigma2)
                .collect();
            Ok(VarianceBundle {
                sigma2,
                if_values,
                label: BundleLabel::FullyAdjusted,
                estimand: "mw",
            })
        }
        (OrdinalEstimand::Lor, FullyAdjustedModel::Cdf(model)) => {
            let theta = |k: usize, i: usize| model.prob(k, &data.w[i]);
            lor_adjusted_bundle(data, &emp, theta, BundleLabel::FullyAdjusted)
        }
        _ => Err(ReleffError::BadTransform(
            "nuisance model does not match the estimand".into(),
        )),
    }
}

fn check_range(
    data: &OrdinalDataset,
    m: &ConditionalMeanModel,
    targets: &[f64],
) -> Result<(), ReleffError> {
    let lo = targets.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = targets.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-8 * (hi - lo).abs().max(1.0);
    for w in &data.w {
        let r = m.predict(w);
        if r < lo - slack || r > hi + slack {
            return Err(ReleffError::ModelRangeViolation);
        }
    }
    Ok(())
}

/// Shared LOR variance assembly: plug a conditional CDF into the squared
/// bracket and correct for the estimated marginal CDF in the denominators.
fn lor_adjusted_bundle<F: Fn(usize, usize) -> f64>(
    data: &OrdinalDataset,
    emp: &Empirical,
    theta: F,
    label: BundleLabel,
) -> Result<VarianceBundle, ReleffError> {
    let k = data.k;
    let km1 = (k - 1) as f64;
    let n = data.n() as f64;
    let c = lor_denominators(emp)?;

    let mut bracket = vec![0.0; data.n()];
    let mut sigma_kl = vec![vec![0.0; k - 1]; k - 1];
    let mut resids = vec![vec![0.0; k - 1]; data.n()];
    for i in 0..data.n() {
        for lvl in 1..k {
            let ind = if data.y[i] <= lvl { 1.0 } else { 0.0 };
            resids[i][lvl - 1] = ind - theta(lvl, i);
        }
        bracket[i] =
            (1..k).map(|lvl| resids[i][lvl - 1] / c[lvl - 1]).sum::<f64>() / km1;
        for a in 0..k - 1 {
            for b in 0..k - 1 {
                sigma_kl[a][b] += resids[i][a] * resids[i][b];
            }
        }
    }
    for row in sigma_kl.iter_mut() {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    let sigma2 = bracket.iter().map(|b| b * b).sum::<f64>() / n;

    let mut t_k = vec![0.0; k - 1];
    for a in 0..k - 1 {
        t_k[a] = (0..k - 1).map(|b| sigma_kl[a][b] / c[b]).sum::<f64>();
    }
    let if_values = (0..data.n())
        .map(|i| {
            let mut v = bracket[i] * bracket[i] - sigma2;
            for a in 0..k - 1 {
                let ind = if data.y[i] <= a + 1 { 1.0 } else { 0.0 };
                let f = emp.f_cdf[a];
                v -= 2.0 / (km1 * km1) * (1.0 - 2.0 * f) * (ind - f) / (c[a] * c[a]) * t_k[a];
            }
            v
        })
        .collect();
    Ok(VarianceBundle {
        sigma2,
        if_values,
        label,
        estimand: "lor",
    })
}

/// Plug-in working-model variance with the estimating-equation correction in
/// the influence values.
pub fn working_model_variance(
    data: &OrdinalDataset,
    estimand: OrdinalEstimand,
    fit: &WorkingModelFit,
    u: Option<&TransformU>,
) -> Result<VarianceBundle, ReleffError> {
    if !fit.converged {
        return Err(ReleffError::NonConvergedFit);
    }
    if fit.k() != data.k {
        return Err(ReleffError::BadTransform(
            "working-model fit has a different K than the data".into(),
        ));
    }
    let emp = empirical_summary(data);
    let k = data.k;
    let n = data.n() as f64;

    // per-estimand level weights b_k in the bracket sum_k b_k [I{y<=k} - theta(k,w)]
    let weights: Vec<f64> = match estimand {
        OrdinalEstimand::Dim => resolve_u(estimand, k, u)?.diffs(),
        OrdinalEstimand::Mw => emp.eta.windows(2).map(|p| p[0] - p[1]).collect(),
        OrdinalEstimand::Lor => {
            let c = lor_denominators(&emp)?;
            c.iter().map(|ck| 1.0 / ((k - 1) as f64 * ck)).collect()
        }
    };

    let designs: Vec<Vec<f64>> = data.w.iter().map(|w| data.schema.design_row(w)).collect();
    let d = designs.first().map_or(0, |r| r.len());
    let active: Vec<usize> = (1..k).filter(|&lvl| fit.level_active(lvl)).collect();
    let p = active.len() + if active.is_empty() { 0 } else { d };

    let mut theta = vec![vec![0.0; k - 1]; data.n()];
    let mut resid = vec![vec![0.0; k - 1]; data.n()];
    for i in 0..data.n() {
        for lvl in 1..k {
            let th = fit.theta(lvl, &designs[i]);
            theta[i][lvl - 1] = th;
            let ind = if data.y[i] <= lvl { 1.0 } else { 0.0 };
            resid[i][lvl - 1] = ind - th;
        }
    }
    let bracket: Vec<f64> = (0..data.n())
        .map(|i| (0..k - 1).map(|a| weights[a] * resid[i][a]).sum())
        .collect();
    let sigma2 = bracket.iter().map(|b| b * b).sum::<f64>() / n;

    // Estimating-equation correction for the fitted (alpha, beta): with
    // info = -E_n[score derivative] and dvec = E_n[d U_sigma / d(alpha, beta)],
    // the contribution to the influence value is e' score_i, e = info^{-1} dvec.
    let coef_correction: Option<(DVector<f64>, Vec<DVector<f64>>)> = if p > 0 {
        let na = active.len();
        let mut info = DMatrix::zeros(p, p);
        let mut dvec = DVector::zeros(p);
        let mut scores: Vec<DVector<f64>> = Vec::with_capacity(data.n());
        for i in 0..data.n() {
            let x = &designs[i];
            let mut score = DVector::zeros(p);
            let mut sum_v = 0.0;
            let mut sum_bv = 0.0;
            let mut sum_resid = 0.0;
            for (slot, &lvl) in active.iter().enumerate() {
                let a = lvl - 1;
                let th = theta[i][a];
                let v = th * (1.0 - th);
                score[slot] = resid[i][a];
                sum_resid += resid[i][a];
                info[(slot, slot)] += v;
                for (j, &xj) in x.iter().enumerate() {
                    info[(slot, na + j)] += v * xj;
                    info[(na + j, slot)] += v * xj;
                }
                sum_v += v;
                sum_bv += weights[a] * v;
                dvec[slot] += -2.0 * bracket[i] * weights[a] * v;
            }
            for (j, &xj) in x.iter().enumerate() {
                score[na + j] = sum_resid * xj;
                dvec[na + j] += -2.0 * bracket[i] * sum_bv * xj;
                for (l, &xl) in x.iter().enumerate() {
                    info[(na + j, na + l)] += sum_v * xj * xl;
                }
            }
            scores.push(score);
        }
        info /= n;
        dvec /= n;
        let e = solve_symmetric(&info, &dvec).ok_or(NuisanceError::SingularDesign)?;
        Some((e, scores))
    } else {
        None
    };

    // marginal-distribution corrections (MW: level frequencies; LOR: CDF)
    let marginal: Option<(Vec<f64>, MarginalKind)> = match estimand {
        OrdinalEstimand::Dim => None,
        OrdinalEstimand::Mw => {
            // d bracket / d p_lvl = -(resid_lvl + resid_{lvl-1}) / 2, with
            // resid_0 = resid_K = 0
            let mut coef = vec![0.0; k];
            for i in 0..data.n() {
                for lvl in 1..=k {
                    let r_k = if lvl <= k - 1 { resid[i][lvl - 1] } else { 0.0 };
                    let r_km1 = if lvl >= 2 { resid[i][lvl - 2] } else { 0.0 };
                    coef[lvl - 1] += 2.0 * bracket[i] * (-(r_k + r_km1) / 2.0);
                }
            }
            for v in coef.iter_mut() {
                *v /= n;
            }
            Some((coef, MarginalKind::LevelIndicator))
        }
        OrdinalEstimand::Lor => {
            let c = lor_denominators(&emp)?;
            let km1 = (k - 1) as f64;
            let mut coef = vec![0.0; k - 1];
            for i in 0..data.n() {
                for lvl in 1..k {
                    let f = emp.f_cdf[lvl - 1];
                    let db =
                        -resid[i][lvl - 1] * (1.0 - 2.0 * f) / (km1 * c[lvl - 1] * c[lvl - 1]);
                    coef[lvl - 1] += 2.0 * bracket[i] * db;
                }
            }
            for v in coef.iter_mut() {
                *v /= n;
            }
            Some((coef, MarginalKind::CdfIndicator))
        }
    };

    let if_values: Vec<f64> = (0..data.n())
        .map(|i| {
            let mut v = bracket[i] * bracket[i] - sigma2;
            if let Some((e, scores)) = &coef_correction {
                v += e.dot(&scores[i]);
            }
            if let Some((coef, kind)) = &marginal {
                match kind {
                    MarginalKind::LevelIndicator => {
                        for lvl in 1..=k {
                            let ind = if data.y[i] == lvl { 1.0 } else { 0.0 };
                            v += coef[lvl - 1] * (ind - emp.p[lvl - 1]);
                        }
                    }
                    MarginalKind::CdfIndicator => {
                        for lvl in 1..k {
                            let ind = if data.y[i] <= lvl { 1.0 } else { 0.0 };
                            v += coef[lvl - 1] * (ind - emp.f_cdf[lvl - 1]);
                        }
                    }
                }
            }
            v
        })
        .collect();

    Ok(VarianceBundle {
        sigma2,
        if_values,
        label: BundleLabel::WorkingModel,
        estimand: estimand_name(estimand),
    })
}

enum MarginalKind {
    LevelIndicator,
    CdfIndicator,
}

fn solve_symmetric(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    m.clone().lu().solve(rhs)
}

/// Sample variance (divisor n) of a continuous outcome with its influence
/// values.
pub fn unadjusted_variance_continuous(
    data: &ContinuousDataset,
) -> Result<VarianceBundle, ReleffError> {
    let b = variance_of(&data.y, BundleLabel::Unadjusted, "ate");
    if !(b.sigma2 > 0.0) {
        return Err(ReleffError::DegenerateOutcome);
    }
    Ok(b)
}

/// Mean squared residual around a fitted conditional mean.
pub fn fully_adjusted_variance_continuous(
    data: &ContinuousDataset,
    model: &ConditionalMeanModel,
) -> Result<VarianceBundle, ReleffError> {
    let n = data.n() as f64;
    let resid: Vec<f64> = data
        .w
        .iter()
        .zip(&data.y)
        .map(|(w, &y)| y - model.predict(w))
        .collect();
    let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / n;
    let if_values = resid.iter().map(|r| r * r - sigma2).collect();
    Ok(VarianceBundle {
        sigma2,
        if_values,
        label: BundleLabel::FullyAdjusted,
        estimand: "ate",
    })
}

/// Mean squared residual around the least-squares line. The OLS first-order
/// conditions zero out the coefficient correction, so the influence value is
/// the centered squared residual.
pub fn working_model_variance_continuous(
    data: &ContinuousDataset,
    fit: &LinearFit,
) -> Result<VarianceBundle, ReleffError> {
    let n = data.n() as f64;
    let resid: Vec<f64> = data
        .w
        .iter()
        .zip(&data.y)
        .map(|(w, &y)| y - fit.predict(&data.schema.design_row(w)))
        .collect();
    let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / n;
    let if_values = resid.iter().map(|r| r * r - sigma2).collect();
    Ok(VarianceBundle {
        sigma2,
        if_values,
        label: BundleLabel::WorkingModel,
        estimand: "ate",
    })
}
