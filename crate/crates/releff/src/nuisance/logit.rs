//! Newton-Raphson core for binomial likelihoods with group-specific
//! intercepts and a shared slope vector.
//!
//! Both the proportional-odds working model (one group per threshold, every
//! observation contributes to every group) and the discrete-time hazard fits
//! (one group per time bin, every person-time row contributes to one group)
//! reduce to this structure after expansion.

use nalgebra::{DMatrix, DVector};

/// Stable inverse logit.
pub fn expit(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(x)) without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn logit_clipped(p: f64) -> f64 {
    ((p / (1.0 - p)).ln()).clamp(-20.0, 20.0)
}

/// One expanded binary row: group intercept index, index of the design row,
/// response in {0,1}, and a nonnegative weight.
#[derive(Debug, Clone)]
pub(crate) struct LogitRow {
    pub group: usize,
    pub x: usize,
    pub resp: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct GroupedLogitFit {
    /// Intercept per group; +/-inf marks groups degenerate in the data and
    /// NaN marks groups with no data at all.
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub neg_loglik: f64,
}

impl GroupedLogitFit {
    pub fn prob(&self, group: usize, x: &[f64]) -> f64 {
        let a = self.alpha[group];
        if a == f64::NEG_INFINITY {
            return 0.0;
        }
        if a == f64::INFINITY {
            return 1.0;
        }
        expit(a + dot(&self.beta, x))
    }
}

#[derive(Debug)]
pub(crate) enum LogitError {
    Singular,
    NonConvergence { iterations: usize, last: GroupedLogitFit },
    Separation { last: GroupedLogitFit },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const MAX_ABS_COEF: f64 = 30.0;

/// Fit the grouped logistic model by Newton-Raphson with step halving.
///
/// Groups whose responses are all 0 (resp. all 1) get alpha fixed at -inf
/// (resp. +inf) and are excluded from the optimization. Convergence requires
/// the gradient max-norm to fall below `1e-8 * total_weight`; the iteration
/// itself aims for `1e-11 * total_weight`.
pub(crate) fn fit_grouped_logit(
    n_groups: usize,
    designs: &[Vec<f64>],
    rows: &[LogitRow],
    dim: usize,
    max_iter: usize,
) -> Result<GroupedLogitFit, LogitError> {
    let mut sum_w = vec![0.0f64; n_groups];
    let mut sum_wr = vec![0.0f64; n_groups];
    for r in rows {
        sum_w[r.group] += r.weight;
        sum_wr[r.group] += r.weight * r.resp;
    }
    let mut alpha_full = vec![f64::NAN; n_groups];
    let mut active: Vec<usize> = Vec::new();
    let mut group_slot = vec![usize::MAX; n_groups];
    for g in 0..n_groups {
        if sum_w[g] <= 0.0 {
            alpha_full[g] = f64::NAN;
        } else if sum_wr[g] <= 0.0 {
            alpha_full[g] = f64::NEG_INFINITY;
        } else if sum_wr[g] >= sum_w[g] {
            alpha_full[g] = f64::INFINITY;
        } else {
            group_slot[g] = active.len();
            active.push(g);
        }
    }

    let n_active = active.len();
    let p = n_active + dim;
    let total_weight: f64 = rows
        .iter()
        .filter(|r| group_slot[r.group] != usize::MAX)
        .map(|r| r.weight)
        .sum();

    if n_active == 0 {
        return Ok(GroupedLogitFit {
            alpha: alpha_full,
            beta: vec![0.0; dim],
            converged: true,
            iterations: 0,
            neg_loglik: 0.0,
        });
    }

    // Warm start at the no-slope solution.
    let mut params = DVector::zeros(p);
    for (slot, &g) in active.iter().enumerate() {
        params[slot] = logit_clipped(sum_wr[g] / sum_w[g]);
    }

    let tight = 1e-11 * total_weight.max(1.0);
    let ceiling = 1e-8 * total_weight.max(1.0);

    let evaluate = |params: &DVector<f64>| {
        let mut negll = 0.0;
        let mut grad = DVector::zeros(p);
        let mut hess = DMatrix::zeros(p, p);
        for r in rows {
            let slot = group_slot[r.group];
            if slot == usize::MAX {
                continue;
            }
            let x = &designs[r.x];
            let mut eta = params[slot];
            for (j, &xj) in x.iter().enumerate() {
                eta += params[n_active + j] * xj;
            }
            negll += r.weight * (softplus(eta) - r.resp * eta);
            let theta = expit(eta);
            let g = r.weight * (theta - r.resp);
            grad[slot] += g;
            let v = r.weight * theta * (1.0 - theta);
            hess[(slot, slot)] += v;
            for (j, &xj) in x.iter().enumerate() {
                grad[n_active + j] += g * xj;
                hess[(slot, n_active + j)] += v * xj;
                hess[(n_active + j, slot)] += v * xj;
                for (l, &xl) in x.iter().enumerate() {
                    hess[(n_active + j, n_active + l)] += v * xj * xl;
                }
            }
        }
        (negll, grad, hess)
    };

    let (mut negll, mut grad, mut hess) = evaluate(&params);
    let mut iterations = 0;
    loop {
        if grad.amax() <= tight || iterations >= max_iter {
            break;
        }
        iterations += 1;

        let direction = match solve_spd(&hess, &(-&grad)) {
            Some(d) => d,
            None => return Err(LogitError::Singular),
        };
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..50 {
            let candidate = &params + &direction * step;
            let (cand_negll, cand_grad, cand_hess) = evaluate(&candidate);
            if cand_negll.is_finite() && cand_negll <= negll + 1e-12 * negll.abs().max(1.0) {
                params = candidate;
                negll = cand_negll;
                grad = cand_grad;
                hess = cand_hess;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
        if params.amax() > MAX_ABS_COEF && grad.amax() > ceiling {
            let last = assemble(&alpha_full, &params, &active, n_active, dim, false, iterations, negll);
            return Err(LogitError::Separation { last });
        }
    }

    let converged = grad.amax() <= ceiling;
    let fit = assemble(&alpha_full, &params, &active, n_active, dim, converged, iterations, negll);
    if !converged {
        return Err(LogitError::NonConvergence {
            iterations,
            last: fit,
        });
    }
    Ok(fit)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    alpha_full: &[f64],
    params: &DVector<f64>,
    active: &[usize],
    n_active: usize,
    dim: usize,
    converged: bool,
    iterations: usize,
    neg_loglik: f64,
) -> GroupedLogitFit {
    let mut alpha = alpha_full.to_vec();
    for (slot, &g) in active.iter().enumerate() {
        alpha[g] = params[slot];
    }
    let beta = (0..dim).map(|j| params[n_active + j]).collect();
    GroupedLogitFit {
        alpha,
        beta,
        converged,
        iterations,
        neg_loglik,
    }
}

/// Solve a symmetric positive-definite system, with a small ridge retry.
pub(crate) fn solve_spd(h: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = h.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    let scale = h.diagonal().amax().max(1e-12);
    let mut ridged = h.clone();
    for i in 0..h.nrows() {
        ridged[(i, i)] += 1e-8 * scale;
    }
    ridged.cholesky().map(|ch| ch.solve(rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intercept_only_matches_logit_of_mean() {
        let designs = vec![vec![]];
        let rows: Vec<LogitRow> = (0..10)
            .map(|i| LogitRow {
                group: 0,
                x: 0,
                resp: if i < 3 { 1.0 } else { 0.0 },
                weight: 1.0,
            })
            .collect();
        let fit = fit_grouped_logit(1, &designs, &rows, 0, 100).unwrap();
        assert!((expit(fit.alpha[0]) - 0.3).abs() < 1e-9);
    }

    #[test]
    fn degenerate_group_gets_infinite_alpha() {
        let designs = vec![vec![]];
        let rows: Vec<LogitRow> = (0..5)
            .map(|_| LogitRow {
                group: 0,
                x: 0,
                resp: 1.0,
                weight: 1.0,
            })
            .collect();
        let fit = fit_grouped_logit(1, &designs, &rows, 0, 100).unwrap();
        assert_eq!(fit.alpha[0], f64::INFINITY);
        assert!(fit.converged);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let mut stream = crate::rng::RngStream::new(5);
        for _ in 0..5 {
            let n = 30;
            let designs: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![stream.uniform() * 2.0 - 1.0, stream.uniform()])
                .collect();
            let rows: Vec<LogitRow> = (0..n)
                .flat_map(|i| (0..2usize).map(move |g| (i, g)))
                .map(|(i, g)| LogitRow {
                    group: g,
                    x: i,
                    resp: if stream.uniform() < 0.5 { 1.0 } else { 0.0 },
                    weight: 1.0,
                })
                .collect();

            let p = 4;
            let eval = |params: &[f64]| {
                let mut negll = 0.0;
                for r in &rows {
                    let x = &designs[r.x];
                    let eta = params[r.group] + params[2] * x[0] + params[3] * x[1];
                    negll += r.weight * (softplus(eta) - r.resp * eta);
                }
                negll
            };
            let theta0: Vec<f64> = (0..p).map(|_| stream.uniform() - 0.5).collect();

            let mut grad = vec![0.0; p];
            let mut hess = vec![vec![0.0; p]; p];
            for r in &rows {
                let x = &designs[r.x];
                let eta = theta0[r.group] + theta0[2] * x[0] + theta0[3] * x[1];
                let th = expit(eta);
                let full = [
                    if r.group == 0 { 1.0 } else { 0.0 },
                    if r.group == 1 { 1.0 } else { 0.0 },
                    x[0],
                    x[1],
                ];
                for a in 0..p {
                    grad[a] += (th - r.resp) * full[a];
                    for b in 0..p {
                        hess[a][b] += th * (1.0 - th) * full[a] * full[b];
                    }
                }
            }

            let h = 1e-5;
            for a in 0..p {
                let mut up = theta0.clone();
                let mut dn = theta0.clone();
                up[a] += h;
                dn[a] -= h;
                let fd = (eval(&up) - eval(&dn)) / (2.0 * h);
                assert!(
                    (fd - grad[a]).abs() <= 1e-5 * grad[a].abs().max(1.0),
                    "gradient mismatch: fd={fd} analytic={}",
                    grad[a]
                );
                for b in 0..p {
                    let mut pp = theta0.clone();
                    let mut pm = theta0.clone();
                    let mut mp = theta0.clone();
                    let mut mm = theta0.clone();
                    pp[a] += h;
                    pp[b] += h;
                    pm[a] += h;
                    pm[b] -= h;
                    mp[a] -= h;
                    mp[b] += h;
                    mm[a] -= h;
                    mm[b] -= h;
                    let fd2 = (eval(&pp) - eval(&pm) - eval(&mp) + eval(&mm)) / (4.0 * h * h);
                    assert!(
                        (fd2 - hess[a][b]).abs() <= 1e-4 * hess[a][b].abs().max(1.0),
                        "hessian mismatch at ({a},{b}): fd={fd2} analytic={}",
                        hess[a][b]
                    );
                }
            }
        }
    }
}
