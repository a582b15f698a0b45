//! Box-bounded Levenberg–Marquardt on a real residual vector.
//!
//! Steps are projected onto the bounds and accepted only if they lower the
//! residual norm, so the accepted history is non-increasing. Variables held
//! at a bound by the gradient are frozen for that iteration. The Jacobian is
//! built by forward differences, one column per task.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when an accepted step lowers the cost by less than this fraction.
    pub ftol: f64,
    /// Stop when the projected step is smaller than this (scaled units).
    pub xtol: f64,
    /// Cost (squared norm) treated as an exact fit.
    pub abs_tol: f64,
    pub lambda0: f64,
    pub lambda_max: f64,
    /// Relative forward-difference step.
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 200,
            ftol: 1e-10,
            xtol: 1e-10,
            abs_tol: 1e-24,
            lambda0: 1e-3,
            lambda_max: 1e12,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LmStatus {
    /// Initial point already fits exactly; nothing was changed.
    ExactStart,
    SmallCostChange,
    SmallStep,
    /// Damping grew past its cap without finding a lower cost.
    Stalled,
    MaxIterations,
}

impl LmStatus {
    pub fn converged(self) -> bool {
        !matches!(self, LmStatus::MaxIterations)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub x: Vec<f64>,
    pub initial_norm: f64,
    pub norm: f64,
    pub iterations: usize,
    pub status: LmStatus,
    /// Residual norm after each accepted step, starting with the initial one.
    pub history: Vec<f64>,
}

fn sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn jacobian<F>(f: &F, x: &[f64], r0: &[f64], lo: &[f64], hi: &[f64], h_rel: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let cols: Vec<Vec<f64>> = (0..x.len())
        .into_par_iter()
        .map(|j| {
            let mut h = h_rel * x[j].abs().max(1.0);
            if x[j] + h > hi[j] {
                h = -h;
            }
            if x[j] + h < lo[j] {
                return vec![0.0; r0.len()];
            }
            let mut xp = x.to_vec();
            xp[j] += h;
            let step = xp[j] - x[j];
            f(&xp)
                .iter()
                .zip(r0)
                .map(|(a, b)| (a - b) / step)
                .collect()
        })
        .collect();
    DMatrix::from_fn(r0.len(), x.len(), |i, j| cols[j][i])
}

/// Minimizes `|f(x)|²` subject to `lo <= x <= hi`. `x0` is clamped first.
pub fn minimize<F>(f: &F, x0: &[f64], lo: &[f64], hi: &[f64], opts: &LmOptions) -> LmReport
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let n = x0.len();
    let clamp = |x: &mut [f64]| {
        for j in 0..n {
            x[j] = x[j].clamp(lo[j], hi[j]);
        }
    };
    let mut x = x0.to_vec();
    clamp(&mut x);
    let mut r = f(&x);
    let mut cost = sq(&r);
    let initial_norm = cost.sqrt();
    let mut history = vec![initial_norm];
    let report = |x: Vec<f64>, cost: f64, it, status, history| LmReport {
        x,
        initial_norm,
        norm: f64::sqrt(cost),
        iterations: it,
        status,
        history,
    };
    if cost <= opts.abs_tol {
        return report(x, cost, 0, LmStatus::ExactStart, history);
    }

    let mut lambda = opts.lambda0;
    let mut it = 0;
    while it < opts.max_iter {
        it += 1;
        let j = jacobian(f, &x, &r, lo, hi, opts.fd_step);
        let jt = j.transpose();
        let mut a = &jt * &j;
        let mut g = &jt * DVector::from_column_slice(&r);
        // Variables held at a bound by the gradient leave the system.
        for k in 0..n {
            let pinned = (x[k] <= lo[k] && g[k] > 0.0) || (x[k] >= hi[k] && g[k] < 0.0);
            if pinned {
                a.row_mut(k).fill(0.0);
                a.column_mut(k).fill(0.0);
                a[(k, k)] = 1.0;
                g[k] = 0.0;
            }
        }
        loop {
            let mut m = a.clone();
            for k in 0..n {
                m[(k, k)] += lambda * a[(k, k)].max(1e-12);
            }
            let delta = m
                .clone()
                .cholesky()
                .map(|c| c.solve(&(-&g)))
                .or_else(|| m.lu().solve(&(-&g)));
            let Some(delta) = delta else {
                lambda *= 4.0;
                if lambda > opts.lambda_max {
                    return report(x, cost, it, LmStatus::Stalled, history);
                }
                continue;
            };
            let mut xn: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            clamp(&mut xn);
            let step = x
                .iter()
                .zip(&xn)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if step < opts.xtol {
                return report(x, cost, it, LmStatus::SmallStep, history);
            }
            let rn = f(&xn);
            let cn = sq(&rn);
            if cn < cost {
                let rel = (cost - cn) / cost;
                x = xn;
                r = rn;
                cost = cn;
                history.push(cost.sqrt());
                lambda = (lambda / 3.0).max(1e-12);
                if rel < opts.ftol || cost <= opts.abs_tol {
                    return report(x, cost, it, LmStatus::SmallCostChange, history);
                }
                break;
            }
            lambda *= 4.0;
            if lambda > opts.lambda_max {
                return report(x, cost, it, LmStatus::Stalled, history);
            }
        }
    }
    report(x, cost, it, LmStatus::MaxIterations, history)
}
