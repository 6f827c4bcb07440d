use crate::{FitError, Result};
use nalgebra::{DMatrix, DVector};

/// Outcome of a least-squares fit.
#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub params: Vec<f64>,
    /// sqrt(mean squared residual).
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    /// Stop when the relative cost reduction of an accepted step falls below this.
    pub ftol: f64,
    /// Stop when the step is this small relative to the parameters.
    pub xtol: f64,
    pub initial_damping: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        LsqOptions { max_iterations: 500, ftol: 1e-15, xtol: 1e-13, initial_damping: 1e-3 }
    }
}

fn project(p: &mut [f64], bounds: &[(f64, f64)]) {
    for (x, &(lo, hi)) in p.iter_mut().zip(bounds) {
        *x = x.clamp(lo, hi);
    }
}

fn residuals<M: Fn(&[f64], f64) -> f64>(model: &M, p: &[f64], data: &[(f64, f64)]) -> DVector<f64> {
    DVector::from_iterator(data.len(), data.iter().map(|&(x, y)| y - model(p, x)))
}

fn cost(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

/// Jacobian of the model values (not the residuals) by one-sided differences
/// that stay inside the bounds.
fn jacobian<M: Fn(&[f64], f64) -> f64>(
    model: &M,
    p: &[f64],
    data: &[(f64, f64)],
    bounds: &[(f64, f64)],
) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(data.len(), p.len());
    let base: Vec<f64> = data.iter().map(|&(x, _)| model(p, x)).collect();
    for k in 0..p.len() {
        let mut h = 1e-7 * p[k].abs().max(1.0);
        let (lo, hi) = bounds[k];
        if p[k] + h > hi {
            h = -h;
        }
        if p[k] + h < lo {
            // degenerate interval: parameter is fixed
            continue;
        }
        let mut q = p.to_vec();
        q[k] += h;
        for (i, &(x, _)) in data.iter().enumerate() {
            j[(i, k)] = (model(&q, x) - base[i]) / h;
        }
    }
    j
}

/// Levenberg–Marquardt on `y ≈ model(params, x)` with every trial point
/// projected onto the box `bounds`. Deterministic for a given `init`.
pub fn least_squares<M: Fn(&[f64], f64) -> f64>(
    model: M,
    data: &[(f64, f64)],
    bounds: &[(f64, f64)],
    init: &[f64],
    opts: &LsqOptions,
) -> Result<FitReport> {
    let m = init.len();
    if bounds.len() != m {
        return Err(FitError::BadInput(format!("{} bounds for {m} parameters", bounds.len())));
    }
    if data.len() < m {
        return Err(FitError::BadInput(format!("{} data points for {m} parameters", data.len())));
    }
    if bounds.iter().any(|&(lo, hi)| !(lo <= hi)) {
        return Err(FitError::BadInput("lower bound above upper bound".into()));
    }
    if data.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) || init.iter().any(|v| !v.is_finite()) {
        return Err(FitError::BadInput("non-finite input".into()));
    }
    let mut p = init.to_vec();
    project(&mut p, bounds);
    let mut r = residuals(&model, &p, data);
    let mut c = cost(&r);
    let mut lambda = opts.initial_damping;
    let mut converged = c == 0.0;
    let mut it = 0;
    while !converged && it < opts.max_iterations {
        it += 1;
        let j = jacobian(&model, &p, data, bounds);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &r;
        if g.amax() < 1e-300 {
            converged = true;
            break;
        }
        let mut accepted = false;
        let mut solved_any = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..m {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(delta) = a.cholesky().map(|ch| ch.solve(&g)) else {
                lambda *= 4.0;
                continue;
            };
            solved_any = true;
            let mut q: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            project(&mut q, bounds);
            let rq = residuals(&model, &q, data);
            let cq = cost(&rq);
            if cq.is_finite() && cq < c {
                let step: f64 = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                let scale = p.iter().map(|v| v.abs()).fold(1.0, f64::max);
                let rel = (c - cq) / c;
                p = q;
                r = rq;
                c = cq;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel < opts.ftol || step < opts.xtol * scale || c == 0.0 {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !solved_any {
            return Err(FitError::Singular);
        }
        if !accepted {
            // no downhill step at any damping: a (possibly bound-constrained) minimum
            converged = true;
        }
    }
    Ok(FitReport { params: p, residual_rms: (c / data.len() as f64).sqrt(), converged, iterations: it })
}
