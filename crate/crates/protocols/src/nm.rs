use crate::{ProtocolError, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NmOptions {
    /// Initial simplex edge along each axis.
    pub step: f64,
    pub max_iter: usize,
    /// Converged once every vertex is within `tol` of the best one (∞-norm).
    pub tol: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        NmOptions { step: 0.1, max_iter: 2000, tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_DIM: usize = 8;
// reflection, expansion, contraction, shrink
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Minimises `f` from an axis-aligned simplex at `x0`. Running out of
/// iterations is not an error: the best vertex comes back with
/// `converged = false`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NmOptions) -> Result<NmResult> {
    let k = x0.len();
    if k == 0 || k > MAX_DIM {
        return Err(ProtocolError::BadInput(format!("Nelder–Mead takes 1..={MAX_DIM} parameters, got {k}")));
    }
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..k {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect::<Vec<f64>>();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        fv = order.iter().map(|&i| fv[i]).collect();
        let spread = simplex[1..]
            .iter()
            .map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let centroid: Vec<f64> = (0..k).map(|j| simplex[..k].iter().map(|v| v[j]).sum::<f64>() / k as f64).collect();
        let worst = simplex[k].clone();
        let xr = lerp(&centroid, &worst, -ALPHA);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = lerp(&centroid, &worst, -GAMMA);
            let fe = f(&xe);
            if fe < fr {
                simplex[k] = xe;
                fv[k] = fe;
            } else {
                simplex[k] = xr;
                fv[k] = fr;
            }
            continue;
        }
        if fr < fv[k - 1] {
            simplex[k] = xr;
            fv[k] = fr;
            continue;
        }
        // contract towards the better of the reflected and worst points
        let (xc, fc) = if fr < fv[k] {
            let xc = lerp(&centroid, &xr, RHO);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = lerp(&centroid, &worst, RHO);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < fv[k].min(fr) {
            simplex[k] = xc;
            fv[k] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=k {
            simplex[i] = lerp(&best, &simplex[i], SIGMA);
            fv[i] = f(&simplex[i]);
        }
    }
    let ib = (0..=k).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).expect("non-empty simplex");
    Ok(NmResult { x: simplex[ib].clone(), value: fv[ib], iterations, converged })
}
