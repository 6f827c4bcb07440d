use crate::{FitError, Result};
use nalgebra::DMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-14, max_steps: 1_000_000 }
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Integrates dy/dt = f(t, y) from 0 to `t` with adaptive Dormand–Prince steps.
pub fn ode_integrate<F: FnMut(f64, &[f64], &mut [f64])>(
    mut f: F,
    y0: &[f64],
    t: f64,
    opts: &OdeOptions,
) -> Result<Vec<f64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(FitError::BadInput(format!("end time {t}")));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    if t == 0.0 || n == 0 {
        return Ok(y);
    }
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut now = 0.0;
    let mut h = (t * 1e-3).max(1e-12 * t);
    for _ in 0..opts.max_steps {
        if now >= t {
            return Ok(y);
        }
        h = h.min(t - now);
        if h < 1e-15 * t.max(1.0) {
            return Err(FitError::Integration(format!("step size underflow at t={now}")));
        }
        f(now, &y, &mut k[0]);
        for s in 1..7 {
            for i in 0..n {
                tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            f(now + C[s] * h, &tmp, &mut k[s]);
        }
        let mut err = 0.0f64;
        let mut y5 = vec![0.0; n];
        for i in 0..n {
            let (mut s5, mut s4) = (0.0, 0.0);
            for s in 0..7 {
                s5 += B5[s] * k[s][i];
                s4 += B4[s] * k[s][i];
            }
            y5[i] = y[i] + h * s5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (s5 - s4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(FitError::Integration("non-finite derivative".into()));
        }
        if err <= 1.0 {
            now += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(FitError::Integration("step budget exhausted".into()))
}

/// dy/dt = A·y.
pub fn ode_integrate_linear(a: &DMatrix<f64>, y0: &[f64], t: f64, opts: &OdeOptions) -> Result<Vec<f64>> {
    if a.nrows() != y0.len() || a.ncols() != y0.len() {
        return Err(FitError::BadInput(format!("{}×{} rate matrix for {} states", a.nrows(), a.ncols(), y0.len())));
    }
    ode_integrate(
        |_, y, dy| {
            for (i, d) in dy.iter_mut().enumerate() {
                *d = (0..y.len()).map(|j| a[(i, j)] * y[j]).sum();
            }
        },
        y0,
        t,
        opts,
    )
}
