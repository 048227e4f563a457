//! Dormand-Prince 5(4) with adaptive steps that land exactly on the
//! requested output times.

use crate::error::{KrylovError, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate y' = f(t, y) from grid[0] and return y at every grid point.
/// `f(t, y, dy)` writes the derivative into `dy`.
pub fn integrate<F>(
    mut f: F,
    y0: &[Complex64],
    grid: &[f64],
    opts: OdeOptions,
) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KrylovError::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    let n = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(grid.len());
    let mut y = y0.to_vec();
    out.push(y.clone());

    let mut k = vec![vec![zero; n]; 7];
    let mut tmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut t = grid[0];
    f(t, &y, &mut k[0]);

    // initial step from the derivative scale
    let d0 = rms(&y, &y, opts);
    let d1 = rms(&k[0], &y, opts);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(grid[grid.len() - 1] - grid[0]).max(1e-12);

    let mut steps = 0usize;
    for &target in &grid[1..] {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(KrylovError::ToleranceNotMet(format!(
                    "step budget exhausted at t = {t}"
                )));
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h };
            if hs < 1e-14 * t.abs().max(1.0) {
                return Err(KrylovError::StepUnderflow(t));
            }

            stage(&y, &[(A21, 0)], &k, hs, &mut tmp);
            f(t + C2 * hs, &tmp, &mut k[1]);
            stage(&y, &[(A31, 0), (A32, 1)], &k, hs, &mut tmp);
            f(t + C3 * hs, &tmp, &mut k[2]);
            stage(&y, &[(A41, 0), (A42, 1), (A43, 2)], &k, hs, &mut tmp);
            f(t + C4 * hs, &tmp, &mut k[3]);
            stage(
                &y,
                &[(A51, 0), (A52, 1), (A53, 2), (A54, 3)],
                &k,
                hs,
                &mut tmp,
            );
            f(t + C5 * hs, &tmp, &mut k[4]);
            stage(
                &y,
                &[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)],
                &k,
                hs,
                &mut tmp,
            );
            f(t + hs, &tmp, &mut k[5]);
            stage(
                &y,
                &[(A71, 0), (A73, 2), (A74, 3), (A75, 4), (A76, 5)],
                &k,
                hs,
                &mut ynew,
            );
            f(t + hs, &ynew, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = hs
                    * (E1 * k[0][i]
                        + E3 * k[2][i]
                        + E4 * k[3][i]
                        + E5 * k[4][i]
                        + E6 * k[5][i]
                        + E7 * k[6][i]);
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                h = hs * 0.1;
                continue;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = if last { target } else { t + hs };
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                // keep the unclamped step when the grid forced a short one
                h = if last {
                    h.max(hs * factor)
                } else {
                    hs * factor
                };
            } else {
                h = hs * factor.min(1.0);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

fn stage(
    y: &[Complex64],
    coef: &[(f64, usize)],
    k: &[Vec<Complex64>],
    h: f64,
    out: &mut [Complex64],
) {
    for i in 0..y.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, j) in coef {
            acc += a * k[j][i];
        }
        out[i] = y[i] + h * acc;
    }
}

fn rms(v: &[Complex64], y: &[Complex64], opts: OdeOptions) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter()
        .zip(y)
        .map(|(a, b)| (a.norm() / (opts.atol + opts.rtol * b.norm())).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
        * opts.rtol
}
