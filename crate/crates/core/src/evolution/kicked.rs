//! Periodically kicked spin: one period is free precession e^{-i w0 T Sz}
//! after an instantaneous kick e^{-i chi Sx}.

use super::{GaussPoint, ProjectivePair};
use crate::algebra::CMat;
use crate::error::{KrylovError, Result};
use num_complex::Complex64;

/// Effective generator G = alpha Sz + xi S+ + conj(xi) S- of one period,
/// U_T = e^{-iG}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickGenerator {
    pub alpha: f64,
    pub xi: Complex64,
}

impl KickGenerator {
    pub fn nu(&self) -> f64 {
        (self.alpha * self.alpha / 4.0 + self.xi.norm_sqr()).sqrt()
    }
}

fn check_pole(omega0: f64, period: f64) -> Result<()> {
    let gap = (1.0 - Complex64::new(0.0, omega0 * period).exp()).norm();
    if gap < 1e-12 {
        return Err(KrylovError::ResonantKickPole(omega0 * period));
    }
    Ok(())
}

/// Generator to first order in chi (BCH with the free precession summed
/// exactly): alpha = w0 T, xi = -i w0 chi T / (2 (1 - e^{i w0 T})).
pub fn kick_generator_first_order(omega0: f64, period: f64, chi: f64) -> Result<KickGenerator> {
    check_pole(omega0, period)?;
    let a = omega0 * period;
    let xi = Complex64::new(0.0, -a * chi) / (2.0 * (1.0 - Complex64::new(0.0, a).exp()));
    Ok(KickGenerator { alpha: a, xi })
}

/// Exact principal logarithm of the one-period propagator.
pub fn kick_generator_exact(omega0: f64, period: f64, chi: f64) -> Result<KickGenerator> {
    check_pole(omega0, period)?;
    let u = period_matrix(omega0, period, chi);
    let (a, b) = (u[(0, 0)], u[(0, 1)]);
    let sin_t = (a.im * a.im + b.norm_sqr()).sqrt();
    let theta = sin_t.atan2(a.re);
    if sin_t == 0.0 {
        return Ok(KickGenerator {
            alpha: 0.0,
            xi: Complex64::new(0.0, 0.0),
        });
    }
    let f = theta / sin_t;
    Ok(KickGenerator {
        alpha: -2.0 * f * a.im,
        xi: Complex64::new(0.0, f) * b,
    })
}

pub(crate) fn period_matrix(omega0: f64, period: f64, chi: f64) -> CMat {
    let ph = Complex64::new(0.0, -omega0 * period / 2.0).exp();
    let free = CMat::from_row_slice(
        2,
        2,
        &[
            ph,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            ph.conj(),
        ],
    );
    let (cs, sn) = ((chi / 2.0).cos(), (chi / 2.0).sin());
    let kick = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(cs, 0.0),
            Complex64::new(0.0, -sn),
            Complex64::new(0.0, -sn),
            Complex64::new(cs, 0.0),
        ],
    );
    free * kick
}

/// Gauss coefficients after k periods from the exact generator:
/// U^k = cos(nu k) - i sin(nu k) G / nu.
pub fn su2_kicked(omega0: f64, period: f64, chi: f64, k: u64) -> Result<GaussPoint> {
    let g = kick_generator_exact(omega0, period, chi)?;
    let nu = g.nu();
    let kf = k as f64;
    let (s, cth) = ((nu * kf).sin(), (nu * kf).cos());
    let sinc = if nu == 0.0 { kf } else { s / nu };
    let u01 = Complex64::new(0.0, -sinc) * g.xi;
    let u11 = Complex64::new(cth, g.alpha / 2.0 * sinc);
    let u10 = Complex64::new(0.0, -sinc) * g.xi.conj();
    let pair = ProjectivePair::new(u01, u11)?;
    Ok(GaussPoint {
        t: kf * period,
        pair,
        lambda_plus: pair.lambda(),
        lambda_zero: -2.0 * u11.ln(),
        lambda_minus: u10 / u11,
        global_phase: Complex64::new(1.0, 0.0),
    })
}
