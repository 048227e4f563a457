//! Closed-form Gauss coefficients, one time point per call.

use super::{GaussPoint, ProjectivePair};
use crate::error::{KrylovError, Result};
use crate::specfun::{bessel_i_scaled, bessel_j_scaled, SeriesControl};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest J-type argument accepted by the damped SU(2) route. Beyond this
/// the alternating series loses more digits than double-double can hold.
pub(crate) const J_ARG_LIMIT: f64 = 45.0;
const I_ARG_LIMIT: f64 = 600.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub(crate) fn is_resonant(omega0: f64, omega: f64) -> bool {
    (omega - omega0).abs() < 1e-9 * omega.abs().max(omega0.abs()).max(1.0)
}

/// sinh(sqrt(nu2) t)/sqrt(nu2), continued to sin for nu2 < 0.
pub(crate) fn shc(nu2: f64, t: f64) -> f64 {
    let x = nu2 * t * t;
    if x.abs() < 0.25 {
        // t * sum x^n / (2n+1)!
        let mut term = t;
        let mut sum = t;
        for n in 1..30 {
            term *= x / ((2 * n) as f64 * (2 * n + 1) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else if nu2 > 0.0 {
        let nu = nu2.sqrt();
        (nu * t).sinh() / nu
    } else {
        let nu = (-nu2).sqrt();
        (nu * t).sin() / nu
    }
}

/// cosh(sqrt(nu2) t), continued to cos for nu2 < 0.
pub(crate) fn ch(nu2: f64, t: f64) -> f64 {
    if nu2 >= 0.0 {
        (nu2.sqrt() * t).cosh()
    } else {
        ((-nu2).sqrt() * t).cos()
    }
}

/// (1 - e^{-ct}) / c with the c -> 0 limit t.
pub(crate) fn phi1(cc: Complex64, t: f64) -> Complex64 {
    let x = cc * t;
    if x.norm() < 0.5 {
        let mut term = c(t, 0.0);
        let mut sum = term;
        for n in 1..40 {
            term *= -x / (n + 1) as f64;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (1.0 - (-x).exp()) / cc
    }
}

/// Divided difference (phi1(b) - phi1(a)) / (b - a).
pub(crate) fn phi1_diff(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    if (b - a).norm() * t >= 0.5 {
        return (phi1(b, t) - phi1(a, t)) / (b - a);
    }
    // sum_n (-1)^n t^{n+1}/(n+1)! * sum_{j<n} a^j b^{n-1-j}
    let mut sum = c(0.0, 0.0);
    let mut fact = t; // t^{n+1}/(n+1)!
    let mut h = c(0.0, 0.0); // complete homogeneous sum of degree n-1
    let mut apow = c(1.0, 0.0);
    for n in 1..200 {
        fact *= t / (n + 1) as f64;
        // h_{n-1}(a,b) = b h_{n-2} + a^{n-1}
        h = b * h + apow;
        apow *= a;
        let term = h * fact * if n % 2 == 1 { -1.0 } else { 1.0 };
        sum += term;
        if n > 3 && term.norm() <= 1e-17 * sum.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum
}

fn point(
    t: f64,
    u01: Complex64,
    u11: Complex64,
    phase: Complex64,
    lm: Complex64,
) -> Result<GaussPoint> {
    let pair = ProjectivePair::new(u01, u11)?;
    Ok(GaussPoint {
        t,
        pair,
        lambda_plus: pair.lambda(),
        lambda_zero: -2.0 * u11.ln(),
        lambda_minus: lm,
        global_phase: phase,
    })
}

/// H = alpha (J+ + J-) + gamma J0 + delta.
pub fn su2_static(alpha: f64, gamma: f64, delta: f64, t: f64) -> Result<GaussPoint> {
    let nu2 = -(alpha * alpha + gamma * gamma / 4.0);
    let s = shc(nu2, t);
    let u01 = c(0.0, -alpha * s);
    let u11 = c(ch(nu2, t), gamma / 2.0 * s);
    point(t, u01, u11, c(0.0, -delta * t).exp(), u01 / u11)
}

/// H = w0 J0 + (B0/2)(e^{-iwt} J+ + e^{iwt} J-).
pub fn su2_driven(omega0: f64, omega: f64, b0: f64, t: f64) -> Result<GaussPoint> {
    let d = omega0 - omega;
    let nu2 = -(b0 * b0 + d * d) / 4.0;
    let s = shc(nu2, t);
    let (v01, v11) = (c(0.0, -b0 / 2.0 * s), c(ch(nu2, t), d / 2.0 * s));
    let rot = c(0.0, -omega * t / 2.0).exp();
    // the rotating frame multiplies rows by e^{-iwt/2} and e^{+iwt/2}
    let u01 = rot * v01;
    let u11 = rot.conj() * v11;
    let u10 = rot.conj() * (-v01.conj());
    point(t, u01, u11, c(1.0, 0.0), u10 / u11)
}

/// Driven SU(2) with field amplitude B0 e^{-eta t}; eta < 0 ramps the field.
///
/// Only the ratio U01/U11 is fixed by the Bessel solution, so the pair is
/// normalized to |U01|^2 + |U11|^2 = 1 with the phase the formula provides.
/// Lambda0 takes its real part from ln(1 + |Lambda+|^2).
pub fn su2_damped(omega0: f64, omega: f64, b0: f64, eta: f64, t: f64) -> Result<GaussPoint> {
    if eta == 0.0 {
        return su2_driven(omega0, omega, b0, t);
    }
    let rot = c(0.0, -omega * t / 2.0).exp();
    if is_resonant(omega0, omega) {
        let theta = b0 * (-(-eta * t).exp_m1()) / (2.0 * eta);
        let u01 = rot * c(0.0, -theta.sin());
        let u11 = rot.conj() * theta.cos();
        return bounded_point(t, u01, u11);
    }
    let kappa = b0 / (2.0 * eta);
    let x = kappa * (-eta * t).exp();
    if kappa.abs().max(x.abs()) > J_ARG_LIMIT {
        return Err(KrylovError::Domain(format!(
            "Bessel argument {} beyond the series range {J_ARG_LIMIT}",
            kappa.abs().max(x.abs())
        )));
    }
    let eps = (omega0 - omega) / (2.0 * eta);
    let mu = c(0.5, -eps);
    let mup = 1.0 - mu;
    let ctl = SeriesControl {
        rel_tol: 1e-15,
        max_terms: 2000,
    };
    let s = |nu: Complex64, z: f64| bessel_j_scaled(nu, c(z, 0.0), ctl);
    let r = (-mu * eta * t).exp();
    let rinv = 1.0 / r;
    let num = r * s(-mu, kappa)? * s(mu, x)? - rinv * s(mu, kappa)? * s(-mu, x)?;
    let den = (x / 2.0) * rinv * s(mu, kappa)? * s(mup, x)? / (1.0 - mu)
        + mu * (2.0 / x) * r * s(-mu, kappa)? * s(-mup, x)?;
    bounded_point(t, rot * I * num, rot.conj() * den)
}

fn bounded_point(t: f64, u01: Complex64, u11: Complex64) -> Result<GaussPoint> {
    let norm = (u01.norm_sqr() + u11.norm_sqr()).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(KrylovError::NumericalBreakdown(format!(
            "damped SU(2) pair degenerate at t = {t}"
        )));
    }
    let (u01, u11) = (u01 / norm, u11 / norm);
    let pair = ProjectivePair::new(u01, u11)?;
    Ok(GaussPoint {
        t,
        pair,
        lambda_plus: pair.lambda(),
        lambda_zero: -2.0 * u11.ln(),
        lambda_minus: -u01.conj() / u11,
        global_phase: c(1.0, 0.0),
    })
}

/// Two-mode pumping in the fundamental SU(1,1) representation:
/// H = w0 K0 + (g/2)(e^{-iwt} K+ + e^{iwt} K-), with pump amplitude
/// g e^{-eta t} when eta != 0.
pub fn su11_driven(omega0: f64, omega: f64, g: f64, eta: f64, t: f64) -> Result<GaussPoint> {
    let rot = c(0.0, -omega * t / 2.0).exp();
    if eta == 0.0 {
        let d = omega0 - omega;
        let nu2 = (g * g - d * d) / 4.0;
        let s = shc(nu2, t);
        let u01 = rot * c(0.0, -g / 2.0 * s);
        let u11 = rot.conj() * c(ch(nu2, t), d / 2.0 * s);
        return disc_point(t, u01, u11, false);
    }
    if is_resonant(omega0, omega) {
        let theta = g * (-(-eta * t).exp_m1()) / (2.0 * eta);
        let u01 = rot * c(0.0, -theta.sinh());
        let u11 = rot.conj() * theta.cosh();
        return disc_point(t, u01, u11, false);
    }
    let kappa = g / (2.0 * eta);
    let x = kappa * (-eta * t).exp();
    if kappa.abs().max(x.abs()) > I_ARG_LIMIT {
        return Err(KrylovError::Overflow(format!(
            "modified Bessel argument {} too large",
            kappa.abs().max(x.abs())
        )));
    }
    let eps = (omega0 - omega) / (2.0 * eta);
    let mu = c(0.5, -eps);
    let mup = 1.0 - mu;
    let ctl = SeriesControl {
        rel_tol: 1e-15,
        max_terms: 4000,
    };
    let s = |nu: Complex64, z: f64| bessel_i_scaled(nu, c(z, 0.0), ctl);
    let r = (-mu * eta * t).exp();
    let rinv = 1.0 / r;
    let num = rinv * s(mu, kappa)? * s(-mu, x)? - r * s(-mu, kappa)? * s(mu, x)?;
    let den = (x / 2.0) * rinv * s(mu, kappa)? * s(mup, x)? / (1.0 - mu)
        - mu * (2.0 / x) * r * s(-mu, kappa)? * s(-mup, x)?;
    disc_point(t, rot * I * num, rot.conj() * den, true)
}

/// Build an SU(1,1) point; with `rescale` the pair is normalized to
/// |U11|^2 - |U01|^2 = 1 first.
fn disc_point(t: f64, u01: Complex64, u11: Complex64, rescale: bool) -> Result<GaussPoint> {
    let (u01, u11) = if rescale {
        let gap = u11.norm_sqr() - u01.norm_sqr();
        if !(gap > 0.0) || !gap.is_finite() {
            return Err(KrylovError::Domain(format!("|Lambda+| >= 1 at t = {t}")));
        }
        let s = gap.sqrt();
        (u01 / s, u11 / s)
    } else {
        (u01, u11)
    };
    let pair = ProjectivePair::new(u01, u11)?;
    Ok(GaussPoint {
        t,
        pair,
        lambda_plus: pair.lambda(),
        lambda_zero: -2.0 * u11.ln(),
        // pseudo-unitarity gives U10 = conj(U01); the K- sign flips it
        lambda_minus: -u01.conj() / u11,
        global_phase: c(1.0, 0.0),
    })
}

/// Quenched oscillator in the k = 1/4 representation: frequency
/// w1^2 = w0^2 + 2 w0 eta0 for t < tau, free evolution at w0 after.
pub fn quench_coefficients(omega0: f64, eta0: f64, tau: f64, t: f64) -> Result<GaussPoint> {
    if t < 0.0 {
        return Err(KrylovError::Domain(
            "quench time must be non-negative".into(),
        ));
    }
    let w1sq = omega0 * omega0 + 2.0 * omega0 * eta0;
    let t1 = t.min(tau);
    let s = shc(-w1sq, t1);
    let mut u01 = c(0.0, -eta0 * s);
    let mut u11 = c(ch(-w1sq, t1), (omega0 + eta0) * s);
    if t > tau {
        let ph = c(0.0, -omega0 * (t - tau)).exp();
        u01 *= ph;
        u11 *= ph.conj();
    }
    disc_point(t, u01, u11, false)
}

/// h(1) coefficients of U = K e^{alpha N} e^{beta a+} e^{gamma a}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H1Point {
    pub t: f64,
    pub ln_k: Complex64,
    pub k: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl H1Point {
    /// Coherent amplitude of the evolved vacuum.
    pub fn amplitude(&self) -> Complex64 {
        self.alpha.exp() * self.beta
    }

    pub fn gauss_point(&self) -> GaussPoint {
        let lp = self.amplitude();
        GaussPoint {
            t: self.t,
            pair: ProjectivePair {
                u01: lp,
                u11: c(1.0, 0.0),
            },
            lambda_plus: lp,
            lambda_zero: self.ln_k,
            lambda_minus: self.gamma,
            global_phase: self.k,
        }
    }
}

/// H = w0 a+a + f a + conj(f) a+ with f = f0 e^{-eta t + i w t}.
pub fn h1_driven(omega0: f64, omega: f64, f0: f64, eta: f64, t: f64) -> H1Point {
    let d = if is_resonant(omega0, omega) {
        0.0
    } else {
        omega - omega0
    };
    let beta = -I * f0 * phi1(c(eta, d), t);
    let gamma = -I * f0 * phi1(c(eta, -d), t);
    let ln_k = f0 * f0 * phi1_diff(c(2.0 * eta, 0.0), c(eta, -d), t);
    H1Point {
        t,
        ln_k,
        k: ln_k.exp(),
        alpha: c(0.0, -omega0 * t),
        beta,
        gamma,
    }
}
