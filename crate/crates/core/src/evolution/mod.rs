//! Gauss-decomposition coefficients: closed forms for every model family,
//! a generic propagator integrator, and numerical decomposition of 2x2
//! propagators.
//!
//! The 2x2 matrices here use the usual physics orientation: index 0 is the
//! highest weight, X+ is upper triangular, and the seed (lowest weight) is
//! index 1. Then U = e^{L+ X+} e^{L0 X0} e^{L- X-} gives L+ = U01/U11 and
//! e^{-L0/2} = U11.

mod closed;
mod kicked;
mod numeric;

pub use closed::{
    h1_driven, quench_coefficients, su11_driven, su2_damped, su2_driven, su2_static, H1Point,
};
pub use kicked::{kick_generator_exact, kick_generator_first_order, su2_kicked, KickGenerator};
pub use numeric::{
    fundamental, h1_driven_numeric, integrate_propagator, integrate_state, kicked_product,
    su11_driven_numeric, su2_driven_numeric, PropagatorTrajectory,
};

use crate::algebra::{CMat, Group};
use crate::error::{KrylovError, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The two fundamental-representation entries whose ratio is Lambda+.
/// Kept separately so that poles of Lambda+ never have to be formed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePair {
    pub u01: Complex64,
    pub u11: Complex64,
}

impl ProjectivePair {
    pub fn new(u01: Complex64, u11: Complex64) -> Result<Self> {
        if u01.norm() == 0.0 && u11.norm() == 0.0 {
            return Err(KrylovError::DegenerateEntry(
                "U01 and U11 both vanish".into(),
            ));
        }
        Ok(ProjectivePair { u01, u11 })
    }

    pub fn lambda(&self) -> Complex64 {
        self.u01 / self.u11
    }

    pub fn abs_lambda(&self) -> f64 {
        self.u01.norm() / self.u11.norm()
    }

    /// |L|^2 / (1 + |L|^2), bounded in [0, 1].
    pub fn compact_fraction(&self) -> f64 {
        let a = self.u01.norm_sqr();
        a / (a + self.u11.norm_sqr())
    }

    /// |L|^2 / (1 - |L|^2); requires |L| < 1.
    pub fn disc_ratio(&self) -> Result<f64> {
        let a = self.u01.norm_sqr();
        let b = self.u11.norm_sqr();
        if a >= b {
            return Err(KrylovError::Domain(format!(
                "|Lambda+| = {} is not inside the unit disc",
                (a / b).sqrt()
            )));
        }
        Ok(a / (b - a))
    }
}

/// Gauss coefficients at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussPoint {
    pub t: f64,
    pub pair: ProjectivePair,
    pub lambda_plus: Complex64,
    pub lambda_zero: Complex64,
    pub lambda_minus: Complex64,
    pub global_phase: Complex64,
}

impl GaussPoint {
    pub fn identity(t: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        GaussPoint {
            t,
            pair: ProjectivePair {
                u01: zero,
                u11: one,
            },
            lambda_plus: zero,
            lambda_zero: zero,
            lambda_minus: zero,
            global_phase: one,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussCoefficients {
    pub group: Group,
    pub t_grid: Vec<f64>,
    pub pairs: Vec<ProjectivePair>,
    pub lambda_plus: Vec<Complex64>,
    pub lambda_zero: Vec<Complex64>,
    pub lambda_minus: Vec<Complex64>,
    pub global_phase: Vec<Complex64>,
}

impl GaussCoefficients {
    /// Collect points; the imaginary part of Lambda0 is made continuous
    /// along the grid, starting from the branch of the first point.
    pub fn from_points(group: Group, points: Vec<GaussPoint>) -> Self {
        let mut out = GaussCoefficients {
            group,
            t_grid: Vec::with_capacity(points.len()),
            pairs: Vec::with_capacity(points.len()),
            lambda_plus: Vec::with_capacity(points.len()),
            lambda_zero: Vec::with_capacity(points.len()),
            lambda_minus: Vec::with_capacity(points.len()),
            global_phase: Vec::with_capacity(points.len()),
        };
        let period = match group {
            Group::H1 => 2.0 * PI,
            _ => 4.0 * PI,
        };
        let mut prev: Option<f64> = None;
        for p in points {
            let mut l0 = p.lambda_zero;
            if let Some(q) = prev {
                if l0.im.is_finite() {
                    l0.im += period * ((q - l0.im) / period).round();
                }
            }
            if l0.im.is_finite() {
                prev = Some(l0.im);
            }
            out.t_grid.push(p.t);
            out.pairs.push(p.pair);
            out.lambda_plus.push(p.lambda_plus);
            out.lambda_zero.push(l0);
            out.lambda_minus.push(p.lambda_minus);
            out.global_phase.push(p.global_phase);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    /// Largest violation of the modulus relation between Re(L0) and |L+|.
    pub fn modulus_relation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let lp = self.lambda_plus[i];
            let l0 = self.lambda_zero[i];
            if !(lp.re.is_finite() && lp.im.is_finite()) {
                continue;
            }
            let expect = match self.group {
                Group::SU2 => (1.0 + lp.norm_sqr()).ln(),
                Group::SU11 => (1.0 - lp.norm_sqr()).ln(),
                Group::H1 => -0.5 * lp.norm_sqr(),
                Group::SU3 => continue,
            };
            worst = worst.max((l0.re - expect).abs() / expect.abs().max(1.0));
        }
        worst
    }
}

/// Decompose a unimodular 2x2 propagator. For SU11 the lowering generator is
/// -E10, which flips the sign of Lambda-.
pub fn gauss_decompose(u: &CMat, group: Group) -> Result<(ProjectivePair, Complex64, Complex64)> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(KrylovError::Domain(
            "gauss_decompose expects a 2x2 matrix".into(),
        ));
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    // the determinant of a large SU(1,1) element is a difference of large
    // products, so its rounding error scales with |U|^2
    let scale = u.iter().map(|z| z.norm_sqr()).fold(1.0, f64::max);
    if (det - 1.0).norm() > 1e-8 * scale {
        return Err(KrylovError::Domain(format!(
            "propagator is not unimodular (det = {det})"
        )));
    }
    let pair = ProjectivePair::new(u[(0, 1)], u[(1, 1)])?;
    let lambda_zero = -2.0 * u[(1, 1)].ln();
    let lm = u[(1, 0)] / u[(1, 1)];
    let lambda_minus = match group {
        Group::SU2 => lm,
        Group::SU11 => -lm,
        _ => {
            return Err(KrylovError::Domain(format!(
                "no 2x2 decomposition for {group:?}"
            )))
        }
    };
    Ok((pair, lambda_zero, lambda_minus))
}

/// Decompose U = phase * V with V unimodular and build a GaussPoint.
pub fn point_from_matrix(t: f64, u: &CMat, group: Group) -> Result<GaussPoint> {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let phase = det.sqrt();
    let v = u / phase;
    let (pair, l0, lm) = gauss_decompose(&v, group)?;
    Ok(GaussPoint {
        t,
        pair,
        lambda_plus: pair.lambda(),
        lambda_zero: l0,
        lambda_minus: lm,
        global_phase: phase,
    })
}

/// Rebuild the 2x2 matrix from Gauss parameters.
pub fn compose(lp: Complex64, l0: Complex64, lm: Complex64, group: Group) -> CMat {
    let e = (-0.5 * l0).exp();
    let lm_entry = match group {
        Group::SU11 => -lm,
        _ => lm,
    };
    CMat::from_row_slice(
        2,
        2,
        &[(l0.exp() + lp * lm_entry) * e, lp * e, lm_entry * e, e],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_decomposes_to_zero() {
        let (pair, l0, lm) = gauss_decompose(&CMat::identity(2, 2), Group::SU2).unwrap();
        assert_eq!(pair.lambda(), c(0.0, 0.0));
        assert_eq!(l0, c(0.0, 0.0));
        assert_eq!(lm, c(0.0, 0.0));
    }

    #[test]
    fn y_rotation_quarter_turn() {
        let th = PI / 2.0;
        let u = CMat::from_row_slice(
            2,
            2,
            &[
                c((th / 2.0).cos(), 0.0),
                c(-(th / 2.0).sin(), 0.0),
                c((th / 2.0).sin(), 0.0),
                c((th / 2.0).cos(), 0.0),
            ],
        );
        let (pair, _, lm) = gauss_decompose(&u, Group::SU2).unwrap();
        assert!((pair.abs_lambda() - 1.0).abs() < 1e-15);
        assert!((lm.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compose_roundtrip() {
        for group in [Group::SU2, Group::SU11] {
            let (lp, l0, lm) = (c(0.3, -0.2), c(0.1, 0.7), c(-0.4, 0.25));
            let u = compose(lp, l0, lm, group);
            let (pair, l0b, lmb) = gauss_decompose(&u, group).unwrap();
            assert!((pair.lambda() - lp).norm() < 1e-14);
            assert!((l0b - l0).norm() < 1e-14);
            assert!((lmb - lm).norm() < 1e-14);
        }
    }

    #[test]
    fn not_unimodular_rejected() {
        let u = CMat::identity(2, 2) * c(2.0, 0.0);
        assert!(gauss_decompose(&u, Group::SU2).is_err());
    }

    #[test]
    fn degenerate_pair_rejected() {
        assert!(ProjectivePair::new(c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn compact_fraction_at_pole() {
        let p = ProjectivePair::new(c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        assert_eq!(p.compact_fraction(), 1.0);
    }
}
