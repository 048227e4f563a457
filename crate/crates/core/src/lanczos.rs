//! Lanczos tridiagonalization: direct recursion with full
//! reorthogonalization, and the survival-amplitude moments route.

use crate::algebra::CMat;
use crate::error::{KrylovError, Result};
use crate::linalg::{check_hermitian, frob, spectral, CVec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest moment order accepted by the moments route. Hankel
/// conditioning makes higher orders meaningless in double precision.
pub const MAX_MOMENT_ORDER: usize = 24;

#[derive(Debug, Clone, Default)]
pub struct TridiagonalData {
    pub a: Vec<f64>,
    /// b[0] couples v_0 and v_1.
    pub b: Vec<f64>,
    pub basis: Vec<CVec>,
}

impl TridiagonalData {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Dense Krylov-basis Hamiltonian.
    pub fn matrix(&self) -> CMat {
        let d = self.a.len();
        let mut m = CMat::zeros(d, d);
        for (n, &a) in self.a.iter().enumerate() {
            m[(n, n)] = Complex64::new(a, 0.0);
        }
        for (n, &b) in self.b.iter().enumerate() {
            m[(n, n + 1)] = Complex64::new(b, 0.0);
            m[(n + 1, n)] = Complex64::new(b, 0.0);
        }
        m
    }

    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, vm) in self.basis.iter().enumerate() {
            for (n, vn) in self.basis.iter().enumerate() {
                let target = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((vm.dotc(vn) - target).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    /// mu[n] = <seed|(iH)^n|seed>
    pub mu: Vec<Complex64>,
}

fn check_seed(seed: &CVec) -> Result<()> {
    let n = seed.norm();
    if !(n.is_finite()) || (n - 1.0).abs() > 1e-8 {
        return Err(KrylovError::ZeroSeed);
    }
    Ok(())
}

pub fn default_breakdown_tol(h: &CMat) -> f64 {
    1e-12 * frob(h).max(f64::MIN_POSITIVE)
}

pub fn tridiagonalize(h: &CMat, seed: &CVec, breakdown_tol: f64) -> Result<TridiagonalData> {
    check_hermitian(h)?;
    if seed.len() != h.nrows() {
        return Err(KrylovError::Domain("seed dimension mismatch".into()));
    }
    check_seed(seed)?;
    let d = h.nrows();
    let mut out = TridiagonalData::default();
    let mut v = seed.clone();
    v /= Complex64::new(v.norm(), 0.0);
    for n in 0..d {
        let hv = h * &v;
        let a = v.dotc(&hv).re;
        out.a.push(a);
        out.basis.push(v.clone());
        if n + 1 == d {
            break;
        }
        let mut w = hv - &v * Complex64::new(a, 0.0);
        if n > 0 {
            w -= &out.basis[n - 1] * Complex64::new(out.b[n - 1], 0.0);
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &out.basis {
                let p = q.dotc(&w);
                w -= q * p;
            }
        }
        let b = w.norm();
        if b <= breakdown_tol {
            break;
        }
        out.b.push(b);
        v = w / Complex64::new(b, 0.0);
    }
    Ok(out)
}

pub fn survival_amplitude(h: &CMat, seed: &CVec, t: f64) -> Result<Complex64> {
    let s = spectral(h)?;
    if seed.len() != h.nrows() {
        return Err(KrylovError::Domain("seed dimension mismatch".into()));
    }
    let overlaps = s.vectors.adjoint() * seed;
    Ok(overlaps
        .iter()
        .zip(s.values.iter())
        .map(|(c, &l)| c.norm_sqr() * Complex64::new(0.0, l * t).exp())
        .sum())
}

/// mu_0 .. mu_order by repeated application of iH.
pub fn moments(h: &CMat, seed: &CVec, order: usize) -> Result<MomentSequence> {
    check_hermitian(h)?;
    check_seed(seed)?;
    let ih = h * Complex64::i();
    let mut mu = Vec::with_capacity(order + 1);
    let mut w = seed.clone();
    mu.push(seed.dotc(&w));
    for _ in 0..order {
        w = &ih * w;
        mu.push(seed.dotc(&w));
    }
    Ok(MomentSequence { mu })
}

pub fn lanczos_from_moments(mu: &MomentSequence) -> Result<TridiagonalData> {
    lanczos_from_moments_tol(mu, 1e-9)
}

/// Chebyshev (Gautschi) algorithm on the real moments m_n = mu_n / i^n.
/// Termination with b^2 below tol * scale^2 is treated as an exhausted
/// Krylov space; a clearly negative b^2 is a breakdown.
pub fn lanczos_from_moments_tol(mu: &MomentSequence, tol: f64) -> Result<TridiagonalData> {
    let order = mu.mu.len().saturating_sub(1);
    if order < 1 {
        return Err(KrylovError::Domain("need at least mu_0 and mu_1".into()));
    }
    if order > MAX_MOMENT_ORDER {
        return Err(KrylovError::Domain(format!(
            "moment order {order} exceeds the supported {MAX_MOMENT_ORDER}"
        )));
    }
    let mut ipow = Complex64::new(1.0, 0.0);
    let mut m = Vec::with_capacity(order + 1);
    for z in &mu.mu {
        let r = z / ipow;
        m.push(r.re);
        ipow *= Complex64::i();
    }
    if (m[0] - 1.0).abs() > 1e-8 {
        return Err(KrylovError::Domain(format!("mu_0 = {} is not 1", m[0])));
    }
    // rescale to unit spread for conditioning
    let scale = (1..=order)
        .map(|n| m[n].abs().powf(1.0 / n as f64))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let ms: Vec<f64> = m
        .iter()
        .enumerate()
        .map(|(n, x)| x / scale.powi(n as i32))
        .collect();

    let mut a = vec![ms[1] / ms[0]];
    let mut beta: Vec<f64> = vec![ms[0]];
    let mut prev: Vec<f64> = vec![0.0; order + 1];
    let mut cur: Vec<f64> = ms.clone();
    let mut k = 1;
    loop {
        // sigma_k needs moments up to 2k; a_k needs 2k+1.
        if 2 * k > order {
            break;
        }
        let mut next = vec![0.0; order + 1];
        for l in k..=(order - k) {
            next[l] =
                cur[l + 1] - a[k - 1] * cur[l] - if k >= 2 { beta[k - 1] * prev[l] } else { 0.0 };
        }
        let b2 = next[k] / cur[k - 1];
        if b2.abs() <= tol {
            break;
        }
        if b2 < 0.0 {
            return Err(KrylovError::NumericalBreakdown(format!(
                "b_{k}^2 = {b2:e} < 0"
            )));
        }
        beta.push(b2);
        if 2 * k + 1 > order {
            // b_k known but a_k is not: the caller gave too few moments
            beta.pop();
            break;
        }
        a.push(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
        prev = cur;
        cur = next;
        k += 1;
    }
    Ok(TridiagonalData {
        a: a.iter().map(|x| x * scale).collect(),
        b: beta.iter().skip(1).map(|x| x.sqrt() * scale).collect(),
        basis: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CMat;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn v_config(w: f64, g1: f64, g2: f64) -> CMat {
        CMat::from_row_slice(
            3,
            3,
            &[
                r(w),
                r(0.0),
                r(g2),
                r(0.0),
                r(w),
                r(g1),
                r(g2),
                r(g1),
                r(-2.0 * w),
            ],
        )
    }

    fn e0(d: usize) -> CVec {
        let mut v = CVec::zeros(d);
        v[0] = r(1.0);
        v
    }

    #[test]
    fn eigenvector_seed_terminates() {
        let h = CMat::from_diagonal(&CVec::from_vec(vec![r(1.0), r(2.0), r(3.0)]));
        let t = tridiagonalize(&h, &e0(3), 1e-12).unwrap();
        assert_eq!(t.a, vec![1.0]);
        assert!(t.b.is_empty());
    }

    #[test]
    fn v_configuration_direct() {
        let t = tridiagonalize(&v_config(4.0, 5.0, 2.0), &e0(3), 1e-12).unwrap();
        for (x, y) in t.a.iter().zip([4.0, -8.0, 4.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in t.b.iter().zip([2.0, 5.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn v_configuration_moments() {
        let mu = moments(&v_config(4.0, 5.0, 2.0), &e0(3), 6).unwrap();
        let want = [
            r(1.0),
            Complex64::new(0.0, 4.0),
            r(-20.0),
            Complex64::new(0.0, -64.0),
            r(564.0),
        ];
        for (x, y) in mu.mu.iter().zip(want.iter()) {
            assert!((x - y).norm() < 1e-9, "{x} vs {y}");
        }
        let t = lanczos_from_moments(&mu).unwrap();
        assert_eq!(t.a.len(), 3);
        for (x, y) in t.a.iter().zip([4.0, -8.0, 4.0]) {
            assert!((x - y).abs() < 1e-9);
        }
        for (x, y) in t.b.iter().zip([2.0, 5.0]) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn diagonal_moments_terminate() {
        let h = CMat::from_diagonal(&CVec::from_vec(vec![r(1.5), r(2.0), r(3.0)]));
        let mu = moments(&h, &e0(3), 6).unwrap();
        let t = lanczos_from_moments(&mu).unwrap();
        assert_eq!(t.a.len(), 1);
        assert!((t.a[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn survival_at_zero_is_one() {
        let s = survival_amplitude(&v_config(4.0, 5.0, 2.0), &e0(3), 0.0).unwrap();
        assert!((s - r(1.0)).norm() < 1e-14);
    }

    #[test]
    fn bad_inputs() {
        let h = v_config(1.0, 1.0, 1.0);
        assert!(matches!(
            tridiagonalize(&h, &CVec::zeros(3), 1e-12),
            Err(KrylovError::ZeroSeed)
        ));
        let mut nh = h.clone();
        nh[(0, 1)] = r(3.0);
        assert!(matches!(
            tridiagonalize(&nh, &e0(3), 1e-12),
            Err(KrylovError::NotHermitian(_))
        ));
        let big = MomentSequence {
            mu: vec![r(1.0); 30],
        };
        assert!(lanczos_from_moments(&big).is_err());
    }
}
