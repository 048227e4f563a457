//! Matrix representations of su(2), h(1), su(1,1) and the su(3) fundamental,
//! plus assembly of time-dependent Hamiltonians linear in the generators.
//!
//! All bases are ordered lowest weight first, so index n is the Krylov
//! position and carries complexity weight n.

use crate::error::{KrylovError, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    SU2,
    H1,
    SU11,
    SU3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub group: Group,
    /// Spin j for SU2, Bargmann index h for SU11, 0 otherwise.
    pub weight: f64,
    pub dim: usize,
    pub generators: BTreeMap<String, CMat>,
}

impl GeneratorSet {
    pub fn get(&self, label: &str) -> Result<&CMat> {
        self.generators
            .get(label)
            .ok_or_else(|| KrylovError::UnknownLabel(label.to_string()))
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim, self.dim)
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn is_half_integer(x: f64) -> bool {
    let t = 2.0 * x;
    x.is_finite() && t >= 0.0 && (t - t.round()).abs() < 1e-12
}

/// Spin-j irrep in the basis |j, -j+n>, n = 0..2j.
pub fn build_su2(j: f64) -> Result<GeneratorSet> {
    if !is_half_integer(j) {
        return Err(KrylovError::InvalidWeight(j));
    }
    let j = (2.0 * j).round() / 2.0;
    let dim = (2.0 * j).round() as usize + 1;
    let mut jp = CMat::zeros(dim, dim);
    let mut j0 = CMat::zeros(dim, dim);
    for n in 0..dim {
        j0[(n, n)] = c(n as f64 - j);
        if n + 1 < dim {
            let nf = n as f64;
            jp[(n + 1, n)] = c(((nf + 1.0) * (2.0 * j - nf)).sqrt());
        }
    }
    let jm = jp.adjoint();
    let mut generators = BTreeMap::new();
    generators.insert("J+".to_string(), jp);
    generators.insert("J-".to_string(), jm);
    generators.insert("J0".to_string(), j0);
    Ok(GeneratorSet {
        group: Group::SU2,
        weight: j,
        dim,
        generators,
    })
}

/// Oscillator algebra truncated to Fock states 0..=n_max.
pub fn build_h1(n_max: usize) -> Result<GeneratorSet> {
    if n_max < 1 {
        return Err(KrylovError::InvalidWeight(n_max as f64));
    }
    let dim = n_max + 1;
    let mut a = CMat::zeros(dim, dim);
    let mut num = CMat::zeros(dim, dim);
    for n in 0..dim {
        num[(n, n)] = c(n as f64);
        if n + 1 < dim {
            a[(n, n + 1)] = c(((n + 1) as f64).sqrt());
        }
    }
    let ad = a.adjoint();
    let mut generators = BTreeMap::new();
    generators.insert("a".to_string(), a);
    generators.insert("a+".to_string(), ad);
    generators.insert("N".to_string(), num);
    Ok(GeneratorSet {
        group: Group::H1,
        weight: 0.0,
        dim,
        generators,
    })
}

/// Positive discrete series with Bargmann index h, truncated at n_max.
/// Accepts 2h a positive integer or h = 1/4.
pub fn build_su11(h: f64, n_max: usize) -> Result<GeneratorSet> {
    let quarter = (h - 0.25).abs() < 1e-15;
    if !(quarter || (is_half_integer(h) && h > 0.0)) || n_max < 1 {
        return Err(KrylovError::InvalidWeight(h));
    }
    let h = if quarter {
        0.25
    } else {
        (2.0 * h).round() / 2.0
    };
    let dim = n_max + 1;
    let mut kp = CMat::zeros(dim, dim);
    let mut k0 = CMat::zeros(dim, dim);
    for n in 0..dim {
        let nf = n as f64;
        k0[(n, n)] = c(h + nf);
        if n + 1 < dim {
            kp[(n + 1, n)] = c(((nf + 1.0) * (2.0 * h + nf)).sqrt());
        }
    }
    let km = kp.adjoint();
    let mut generators = BTreeMap::new();
    generators.insert("K+".to_string(), kp);
    generators.insert("K-".to_string(), km);
    generators.insert("K0".to_string(), k0);
    Ok(GeneratorSet {
        group: Group::SU11,
        weight: h,
        dim,
        generators,
    })
}

/// The eight 3x3 generators as used for the three-level atom. The Cartans
/// carry unit entries, i.e. twice the spin-1/2 normalization, so that
/// [Sz, S+] = 2 S+ and [S+, S-] = Sz within each pair.
pub fn build_su3_fundamental() -> GeneratorSet {
    let e = |r: usize, col: usize| {
        let mut m = CMat::zeros(3, 3);
        m[(r, col)] = c(1.0);
        m
    };
    let diag = |d: [f64; 3]| {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            3,
            d.iter().map(|x| c(*x)),
        ))
    };
    let mut g = BTreeMap::new();
    g.insert("Sz12".to_string(), diag([0.0, 1.0, -1.0]));
    g.insert("Sz13".to_string(), diag([1.0, 0.0, -1.0]));
    g.insert("S+12".to_string(), e(1, 2));
    g.insert("S-12".to_string(), e(2, 1));
    g.insert("S+13".to_string(), e(0, 2));
    g.insert("S-13".to_string(), e(2, 0));
    g.insert("S+23".to_string(), e(0, 1));
    g.insert("S-23".to_string(), e(1, 0));
    GeneratorSet {
        group: Group::SU3,
        weight: 0.0,
        dim: 3,
        generators: g,
    }
}

pub type CoeffFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ShiftFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// H(t) = sum_X coeff_X(t) X + shift(t) I.
#[derive(Clone)]
pub struct HamiltonianAssembly {
    pub gen: Arc<GeneratorSet>,
    coeff: Vec<(String, CoeffFn)>,
    shift: ShiftFn,
}

impl std::fmt::Debug for HamiltonianAssembly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let labels: Vec<&str> = self.coeff.iter().map(|(l, _)| l.as_str()).collect();
        f.debug_struct("HamiltonianAssembly")
            .field("group", &self.gen.group)
            .field("dim", &self.gen.dim)
            .field("labels", &labels)
            .finish()
    }
}

pub fn assemble(
    gen: Arc<GeneratorSet>,
    coeff: Vec<(String, CoeffFn)>,
    shift: ShiftFn,
) -> Result<HamiltonianAssembly> {
    for (label, _) in &coeff {
        gen.get(label)?;
    }
    Ok(HamiltonianAssembly { gen, coeff, shift })
}

impl HamiltonianAssembly {
    pub fn dim(&self) -> usize {
        self.gen.dim
    }

    pub fn at(&self, t: f64) -> CMat {
        let mut h = self.gen.identity() * c((self.shift)(t));
        for (label, f) in &self.coeff {
            let x = &self.gen.generators[label];
            let k = f(t);
            if k != Complex64::new(0.0, 0.0) {
                h += x * k;
            }
        }
        h
    }

    /// True when no coefficient depends on time (probed on a few points).
    pub fn is_constant_probe(&self, span: f64) -> bool {
        let probes = [0.0, 0.37 * span, 0.81 * span, span];
        let h0 = self.at(0.0);
        probes.iter().all(|&t| max_abs(&(self.at(t) - &h0)) == 0.0)
    }
}

pub fn constant(v: Complex64) -> CoeffFn {
    Arc::new(move |_| v)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}
