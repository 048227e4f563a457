//! Numerically integrated propagators and their Gauss decomposition.

use super::closed::H1Point;
use super::kicked::period_matrix;
use super::{point_from_matrix, GaussCoefficients};
use crate::algebra::{assemble, constant, CMat, CoeffFn, GeneratorSet, Group, HamiltonianAssembly};
use crate::error::{KrylovError, Result};
use crate::linalg::{check_hermitian, spectral, CVec};
use crate::ode::{integrate, OdeOptions};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const MAX_PROPAGATOR_DIM: usize = 512;

#[derive(Debug, Clone)]
pub struct PropagatorTrajectory {
    pub t: Vec<f64>,
    pub u: Vec<CMat>,
    /// True when H was constant and the spectral exponential was used.
    pub spectral: bool,
}

fn e(n: usize, r: usize, c: usize, v: f64) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(r, c)] = Complex64::new(v, 0.0);
    m
}

/// Faithful low-dimensional representations used by the numeric routes.
/// SU2 and SU11 are 2x2 with the lowest weight at index 1; H1 is the 3x3
/// Heisenberg representation with central element c = [a, a+].
pub fn fundamental(group: Group) -> Result<GeneratorSet> {
    let mut g = BTreeMap::new();
    let (dim, weight) = match group {
        Group::SU2 => {
            g.insert("J+".to_string(), e(2, 0, 1, 1.0));
            g.insert("J-".to_string(), e(2, 1, 0, 1.0));
            g.insert("J0".to_string(), e(2, 0, 0, 0.5) + e(2, 1, 1, -0.5));
            (2, 0.5)
        }
        Group::SU11 => {
            g.insert("K+".to_string(), e(2, 0, 1, 1.0));
            g.insert("K-".to_string(), e(2, 1, 0, -1.0));
            g.insert("K0".to_string(), e(2, 0, 0, 0.5) + e(2, 1, 1, -0.5));
            (2, 0.5)
        }
        Group::H1 => {
            g.insert("a".to_string(), e(3, 0, 1, 1.0));
            g.insert("a+".to_string(), e(3, 1, 2, 1.0));
            g.insert("N".to_string(), e(3, 1, 1, 1.0));
            g.insert("c".to_string(), e(3, 0, 2, 1.0));
            (3, 0.0)
        }
        Group::SU3 => return Ok(crate::algebra::build_su3_fundamental()),
    };
    Ok(GeneratorSet {
        group,
        weight,
        dim,
        generators: g,
    })
}

fn options(rel_tol: f64) -> Result<OdeOptions> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(KrylovError::Domain(format!(
            "tolerance {rel_tol} out of range"
        )));
    }
    Ok(OdeOptions {
        rtol: rel_tol,
        atol: rel_tol * 1e-2,
        ..OdeOptions::default()
    })
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KrylovError::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Solve i dU/dt = H(t) U with U(t_grid[0]) = I.
pub fn integrate_propagator(
    h: &HamiltonianAssembly,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<PropagatorTrajectory> {
    let n = h.dim();
    if n > MAX_PROPAGATOR_DIM {
        return Err(KrylovError::Domain(format!(
            "dimension {n} exceeds {MAX_PROPAGATOR_DIM}"
        )));
    }
    check_grid(t_grid)?;
    if t_grid.is_empty() {
        return Ok(PropagatorTrajectory {
            t: vec![],
            u: vec![],
            spectral: false,
        });
    }
    let t0 = t_grid[0];
    let span = t_grid[t_grid.len() - 1] - t0;
    if h.is_constant_probe(span.max(1.0)) {
        let h0 = h.at(t0);
        if check_hermitian(&h0).is_ok() {
            let sp = spectral(&h0)?;
            let u = t_grid.iter().map(|&t| sp.propagator(t - t0)).collect();
            return Ok(PropagatorTrajectory {
                t: t_grid.to_vec(),
                u,
                spectral: true,
            });
        }
    }
    let opts = options(rel_tol)?;
    let id = CMat::identity(n, n);
    let y0: Vec<Complex64> = id.as_slice().to_vec();
    let ys = integrate(
        |t, y, dy| {
            let hm = h.at(t);
            let um = nalgebra::DMatrixView::<Complex64>::from_slice(y, n, n);
            let prod = &hm * um;
            for (d, p) in dy.iter_mut().zip(prod.iter()) {
                *d = Complex64::new(p.im, -p.re);
            }
        },
        &y0,
        t_grid,
        opts,
    )?;
    let u = ys.into_iter().map(|y| CMat::from_vec(n, n, y)).collect();
    Ok(PropagatorTrajectory {
        t: t_grid.to_vec(),
        u,
        spectral: false,
    })
}

/// Evolve a state vector; cheaper than the full propagator for large
/// truncations.
pub fn integrate_state(
    h: &HamiltonianAssembly,
    psi0: &CVec,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<Vec<CVec>> {
    let n = h.dim();
    if psi0.len() != n {
        return Err(KrylovError::Domain(format!(
            "state length {} does not match dimension {n}",
            psi0.len()
        )));
    }
    check_grid(t_grid)?;
    if t_grid.is_empty() {
        return Ok(vec![]);
    }
    let t0 = t_grid[0];
    let span = t_grid[t_grid.len() - 1] - t0;
    if h.is_constant_probe(span.max(1.0)) {
        let h0 = h.at(t0);
        if check_hermitian(&h0).is_ok() {
            let sp = spectral(&h0)?;
            return Ok(t_grid.iter().map(|&t| sp.evolve(psi0, t - t0)).collect());
        }
    }
    let opts = options(rel_tol)?;
    let ys = integrate(
        |t, y, dy| {
            let hm = h.at(t);
            let v = nalgebra::DVectorView::<Complex64>::from_slice(y, n);
            let prod = &hm * v;
            for (d, p) in dy.iter_mut().zip(prod.iter()) {
                *d = Complex64::new(p.im, -p.re);
            }
        },
        psi0.as_slice(),
        t_grid,
        opts,
    )?;
    Ok(ys.into_iter().map(CVec::from_vec).collect())
}

fn drive(amp: f64, eta: f64, omega: f64, sign: f64) -> CoeffFn {
    // amp e^{-eta t} e^{-i sign w t}
    Arc::new(move |t: f64| Complex64::from_polar(amp * (-eta * t).exp(), -sign * omega * t))
}

fn zero_shift() -> crate::algebra::ShiftFn {
    Arc::new(|_| 0.0)
}

/// Driven (eta = 0), damped (eta > 0) or ramped (eta < 0) SU(2) in the
/// 2x2 representation.
pub fn su2_driven_numeric(
    omega0: f64,
    omega: f64,
    b0: f64,
    eta: f64,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<GaussCoefficients> {
    let gen = Arc::new(fundamental(Group::SU2)?);
    let h = assemble(
        gen,
        vec![
            ("J0".into(), constant(Complex64::new(omega0, 0.0))),
            ("J+".into(), drive(b0 / 2.0, eta, omega, 1.0)),
            ("J-".into(), drive(b0 / 2.0, eta, omega, -1.0)),
        ],
        zero_shift(),
    )?;
    decompose(&integrate_propagator(&h, t_grid, rel_tol)?, Group::SU2)
}

/// Two-mode pump in the 2x2 SU(1,1) representation.
pub fn su11_driven_numeric(
    omega0: f64,
    omega: f64,
    g: f64,
    eta: f64,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<GaussCoefficients> {
    let gen = Arc::new(fundamental(Group::SU11)?);
    let h = assemble(
        gen,
        vec![
            ("K0".into(), constant(Complex64::new(omega0, 0.0))),
            ("K+".into(), drive(g / 2.0, eta, omega, 1.0)),
            ("K-".into(), drive(g / 2.0, eta, omega, -1.0)),
        ],
        zero_shift(),
    )?;
    decompose(&integrate_propagator(&h, t_grid, rel_tol)?, Group::SU11)
}

/// Driven photon mode in the 3x3 Heisenberg representation, read off as
/// U = [[1, gamma, ln K], [0, e^alpha, e^alpha beta], [0, 0, 1]].
pub fn h1_driven_numeric(
    omega0: f64,
    omega: f64,
    f0: f64,
    eta: f64,
    t_grid: &[f64],
    rel_tol: f64,
) -> Result<Vec<H1Point>> {
    let gen = Arc::new(fundamental(Group::H1)?);
    let h = assemble(
        gen,
        vec![
            ("N".into(), constant(Complex64::new(omega0, 0.0))),
            ("a".into(), drive(f0, eta, omega, -1.0)),
            ("a+".into(), drive(f0, eta, omega, 1.0)),
        ],
        zero_shift(),
    )?;
    let traj = integrate_propagator(&h, t_grid, rel_tol)?;
    Ok(traj
        .t
        .iter()
        .zip(&traj.u)
        .map(|(&t, u)| {
            let ea = u[(1, 1)];
            let ln_k = u[(0, 2)];
            H1Point {
                t,
                ln_k,
                k: ln_k.exp(),
                alpha: ea.ln(),
                beta: u[(1, 2)] / ea,
                gamma: u[(0, 1)],
            }
        })
        .collect())
}

/// k-fold product of the one-period kicked propagator.
pub fn kicked_product(omega0: f64, period: f64, chi: f64, k: u64) -> CMat {
    let step = period_matrix(omega0, period, chi);
    let mut u = CMat::identity(2, 2);
    for _ in 0..k {
        u = &step * u;
    }
    u
}

fn decompose(traj: &PropagatorTrajectory, group: Group) -> Result<GaussCoefficients> {
    let pts = traj
        .t
        .iter()
        .zip(&traj.u)
        .map(|(&t, u)| point_from_matrix(t, u, group))
        .collect::<Result<Vec<_>>>()?;
    Ok(GaussCoefficients::from_points(group, pts))
}
