use krylov_core::algebra::build_su2;
use krylov_core::lanczos::{default_breakdown_tol, tridiagonalize};
use krylov_core::linalg::CVec;
use krylov_core::models::*;
use krylov_core::Complex64;

fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
        .collect()
}

fn spec(f: Family, p: &[(&str, f64)]) -> ModelSpec {
    ModelSpec::new(f, p).unwrap()
}

fn both() -> RunOptions {
    RunOptions {
        method: Method::Both,
        ..RunOptions::default()
    }
}

#[test]
fn closed_and_numeric_routes_agree_on_figure_parameters() {
    use Family::*;
    let cases: Vec<(Family, Vec<(&str, f64)>, f64)> = vec![
        (
            Su2Driven,
            vec![("j", 5.0), ("omega0", 4.0), ("omega", 2.0), ("b0", 2.1)],
            20.0,
        ),
        (
            Su2Driven,
            vec![("j", 5.0), ("omega0", 4.0), ("omega", 4.0), ("b0", 2.1)],
            20.0,
        ),
        (
            Su2Damped,
            vec![
                ("j", 5.0),
                ("omega0", 4.0),
                ("omega", 2.0),
                ("b0", 5.0),
                ("eta", 0.09),
            ],
            60.0,
        ),
        (
            Su2Damped,
            vec![
                ("j", 5.0),
                ("omega0", 4.0),
                ("omega", 4.0),
                ("b0", 2.1),
                ("eta", -0.1),
            ],
            10.0,
        ),
        (
            H1Driven,
            vec![("omega0", 4.0), ("omega", 2.0), ("f0", 3.0), ("eta", 0.1)],
            20.0,
        ),
        (
            H1Driven,
            vec![("omega0", 2.0), ("omega", 2.0), ("f0", 3.0), ("eta", -0.1)],
            20.0,
        ),
        (
            Su11TwoMode,
            vec![("omega0", 4.0), ("delta", 2.0), ("g", 1.0)],
            20.0,
        ),
        (
            Su11TwoMode,
            vec![("omega0", 4.0), ("delta", 0.5), ("g", 0.5)],
            20.0,
        ),
        (
            Su11TwoMode,
            vec![("omega0", 4.0), ("delta", 2.0), ("g", 2.1), ("eta", 0.1)],
            20.0,
        ),
        (
            Su11TwoMode,
            vec![("omega0", 4.0), ("omega", 4.0), ("g", 2.1), ("eta", -0.1)],
            6.0,
        ),
        (
            Quench,
            vec![("omega0", 1.0), ("eta0", 0.5), ("tau", 7.5)],
            15.0,
        ),
        (
            Su3VConfig,
            vec![("omega", 2.0), ("g1", 3.0), ("g2", 4.0)],
            20.0,
        ),
    ];
    for (f, p, t1) in cases {
        let s = spec(f, &p);
        let tr = run_model(&s, &grid(0.0, t1, 301), &both()).unwrap();
        assert!(
            tr.max_route_deviation < 1e-6,
            "{f} {p:?}: {}",
            tr.max_route_deviation
        );
        let v = tr.violations(&s, 1e-6);
        assert!(v.is_empty(), "{f}: {v:?}");
    }
}

#[test]
fn su2_probabilities_are_binomial() {
    let s = spec(
        Family::Su2Driven,
        &[("j", 5.0), ("omega0", 4.0), ("omega", 2.0), ("b0", 2.1)],
    );
    let g = grid(0.0, 5.0, 41);
    let opts = RunOptions {
        probabilities: true,
        ..RunOptions::default()
    };
    let tr = run_model(&s, &g, &opts).unwrap();
    let p = tr.p.unwrap();
    for (row, &t) in p.iter().zip(&g) {
        assert_eq!(row.len(), 11);
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let x = closed_point(&s, t).unwrap().pair.abs_lambda().powi(2);
        for (n, &pn) in row.iter().enumerate() {
            let choose = (0..n).fold(1.0, |acc, k| acc * (10 - k) as f64 / (k + 1) as f64);
            let expect = choose * x.powi(n as i32) / (1.0 + x).powi(10);
            assert!((pn - expect).abs() < 1e-12, "t {t} n {n}");
        }
    }
}

#[test]
fn resonance_reaches_the_bound() {
    let s = spec(
        Family::Su2Driven,
        &[("j", 1.5), ("omega0", 3.0), ("omega", 3.0), ("b0", 0.7)],
    );
    let t = std::f64::consts::PI / 0.7;
    assert!((closed_complexity_at(&s, t).unwrap() - 3.0).abs() < 1e-8);
}

#[test]
fn quench_freezes_after_tau() {
    let s = spec(
        Family::Quench,
        &[("omega0", 1.0), ("eta0", 0.5), ("tau", 7.5)],
    );
    let g = grid(0.0, 20.0, 401);
    let tr = run_model(
        &s,
        &g,
        &RunOptions {
            method: Method::Numeric,
            ..RunOptions::default()
        },
    )
    .unwrap();
    let c_tau = closed_complexity_at(&s, 7.5).unwrap();
    for (&t, &c) in g.iter().zip(&tr.c) {
        if t > 7.5 {
            assert!((c - c_tau).abs() < 1e-10, "t {t}: {c} vs {c_tau}");
        }
    }
    // pre-quench: eta0^2 / (2 w1^2) sin^2(w1 t)
    let w1 = (1.0f64 + 2.0 * 0.5).sqrt();
    for (&t, &c) in g.iter().zip(&tr.c) {
        if t <= 7.5 {
            assert!((c - 0.25 / (2.0 * w1 * w1) * (w1 * t).sin().powi(2)).abs() < 1e-10);
        }
    }
}

#[test]
fn damped_photon_saturates() {
    let (f0, eta, delta) = (3.0, 0.1, 2.0);
    let s = spec(
        Family::H1Driven,
        &[
            ("omega0", 4.0),
            ("omega", 4.0 - delta),
            ("f0", f0),
            ("eta", eta),
        ],
    );
    let c = closed_complexity_at(&s, 50.0 / eta).unwrap();
    assert!((c - f0 * f0 / (eta * eta + delta * delta)).abs() < 1e-6);
}

#[test]
fn photon_resonance_is_quadratic() {
    let s = spec(
        Family::H1Driven,
        &[("omega0", 4.0), ("omega", 4.0), ("f0", 3.0)],
    );
    let g = grid(0.1, 10.0, 100);
    let tr = run_model(&s, &g, &both()).unwrap();
    for (&t, &c) in g.iter().zip(&tr.c) {
        assert!((c / (9.0 * t * t) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn weak_damping_is_continuous() {
    let base = [("j", 2.0), ("omega0", 4.0), ("omega", 3.0), ("b0", 1e-4)];
    let und = spec(Family::Su2Driven, &base);
    let mut p = base.to_vec();
    p.push(("eta", 1e-5));
    let dmp = spec(Family::Su2Damped, &p);
    for t in [0.5, 2.0, 7.0] {
        let (a, b) = (
            closed_complexity_at(&und, t).unwrap(),
            closed_complexity_at(&dmp, t).unwrap(),
        );
        assert!(
            (a - b).abs() <= 1e-4 * a.max(1e-300) + 1e-14,
            "t {t}: {a} vs {b}"
        );
    }
}

#[test]
fn su2_lanczos_coefficients() {
    let (alpha, gamma) = (0.7, 1.3);
    for j in [0.5, 1.0, 2.5, 4.0] {
        let gen = build_su2(j).unwrap();
        let (jp, jm, j0) = (
            gen.get("J+").unwrap(),
            gen.get("J-").unwrap(),
            gen.get("J0").unwrap(),
        );
        let c = |x: f64| Complex64::new(x, 0.0);
        let h = (jp + jm) * c(alpha) + j0 * c(gamma);
        let d = h.nrows();
        let mut seed = CVec::zeros(d);
        seed[0] = c(1.0);
        let tri = tridiagonalize(&h, &seed, default_breakdown_tol(&h)).unwrap();
        assert_eq!(tri.a.len(), d);
        for (n, &a) in tri.a.iter().enumerate() {
            assert!((a - gamma * (n as f64 - j)).abs() < 1e-12);
        }
        for (k, &b) in tri.b.iter().enumerate() {
            let n = (k + 1) as f64;
            assert!((b - alpha * (n * (2.0 * j - n + 1.0)).sqrt()).abs() < 1e-12);
        }
    }
}

#[test]
fn kicked_routes_agree() {
    let s = spec(
        Family::Su2Kicked,
        &[("j", 3.0), ("omega0", 1.1), ("T", 0.9), ("chi", 0.4)],
    );
    let g: Vec<f64> = (0..=200).map(|k| k as f64).collect();
    let tr = run_model(&s, &g, &both()).unwrap();
    assert!(tr.max_route_deviation < 1e-9);
    assert!(run_model(&s, &[0.0, 0.5], &RunOptions::default()).is_err());
}

#[test]
fn invalid_grids_are_rejected() {
    let s = spec(
        Family::Su2Driven,
        &[("j", 1.0), ("omega0", 1.0), ("omega", 1.0), ("b0", 1.0)],
    );
    let o = RunOptions::default();
    assert!(run_model(&s, &[1.0, 0.5], &o).is_err());
    assert!(run_model(&s, &[-1.0, 0.5], &o).is_err());
    assert!(run_model(&s, &[], &o).is_err());
    assert!(run_model(
        &s,
        &[0.0, 1.0],
        &RunOptions {
            cost_exponent: 3,
            ..o
        }
    )
    .is_err());
}

#[test]
fn runaway_two_mode_reports_growth_rate() {
    let s = spec(
        Family::Su11TwoMode,
        &[("omega0", 4.0), ("delta", 2.0), ("g", 2.1)],
    );
    let err = run_model(&s, &grid(0.0, 100.0, 101), &RunOptions::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("growth rate"), "{msg}");
}

#[test]
fn one_cell_sweep_matches_run() {
    let base = spec(
        Family::Su11TwoMode,
        &[("omega0", 4.0), ("delta", 2.0), ("g", 1.0)],
    );
    let g = grid(0.0, 20.0, 201);
    let x = SweepAxis {
        param: "g".into(),
        values: vec![1.0],
    };
    let y = SweepAxis {
        param: "delta".into(),
        values: vec![2.0],
    };
    let res = sweep(&base, &x, &y, &g, &RunOptions::default(), Summary::CMax).unwrap();
    let tr = run_model(&base, &g, &RunOptions::default()).unwrap();
    let cmax = tr.c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(res.cells.len(), 1);
    assert_eq!(res.cells[0].value, Some(cmax));
    assert_eq!(res.cells[0].regime, Some(Regime::Oscillatory));
}

#[test]
fn failing_cell_is_flagged_and_sweep_continues() {
    let base = spec(
        Family::Su11TwoMode,
        &[("omega0", 4.0), ("delta", 2.0), ("g", 1.0)],
    )
    .with_truncation(16)
    .unwrap();
    let g = grid(0.0, 20.0, 101);
    let x = SweepAxis {
        param: "g".into(),
        values: vec![0.5, 3.0],
    };
    let y = SweepAxis {
        param: "delta".into(),
        values: vec![2.0],
    };
    let opts = RunOptions {
        method: Method::Numeric,
        probabilities: true,
        ..RunOptions::default()
    };
    let res = sweep(&base, &x, &y, &g, &opts, Summary::CSaturation).unwrap();
    assert_eq!(res.failures(), 1);
    assert!(res.cells[0].value.is_some());
    assert!(res.cells[1].error.is_some());
    assert_eq!(res.cells[1].regime, Some(Regime::Exponential));
}

#[test]
fn regime_map_marks_the_transition_line() {
    let v: Vec<f64> = (0..61).map(|i| 3.0 * i as f64 / 60.0).collect();
    let m = regime_map(&v, &v).unwrap();
    for (i, &g) in v.iter().enumerate() {
        for (j, &d) in v.iter().enumerate() {
            assert_eq!(
                m.at(i, j) == Regime::Quadratic,
                (g - d).abs() <= 1e-12 * g.max(d)
            );
        }
    }
}
