// reference values are printed to full oracle precision
#![allow(clippy::excessive_precision)]

use krylov_core::specfun::{bessel_i, bessel_j, complex_gamma, SeriesControl};
use krylov_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// 40-digit reference values (mpmath), frozen.
const GAMMA_REF: &[((f64, f64), (f64, f64))] = &[
    ((1.0, 1.0), (0.49801566811835604, -0.15494982830181069)),
    ((0.5, 0.0), (1.772453850905516, 0.0)),
    ((-0.5, 2.0), (-0.039038849162115519, -0.035167876062686938)),
    (
        (10.0, 30.0),
        (-8.5429315061699319e-7, -6.5860025841092004e-7),
    ),
    ((0.25, -3.0), (0.017050323934244119, 0.0015968774203813359)),
    (
        (-7.3, 0.2),
        (0.00022606131515147552, 0.00023065434516651965),
    ),
    ((3.7, 0.0), (4.170651783796604, 0.0)),
    ((20.0, 1.0), (-116845778530165360.0, 20133283732238091.0)),
    ((1e-3, 0.0), (999.42377248459545, 0.0)),
    (
        (-2.5, -40.0),
        (-1.1863751735012781e-32, -1.628276419790975e-32),
    ),
];

#[test]
fn gamma_matches_reference() {
    for &((zr, zi), (gr, gi)) in GAMMA_REF {
        let g = complex_gamma(c(zr, zi)).unwrap();
        let e = rel(g, c(gr, gi));
        assert!(e < 1e-10, "Gamma({zr}+{zi}i): rel err {e:e}");
    }
}

const J_TABLE: &[(u32, f64, f64)] = &[
    (0, 0.1, 0.997501562066040032),
    (0, 0.5, 0.93846980724081290423),
    (0, 1.0, 0.76519768655796655145),
    (0, 2.5, -0.048383776468197996327),
    (0, 5.0, -0.17759677131433830435),
    (0, 7.5, 0.26633965788037839687),
    (0, 10.0, -0.2459357644513483352),
    (0, 12.5, 0.14688405470042110231),
    (0, 15.0, -0.014224472826780773234),
    (0, 17.5, -0.10311039822868592217),
    (0, 20.0, 0.16702466434058315473),
    (1, 0.1, 0.049937526036242000321),
    (1, 0.5, 0.24226845767487388638),
    (1, 1.0, 0.44005058574493351596),
    (1, 2.5, 0.49709410246427403801),
    (1, 5.0, -0.32757913759146522204),
    (1, 7.5, 0.13524842757970550518),
    (1, 10.0, 0.04347274616886143667),
    (1, 12.5, -0.16548380461475971846),
    (1, 15.0, 0.20510403861352276115),
    (1, 17.5, -0.16341996942575490589),
    (1, 20.0, 0.066833124175850045579),
    (2, 0.1, 0.001248958658799918984),
    (2, 0.5, 0.030604023458682641307),
    (2, 1.0, 0.11490348493190048047),
    (2, 2.5, 0.44605905843961722674),
    (2, 5.0, 0.046565116277752215532),
    (2, 7.5, -0.23027341052579026215),
    (2, 10.0, 0.25463031368512062253),
    (2, 12.5, -0.17336146343878265726),
    (2, 15.0, 0.04157167797525047472),
    (2, 17.5, 0.084433830294313932929),
    (2, 20.0, -0.16034135192299815017),
];

#[test]
fn integer_order_j_table() {
    let ctl = SeriesControl::default();
    for &(n, z, v) in J_TABLE {
        let got = bessel_j(c(n as f64, 0.0), c(z, 0.0), ctl).unwrap();
        assert!(
            (got - c(v, 0.0)).norm() <= 1e-9,
            "J_{n}({z}) = {got} vs {v}"
        );
    }
}

// Complex-order values at damped-drive arguments (kappa up to ~28).
const J_COMPLEX: &[((f64, f64), (f64, f64), (f64, f64))] = &[
    (
        (0.5, -11.111111111111111),
        (27.777777777777779, 0.0),
        (1002878.6628887631, 2048975.5973714578),
    ),
    (
        (-0.5, 11.111111111111111),
        (27.777777777777779, 0.0),
        (3035011.1010438924, 1462239.1342664396),
    ),
    (
        (0.5, -11.111111111111111),
        (5.0, 0.0),
        (1983787.2129272067, 337109.43555765705),
    ),
    (
        (0.5, 10.0),
        (28.5, 0.0),
        (404798.09352257431, 25510.791249183219),
    ),
    (
        (2.5, 10.0),
        (10.5, 0.0),
        (-1484.2061954770172, 83072.192364580566),
    ),
    (
        (5.0, 10.0),
        (3.0, 0.0),
        (-42.79628127167405, 13.051561571106639),
    ),
    (
        (0.3, 0.7),
        (1.5, -2.0),
        (4.9623980845760299, 2.9358017510964621),
    ),
];

const I_COMPLEX: &[((f64, f64), (f64, f64), (f64, f64))] = &[
    (
        (0.5, 0.5),
        (10.5, 0.0),
        (4525.9604923580015, -113.54948378129352),
    ),
    (
        (-0.5, -0.5),
        (10.5, 0.0),
        (4525.960509174281, -113.54948339819208),
    ),
    (
        (0.5, -10.0),
        (3.2, 0.0),
        (-270647.65939320506, -218470.29005783763),
    ),
    (
        (0.3, 0.7),
        (1.5, -2.0),
        (0.6014855143037394, -1.3267346132005855),
    ),
    (
        (1.5, 2.0),
        (25.0, 0.0),
        (5939134455.1026757, -731655485.1142009),
    ),
];

#[test]
fn complex_order_j_reference() {
    let ctl = SeriesControl::default();
    for &((mr, mi), (zr, zi), (vr, vi)) in J_COMPLEX {
        let got = bessel_j(c(mr, mi), c(zr, zi), ctl).unwrap();
        let e = rel(got, c(vr, vi));
        assert!(e < 1e-10, "J_({mr}{mi:+}i)({zr}{zi:+}i): rel err {e:e}");
    }
}

#[test]
fn complex_order_i_reference() {
    let ctl = SeriesControl::default();
    for &((mr, mi), (zr, zi), (vr, vi)) in I_COMPLEX {
        let got = bessel_i(c(mr, mi), c(zr, zi), ctl).unwrap();
        let e = rel(got, c(vr, vi));
        assert!(e < 1e-10, "I_({mr}{mi:+}i)({zr}{zi:+}i): rel err {e:e}");
    }
}

fn order() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| c(a, b))
}

fn argument() -> impl Strategy<Value = Complex64> {
    (0.5f64..10.0, -3.0f64..3.0).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn j_three_term_recurrence(mu in order(), z in argument()) {
        let ctl = SeriesControl::default();
        let jm = bessel_j(mu - 1.0, z, ctl).unwrap();
        let j0 = bessel_j(mu, z, ctl).unwrap();
        let jp = bessel_j(mu + 1.0, z, ctl).unwrap();
        let rhs = 2.0 * mu / z * j0;
        let scale = jm.norm().max(jp.norm()).max(rhs.norm());
        prop_assert!((jm + jp - rhs).norm() <= 1e-8 * scale);
    }

    #[test]
    fn i_three_term_recurrence(mu in order(), z in argument()) {
        let ctl = SeriesControl::default();
        let im = bessel_i(mu - 1.0, z, ctl).unwrap();
        let i0 = bessel_i(mu, z, ctl).unwrap();
        let ip = bessel_i(mu + 1.0, z, ctl).unwrap();
        let rhs = 2.0 * mu / z * i0;
        let scale = im.norm().max(ip.norm()).max(rhs.norm());
        prop_assert!((im - ip - rhs).norm() <= 1e-8 * scale);
    }

    #[test]
    fn i_equals_rotated_j(mu in order(), r in 0.5f64..10.0, th in -3.0f64..1.5) {
        let ctl = SeriesControl::default();
        let z = Complex64::from_polar(r, th);
        let lhs = bessel_i(mu, z, ctl).unwrap();
        let rhs = (-Complex64::i() * mu * PI / 2.0).exp()
            * bessel_j(mu, Complex64::i() * z, ctl).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(rhs.norm()));
    }

    #[test]
    fn gamma_recurrence(zr in -20.0f64..20.0, zi in 0.1f64..20.0) {
        let z = c(zr, zi);
        let g = complex_gamma(z).unwrap();
        let g1 = complex_gamma(z + 1.0).unwrap();
        prop_assert!((g1 - z * g).norm() <= 1e-10 * g1.norm());
    }
}
