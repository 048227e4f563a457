//! Minimal double-double arithmetic for series accumulation.
//!
//! Only the operations needed by the Bessel ascending series are provided.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn recip(self) -> Dd {
        Dd::from_f64(1.0) / self
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn from_c64(z: Complex64) -> Self {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_approx(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re * o.re + o.im * o.im;
        let inv = den.recip();
        let re = (self.re * o.re + self.im * o.im) * inv;
        let im = (self.im * o.re - self.re * o.im) * inv;
        CDd { re, im }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_lost_bits() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-20);
        let s = (a + b) - a;
        assert!((s.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn division_roundtrip() {
        let a = Dd::from_f64(1.0);
        let three = Dd::from_f64(3.0);
        let q = a / three;
        let back = q * three - a;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn complex_div() {
        let a = CDd::from_c64(Complex64::new(1.0, 2.0));
        let b = CDd::from_c64(Complex64::new(-3.0, 0.5));
        let q = a.div(b).to_c64();
        let r = Complex64::new(1.0, 2.0) / Complex64::new(-3.0, 0.5);
        assert!((q - r).norm() < 1e-15);
    }
}
