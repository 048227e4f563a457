//! Locale-free number formatting and CSV assembly.

use krylov_core::models::ComplexityTrace;
use std::fmt::Write;

/// C-style `%.17g`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `t,C[,dev][,p0..pN]`, one row per grid point.
pub fn trace_csv(tr: &ComplexityTrace) -> String {
    let mut out = String::from("t,C");
    if tr.deviation.is_some() {
        out.push_str(",dev");
    }
    let width =
        tr.p.as_ref()
            .and_then(|p| p.first().map(|r| r.len()))
            .unwrap_or(0);
    for n in 0..width {
        let _ = write!(out, ",p{n}");
    }
    out.push('\n');
    for i in 0..tr.t.len() {
        out.push_str(&g17(tr.t[i]));
        out.push(',');
        out.push_str(&g17(tr.c[i]));
        if let Some(d) = &tr.deviation {
            out.push(',');
            out.push_str(&g17(d[i]));
        }
        if let Some(p) = &tr.p {
            for v in &p[i] {
                out.push(',');
                out.push_str(&g17(*v));
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf() {
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(-2.5), "-2.5");
        assert_eq!(g17(10.0), "10");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(123456789012345678.0), "1.2345678901234568e+17");
        assert_eq!(g17(0.0001), "0.0001");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(f64::NAN), "nan");
    }
}
