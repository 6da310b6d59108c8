#![allow(dead_code)]

use ncusp::geometry::{validate_params, DomainParams, RawParams, Usage};

pub fn planar() -> DomainParams {
    validate_params(&RawParams::new(2, 1.5, 3.0, 2.0), Usage::Steklov).unwrap()
}

pub fn spatial() -> DomainParams {
    validate_params(&RawParams::new(3, 2.0, 4.0, 3.0), Usage::Steklov).unwrap()
}

pub fn simplex2(p: f64, q: f64) -> DomainParams {
    validate_params(&RawParams::simplex(2, p, q), Usage::Geometry).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Adaptive Simpson on `(0, 1]` split dyadically toward 0, so integrable
/// tip singularities are handled without evaluating at 0.
pub fn adaptive_tip(f: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        let lo = 0.5 * hi;
        let piece = adaptive(f, lo, hi, tol * hi);
        total += piece;
        if piece.abs() < 1e-18 * total.abs().max(1e-300) {
            break;
        }
        hi = lo;
    }
    total
}
