//! Suprema of univariate polynomials over the closed half-line `[0, inf)`.

use crate::error::{Error, Result};

/// `sup_{u >= 0} -a u^2 + b u + c` for `a > 0`, with its maximizer.
pub fn sup_quadratic(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::domain(
            "sup_quadratic",
            format!("leading coefficient must be positive, got {a}"),
        ));
    }
    if b <= 0.0 {
        Ok((c, 0.0))
    } else {
        Ok((c + b * b / (4.0 * a), b / (2.0 * a)))
    }
}

/// `sup_{u >= 0} -a u^3 + b u^2 + c u + d` for `a > 0`, with its maximizer.
///
/// The only candidate interior maximum is the larger root of
/// `-3a u^2 + 2b u + c`.
pub fn sup_cubic(a: f64, b: f64, c: f64, d: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::domain(
            "sup_cubic",
            format!("leading coefficient must be positive, got {a}"),
        ));
    }
    let f = |u: f64| ((-a * u + b) * u + c) * u + d;
    let disc = b * b + 3.0 * a * c;
    let mut best = (d, 0.0);
    if disc >= 0.0 {
        let u = (b + disc.sqrt()) / (3.0 * a);
        if u > 0.0 && f(u) > best.0 {
            best = (f(u), u);
        }
    }
    Ok(best)
}

/// Evaluate a polynomial with coefficients in ascending order.
pub fn poly_eval(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn trim(coeffs: &[f64]) -> &[f64] {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1] == 0.0 {
        n -= 1;
    }
    &coeffs[..n]
}

/// Bisect a sign change of `coeffs` on `[lo, hi]` to machine precision.
fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = poly_eval(coeffs, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = poly_eval(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots in the open interval `(lo, hi)`, ascending. Stationary points
/// of the polynomial split the interval into monotone pieces, each holding at
/// most one root.
pub fn real_roots(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trim(coeffs);
    match c.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -c[0] / c[1];
            return if r > lo && r < hi {
                vec![r]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }
    let mut knots = vec![lo];
    knots.extend(real_roots(&derivative(c), lo, hi));
    knots.push(hi);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (poly_eval(c, a), poly_eval(c, b));
        if fb == 0.0 && b < hi {
            roots.push(b);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(bisect(c, a, b));
        }
    }
    roots.dedup();
    roots
}

/// `sup_{u >= 0}` of a polynomial with negative leading coefficient, with its maximizer.
pub fn sup_polynomial(coeffs: &[f64]) -> Result<(f64, f64)> {
    let c = trim(coeffs);
    let Some(&lead) = c.last() else {
        return Ok((0.0, 0.0));
    };
    if c.len() > 1 && !(lead < 0.0) {
        return Err(Error::domain(
            "sup_polynomial",
            format!("leading coefficient must be negative, got {lead}"),
        ));
    }
    // Cauchy bound on the roots of the derivative.
    let d = derivative(c);
    let dl = *d.last().unwrap_or(&1.0);
    let bound = 1.0 + d.iter().map(|x| (x / dl).abs()).fold(0.0, f64::max);
    let mut best = (c[0], 0.0);
    for u in real_roots(&d, 0.0, bound) {
        let v = poly_eval(c, u);
        if v > best.0 {
            best = (v, u);
        }
    }
    Ok(best)
}
