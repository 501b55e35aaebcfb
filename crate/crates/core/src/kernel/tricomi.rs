//! Tricomi confluent hypergeometric function `U(a, b, z)` for the
//! integer-gap family `b − a − 1 ∈ {0, 1, 2, …}`.
//!
//! Under the integral definition
//! `U(a, b, z) = (1/Γ(a)) ∫₀^∞ e^{−zt} t^{a−1} (1 + t)^{b−a−1} dt`,
//! a nonnegative integer exponent `g = b − a − 1` makes `(1+t)^g` a
//! polynomial, so the integral collapses to the finite sum
//! `U = z^{−a} Σ_{i=0}^{g} C(g, i) (a)_i z^{−i}`
//! with rising factorials `(a)_i`. Every term is positive: no cancellation,
//! exact up to rounding.

use super::ln_gamma;
use crate::error::{Error, Result};

/// Extract the gap `g = b − a − 1`, requiring it to be a nonnegative integer.
fn integer_gap(a: f64, b: f64) -> Result<u64> {
    let gap = b - a - 1.0;
    let rounded = gap.round();
    if rounded < 0.0 || (gap - rounded).abs() > 1e-9 {
        return Err(Error::Unsupported(format!(
            "U(a, b, z) implemented only for b − a − 1 a nonnegative integer; got {gap}"
        )));
    }
    Ok(rounded as u64)
}

/// `U(a, b, z)` for `a > 0`, `z > 0`, `b − a − 1` a nonnegative integer.
pub fn tricomi_u_integer_gap(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("U(a, b, z) requires a > 0, got {a}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("U(a, b, z) requires z > 0, got {z}")));
    }
    let gap = integer_gap(a, b)?;
    // term_i = C(g, i) (a)_i z^{−i}, accumulated by ratio
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for i in 1..=gap {
        term *= (gap - i + 1) as f64 / i as f64 * (a + i as f64 - 1.0) / z;
        sum += term;
    }
    Ok(z.powf(-a) * sum)
}

/// Log of `Γ(a) z^a e^z · U(a, b, z) · e^{−z}` rearranged for moment work:
/// returns `ln Σ_{i=0}^{g} C(g, i) (a)_i z^{g−i}` — the polynomial part of
/// `z^{a+g} Γ(a) U(a, b, z)` — which stays finite as `z → 0` (only the
/// `i = g` term survives there). Computed by log-sum-exp over the positive
/// terms so large gaps cannot overflow.
pub fn ln_tricomi_moment_sum(a: f64, b: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("requires a > 0, got {a}")));
    }
    if z < 0.0 {
        return Err(Error::Domain(format!("requires z ≥ 0, got {z}")));
    }
    let gap = integer_gap(a, b)?;
    if z == 0.0 {
        // only C(g, g) (a)_g survives
        return Ok(ln_gamma(a + gap as f64)? - ln_gamma(a)?);
    }
    let ln_z = z.ln();
    let mut ln_terms = Vec::with_capacity(gap as usize + 1);
    let mut ln_term = gap as f64 * ln_z; // i = 0 term
    ln_terms.push(ln_term);
    for i in 1..=gap {
        ln_term += (((gap - i + 1) as f64 / i as f64) * (a + i as f64 - 1.0)).ln() - ln_z;
        ln_terms.push(ln_term);
    }
    let max = ln_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_terms.iter().map(|l| (l - max).exp()).sum();
    Ok(max + sum.ln())
}
