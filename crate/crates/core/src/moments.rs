//! Exact and high-accuracy basis moments, moment ratios and operator moments.
//!
//! For `k ≥ 1` the basis moment `⟨L_{n,k}, t^r⟩ = ∫₀^∞ L_{n,k}(t) t^r dt` has
//! four computable faces:
//!
//! * a finite Stirling/θ sum,
//!   `e^{−kβ}/(k n^{r+1}) Σ_m c(r+1, m+1) θ_m(kβ)` with
//!   `θ_m(x) = Σ_{s=0}^{k−1} (k−s)^{m+1} x^s/s!` — exact in rational
//!   arithmetic up to the common factor `e^{−kβ}`;
//! * adaptive quadrature of the defining integral;
//! * a Tricomi-U closed form,
//!   `(kβ)^{k+r+1} e^{−kβ} (r+1)!/(k! n^{r+1}) · U(r+2, k+r+2, kβ)`;
//! * a three-term recurrence in `r` induced by the contiguous relation of U.
//!
//! The ratio `P_r(k; β) = ⟨L_k, t^r⟩ / ⟨L_k, 1⟩` drops the transcendental
//! factor, so it is an exact rational whenever `β` is. Operator moments
//! `T_{n,r}(x) = Σ_k P_r(k; β) L_{n,k}(x)` and central moments are truncated
//! series over these exact ratios — the ground truth that the published
//! closed forms in [`crate::forms`] are measured against.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::basis::{basis_value, truncation_index, OperatorParams, TruncationPolicy};
use crate::error::{Error, Result};
use crate::kernel::{
    factorial, ln_gamma, ln_tricomi_moment_sum, rational_to_f64, ExactRational, Scalar,
    StirlingTable,
};
use crate::sum::CompensatedSum;

/// Selector among the independent moment routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMethod {
    /// Finite Stirling/θ sum (exact in rational mode).
    StirlingSum,
    /// Three-term recurrence in `r`, seeded from the Stirling route.
    Recurrence,
    /// Adaptive quadrature of the defining integral.
    Quadrature,
}

impl std::fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MomentMethod::StirlingSum => "stirling-sum",
            MomentMethod::Recurrence => "recurrence",
            MomentMethod::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MomentMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stirling-sum" | "stirling_sum" => Ok(MomentMethod::StirlingSum),
            "recurrence" => Ok(MomentMethod::Recurrence),
            "quadrature" => Ok(MomentMethod::Quadrature),
            other => Err(Error::Domain(format!(
                "unknown moment method {other:?} (expected stirling-sum, recurrence or quadrature)"
            ))),
        }
    }
}

/// A scalar with dual representation: f64 value, optional exact rational, and
/// an absolute error bound on the float.
#[derive(Debug, Clone)]
pub struct MomentValue {
    pub value: f64,
    pub exact: Option<ExactRational>,
    pub error_bound: f64,
}

impl MomentValue {
    /// Wrap an exact rational; the float is the nearest f64.
    pub fn from_exact(exact: ExactRational) -> Self {
        let value = rational_to_f64(&exact);
        MomentValue {
            value,
            exact: Some(exact),
            error_bound: value.abs() * f64::EPSILON,
        }
    }

    pub fn from_float(value: f64, error_bound: f64) -> Self {
        MomentValue { value, exact: None, error_bound }
    }
}

/// `θ_m(x) = Σ_{s=0}^{k−1} (k−s)^{m+1} x^s / s!`, exact for rational `x`.
pub fn theta<T: Scalar>(k: u64, x: &T, m: u32) -> Result<T> {
    if k == 0 {
        return Err(Error::Domain("θ_m is an empty sum at k = 0".into()));
    }
    if *x < T::zero() {
        return Err(Error::Domain("θ_m requires x ≥ 0".into()));
    }
    let mut total = T::zero();
    let mut weight = T::one(); // x^s / s!
    for s in 0..k {
        let base = BigInt::from(k - s);
        let term = T::from_big(&base.pow(m + 1)) * weight.clone();
        total = total + term;
        weight = weight * x.clone() / T::from_u64(s + 1);
    }
    Ok(total)
}

/// `S_r(x) = θ_r(x) / θ_0(x)`; `S_0 = 1` identically.
pub fn s_ratio_exact<T: Scalar>(k: u64, x: &T, r: u32) -> Result<T> {
    if r == 0 {
        // still validates k and x
        let _ = theta(k, x, 0)?;
        return Ok(T::one());
    }
    Ok(theta(k, x, r)? / theta(k, x, 0)?)
}

/// Scaled θ ratios for the floating route: returns `S_0 … S_{r_max}` with the
/// weights `x^s/s!` anchored at their mode so that `x = βk` in the hundreds
/// cannot overflow. Ratios are unaffected by the common scale.
fn s_ratios_f64(k: u64, x: f64, r_max: u32) -> Vec<f64> {
    debug_assert!(k >= 1);
    let orders = r_max as usize + 1;
    if x == 0.0 {
        // single s = 0 term: θ_m = k^{m+1}
        return (0..orders).map(|m| (k as f64).powi(m as i32)).collect();
    }
    let mut sums = vec![0.0f64; orders];
    let mode = (x.floor() as u64).min(k - 1);
    // walk down from the mode, then up, with weights relative to the mode
    for down in [true, false] {
        let mut s = if down { mode } else { mode + 1 };
        let mut w = if down {
            1.0
        } else {
            if mode + 1 >= k {
                continue;
            }
            x / (mode + 1) as f64
        };
        loop {
            let base = (k - s) as f64;
            let mut p = 1.0;
            for sum in sums.iter_mut() {
                p *= base; // p = (k−s)^{m+1} at order m
                *sum += p * w;
            }
            if down {
                if s == 0 || w < 1e-30 {
                    break;
                }
                w *= s as f64 / x;
                s -= 1;
            } else {
                if s + 1 >= k || w < 1e-30 {
                    break;
                }
                s += 1;
                w *= x / s as f64;
            }
        }
    }
    let theta0 = sums[0];
    sums.iter().map(|t| t / theta0).collect()
}

/// Row `j = 0..=r+1` of unsigned Stirling numbers `c(r+1, j)` as f64.
fn stirling_row_f64(r: u32) -> Vec<f64> {
    let table = StirlingTable::new(r + 1);
    (0..=r + 1)
        .map(|j| table.unsigned(r + 1, j).expect("in range").to_f64().unwrap_or(f64::NAN))
        .collect()
}

fn n_pow(n: u32, r: u32) -> BigInt {
    BigInt::from(n).pow(r)
}

/// Exact `P_r(k; β)` assembly over a Stirling row and exact θ ratios.
fn p_exact_rational(n: u32, beta: &ExactRational, k: u64, r: u32) -> Result<ExactRational> {
    if k == 0 {
        return Ok(ExactRational::new(factorial(r as u64), n_pow(n, r)));
    }
    let x = beta.clone() * ExactRational::from_u64(k);
    let table = StirlingTable::new(r + 1);
    let theta0 = theta(k, &x, 0)?;
    let mut acc = ExactRational::zero();
    for j in 1..=r + 1 {
        let c = ExactRational::from_big(table.unsigned(r + 1, j)?);
        acc += c * theta(k, &x, j - 1)?;
    }
    Ok(acc / theta0 / ExactRational::from_big(&n_pow(n, r)))
}

/// Float `P_r(k; β)` given a precomputed Stirling row (see [`stirling_row_f64`]).
fn p_float_with_row(n: u32, beta: f64, k: u64, r: u32, row: &[f64]) -> f64 {
    if k == 0 {
        return factorial(r as u64).to_f64().unwrap() / (n as f64).powi(r as i32);
    }
    let ratios = s_ratios_f64(k, beta * k as f64, r);
    let mut acc = 0.0;
    for (j, c) in row.iter().enumerate().skip(1) {
        acc += c * ratios[j - 1];
    }
    acc / (n as f64).powi(r as i32)
}

/// The exact moment ratio `P_r(k; β) = ⟨L_k, t^r⟩ / ⟨L_k, 1⟩`.
///
/// The common factor `e^{−kβ}` cancels in the ratio, so the result is an
/// exact rational whenever `β` is one (and always at `k = 0`, where the
/// ratio is `r!/n^r` from the Gamma integral).
pub fn p_exact(params: &OperatorParams, k: u64, r: u32) -> Result<MomentValue> {
    if k == 0 {
        return Ok(MomentValue::from_exact(ExactRational::new(
            factorial(r as u64),
            n_pow(params.n(), r),
        )));
    }
    if let Some(beta) = params.beta_exact() {
        let exact = p_exact_rational(params.n(), beta, k, r)?;
        return Ok(MomentValue::from_exact(exact));
    }
    let row = stirling_row_f64(r);
    let value = p_float_with_row(params.n(), params.beta(), k, r, &row);
    // positive-term assembly: rounding scales with the term count
    let bound = value.abs() * f64::EPSILON * ((k as f64).min(1e4) + r as f64 + 4.0);
    Ok(MomentValue::from_float(value, bound))
}

/// `P_0 … P_{r_max}` by the three-term recurrence
/// `n² P_{r+2} = n[(1−β)k + r + 2] P_{r+1} + (r+2) βk P_r`,
/// seeded with `P_0 = 1` and `P_1` from [`p_exact`]. In rational mode every
/// value is exact and matches [`p_exact`] identically; `k = 0` returns the
/// closed `r!/n^r` family directly.
pub fn p_recurrence(params: &OperatorParams, k: u64, r_max: u32) -> Result<Vec<MomentValue>> {
    if k == 0 {
        return (0..=r_max).map(|r| p_exact(params, 0, r)).collect();
    }
    if let Some(beta) = params.beta_exact() {
        let n = ExactRational::from_u64(params.n() as u64);
        let kq = ExactRational::from_u64(k);
        let one_minus = ExactRational::one() - beta.clone();
        let mut values = vec![ExactRational::one()];
        if r_max >= 1 {
            values.push(p_exact_rational(params.n(), beta, k, 1)?);
        }
        for r in 2..=r_max as u64 {
            let rq = ExactRational::from_u64(r);
            let prev = values[(r - 1) as usize].clone();
            let prev2 = values[(r - 2) as usize].clone();
            let next = (n.clone() * (one_minus.clone() * kq.clone() + rq.clone()) * prev
                + rq * beta.clone() * kq.clone() * prev2)
                / (n.clone() * n.clone());
            values.push(next);
        }
        return Ok(values.into_iter().map(MomentValue::from_exact).collect());
    }
    let n = params.n() as f64;
    let beta = params.beta();
    let mut values = vec![1.0f64];
    if r_max >= 1 {
        values.push(p_exact(params, k, 1)?.value);
    }
    for r in 2..=r_max as u64 {
        let next = (n * ((1.0 - beta) * k as f64 + r as f64) * values[(r - 1) as usize]
            + r as f64 * beta * k as f64 * values[(r - 2) as usize])
            / (n * n);
        values.push(next);
    }
    Ok(values
        .into_iter()
        .map(|v| MomentValue::from_float(v, v.abs() * f64::EPSILON * (k as f64).min(1e4)))
        .collect())
}

/// Stirling-route raw-moment mantissa `⟨L_k, t^r⟩ · e^{kβ}`, exact for
/// rational β.
fn raw_moment_mantissa_rational(
    n: u32,
    beta: &ExactRational,
    k: u64,
    r: u32,
) -> Result<ExactRational> {
    let x = beta.clone() * ExactRational::from_u64(k);
    let table = StirlingTable::new(r + 1);
    let mut acc = ExactRational::zero();
    for j in 1..=r + 1 {
        let c = ExactRational::from_big(table.unsigned(r + 1, j)?);
        acc += c * theta(k, &x, j - 1)?;
    }
    let denom = ExactRational::from_big(&(BigInt::from(k) * n_pow(n, r + 1)));
    Ok(acc / denom)
}

/// Float Stirling-route raw moment via mode-anchored absolute weights
/// `w_s = e^{−x} x^s/s!` (each a Poisson mass ≤ 1, so no overflow).
fn raw_moment_stirling_f64(n: u32, beta: f64, k: u64, r: u32) -> Result<f64> {
    let x = beta * k as f64;
    let row = stirling_row_f64(r);
    if x == 0.0 {
        // single s = 0 term of each θ: θ̃_m = k^{m+1}
        let mut acc = 0.0;
        for (j, c) in row.iter().enumerate().skip(1) {
            acc += c * (k as f64).powi(j as i32);
        }
        return Ok(acc / (k as f64 * (n as f64).powi(r as i32 + 1)));
    }
    let orders = r as usize + 1;
    let mut sums = vec![0.0f64; orders];
    let mode = (x.floor() as u64).min(k - 1);
    let anchor = (mode as f64 * x.ln() - x - ln_gamma(mode as f64 + 1.0)?).exp();
    for down in [true, false] {
        let mut s = if down { mode } else { mode + 1 };
        let mut w = if down {
            anchor
        } else {
            if mode + 1 >= k {
                continue;
            }
            anchor * x / (mode + 1) as f64
        };
        loop {
            let base = (k - s) as f64;
            let mut p = 1.0;
            for sum in sums.iter_mut() {
                p *= base; // p = (k−s)^{m+1} at order m
                *sum += p * w;
            }
            if down {
                if s == 0 || w < anchor * 1e-30 {
                    break;
                }
                w *= s as f64 / x;
                s -= 1;
            } else {
                if s + 1 >= k || w < anchor * 1e-30 {
                    break;
                }
                s += 1;
                w *= x / s as f64;
            }
        }
    }
    let mut acc = 0.0;
    for (j, c) in row.iter().enumerate().skip(1) {
        acc += c * sums[j - 1];
    }
    Ok(acc / (k as f64 * (n as f64).powi(r as i32 + 1)))
}

fn k0_raw_moment(params: &OperatorParams, r: u32) -> MomentValue {
    // basis weight at k = 0 is e^{−nt}: Gamma integral r!/n^{r+1}
    MomentValue::from_exact(ExactRational::new(
        factorial(r as u64),
        n_pow(params.n(), r + 1),
    ))
}

fn stirling_raw_moment(params: &OperatorParams, k: u64, r: u32) -> Result<MomentValue> {
    debug_assert!(k >= 1);
    if let Some(beta) = params.beta_exact() {
        let mantissa = raw_moment_mantissa_rational(params.n(), beta, k, r)?;
        let x = params.beta() * k as f64;
        let value = rational_to_f64(&mantissa) * (-x).exp();
        let exact = if beta.is_zero() { Some(mantissa) } else { None };
        return Ok(MomentValue { value, exact, error_bound: value.abs() * f64::EPSILON * 4.0 });
    }
    let value = raw_moment_stirling_f64(params.n(), params.beta(), k, r)?;
    let bound = value.abs() * f64::EPSILON * ((k as f64).min(1e5) + r as f64 + 4.0);
    Ok(MomentValue::from_float(value, bound))
}

/// Raw basis moment `⟨L_{n,k}, t^r⟩` by the selected route.
///
/// `k = 0` always returns the Gamma-integral value `r!/n^{r+1}` (the basis
/// collapses to `e^{−nt}` and the θ machinery is an empty sum there). The
/// recurrence route seeds orders 0 and 1 from the Stirling route and advances
/// `n² M_q = n[(1−β)k + q] M_{q−1} + q βk M_{q−2}`.
pub fn basis_raw_moment(
    params: &OperatorParams,
    k: u64,
    r: u32,
    method: MomentMethod,
) -> Result<MomentValue> {
    if k == 0 {
        return Ok(k0_raw_moment(params, r));
    }
    match method {
        MomentMethod::StirlingSum => stirling_raw_moment(params, k, r),
        MomentMethod::Recurrence => {
            if r <= 1 {
                return stirling_raw_moment(params, k, r);
            }
            let n = params.n() as f64;
            let beta = params.beta();
            let mut prev2 = stirling_raw_moment(params, k, 0)?.value;
            let mut prev = stirling_raw_moment(params, k, 1)?.value;
            for q in 2..=r as u64 {
                let next = (n * ((1.0 - beta) * k as f64 + q as f64) * prev
                    + q as f64 * beta * k as f64 * prev2)
                    / (n * n);
                prev2 = prev;
                prev = next;
            }
            let exact = match params.beta_exact() {
                Some(b) if b.is_zero() => Some(raw_moment_mantissa_rational(params.n(), b, k, r)?),
                _ => None,
            };
            let bound = prev.abs() * f64::EPSILON * (k as f64 + r as f64 + 8.0).min(1e5);
            Ok(MomentValue { value: prev, exact, error_bound: bound })
        }
        MomentMethod::Quadrature => {
            let mean = ((1.0 - params.beta()) * k as f64 + r as f64 + 1.0) / params.n() as f64;
            let spread = ((k as f64 + 2.0).sqrt() + r as f64) / params.n() as f64;
            let hints = [
                mean * 0.25,
                mean * 0.5,
                (mean - 3.0 * spread).max(mean * 0.1),
                mean,
                mean + 3.0 * spread,
                mean + 6.0 * spread,
                2.0 * mean + 1.0,
            ];
            let cfg = crate::quad::QuadratureConfig::default();
            let res = crate::quad::integrate_semi_infinite(
                |t| basis_value(params, k, t) * t.powi(r as i32),
                &hints,
                &cfg,
            )?;
            Ok(MomentValue::from_float(res.value, res.error_bound))
        }
    }
}

/// Raw basis moment through the Tricomi-U closed form, assembled in log
/// space: `⟨L_k, t^r⟩ = e^{−kβ} (r+1)!/(k! n^{r+1}) Σᵢ C(k−1, i)(r+2)ᵢ (kβ)^{k−1−i}`.
/// Valid for all `β ∈ [0, 1)`; at `β = 0` the sum degenerates to its last
/// term and reproduces `(k+r)!/(k! n^{r+1})`.
pub fn basis_raw_moment_tricomi(params: &OperatorParams, k: u64, r: u32) -> Result<MomentValue> {
    if k == 0 {
        return Ok(k0_raw_moment(params, r));
    }
    let z = params.beta() * k as f64;
    let a = r as f64 + 2.0;
    let b = (k + r as u64) as f64 + 2.0;
    let ln_sum = ln_tricomi_moment_sum(a, b, z)?;
    let ln_value = ln_gamma(r as f64 + 2.0)?
        - ln_gamma(k as f64 + 1.0)?
        - (r as f64 + 1.0) * (params.n() as f64).ln()
        - z
        + ln_sum;
    let value = ln_value.exp();
    // positive-term log-sum-exp: conservative relative bound
    Ok(MomentValue::from_float(value, value.abs() * 1e-12))
}

/// Basis-weighted series `Σ_k w(k) L_{n,k}(x)` for nonnegative weights of
/// polynomial growth.
///
/// Sums past the plain mass target until the weighted terms themselves fall
/// below `mass_tol/100` of the running total for several consecutive `k` —
/// a mass-only cutoff undershoots when `w(k)` grows like `k^r` and the
/// requested tolerance is tight. Returns the value, a tail bound built from
/// the residual mass and a sampled supremum of `w`, and the last `k` summed.
pub(crate) fn weighted_basis_series<W: Fn(u64) -> f64>(
    params: &OperatorParams,
    x: f64,
    policy: &TruncationPolicy,
    weight: W,
) -> Result<(f64, f64, u64)> {
    let trunc = truncation_index(params, x, policy);
    if trunc.saturated {
        return Err(Error::Saturated { cap: policy.hard_cap });
    }
    let mut sum = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    let mut quiet_run = 0u32;
    let mut k = 0u64;
    loop {
        let basis = basis_value(params, k, x);
        let term = weight(k) * basis;
        sum.add(term);
        mass.add(basis);
        if k >= trunc.k_max {
            let tol_abs = policy.mass_tol * 0.01 * sum.value().abs().max(f64::MIN_POSITIVE);
            if term.abs() <= tol_abs {
                quiet_run += 1;
                if quiet_run >= 5 {
                    break;
                }
            } else {
                quiet_run = 0;
            }
        }
        if k >= policy.hard_cap {
            return Err(Error::Saturated { cap: policy.hard_cap });
        }
        k += 1;
    }
    let deficit = (1.0 - mass.value()).max(0.0);
    let sup_w = [k, k + k / 2, 2 * k]
        .iter()
        .map(|&kk| weight(kk))
        .fold(0.0f64, f64::max);
    let tail_bound = deficit * sup_w * 2.0;
    let rounding = sum.abs_sum() * f64::EPSILON * 32.0;
    Ok((sum.value(), tail_bound + rounding, k))
}

/// Operator moment `T_{n,r}(x) = Σ_k P_r(k; β) L_{n,k}(x)` as a truncated
/// series over the exact ratios, with a tail bound from the residual basis
/// mass and the polynomial growth of `P_r` in `k`.
pub fn t_series(
    params: &OperatorParams,
    r: u32,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<MomentValue> {
    if x == 0.0 {
        // only k = 0 survives
        return p_exact(params, 0, r);
    }
    let row = stirling_row_f64(r);
    let (value, bound, _) = weighted_basis_series(params, x, policy, |k| {
        p_float_with_row(params.n(), params.beta(), k, r, &row)
    })?;
    Ok(MomentValue::from_float(value, bound))
}

/// Central moment `μ_{n,r}(x) = Σ_j C(r, j) (−x)^{r−j} T_{n,j}(x)` with
/// compensated summation over the binomial expansion.
pub fn central_moment_series(
    params: &OperatorParams,
    r: u32,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<MomentValue> {
    if r == 0 {
        return Ok(MomentValue::from_exact(ExactRational::one()));
    }
    let mut sum = CompensatedSum::new();
    let mut bound = 0.0f64;
    for j in 0..=r {
        let t = t_series(params, j, x, policy)?;
        let coeff = crate::kernel::binomial(r as u64, j as i64).to_f64().unwrap()
            * (-x).powi((r - j) as i32);
        sum.add(coeff * t.value);
        bound += coeff.abs() * t.error_bound;
    }
    let rounding = sum.abs_sum() * f64::EPSILON * 8.0;
    Ok(MomentValue::from_float(sum.value(), bound + rounding))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_fraction, rational};

    fn params(n: u32, beta: f64) -> OperatorParams {
        OperatorParams::new(n, beta).unwrap()
    }

    fn exact_params(n: u32, beta: &str) -> OperatorParams {
        OperatorParams::with_exact_beta(n, parse_fraction(beta).unwrap()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    #[test]
    fn theta_small_cases() {
        // k=1: single term 1^{m+1}, independent of x and m
        for m in 0..5u32 {
            assert_eq!(theta(1, &2.5f64, m).unwrap(), 1.0);
        }
        // k=2, x=1: θ_0 = 2 + 1, θ_1 = 4 + 1
        assert_eq!(theta(2, &1.0f64, 0).unwrap(), 3.0);
        assert_eq!(theta(2, &1.0f64, 1).unwrap(), 5.0);
        let one = rational(1, 1).unwrap();
        assert_eq!(theta(2, &one, 1).unwrap(), rational(5, 1).unwrap());
        assert!(theta(0, &1.0f64, 0).is_err());
        assert!(theta(2, &-1.0f64, 0).is_err());
    }

    #[test]
    fn s_ratio_basics() {
        assert_eq!(s_ratio_exact(7, &0.3f64, 0).unwrap(), 1.0);
        for r in 0..6u32 {
            assert_eq!(s_ratio_exact(1, &0.9f64, r).unwrap(), 1.0);
        }
        let one = rational(1, 1).unwrap();
        assert_eq!(s_ratio_exact(2, &one, 1).unwrap(), rational(5, 3).unwrap());
    }

    #[test]
    fn scaled_ratios_match_direct_theta_at_small_k() {
        for k in [1u64, 2, 5, 12, 30] {
            for x in [0.0, 0.4, 3.0, 11.0] {
                let got = s_ratios_f64(k, x, 5);
                for m in 0..=5u32 {
                    let want = s_ratio_exact(k, &x, m).unwrap();
                    assert!(rel(got[m as usize], want) < 1e-12, "k={k} x={x} m={m}");
                }
            }
        }
    }

    #[test]
    fn scaled_ratios_stable_at_large_k() {
        // x = βk = 600: raw θ terms overflow the e^x scale; ratios must not
        let got = s_ratios_f64(800, 600.0, 3);
        assert!(got.iter().all(|v| v.is_finite() && *v > 0.0));
        // S_1 near (1−β)k + β/(1−β) for large k (β = 0.75)
        let approx = 0.25 * 800.0 + 0.75 / 0.25;
        assert!(rel(got[1], approx) < 1e-3, "S1 = {} vs {approx}", got[1]);
    }

    #[test]
    fn p_exact_at_k_zero_and_one() {
        // k = 0: r!/n^r from the Gamma integral
        let p = p_exact(&params(2, 0.37), 0, 3).unwrap();
        assert_eq!(p.exact.unwrap(), rational(6, 8).unwrap());
        // k = 1: (r+1)!/n^r independent of β
        for beta in ["0", "1/2", "9/10"] {
            let p = p_exact(&exact_params(2, beta), 1, 2).unwrap();
            assert_eq!(p.exact.unwrap(), rational(6, 4).unwrap());
        }
        let p_float = p_exact(&params(2, 0.373), 1, 2).unwrap();
        assert!(rel(p_float.value, 1.5) < 1e-13);
    }

    #[test]
    fn p_exact_beta_zero_factorial_family() {
        // P_r(k; 0) = (k+r)!/(k! n^r)
        let p = exact_params(1, "0");
        for k in 0..=10u64 {
            for r in 0..=6u32 {
                let got = p_exact(&p, k, r).unwrap().exact.unwrap();
                let want =
                    ExactRational::from_big(&(factorial(k + r as u64) / factorial(k)));
                assert_eq!(got, want, "k={k} r={r}");
            }
        }
        let got = p_exact(&exact_params(1, "0"), 3, 2).unwrap();
        assert_eq!(got.exact.unwrap(), rational(20, 1).unwrap());
    }

    #[test]
    fn p_exact_spot_value_eight_thirds() {
        let got = p_exact(&exact_params(1, "1/2"), 2, 1).unwrap();
        assert_eq!(got.exact.unwrap(), rational(8, 3).unwrap());
    }

    #[test]
    fn recurrence_reproduces_exact_family() {
        // k = 1: P_r = (r+1)!/n^r for any β
        for beta in ["0", "1/3", "2/3"] {
            let p = exact_params(3, beta);
            let seq = p_recurrence(&p, 1, 6).unwrap();
            for (r, v) in seq.iter().enumerate() {
                let want = ExactRational::new(factorial(r as u64 + 1), n_pow(3, r as u32));
                assert_eq!(v.exact.as_ref().unwrap(), &want, "β={beta} r={r}");
            }
        }
        // β = 0: factorial identity for k ≤ 10, r ≤ 6
        let p = exact_params(2, "0");
        for k in 1..=10u64 {
            let seq = p_recurrence(&p, k, 6).unwrap();
            for (r, v) in seq.iter().enumerate() {
                let want = ExactRational::new(
                    factorial(k + r as u64) / factorial(k),
                    n_pow(2, r as u32),
                );
                assert_eq!(v.exact.as_ref().unwrap(), &want, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn recurrence_matches_stirling_assembly_exactly() {
        for beta in ["1/4", "1/2", "3/4"] {
            for n in [1u32, 5] {
                for k in 1..=12u64 {
                    let p = exact_params(n, beta);
                    let rec = p_recurrence(&p, k, 6).unwrap();
                    for r in 0..=6u32 {
                        let direct = p_exact(&p, k, r).unwrap();
                        assert_eq!(
                            rec[r as usize].exact,
                            direct.exact,
                            "β={beta} n={n} k={k} r={r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn raw_moment_k_zero_gamma_integral() {
        let m = basis_raw_moment(&params(2, 0.5), 0, 2, MomentMethod::StirlingSum).unwrap();
        assert_eq!(m.exact.unwrap(), rational(1, 4).unwrap()); // 2!/2³
        assert!(rel(m.value, 0.25) < 1e-15);
    }

    #[test]
    fn raw_moment_k_one_direct_integrals() {
        // ⟨L_1, 1⟩ = e^{−β}/n
        let m = basis_raw_moment(&params(2, 0.5), 1, 0, MomentMethod::StirlingSum).unwrap();
        assert!(rel(m.value, 0.5 * (-0.5f64).exp()) < 1e-13);
        // ⟨L_1, t⟩ = 2 e^{−β}/n²
        let m = basis_raw_moment(&params(1, 0.5), 1, 1, MomentMethod::StirlingSum).unwrap();
        assert!(rel(m.value, 2.0 * (-0.5f64).exp()) < 1e-13);
    }

    #[test]
    fn raw_moment_binomial_sum_oracle() {
        // independent route from the same integral:
        // (r+1)!/(k n^{r+1}) e^{−kβ} Σ_s C(k+r−s, r+1) (kβ)^s/s!
        fn oracle(n: u32, beta: f64, k: u64, r: u32) -> f64 {
            let x = beta * k as f64;
            let mut sum = 0.0;
            let mut w = 1.0; // x^s/s!
            for s in 0..k {
                let c = crate::kernel::binomial(k + r as u64 - s, r as i64 + 1)
                    .to_f64()
                    .unwrap();
                sum += c * w;
                w *= x / (s + 1) as f64;
            }
            factorial(r as u64 + 1).to_f64().unwrap() * (-x).exp() * sum
                / (k as f64 * (n as f64).powi(r as i32 + 1))
        }
        for n in [1u32, 5] {
            for beta in [0.0, 0.25, 0.5, 0.75] {
                for k in 1..=20u64 {
                    for r in 0..=6u32 {
                        let got =
                            basis_raw_moment(&params(n, beta), k, r, MomentMethod::StirlingSum)
                                .unwrap()
                                .value;
                        let want = oracle(n, beta, k, r);
                        assert!(
                            rel(got, want) < 1e-11,
                            "n={n} β={beta} k={k} r={r}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn three_routes_agree_on_spot_checks() {
        for (n, beta, k, r) in [(1u32, 0.5f64, 3u64, 2u32), (5, 0.25, 10, 4), (2, 0.75, 7, 0)] {
            let p = params(n, beta);
            let stirling = basis_raw_moment(&p, k, r, MomentMethod::StirlingSum).unwrap().value;
            let quad = basis_raw_moment(&p, k, r, MomentMethod::Quadrature).unwrap().value;
            let rec = basis_raw_moment(&p, k, r, MomentMethod::Recurrence).unwrap().value;
            let tric = basis_raw_moment_tricomi(&p, k, r).unwrap().value;
            assert!(rel(stirling, quad) < 1e-11, "quad n={n} β={beta} k={k} r={r}");
            assert!(rel(stirling, rec) < 1e-12, "rec n={n} β={beta} k={k} r={r}");
            assert!(rel(stirling, tric) < 1e-11, "tricomi n={n} β={beta} k={k} r={r}");
        }
    }

    #[test]
    fn tricomi_route_spot_check_against_quadrature_oracle() {
        // U(2, 5, 1.5) through quadrature of its integral definition (Γ(2) = 1)
        let cfg = crate::quad::QuadratureConfig::default();
        let z = 1.5;
        let direct = crate::kernel::tricomi_u_integer_gap(2.0, 5.0, z).unwrap();
        let via_quad = crate::quad::integrate_semi_infinite(
            |t| (-z * t).exp() * t * (1.0 + t) * (1.0 + t),
            &[1.0, 3.0],
            &cfg,
        )
        .unwrap()
        .value;
        assert!(rel(direct, via_quad) < 1e-12);
    }

    #[test]
    fn t_series_normalization_and_x_zero() {
        let policy = TruncationPolicy::default();
        for (n, beta, x) in [(1u32, 0.0f64, 0.5f64), (5, 0.5, 1.0), (10, 0.75, 4.0)] {
            let t = t_series(&params(n, beta), 0, x, &policy).unwrap();
            assert!((t.value - 1.0).abs() < 1e-12, "n={n} β={beta} x={x}: {}", t.value);
        }
        let t = t_series(&params(4, 0.3), 3, 0.0, &policy).unwrap();
        assert_eq!(t.exact.unwrap(), rational(6, 64).unwrap());
    }

    #[test]
    fn t_series_beta_zero_first_moment() {
        let policy = TruncationPolicy::default();
        let t = t_series(&params(10, 0.0), 1, 1.0, &policy).unwrap();
        assert!((t.value - 1.1).abs() < 1e-10, "{}", t.value);
    }

    #[test]
    fn t_series_saturation_is_an_error() {
        let policy = TruncationPolicy::new(1e-12, 5).unwrap();
        let err = t_series(&params(50, 0.5), 1, 2.0, &policy);
        assert!(matches!(err, Err(Error::Saturated { cap: 5 })));
    }

    #[test]
    fn central_moments_beta_zero() {
        let policy = TruncationPolicy::default();
        let p = params(100, 0.0);
        let mu1 = central_moment_series(&p, 1, 1.0, &policy).unwrap();
        assert!((mu1.value - 0.01).abs() < 1e-11, "{}", mu1.value);
        let mu2 = central_moment_series(&p, 2, 1.0, &policy).unwrap();
        assert!((mu2.value - 0.0202).abs() < 1e-9, "{}", mu2.value);
        let mu0 = central_moment_series(&p, 0, 1.0, &policy).unwrap();
        assert_eq!(mu0.value, 1.0);
    }

    #[test]
    fn moment_value_dual_representation_invariant() {
        let q = rational(22, 7).unwrap();
        let m = MomentValue::from_exact(q.clone());
        assert!((m.value - rational_to_f64(&q)).abs() <= m.value.abs() * f64::EPSILON);
        assert!(m.error_bound >= 0.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [MomentMethod::StirlingSum, MomentMethod::Recurrence, MomentMethod::Quadrature] {
            let s = m.to_string();
            assert_eq!(s.parse::<MomentMethod>().unwrap(), m);
        }
        assert!("simpson".parse::<MomentMethod>().is_err());
    }
}
