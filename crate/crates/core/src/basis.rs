//! Log-space evaluation of the generalized Szász basis
//! `L_{n,k}(x) = nx (nx + kβ)^{k−1} e^{−(nx + kβ)} / k!`
//! and truncation control for the infinite sums over `k`.
//!
//! As a function of `k` the basis is the generalized (Consul) Poisson
//! distribution with mean `nx/(1−β)` and variance `nx/(1−β)³`; at `β = 0` it
//! reduces to the Poisson mass function with rate `nx`. The power
//! `(nx + kβ)^{k−1}` overflows f64 near `k ≈ 600`, so all evaluation goes
//! through logs.

use crate::error::{Error, Result};
use crate::kernel::{ln_gamma, rational_to_f64, ExactRational};
use crate::sum::CompensatedSum;

/// Operator index `n ≥ 1` and shape parameter `β ∈ [0, 1)`, optionally with
/// an exact rational representation of `β` that unlocks the exact-arithmetic
/// moment routes.
#[derive(Debug, Clone)]
pub struct OperatorParams {
    n: u32,
    beta: f64,
    beta_exact: Option<ExactRational>,
}

impl OperatorParams {
    pub fn new(n: u32, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("operator index n must be ≥ 1".into()));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::Domain(format!("β must lie in [0, 1), got {beta}")));
        }
        Ok(OperatorParams { n, beta, beta_exact: None })
    }

    /// Construct with an exact rational β; the float field is the nearest f64.
    pub fn with_exact_beta(n: u32, beta: ExactRational) -> Result<Self> {
        let f = rational_to_f64(&beta);
        let mut params = Self::new(n, f)?;
        params.beta_exact = Some(beta);
        Ok(params)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_exact(&self) -> Option<&ExactRational> {
        self.beta_exact.as_ref()
    }

    pub fn one_minus_beta(&self) -> f64 {
        1.0 - self.beta
    }

    /// Mean of the basis weight in `k` at evaluation point `x`.
    pub fn count_mean(&self, x: f64) -> f64 {
        self.n as f64 * x / self.one_minus_beta()
    }

    /// Standard deviation of the basis weight in `k` at `x`.
    pub fn count_std(&self, x: f64) -> f64 {
        (self.n as f64 * x).sqrt() / self.one_minus_beta().powf(1.5)
    }
}

/// Residual-mass tolerance and absolute cap for truncating sums over `k`.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    pub mass_tol: f64,
    pub hard_cap: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { mass_tol: 1e-12, hard_cap: 1_000_000 }
    }
}

impl TruncationPolicy {
    pub fn new(mass_tol: f64, hard_cap: u64) -> Result<Self> {
        if !(mass_tol > 0.0 && mass_tol < 1.0) {
            return Err(Error::Domain(format!("mass_tol must lie in (0, 1), got {mass_tol}")));
        }
        if hard_cap == 0 {
            return Err(Error::Domain("hard_cap must be ≥ 1".into()));
        }
        Ok(TruncationPolicy { mass_tol, hard_cap })
    }
}

/// Truncation point for a basis sum, with the mass actually captured.
#[derive(Debug, Clone, Copy)]
pub struct Truncation {
    pub k_max: u64,
    pub mass: f64,
    /// The hard cap was reached before the mass target.
    pub saturated: bool,
}

/// `ln L_{n,k}(x)`; `−∞` when the value is exactly zero (`x = 0`, `k ≥ 1`).
pub fn basis_log_value(params: &OperatorParams, k: u64, x: f64) -> f64 {
    debug_assert!(x >= 0.0, "basis evaluation point must be ≥ 0");
    let n = params.n as f64;
    if x == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return -n * x;
    }
    let nx = n * x;
    let shifted = nx + k as f64 * params.beta;
    // ln Γ(k+1) with k ≥ 1 is always in-domain
    let ln_k_factorial = ln_gamma(k as f64 + 1.0).expect("k+1 > 0");
    nx.ln() + (k as f64 - 1.0) * shifted.ln() - shifted - ln_k_factorial
}

/// `L_{n,k}(x)`; underflow maps to zero.
pub fn basis_value(params: &OperatorParams, k: u64, x: f64) -> f64 {
    let ln = basis_log_value(params, k, x);
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    }
}

/// Smallest `k_max ≤ hard_cap` with `Σ_{k=0}^{k_max} L_{n,k}(x) ≥ 1 − mass_tol`.
///
/// Sums upward from `k = 0`; the generalized-Poisson mean plus twelve
/// standard deviations plus slack is used as the scan horizon and extended
/// until the mass target or the cap is hit. Hitting the cap sets the
/// `saturated` flag rather than failing.
pub fn truncation_index(params: &OperatorParams, x: f64, policy: &TruncationPolicy) -> Truncation {
    if x == 0.0 {
        return Truncation { k_max: 0, mass: 1.0, saturated: false };
    }
    let target = 1.0 - policy.mass_tol;
    let mut horizon =
        (params.count_mean(x) + 12.0 * params.count_std(x) + 50.0).ceil() as u64;
    horizon = horizon.min(policy.hard_cap);

    let mut sum = CompensatedSum::new();
    let mut k = 0u64;
    loop {
        sum.add(basis_value(params, k, x));
        if sum.value() >= target {
            return Truncation { k_max: k, mass: sum.value(), saturated: false };
        }
        if k >= policy.hard_cap {
            return Truncation { k_max: k, mass: sum.value(), saturated: true };
        }
        if k >= horizon {
            // mass target not reached inside the predicted horizon; extend
            horizon = (horizon + (params.count_std(x).ceil() as u64).max(64)).min(policy.hard_cap);
        }
        k += 1;
    }
}

/// Partial basis mass `Σ_{k=0}^{k_max} L_{n,k}(x)`.
pub fn basis_mass(params: &OperatorParams, x: f64, k_max: u64) -> f64 {
    let mut sum = CompensatedSum::new();
    for k in 0..=k_max {
        sum.add(basis_value(params, k, x));
    }
    sum.value()
}
