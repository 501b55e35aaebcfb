//! Desk-scale convergence experiments: Korovkin distances on the test
//! monomials, the Voronovskaja first-order limit with Richardson
//! extrapolation, discrete moduli of continuity, and the direct-estimate
//! inequality with its measured minimal constant.
//!
//! Moduli and sup-norms are evaluated on finite grids, so every modulus here
//! is a lower bound of the true supremum that converges as the grid step
//! shrinks; the default step is `1e−3` and the working domain is the target
//! interval padded by one unit.

use serde::Serialize;

use crate::basis::{OperatorParams, TruncationPolicy};
use crate::error::{Error, Result};
use crate::kernel::binomial;
use crate::moments::central_moment_series;
use crate::operators::{durrmeyer_sum_with_weights, durrmeyer_weights, FunctionSpec};
use crate::quad::QuadratureConfig;

/// Uniform evaluation grid on `[a, b] ⊂ [0, ∞)`.
#[derive(Debug, Clone)]
pub struct Grid {
    a: f64,
    b: f64,
    step: f64,
    points: Vec<f64>,
}

impl Grid {
    pub fn uniform(a: f64, b: f64, step: f64) -> Result<Self> {
        if !(a >= 0.0) || !(b > a) || !(step > 0.0) {
            return Err(Error::Domain(format!(
                "grid needs 0 ≤ a < b and step > 0, got [{a}, {b}] step {step}"
            )));
        }
        let count = ((b - a) / step).round() as usize;
        let points: Vec<f64> = (0..=count).map(|i| (a + i as f64 * step).min(b)).collect();
        Ok(Grid { a, b, step, points })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// Discrete `m`-th order modulus of continuity
/// `ω_m(f, δ) = sup_{0 ≤ h ≤ δ} sup_x |Δ_h^m f(x)|` over a grid.
///
/// Steps run over grid multiples `h = j·step ≤ δ` and `x` over grid points
/// with `x + m·h` still inside; the result is a lower bound of the true
/// modulus that tightens as the step shrinks.
pub fn modulus(f: &FunctionSpec, m: u32, delta: f64, grid: &Grid) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("modulus order m must be ≥ 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("modulus radius must be positive, got {delta}")));
    }
    let j_max = (delta / grid.step()).floor() as u64;
    if j_max == 0 {
        return Err(Error::Domain(format!(
            "no admissible steps: δ = {delta} is below the grid step {}",
            grid.step()
        )));
    }
    // binomial coefficients of the m-th forward difference
    let coeffs: Vec<f64> = (0..=m)
        .map(|i| {
            let sign = if (m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * num_traits::ToPrimitive::to_f64(&binomial(m as u64, i as i64)).unwrap()
        })
        .collect();
    let values: Vec<f64> = {
        let mut vals = Vec::with_capacity(grid.points().len());
        for &x in grid.points() {
            vals.push(f.eval(x)?);
        }
        vals
    };
    let mut sup = 0.0f64;
    for j in 1..=j_max as usize {
        let reach = j * m as usize;
        if reach >= values.len() {
            break;
        }
        for i in 0..values.len() - reach {
            let mut diff = 0.0;
            for (p, c) in coeffs.iter().enumerate() {
                diff += c * values[i + p * j];
            }
            sup = sup.max(diff.abs());
        }
    }
    Ok(sup)
}

/// The direct-estimate radius
/// `δ_n(x) = 2x/(n(1−β)) + 2/(n²(1−β)) + 1/(n²(1−β)²)`.
pub fn delta_n(params: &OperatorParams, x: f64) -> f64 {
    let n = params.n() as f64;
    let c = params.one_minus_beta();
    2.0 * x / (n * c) + 2.0 / (n * n * c) + 1.0 / (n * n * c * c)
}

/// Sup-distance of `D(e_j, ·)` from `x^j` for one operator index.
#[derive(Debug, Clone, Serialize)]
pub struct KorovkinRow {
    pub n: u32,
    pub e0_dist: f64,
    pub e1_dist: f64,
    pub e2_dist: f64,
}

/// Korovkin distances across an `n` ladder.
#[derive(Debug, Clone, Serialize)]
pub struct KorovkinReport {
    pub beta: f64,
    pub interval: (f64, f64),
    pub rows: Vec<KorovkinRow>,
    pub tolerances: [f64; 3],
    /// Distances decrease along the ladder and end below tolerance.
    pub converged: bool,
}

/// Sup-norm Korovkin test for `e_0, e_1, e_2` on a compact interval.
///
/// `tolerances` bound the three distances at the largest `n`; convergence
/// additionally requires nonincreasing distances along the ladder (up to
/// truncation noise on the exactly-preserved `e_0`).
pub fn korovkin_check(
    beta: f64,
    interval: (f64, f64),
    step: f64,
    n_list: &[u32],
    tolerances: [f64; 3],
    policy: &TruncationPolicy,
    quad: &QuadratureConfig,
) -> Result<KorovkinReport> {
    if n_list.is_empty() {
        return Err(Error::Domain("korovkin_check needs at least one n".into()));
    }
    let grid = Grid::uniform(interval.0, interval.1, step)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let params = OperatorParams::new(n, beta)?;
        let trunc = crate::basis::truncation_index(&params, grid.b(), policy);
        if trunc.saturated {
            return Err(Error::Saturated { cap: policy.hard_cap });
        }
        let k_max = trunc.k_max + (trunc.k_max / 4).clamp(16, 400);
        let mut dists = [0.0f64; 3];
        for (r, dist) in dists.iter_mut().enumerate() {
            let f = FunctionSpec::monomial(r as u32);
            let weights = durrmeyer_weights(&params, &f, k_max, quad)?;
            for &x in grid.points() {
                let d = (durrmeyer_sum_with_weights(&params, &weights, x) - x.powi(r as i32)).abs();
                *dist = dist.max(d);
            }
        }
        rows.push(KorovkinRow { n, e0_dist: dists[0], e1_dist: dists[1], e2_dist: dists[2] });
    }
    let last = rows.last().expect("nonempty");
    let below = last.e0_dist <= tolerances[0]
        && last.e1_dist <= tolerances[1]
        && last.e2_dist <= tolerances[2];
    // e0 sits at truncation noise; only e1, e2 carry a real decay signal
    let noise = 1e-11;
    let monotone = rows.windows(2).all(|w| {
        w[1].e1_dist <= w[0].e1_dist + noise && w[1].e2_dist <= w[0].e2_dist + noise
    });
    Ok(KorovkinReport {
        beta,
        interval,
        rows,
        tolerances,
        converged: below && monotone,
    })
}

/// Scaled errors `n[D(f, x) − f(x)]`, their Richardson extrapolation, and
/// the first-order limit `f′(x)/(1−β) + x f″(x)/(1−β)`.
#[derive(Debug, Clone, Serialize)]
pub struct VoronovskajaReport {
    pub f_name: String,
    pub x: f64,
    pub beta: f64,
    pub n_list: Vec<u32>,
    pub scaled_errors: Vec<f64>,
    /// Richardson extrapolations of consecutive pairs (doubling ladder).
    pub richardson: Vec<f64>,
    pub extrapolated: f64,
    pub formula: f64,
    pub gap: f64,
}

/// First-order asymptotic check: the scaled errors have expansion
/// `limit + b/n + …`, so a doubling ladder extrapolates by `2s(2n) − s(n)`.
pub fn voronovskaja(
    f: &FunctionSpec,
    x: f64,
    beta: f64,
    n_list: &[u32],
    policy: &TruncationPolicy,
    quad: &QuadratureConfig,
) -> Result<VoronovskajaReport> {
    if n_list.len() < 2 {
        return Err(Error::Domain("voronovskaja needs at least two n values".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain("voronovskaja needs x > 0".into()));
    }
    let mut sorted = n_list.to_vec();
    sorted.sort_unstable();
    let fx = f.eval(x)?;
    let mut scaled = Vec::with_capacity(sorted.len());
    for &n in &sorted {
        let params = OperatorParams::new(n, beta)?;
        let d = crate::operators::durrmeyer_apply(&params, f, x, policy, quad)?;
        scaled.push(n as f64 * (d - fx));
    }
    let mut richardson = Vec::with_capacity(scaled.len().saturating_sub(1));
    for (pair, w) in sorted.windows(2).zip(scaled.windows(2)) {
        let ratio = pair[1] as f64 / pair[0] as f64;
        // eliminate the 1/n term: (ratio·s_hi − s_lo)/(ratio − 1)
        richardson.push((ratio * w[1] - w[0]) / (ratio - 1.0));
    }
    let extrapolated = *richardson.last().expect("≥ 2 n values");
    let (d1, d2) = f.derivatives(x)?;
    let formula = d1 / (1.0 - beta) + x * d2 / (1.0 - beta);
    Ok(VoronovskajaReport {
        f_name: f.name().to_string(),
        x,
        beta,
        n_list: sorted,
        scaled_errors: scaled,
        richardson,
        extrapolated,
        formula,
        gap: (extrapolated - formula).abs(),
    })
}

/// Pointwise data for the direct-estimate inequality at one `x`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundPoint {
    pub x: f64,
    pub lhs: f64,
    pub omega2_term: f64,
    pub omega_term: f64,
    /// Minimal admissible constant at this point (0 when the ω term alone
    /// already covers the left side).
    pub local_c: f64,
}

/// The direct estimate `|D(f,x) − f(x)| ≤ C ω₂(f, √δ_n(x)) + ω(f, 1/(n(1−β)))`
/// measured on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub f_name: String,
    pub n: u32,
    pub beta: f64,
    pub interval: (f64, f64),
    pub points: Vec<BoundPoint>,
    pub sup_lhs: f64,
    pub omega_term: f64,
    /// `max_x (lhs − ω term)/ω₂ term`, clamped at zero.
    pub minimal_c: f64,
    /// Points where the ω₂ term vanished while the left side exceeded the
    /// ω term; excluded from `minimal_c`.
    pub inconclusive: usize,
}

/// Prefix-max table of `sup_x |Δ_h^m f(x)|` over grid-multiple steps, so a
/// per-point modulus query is one array lookup instead of an O(grid²) scan.
struct ModulusTable {
    step: f64,
    prefix_max: Vec<f64>, // index j: sup over h = i·step, i ≤ j
}

impl ModulusTable {
    fn build(f: &FunctionSpec, m: u32, grid: &Grid, delta_max: f64) -> Result<Self> {
        let j_max = ((delta_max / grid.step()).floor() as usize).max(1);
        let coeffs: Vec<f64> = (0..=m)
            .map(|i| {
                let sign = if (m - i).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * num_traits::ToPrimitive::to_f64(&binomial(m as u64, i as i64)).unwrap()
            })
            .collect();
        let mut values = Vec::with_capacity(grid.points().len());
        for &x in grid.points() {
            values.push(f.eval(x)?);
        }
        let mut prefix_max = vec![0.0f64; j_max + 1];
        for j in 1..=j_max {
            let reach = j * m as usize;
            let mut sup = 0.0f64;
            if reach < values.len() {
                for i in 0..values.len() - reach {
                    let mut diff = 0.0;
                    for (p, c) in coeffs.iter().enumerate() {
                        diff += c * values[i + p * j];
                    }
                    sup = sup.max(diff.abs());
                }
            }
            prefix_max[j] = prefix_max[j - 1].max(sup);
        }
        Ok(ModulusTable { step: grid.step(), prefix_max })
    }

    fn query(&self, delta: f64) -> f64 {
        let j = ((delta / self.step).floor() as usize).min(self.prefix_max.len() - 1);
        self.prefix_max[j]
    }
}

/// Measure the direct-estimate inequality for one `(f, n, β)` on `grid`.
///
/// Moduli are computed on a fine internal grid over `[0, b + 1]` (step
/// `1e−3`), the operator error on the coarser `grid`.
pub fn bound_check(
    f: &FunctionSpec,
    params: &OperatorParams,
    grid: &Grid,
    policy: &TruncationPolicy,
    quad: &QuadratureConfig,
) -> Result<BoundReport> {
    let fine = Grid::uniform(0.0, grid.b() + 1.0, 1e-3)?;
    let omega_term = modulus(f, 1, 1.0 / (params.n() as f64 * params.one_minus_beta()), &fine)?;
    let delta_max = grid
        .points()
        .iter()
        .map(|&x| delta_n(params, x).sqrt())
        .fold(0.0f64, f64::max);
    let omega2 = ModulusTable::build(f, 2, &fine, delta_max)?;

    let trunc = crate::basis::truncation_index(params, grid.b(), policy);
    if trunc.saturated {
        return Err(Error::Saturated { cap: policy.hard_cap });
    }
    let k_max = trunc.k_max + (trunc.k_max / 4).clamp(16, 400);
    let weights = durrmeyer_weights(params, f, k_max, quad)?;

    // noise floors: second differences of smooth grids round at ~ε·|f|,
    // and the series error sits near the truncation tolerance; without the
    // floors an exactly-linear f divides rounding dust by rounding dust
    let mut f_scale = 0.0f64;
    for &x in grid.points() {
        f_scale = f_scale.max(f.eval(x)?.abs());
    }
    let omega2_floor = 32.0 * f64::EPSILON * (1.0 + f_scale);
    let lhs_slack = 1e-9 * (1.0 + omega_term + f_scale);

    let mut points = Vec::with_capacity(grid.points().len());
    let mut sup_lhs = 0.0f64;
    let mut minimal_c = 0.0f64;
    let mut inconclusive = 0usize;
    for &x in grid.points() {
        let lhs = (durrmeyer_sum_with_weights(params, &weights, x) - f.eval(x)?).abs();
        let omega2_term = omega2.query(delta_n(params, x).sqrt());
        let local_c = if lhs <= omega_term + lhs_slack {
            0.0
        } else if omega2_term <= omega2_floor {
            inconclusive += 1;
            0.0
        } else {
            (lhs - omega_term) / omega2_term
        };
        sup_lhs = sup_lhs.max(lhs);
        minimal_c = minimal_c.max(local_c);
        points.push(BoundPoint { x, lhs, omega2_term, omega_term, local_c });
    }
    Ok(BoundReport {
        f_name: f.name().to_string(),
        n: params.n(),
        beta: params.beta(),
        interval: (grid.a(), grid.b()),
        points,
        sup_lhs,
        omega_term,
        minimal_c,
        inconclusive,
    })
}

/// `|μ_{n,r}|` against `n` with the fitted log-log slope.
#[derive(Debug, Clone, Serialize)]
pub struct OrderRow {
    pub n: u32,
    pub mu_abs: f64,
}

/// Decay-order study of the central moments.
#[derive(Debug, Clone, Serialize)]
pub struct OrderReport {
    pub r: u32,
    pub beta: f64,
    pub x: f64,
    pub rows: Vec<OrderRow>,
    pub slope: f64,
    /// `−⌊(r+1)/2⌋ + 0.15`
    pub threshold: f64,
    pub pass: bool,
    /// Some moments sat at the truncation noise floor; the fit is
    /// untrustworthy there.
    pub noise_flagged: bool,
}

/// Fit the decay order of `|μ_{n,r}(x)|` over an `n` ladder and compare to
/// the expected `O(n^{−⌊(r+1)/2⌋})`.
pub fn order_check(
    r: u32,
    beta: f64,
    x: f64,
    n_list: &[u32],
    policy: &TruncationPolicy,
) -> Result<OrderReport> {
    if n_list.len() < 2 {
        return Err(Error::Domain("order_check needs at least two n values".into()));
    }
    if !(x > 0.0) {
        return Err(Error::Domain("order_check needs x > 0".into()));
    }
    let mut sorted = n_list.to_vec();
    sorted.sort_unstable();
    let mut rows = Vec::with_capacity(sorted.len());
    let mut noise_flagged = false;
    for &n in &sorted {
        let params = OperatorParams::new(n, beta)?;
        let mu = central_moment_series(&params, r, x, policy)?;
        if mu.value.abs() < mu.error_bound.max(1e-13) {
            noise_flagged = true;
        }
        rows.push(OrderRow { n, mu_abs: mu.value.abs() });
    }
    // least-squares slope of ln|μ| against ln n
    let pts: Vec<(f64, f64)> =
        rows.iter().map(|row| ((row.n as f64).ln(), row.mu_abs.max(1e-300).ln())).collect();
    let len = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let threshold = -(r.div_ceil(2) as f64) + 0.15;
    Ok(OrderReport {
        r,
        beta,
        x,
        rows,
        slope,
        threshold,
        pass: slope <= threshold && !noise_flagged,
        noise_flagged,
    })
}
