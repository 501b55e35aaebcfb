//! Published closed-form moment tables, transcribed verbatim, plus the
//! machinery that measures their gap against the exact engine.
//!
//! Six families are covered: the point-evaluation operator moments
//! `B(t^r, x)` for `r ≤ 5`, the `S_r(βk)` ratio list for `r ≤ 4`, the
//! `P_r(k; β)` polynomial list for `r ≤ 5`, the operator moments
//! `T_{n,r}(x)` for `r ≤ 5`, the central moments `μ_{n,r}(x)` for `r ≤ 4`,
//! and the `T` recurrence with its `A_j^r` coefficient table.
//!
//! Nothing here is corrected or simplified: suspect coefficients stay as
//! printed, and [`discrepancy_sweep`] quantifies where they depart from the
//! exact series engine. The known departures are at small `k` (the `S`/`P`
//! lists replace truncated θ sums by full exponential series) and in the
//! `μ_4` middle term (off by one power of `1−β` against the binomial
//! expansion of the `T` table).

use serde::Serialize;

use crate::basis::{OperatorParams, TruncationPolicy};
use crate::error::{Error, Result};
use crate::moments::{central_moment_series, p_exact, s_ratio_exact, t_series, MomentValue};

/// The six closed-form families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormFamily {
    /// Point-evaluation operator moments `B(t^r, x)`.
    JainMoment,
    /// `S_r(βk)` ratio list.
    SRatio,
    /// `P_r(k; β)` polynomial list.
    PRatio,
    /// Integral operator moments `T_{n,r}(x)`.
    TMoment,
    /// Central moments `μ_{n,r}(x)`.
    CentralMoment,
    /// `T` recurrence assembled from the `A_j^r` table.
    TRecurrence,
}

impl ClosedFormFamily {
    /// Largest `r` printed for this family.
    pub fn max_order(self) -> u32 {
        match self {
            ClosedFormFamily::JainMoment => 5,
            ClosedFormFamily::SRatio => 4,
            ClosedFormFamily::PRatio => 5,
            ClosedFormFamily::TMoment => 5,
            ClosedFormFamily::CentralMoment => 4,
            ClosedFormFamily::TRecurrence => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormFamily::JainMoment => "jain",
            ClosedFormFamily::SRatio => "s",
            ClosedFormFamily::PRatio => "p",
            ClosedFormFamily::TMoment => "t",
            ClosedFormFamily::CentralMoment => "mu",
            ClosedFormFamily::TRecurrence => "t-recur",
        }
    }
}

impl std::str::FromStr for ClosedFormFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "jain" | "b" => ClosedFormFamily::JainMoment,
            "s" => ClosedFormFamily::SRatio,
            "p" => ClosedFormFamily::PRatio,
            "t" => ClosedFormFamily::TMoment,
            "mu" => ClosedFormFamily::CentralMoment,
            "t-recur" | "t_recur" => ClosedFormFamily::TRecurrence,
            other => {
                return Err(Error::Domain(format!(
                    "unknown closed-form family {other:?} (expected jain, s, p, t, mu or t-recur)"
                )))
            }
        })
    }
}

/// A closed form identified by family and order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedFormId {
    pub family: ClosedFormFamily,
    pub order: u32,
}

impl ClosedFormId {
    pub fn new(family: ClosedFormFamily, order: u32) -> Result<Self> {
        if order > family.max_order() {
            return Err(Error::Unsupported(format!(
                "family {} is printed only up to order {}, got {order}",
                family.name(),
                family.max_order()
            )));
        }
        if family == ClosedFormFamily::TRecurrence && order == 0 {
            return Err(Error::Unsupported(
                "the T recurrence starts at order 1 (order 0 is the seed)".into(),
            ));
        }
        Ok(ClosedFormId { family, order })
    }
}

fn check_order(family: ClosedFormFamily, r: u32) -> Result<()> {
    ClosedFormId::new(family, r).map(|_| ())
}

/// Point-evaluation operator moment `B(t^r, x)`, `r ≤ 5`.
pub fn jain_moment_closed(params: &OperatorParams, r: u32, x: f64) -> Result<f64> {
    check_order(ClosedFormFamily::JainMoment, r)?;
    let n = params.n() as f64;
    let c = 1.0 - params.beta();
    let b = params.beta();
    Ok(match r {
        0 => 1.0,
        1 => x / c,
        2 => x * x / (c * c) + x / (n * c.powi(3)),
        3 => {
            x.powi(3) / c.powi(3)
                + 3.0 * x * x / (n * c.powi(4))
                + (1.0 + 2.0 * b) * x / (n * n * c.powi(5))
        }
        4 => {
            x.powi(4) / c.powi(4)
                + 6.0 * x.powi(3) / (n * c.powi(5))
                + (7.0 + 8.0 * b) * x * x / (n * n * c.powi(6))
                + (6.0 * b * b + 8.0 * b + 1.0) * x / (n.powi(3) * c.powi(7))
        }
        5 => {
            x.powi(5) / c.powi(5)
                + 10.0 * x.powi(4) / (n * c.powi(6))
                + 5.0 * (4.0 * b + 5.0) * x.powi(3) / (n * n * c.powi(7))
                + 15.0 * (2.0 * b * b + 4.0 * b + 1.0) * x * x / (n.powi(3) * c.powi(8))
                + (24.0 * b.powi(3) + 58.0 * b * b + 22.0 * b + 1.0) * x
                    / (n.powi(4) * c.powi(9))
        }
        _ => unreachable!(),
    })
}

/// Point-evaluation operator moment by direct series summation
/// `Σ_k L_{n,k}(x) (k/n)^r` — the oracle the closed list is checked against.
pub fn jain_moment_series(
    params: &OperatorParams,
    r: u32,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<MomentValue> {
    if x == 0.0 {
        let v = if r == 0 { 1.0 } else { 0.0 };
        return Ok(MomentValue::from_float(v, 0.0));
    }
    let n = params.n() as f64;
    let (value, bound, _) = crate::moments::weighted_basis_series(params, x, policy, |k| {
        (k as f64 / n).powi(r as i32)
    })?;
    Ok(MomentValue::from_float(value, bound))
}

/// Printed `S_r(βk)` list, `r ≤ 4`.
pub fn s_closed(k: u64, beta: f64, r: u32) -> Result<f64> {
    check_order(ClosedFormFamily::SRatio, r)?;
    let kf = k as f64;
    let b = beta;
    let c = 1.0 - b;
    Ok(match r {
        0 => 1.0,
        1 => c * kf + b / c,
        2 => c * c * kf * kf + 3.0 * b * kf - b / c,
        3 => {
            c.powi(3) * kf.powi(3) + 6.0 * b * c * kf * kf + b * (7.0 * b - 4.0) * kf / c
                + b / c
        }
        4 => {
            c.powi(4) * kf.powi(4)
                + 10.0 * b * c * c * kf.powi(3)
                + 5.0 * b * (5.0 * b - 2.0) * kf * kf
                + 5.0 * b * (1.0 - 3.0 * b) * kf / c
                - b / c
        }
        _ => unreachable!(),
    })
}

/// Printed `P_r(k; β)` list, `r ≤ 5`.
pub fn p_closed(params: &OperatorParams, k: u64, r: u32) -> Result<f64> {
    check_order(ClosedFormFamily::PRatio, r)?;
    let n = params.n() as f64;
    let kf = k as f64;
    let b = params.beta();
    let c = 1.0 - b;
    Ok(match r {
        0 => 1.0,
        1 => (c * kf + 1.0 / c) / n,
        2 => (c * c * kf * kf + 3.0 * kf + 2.0 / c) / (n * n),
        3 => {
            (c.powi(3) * kf.powi(3)
                + 6.0 * c * kf * kf
                + (11.0 - 8.0 * b) * kf / c
                + 6.0 / c)
                / n.powi(3)
        }
        4 => {
            (c.powi(4) * kf.powi(4)
                + 10.0 * c * c * kf.powi(3)
                + 5.0 * (7.0 - 4.0 * b) * kf * kf
                + 10.0 * (5.0 - 3.0 * b) * kf / c
                + 24.0 / c)
                / n.powi(4)
        }
        5 => {
            (c.powi(5) * kf.powi(5)
                + 15.0 * c.powi(3) * kf.powi(4)
                + 5.0 * c * (17.0 - 8.0 * b) * kf.powi(3)
                + 15.0 * (15.0 - 20.0 * b + 6.0 * b * b) * kf * kf / c
                + (274.0 - 144.0 * b) * kf / c
                + 120.0 / c)
                / n.powi(5)
        }
        _ => unreachable!(),
    })
}

/// Printed `T_{n,r}(x)` list, `r ≤ 5`.
pub fn t_closed(params: &OperatorParams, r: u32, x: f64) -> Result<f64> {
    check_order(ClosedFormFamily::TMoment, r)?;
    let n = params.n() as f64;
    let b = params.beta();
    let c = 1.0 - b;
    let nc = n * c;
    Ok(match r {
        0 => 1.0,
        1 => x + 1.0 / nc,
        2 => x * x + 4.0 * x / nc + 2.0 / (n * n * c),
        3 => {
            x.powi(3) + 9.0 * x * x / nc + 6.0 * (3.0 - b) * x / (nc * nc)
                + 6.0 / (n.powi(3) * c)
        }
        4 => {
            x.powi(4)
                + 16.0 * x.powi(3) / nc
                + 12.0 * (6.0 - b) * x * x / (nc * nc)
                + 12.0 * (3.0 * b * b - 6.0 * b + 8.0) * x / nc.powi(3)
                + 24.0 / (n.powi(4) * c)
        }
        5 => {
            x.powi(5)
                + 25.0 * x.powi(4) / nc
                + 20.0 * (10.0 - b) * x.powi(3) / (nc * nc)
                + 120.0 * (b * b - 2.0 * b + 5.0) * x * x / nc.powi(3)
                + 120.0 * (5.0 - 6.0 * b + 6.0 * b * b - b.powi(3)) * x / nc.powi(4)
                + 120.0 / (n.powi(5) * c)
        }
        _ => unreachable!(),
    })
}

/// Printed `μ_{n,r}(x)` central-moment list, `r ≤ 4`, transcribed verbatim.
pub fn mu_closed(params: &OperatorParams, r: u32, x: f64) -> Result<f64> {
    check_order(ClosedFormFamily::CentralMoment, r)?;
    let n = params.n() as f64;
    let b = params.beta();
    let c = 1.0 - b;
    let nc = n * c;
    Ok(match r {
        0 => 1.0,
        1 => 1.0 / nc,
        2 => 2.0 * x / nc + 2.0 / (n * n * c),
        3 => 12.0 * x / (nc * nc) + 6.0 / (n.powi(3) * c),
        4 => {
            12.0 * x * x / (nc * nc)
                + 12.0 * (6.0 - 2.0 * b + b * b) * x / (n.powi(3) * c * c)
                + 24.0 / (n.powi(4) * c)
        }
        _ => unreachable!(),
    })
}

/// The printed `A_j^r` coefficient table for the `T` recurrence,
/// `0 ≤ j ≤ r ≤ 3`, as polynomials in β.
#[derive(Debug, Clone, Copy)]
pub struct ACoefficientTable;

impl ACoefficientTable {
    /// β-polynomial coefficients of `A_j^r` (index = power of β).
    fn poly(r: u32, j: u32) -> Result<&'static [f64]> {
        const TABLE: [[&[f64]; 4]; 4] = [
            [&[1.0, 2.0], &[], &[], &[]],
            [&[4.0, 4.0], &[0.0, 2.0, 6.0], &[], &[]],
            [&[9.0, 6.0], &[0.0, 6.0, 30.0], &[0.0, 0.0, 12.0, 24.0], &[]],
            [
                &[16.0, 8.0],
                &[0.0, 12.0, 84.0],
                &[0.0, 0.0, 60.0, 96.0],
                &[0.0, 0.0, -12.0, 48.0, 120.0],
            ],
        ];
        if r > 3 || j > r {
            return Err(Error::Unsupported(format!(
                "A coefficient table covers 0 ≤ j ≤ r ≤ 3, got A_{j}^{r}"
            )));
        }
        Ok(TABLE[r as usize][j as usize])
    }

    /// Evaluate `A_j^r` at a given β.
    pub fn a_coeff(r: u32, j: u32, beta: f64) -> Result<f64> {
        let poly = Self::poly(r, j)?;
        Ok(poly.iter().rev().fold(0.0, |acc, &coef| acc * beta + coef))
    }
}

/// `T_{n,r}(x)` assembled through the printed recurrence
/// `T_r = (x + (2r−1)/(n(1−β))) T_{r−1} − Σ_j (−1)^j A_j^{r−2} /(n(1−β))^{j+2} T_{r−j−2}`
/// from the seed `T_0 = 1`; `1 ≤ r ≤ 5` (the `A` table covers `r − 2 ≤ 3`).
pub fn t_recurrence_closed(params: &OperatorParams, r: u32, x: f64) -> Result<f64> {
    check_order(ClosedFormFamily::TRecurrence, r)?;
    if r == 0 {
        return Err(Error::Unsupported("the T recurrence starts at r = 1".into()));
    }
    let n = params.n() as f64;
    let b = params.beta();
    let nc = n * (1.0 - b);
    let mut values = vec![1.0f64]; // T_0
    for q in 1..=r {
        let mut next = (x + (2.0 * q as f64 - 1.0) / nc) * values[(q - 1) as usize];
        if q >= 2 {
            for j in 0..=q - 2 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let a = ACoefficientTable::a_coeff(q - 2, j, b)?;
                next -= sign * a / nc.powi(j as i32 + 2) * values[(q - j - 2) as usize];
            }
        }
        values.push(next);
    }
    Ok(values[r as usize])
}

/// How the sweep addresses a grid point: by summation index or by evaluation
/// point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepPoint {
    K(u64),
    X(f64),
}

/// One compared grid point.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRow {
    pub n: u32,
    pub beta: f64,
    pub point: SweepPoint,
    /// Exact-engine value (float image).
    pub exact: f64,
    /// Exact value as a fraction, when the engine produced one.
    pub exact_fraction: Option<String>,
    /// Closed-form value as printed.
    pub closed: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

impl DiscrepancyRow {
    fn new(n: u32, beta: f64, point: SweepPoint, exact: &MomentValue, closed: f64) -> Self {
        let abs_gap = (exact.value - closed).abs();
        let scale = exact.value.abs().max(closed.abs());
        let rel_gap = if scale == 0.0 { 0.0 } else { abs_gap / scale };
        DiscrepancyRow {
            n,
            beta,
            point,
            exact: exact.value,
            exact_fraction: exact.exact.as_ref().map(crate::kernel::format_fraction),
            closed,
            abs_gap,
            rel_gap,
        }
    }
}

/// Exact-engine vs closed-form comparison across a sweep.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub formula: ClosedFormId,
    pub rows: Vec<DiscrepancyRow>,
}

impl DiscrepancyReport {
    pub fn max_abs_gap(&self) -> f64 {
        self.rows.iter().map(|r| r.abs_gap).fold(0.0, f64::max)
    }

    pub fn max_rel_gap(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max)
    }
}

/// Parameter grid for [`discrepancy_sweep`].
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub n_list: Vec<u32>,
    pub beta_list: Vec<f64>,
    pub x_list: Vec<f64>,
    pub k_list: Vec<u64>,
    pub policy: TruncationPolicy,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            n_list: vec![1, 5, 10, 50],
            beta_list: vec![0.0, 0.25, 0.5, 0.75],
            x_list: vec![0.0, 0.5, 1.0, 4.0],
            k_list: (0..=20).collect(),
            policy: TruncationPolicy::default(),
        }
    }
}

/// Compare one closed form against the exact engine over the sweep grid.
///
/// `S`/`P` families sweep over `k` (with `k = 0` dropped for `S`, whose θ
/// ratios are undefined there); the others sweep over `x`.
pub fn discrepancy_sweep(formula: ClosedFormId, sweep: &SweepSpec) -> Result<DiscrepancyReport> {
    let r = formula.order;
    let mut rows = Vec::new();
    for &n in &sweep.n_list {
        for &beta in &sweep.beta_list {
            let params = OperatorParams::new(n, beta)?;
            match formula.family {
                ClosedFormFamily::SRatio => {
                    for &k in sweep.k_list.iter().filter(|&&k| k >= 1) {
                        let exact = s_ratio_exact(k, &(beta * k as f64), r)?;
                        let exact = MomentValue::from_float(exact, 0.0);
                        let closed = s_closed(k, beta, r)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::K(k), &exact, closed));
                    }
                }
                ClosedFormFamily::PRatio => {
                    for &k in &sweep.k_list {
                        let exact = p_exact(&params, k, r)?;
                        let closed = p_closed(&params, k, r)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::K(k), &exact, closed));
                    }
                }
                ClosedFormFamily::JainMoment => {
                    for &x in &sweep.x_list {
                        let exact = jain_moment_series(&params, r, x, &sweep.policy)?;
                        let closed = jain_moment_closed(&params, r, x)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::X(x), &exact, closed));
                    }
                }
                ClosedFormFamily::TMoment => {
                    for &x in &sweep.x_list {
                        let exact = t_series(&params, r, x, &sweep.policy)?;
                        let closed = t_closed(&params, r, x)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::X(x), &exact, closed));
                    }
                }
                ClosedFormFamily::CentralMoment => {
                    for &x in &sweep.x_list {
                        let exact = central_moment_series(&params, r, x, &sweep.policy)?;
                        let closed = mu_closed(&params, r, x)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::X(x), &exact, closed));
                    }
                }
                ClosedFormFamily::TRecurrence => {
                    for &x in &sweep.x_list {
                        let exact = t_series(&params, r, x, &sweep.policy)?;
                        let closed = t_recurrence_closed(&params, r, x)?;
                        rows.push(DiscrepancyRow::new(n, beta, SweepPoint::X(x), &exact, closed));
                    }
                }
            }
        }
    }
    Ok(DiscrepancyReport { formula, rows })
}
