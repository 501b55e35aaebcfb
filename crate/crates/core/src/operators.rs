//! Application of the operators to user-supplied functions: the
//! point-evaluation form `Σ_k L_{n,k}(x) f(k/n)`, the Durrmeyer integral
//! form `Σ_k [⟨L_k, f⟩/⟨L_k, 1⟩] L_{n,k}(x)`, and the linear-preserving
//! auxiliary combination `D(f, x) − f(x + 1/(n(1−β))) + f(x)`.
//!
//! Admitted functions are polynomially bounded on `[0, ∞)` (bounded is the
//! special case of degree 0): moments exist for polynomial growth, and the
//! monomials needed by the moment checks would be excluded by a
//! bounded-only rule. The growth class feeds the series tail bounds and is
//! verified on a probe grid for parsed expressions.

use crate::basis::{basis_value, OperatorParams, TruncationPolicy};
use crate::error::{Error, Result};
use crate::expr::ExprAst;
use crate::moments::{basis_raw_moment, weighted_basis_series, MomentMethod};
use crate::quad::{integrate_semi_infinite, QuadratureConfig};

/// Named builtin test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Monomial `e_r(t) = t^r`, `r ≤ 5`.
    Monomial(u32),
    /// `e^{−t}`.
    ExpDecay,
    /// `sin(t)/(1+t)`.
    SinBounded,
    /// `|t − c|`.
    AbsKink { center: f64 },
    /// Logistic step `1/(1 + e^{−8(t−c)})`.
    StepSmooth { center: f64 },
}

/// Growth envelope on `[0, ∞)`: `|f(t)| ≤ C (1 + t^d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    Bounded,
    Polynomial(u32),
}

impl GrowthClass {
    fn degree(self) -> u32 {
        match self {
            GrowthClass::Bounded => 0,
            GrowthClass::Polynomial(d) => d,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum FunctionKind {
    Builtin(Builtin),
    Expression(ExprAst),
}

/// A test function: builtin or parsed expression, with its growth class.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    kind: FunctionKind,
    growth: GrowthClass,
    name: String,
}

impl FunctionSpec {
    pub fn builtin(b: Builtin) -> Self {
        let (growth, name) = match b {
            Builtin::Monomial(r) => {
                let g = if r == 0 { GrowthClass::Bounded } else { GrowthClass::Polynomial(r) };
                (g, format!("e{r}"))
            }
            Builtin::ExpDecay => (GrowthClass::Bounded, "exp_decay".to_string()),
            Builtin::SinBounded => (GrowthClass::Bounded, "sin_bounded".to_string()),
            Builtin::AbsKink { .. } => (GrowthClass::Polynomial(1), "abs_kink".to_string()),
            Builtin::StepSmooth { .. } => (GrowthClass::Bounded, "step_smooth".to_string()),
        };
        FunctionSpec { kind: FunctionKind::Builtin(b), growth, name }
    }

    pub fn monomial(r: u32) -> Self {
        Self::builtin(Builtin::Monomial(r))
    }

    /// Wrap a parsed expression with a stated growth class; the class is
    /// checked on a probe grid and rejected if the expression exceeds it.
    pub fn expression(ast: ExprAst, growth: GrowthClass) -> Result<Self> {
        let name = ast.to_text();
        let spec =
            FunctionSpec { kind: FunctionKind::Expression(ast), growth, name };
        spec.validate_growth()?;
        Ok(spec)
    }

    /// Parse a builtin name or an expression. Expressions get the stated
    /// growth class (default: polynomial of degree 8 envelope).
    pub fn parse(text: &str, growth: Option<GrowthClass>) -> Result<Self> {
        let builtin = match text {
            "e0" => Some(Builtin::Monomial(0)),
            "e1" => Some(Builtin::Monomial(1)),
            "e2" => Some(Builtin::Monomial(2)),
            "e3" => Some(Builtin::Monomial(3)),
            "e4" => Some(Builtin::Monomial(4)),
            "e5" => Some(Builtin::Monomial(5)),
            "exp_decay" => Some(Builtin::ExpDecay),
            "sin_bounded" => Some(Builtin::SinBounded),
            "abs_kink" => Some(Builtin::AbsKink { center: 1.0 }),
            "step_smooth" => Some(Builtin::StepSmooth { center: 1.0 }),
            _ => None,
        };
        match builtin {
            Some(b) => Ok(Self::builtin(b)),
            None => {
                let ast = crate::expr::parse_expr(text)?;
                Self::expression(ast, growth.unwrap_or(GrowthClass::Polynomial(8)))
            }
        }
    }

    pub fn growth(&self) -> GrowthClass {
        self.growth
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.kind {
            FunctionKind::Builtin(b) => Ok(match b {
                Builtin::Monomial(r) => t.powi(*r as i32),
                Builtin::ExpDecay => (-t).exp(),
                Builtin::SinBounded => t.sin() / (1.0 + t),
                Builtin::AbsKink { center } => (t - center).abs(),
                Builtin::StepSmooth { center } => 1.0 / (1.0 + (-8.0 * (t - center)).exp()),
            }),
            FunctionKind::Expression(ast) => ast.eval(t),
        }
    }

    /// First and second derivatives: analytic for builtins, Richardson-
    /// refined central differences (step `1e-4`) for expressions. The kink
    /// reports derivatives away from its center only.
    pub fn derivatives(&self, t: f64) -> Result<(f64, f64)> {
        match &self.kind {
            FunctionKind::Builtin(b) => match b {
                Builtin::Monomial(r) => {
                    let r = *r as i32;
                    let d1 = if r >= 1 { r as f64 * t.powi(r - 1) } else { 0.0 };
                    let d2 =
                        if r >= 2 { (r * (r - 1)) as f64 * t.powi(r - 2) } else { 0.0 };
                    Ok((d1, d2))
                }
                Builtin::ExpDecay => Ok((-(-t).exp(), (-t).exp())),
                Builtin::SinBounded => {
                    let u = 1.0 + t;
                    let d1 = t.cos() / u - t.sin() / (u * u);
                    let d2 = -t.sin() / u - 2.0 * t.cos() / (u * u) + 2.0 * t.sin() / (u * u * u);
                    Ok((d1, d2))
                }
                Builtin::AbsKink { center } => {
                    if t == *center {
                        return Err(Error::Domain(format!(
                            "|t − {center}| is not differentiable at its kink"
                        )));
                    }
                    Ok(((t - center).signum(), 0.0))
                }
                Builtin::StepSmooth { center } => {
                    let sig = 1.0 / (1.0 + (-8.0 * (t - center)).exp());
                    let d1 = 8.0 * sig * (1.0 - sig);
                    let d2 = 64.0 * sig * (1.0 - sig) * (1.0 - 2.0 * sig);
                    Ok((d1, d2))
                }
            },
            FunctionKind::Expression(_) => {
                let h = 1e-4;
                let f = |u: f64| self.eval(u);
                // five-point stencils (one Richardson refinement of the
                // central differences)
                let (fm2, fm1, f0, fp1, fp2) =
                    (f(t - 2.0 * h)?, f(t - h)?, f(t)?, f(t + h)?, f(t + 2.0 * h)?);
                let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
                let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
                Ok((d1, d2))
            }
        }
    }

    /// Verify the growth class on a probe grid: values must be finite, and
    /// the empirical log-log slope of window maxima over [8, 512] must not
    /// exceed the claimed degree. A bounded claim rejects anything that
    /// keeps growing; a degree-d claim rejects faster-than-t^d growth.
    fn validate_growth(&self) -> Result<()> {
        for i in 0..=400 {
            let t = i as f64 * 0.25;
            let v = self.eval(t)?;
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "function {:?} is not finite at t = {t}",
                    self.name
                )));
            }
        }
        // window maxima at geometric anchors dodge oscillation zeros
        let anchors = [8.0f64, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0];
        let mut maxima = Vec::with_capacity(anchors.len());
        for &a in &anchors {
            let mut m = 0.0f64;
            for j in 0..=8 {
                let t = a * (1.0 + 0.03 * j as f64);
                let v = self.eval(t)?;
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "function {:?} is not finite near t = {t}",
                        self.name
                    )));
                }
                m = m.max(v.abs());
            }
            maxima.push(m);
        }
        let d = self.growth.degree() as f64;
        let floor = 1e-9;
        for w in maxima.windows(2) {
            let (lo, hi) = (w[0].max(floor), w[1].max(floor));
            // anchors double, so admissible growth per step is 2^d (plus slack)
            if hi / lo > 2f64.powf(d + 0.5) {
                return Err(Error::Domain(format!(
                    "function {:?} exceeds its {:?} growth class \
                     (window maxima {lo:.3e} → {hi:.3e})",
                    self.name, self.growth
                )));
            }
        }
        Ok(())
    }
}

/// Point-evaluation operator `Σ_k L_{n,k}(x) f(k/n)`.
pub fn jain_apply(
    params: &OperatorParams,
    f: &FunctionSpec,
    x: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if x == 0.0 {
        return f.eval(0.0); // only k = 0 survives
    }
    let n = params.n() as f64;
    let failure = std::cell::RefCell::new(None);
    let (value, _, _) = weighted_basis_series(params, x, policy, |k| {
        match f.eval(k as f64 / n) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    })?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Normalized Durrmeyer weights `w_k = ⟨L_k, f⟩ / ⟨L_k, 1⟩` for `k ≤ k_max`.
///
/// Inner integrals run through adaptive quadrature with breakpoints at the
/// weight's mean and spread; the normalizer comes from the exact Stirling
/// route. Quadrature failures report the offending `k`.
pub fn durrmeyer_weights(
    params: &OperatorParams,
    f: &FunctionSpec,
    k_max: u64,
    quad: &QuadratureConfig,
) -> Result<Vec<f64>> {
    let n = params.n() as f64;
    let mut weights = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let norm = basis_raw_moment(params, k, 0, MomentMethod::StirlingSum)?.value;
        let mean = ((1.0 - params.beta()) * k as f64 + 1.0) / n;
        let spread = ((k as f64 + 2.0).sqrt() + 1.0) / n;
        let hints = [
            mean * 0.25,
            mean * 0.5,
            (mean - 3.0 * spread).max(mean * 0.1),
            mean,
            mean + 3.0 * spread,
            mean + 6.0 * spread,
            2.0 * mean + 1.0,
        ];
        let failure = std::cell::RefCell::new(None);
        let integral = integrate_semi_infinite(
            |t| {
                basis_value(params, k, t)
                    * match f.eval(t) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
            },
            &hints,
            quad,
        )
        .map_err(|e| match e {
            Error::QuadratureAccuracy { achieved, requested } => Error::Unsupported(format!(
                "inner integral for k = {k} did not converge \
                 (achieved {achieved:.3e}, requested {requested:.3e})"
            )),
            other => other,
        })?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        weights.push(integral.value / norm);
    }
    Ok(weights)
}

/// Durrmeyer series at `x` over precomputed weights. Terms whose basis
/// factor is below `1e−18` of the running sum are skipped.
pub fn durrmeyer_sum_with_weights(
    params: &OperatorParams,
    weights: &[f64],
    x: f64,
) -> f64 {
    let mut sum = crate::sum::CompensatedSum::new();
    for (k, w) in weights.iter().enumerate() {
        let basis = basis_value(params, k as u64, x);
        if basis * w.abs() < 1e-18 * sum.value().abs() {
            continue;
        }
        sum.add(basis * w);
    }
    sum.value()
}

/// Integral (Durrmeyer) operator `Σ_k [⟨L_k, f⟩/⟨L_k, 1⟩] L_{n,k}(x)`.
pub fn durrmeyer_apply(
    params: &OperatorParams,
    f: &FunctionSpec,
    x: f64,
    policy: &TruncationPolicy,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let trunc = crate::basis::truncation_index(params, x, policy);
    if trunc.saturated {
        return Err(Error::Saturated { cap: policy.hard_cap });
    }
    // polynomial weights push mass past the plain truncation point, same
    // margin logic as the moment series
    let k_max = trunc.k_max + (trunc.k_max / 4).clamp(16, 400);
    let weights = durrmeyer_weights(params, f, k_max, quad)?;
    Ok(durrmeyer_sum_with_weights(params, &weights, x))
}

/// Auxiliary operator `D(f, x) − f(x + 1/(n(1−β))) + f(x)`; preserves linear
/// functions.
pub fn auxiliary_apply(
    params: &OperatorParams,
    f: &FunctionSpec,
    x: f64,
    policy: &TruncationPolicy,
    quad: &QuadratureConfig,
) -> Result<f64> {
    let shift = 1.0 / (params.n() as f64 * params.one_minus_beta());
    Ok(durrmeyer_apply(params, f, x, policy, quad)? - f.eval(x + shift)? + f.eval(x)?)
}
