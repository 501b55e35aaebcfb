//! Command-line front end for the Jain / Jain-Durrmeyer operator library:
//! basis tables, moment ratios by selectable routes, closed-form
//! discrepancy sweeps, operator evaluation on user functions, and the
//! convergence experiments.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use jain_durrmeyer::analysis::{bound_check, korovkin_check, order_check, voronovskaja, Grid};
use jain_durrmeyer::forms::{
    discrepancy_sweep, ClosedFormFamily, ClosedFormId, DiscrepancyReport, SweepPoint, SweepSpec,
};
use jain_durrmeyer::kernel::{format_fraction, parse_fraction};
use jain_durrmeyer::moments::{basis_raw_moment, p_exact, p_recurrence, MomentValue};
use jain_durrmeyer::operators::{auxiliary_apply, durrmeyer_apply, jain_apply};
use jain_durrmeyer::{
    basis_log_value, basis_mass, basis_value, truncation_index, Error, FunctionSpec,
    MomentMethod, OperatorParams, QuadratureConfig, TruncationPolicy,
};

use output::{Cell, CommandOutput, Format, Meta};

#[derive(Debug, Parser)]
#[command(name = "jaindur", version, about = "Jain and Jain-Durrmeyer operator toolbox")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Operator index n ≥ 1.
    #[arg(long)]
    n: u32,
    /// Shape parameter β in [0, 1): decimal ("0.5") or exact fraction ("1/2").
    #[arg(long)]
    beta: String,
}

impl ParamArgs {
    fn params(&self) -> Result<OperatorParams, Error> {
        build_params(self.n, &self.beta)
    }
}

fn build_params(n: u32, beta: &str) -> Result<OperatorParams, Error> {
    if beta.contains('/') || !beta.contains('.') {
        // fraction literal (or bare integer): exact mode
        OperatorParams::with_exact_beta(n, parse_fraction(beta)?)
    } else {
        let value: f64 = beta
            .parse()
            .map_err(|_| Error::Domain(format!("cannot parse β from {beta:?}")))?;
        OperatorParams::new(n, value)
    }
}

#[derive(Debug, Args)]
struct PolicyArgs {
    /// Residual basis-mass tolerance for series truncation.
    #[arg(long, default_value_t = 1e-12)]
    mass_tol: f64,
    /// Absolute cap on the summation index.
    #[arg(long, default_value_t = 1_000_000)]
    hard_cap: u64,
}

impl PolicyArgs {
    fn policy(&self) -> Result<TruncationPolicy, Error> {
        TruncationPolicy::new(self.mass_tol, self.hard_cap)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Basis values and cumulative mass at one evaluation point.
    Basis {
        #[command(flatten)]
        params: ParamArgs,
        /// Evaluation point x ≥ 0.
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Moment ratios P_r(k; β) by the selected route.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        /// Summation index k.
        #[arg(long)]
        k: u64,
        /// Moment order r.
        #[arg(long)]
        r: u32,
        /// Route: stirling-sum, recurrence or quadrature.
        #[arg(long, default_value = "stirling-sum")]
        method: String,
        /// Require exact rational output (β must be a fraction literal).
        #[arg(long)]
        exact: bool,
    },
    /// Closed-form tables vs the exact engine over a sweep.
    PaperCheck {
        /// Family: all, jain, s, p, t, mu or t-recur.
        #[arg(long, default_value = "all")]
        family: String,
        /// Restrict to one order r (default: every printed order).
        #[arg(long)]
        r: Option<u32>,
        /// Override the default n list.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        /// Override the default β list.
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        /// Override the default x list.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        /// Override the default k list.
        #[arg(long, value_delimiter = ',')]
        k: Option<Vec<u64>>,
    },
    /// Apply an operator to a function over one point or an x grid.
    Eval {
        #[command(flatten)]
        params: ParamArgs,
        /// Function: builtin name (e0..e5, exp_decay, sin_bounded, abs_kink,
        /// step_smooth) or an expression in t.
        #[arg(long)]
        f: String,
        /// Operator: jain, durrmeyer or auxiliary.
        #[arg(long, default_value = "durrmeyer")]
        operator: String,
        /// Single evaluation point.
        #[arg(long, conflicts_with = "x_grid")]
        x: Option<f64>,
        /// Grid "a:b:step".
        #[arg(long)]
        x_grid: Option<String>,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// First-order asymptotic (scaled-error) experiment.
    Voronovskaja {
        /// Shape parameter β in [0, 1).
        #[arg(long)]
        beta: f64,
        /// Function under test.
        #[arg(long)]
        f: String,
        /// Evaluation point x > 0.
        #[arg(long)]
        x: f64,
        /// Operator index ladder, e.g. 20,40,80,160,320.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u32>,
    },
    /// Sup-norm distances of D(e_j) from x^j on a compact interval.
    Korovkin {
        /// Shape parameter β in [0, 1).
        #[arg(long)]
        beta: f64,
        /// Interval "a:b".
        #[arg(long)]
        interval: String,
        /// Grid step on the interval.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Operator index ladder.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u32>,
        /// Distance tolerances for e0, e1, e2 at the largest n
        /// (default: scaled from the closed-form leading terms).
        #[arg(long, value_delimiter = ',')]
        tol: Option<Vec<f64>>,
    },
    /// Direct-estimate inequality with measured minimal constant.
    BoundCheck {
        #[command(flatten)]
        params: ParamArgs,
        /// Function under test.
        #[arg(long)]
        f: String,
        /// Interval "a:b".
        #[arg(long, default_value = "0:4")]
        interval: String,
        /// Evaluation grid step.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Central-moment decay order against the operator index.
    OrderCheck {
        /// Shape parameter β in [0, 1).
        #[arg(long)]
        beta: f64,
        /// Central-moment order r.
        #[arg(long)]
        r: u32,
        /// Evaluation point x > 0.
        #[arg(long)]
        x: f64,
        /// Operator index ladder.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match Format::from_str(&cli.format) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let started = Instant::now();
    match run(&cli.command) {
        Ok(out) => {
            if let Err(e) = out.write(format, cli.out.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            // timing stays out of the artifact so identical configurations
            // yield byte-identical files
            eprintln!("completed in {:.3}s", started.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e @ Error::Saturated { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn meta(command: &str, config: serde_json::Value) -> Meta {
    Meta {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION"),
        config,
        partial: None,
    }
}

fn run(command: &Command) -> Result<CommandOutput, Error> {
    match command {
        Command::Basis { params, x, policy } => basis_cmd(params, *x, policy),
        Command::Moments { params, k, r, method, exact } => {
            moments_cmd(params, *k, *r, method, *exact)
        }
        Command::PaperCheck { family, r, n, beta, x, k } => {
            paper_check_cmd(family, *r, n.clone(), beta.clone(), x.clone(), k.clone())
        }
        Command::Eval { params, f, operator, x, x_grid, policy } => {
            eval_cmd(params, f, operator, *x, x_grid.as_deref(), policy)
        }
        Command::Voronovskaja { beta, f, x, n_list } => voronovskaja_cmd(*beta, f, *x, n_list),
        Command::Korovkin { beta, interval, step, n_list, tol } => {
            korovkin_cmd(*beta, interval, *step, n_list, tol.clone())
        }
        Command::BoundCheck { params, f, interval, step } => {
            bound_check_cmd(params, f, interval, *step)
        }
        Command::OrderCheck { beta, r, x, n_list } => order_check_cmd(*beta, *r, *x, n_list),
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return Err(Error::Domain(format!("expected \"a:b\", got {text:?}")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Domain(format!("bad interval start {:?}", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Domain(format!("bad interval end {:?}", parts[1])))?;
    Ok((a, b))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Domain(format!("expected \"a:b:step\", got {text:?}")));
    }
    let a: f64 =
        parts[0].parse().map_err(|_| Error::Domain(format!("bad grid start {:?}", parts[0])))?;
    let b: f64 =
        parts[1].parse().map_err(|_| Error::Domain(format!("bad grid end {:?}", parts[1])))?;
    let step: f64 =
        parts[2].parse().map_err(|_| Error::Domain(format!("bad grid step {:?}", parts[2])))?;
    // negated comparisons so NaN endpoints are rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(step > 0.0) || !(b >= a) {
        return Err(Error::Domain(format!("bad grid {text:?}")));
    }
    let count = ((b - a) / step).round() as usize;
    Ok((0..=count).map(|i| (a + i as f64 * step).min(b)).collect())
}

fn basis_cmd(args: &ParamArgs, x: f64, policy: &PolicyArgs) -> Result<CommandOutput, Error> {
    if x < 0.0 {
        return Err(Error::Domain(format!("x must be ≥ 0, got {x}")));
    }
    let params = args.params()?;
    let policy = policy.policy()?;
    let trunc = truncation_index(&params, x, &policy);
    let mut rows = Vec::with_capacity(trunc.k_max as usize + 1);
    let mut cumulative = 0.0;
    for k in 0..=trunc.k_max {
        let value = basis_value(&params, k, x);
        cumulative += value;
        rows.push(vec![
            Cell::UInt(k),
            Cell::Float(basis_log_value(&params, k, x)),
            Cell::Float(value),
            Cell::Float(cumulative),
        ]);
    }
    let mass = basis_mass(&params, x, trunc.k_max);
    Ok(CommandOutput {
        meta: meta(
            "basis",
            serde_json::json!({
                "n": args.n, "beta": args.beta, "x": x,
                "mass_tol": policy.mass_tol, "hard_cap": policy.hard_cap,
            }),
        ),
        summary: serde_json::json!({
            "k_max": trunc.k_max,
            "mass": mass,
            "saturated": trunc.saturated,
        }),
        columns: vec!["k", "log_value", "value", "cumulative_mass"],
        rows,
    })
}

fn moments_cmd(
    args: &ParamArgs,
    k: u64,
    r: u32,
    method: &str,
    exact: bool,
) -> Result<CommandOutput, Error> {
    let params = args.params()?;
    if exact && params.beta_exact().is_none() {
        return Err(Error::Domain(
            "exact mode requires β as a fraction literal (e.g. --beta 1/2)".into(),
        ));
    }
    let method: MomentMethod = method.parse()?;
    let value: MomentValue = match method {
        MomentMethod::StirlingSum => p_exact(&params, k, r)?,
        MomentMethod::Recurrence => p_recurrence(&params, k, r)?.pop().expect("r+1 values"),
        MomentMethod::Quadrature => {
            let num = basis_raw_moment(&params, k, r, MomentMethod::Quadrature)?;
            let den = basis_raw_moment(&params, k, 0, MomentMethod::Quadrature)?;
            MomentValue::from_float(
                num.value / den.value,
                (num.error_bound / den.value).abs()
                    + (den.error_bound * num.value / (den.value * den.value)).abs(),
            )
        }
    };
    if exact && value.exact.is_none() {
        return Err(Error::Unsupported(format!(
            "method {method} has no exact route for these parameters"
        )));
    }
    let fraction = value.exact.as_ref().map(format_fraction);
    let rows = vec![vec![
        Cell::UInt(args.n as u64),
        Cell::Str(args.beta.clone()),
        Cell::UInt(k),
        Cell::UInt(r as u64),
        Cell::Str(method.to_string()),
        Cell::Float(value.value),
        Cell::Float(value.error_bound),
        fraction.clone().map(Cell::Str).unwrap_or(Cell::Empty),
    ]];
    Ok(CommandOutput {
        meta: meta(
            "moments",
            serde_json::json!({
                "n": args.n, "beta": args.beta, "k": k, "r": r,
                "method": method.to_string(), "exact": exact,
            }),
        ),
        summary: serde_json::json!({
            "value": value.value,
            "error_bound": value.error_bound,
            "exact": fraction,
        }),
        columns: vec!["n", "beta", "k", "r", "method", "value", "error_bound", "exact"],
        rows,
    })
}

fn discrepancy_rows(report: &DiscrepancyReport, r: u32, rows: &mut Vec<Vec<Cell>>) {
    for row in &report.rows {
        let (k_cell, x_cell) = match row.point {
            SweepPoint::K(k) => (Cell::UInt(k), Cell::Empty),
            SweepPoint::X(x) => (Cell::Empty, Cell::Float(x)),
        };
        rows.push(vec![
            Cell::Str(report.formula.family.name().to_string()),
            Cell::UInt(r as u64),
            Cell::UInt(row.n as u64),
            Cell::Float(row.beta),
            k_cell,
            x_cell,
            Cell::Float(row.exact),
            row.exact_fraction.clone().map(Cell::Str).unwrap_or(Cell::Empty),
            Cell::Float(row.closed),
            Cell::Float(row.abs_gap),
            Cell::Float(row.rel_gap),
        ]);
    }
}

fn paper_check_cmd(
    family: &str,
    r: Option<u32>,
    n: Option<Vec<u32>>,
    beta: Option<Vec<f64>>,
    x: Option<Vec<f64>>,
    k: Option<Vec<u64>>,
) -> Result<CommandOutput, Error> {
    let mut sweep = SweepSpec::default();
    if let Some(n) = n {
        sweep.n_list = n;
    }
    if let Some(beta) = beta {
        sweep.beta_list = beta;
    }
    if let Some(x) = x {
        sweep.x_list = x;
    }
    if let Some(k) = k {
        sweep.k_list = k;
    }
    let families: Vec<ClosedFormFamily> = if family == "all" {
        vec![
            ClosedFormFamily::JainMoment,
            ClosedFormFamily::SRatio,
            ClosedFormFamily::PRatio,
            ClosedFormFamily::TMoment,
            ClosedFormFamily::CentralMoment,
            ClosedFormFamily::TRecurrence,
        ]
    } else {
        vec![family.parse()?]
    };
    let mut rows = Vec::new();
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    for fam in families {
        let orders: Vec<u32> = match r {
            Some(r) => vec![r],
            None => {
                let lo = if fam == ClosedFormFamily::TRecurrence { 1 } else { 0 };
                (lo..=fam.max_order()).collect()
            }
        };
        for order in orders {
            let id = ClosedFormId::new(fam, order)?;
            let report = discrepancy_sweep(id, &sweep)?;
            max_abs = max_abs.max(report.max_abs_gap());
            max_rel = max_rel.max(report.max_rel_gap());
            discrepancy_rows(&report, order, &mut rows);
        }
    }
    Ok(CommandOutput {
        meta: meta(
            "paper-check",
            serde_json::json!({
                "family": family, "r": r,
                "n": sweep.n_list, "beta": sweep.beta_list,
                "x": sweep.x_list, "k": sweep.k_list,
            }),
        ),
        summary: serde_json::json!({
            "rows": rows.len(),
            "max_abs_gap": max_abs,
            "max_rel_gap": max_rel,
        }),
        columns: vec![
            "family", "r", "n", "beta", "k", "x", "exact", "exact_fraction", "closed",
            "abs_gap", "rel_gap",
        ],
        rows,
    })
}

fn eval_cmd(
    args: &ParamArgs,
    f_text: &str,
    operator: &str,
    x: Option<f64>,
    x_grid: Option<&str>,
    policy: &PolicyArgs,
) -> Result<CommandOutput, Error> {
    let params = args.params()?;
    let policy = policy.policy()?;
    let quad = QuadratureConfig::default();
    let f = FunctionSpec::parse(f_text, None)?;
    let points: Vec<f64> = match (x, x_grid) {
        (Some(x), None) => vec![x],
        (None, Some(grid)) => parse_grid(grid)?,
        _ => return Err(Error::Domain("provide exactly one of --x or --x-grid".into())),
    };
    let mut rows = Vec::with_capacity(points.len());
    for &x in &points {
        if x < 0.0 {
            return Err(Error::Domain(format!("x must be ≥ 0, got {x}")));
        }
        let value = match operator {
            "jain" => jain_apply(&params, &f, x, &policy)?,
            "durrmeyer" => durrmeyer_apply(&params, &f, x, &policy, &quad)?,
            "auxiliary" => auxiliary_apply(&params, &f, x, &policy, &quad)?,
            other => {
                return Err(Error::Domain(format!(
                    "unknown operator {other:?} (expected jain, durrmeyer or auxiliary)"
                )))
            }
        };
        rows.push(vec![Cell::Float(x), Cell::Float(value)]);
    }
    Ok(CommandOutput {
        meta: meta(
            "eval",
            serde_json::json!({
                "n": args.n, "beta": args.beta, "f": f_text, "operator": operator,
                "x": x, "x_grid": x_grid,
                "mass_tol": policy.mass_tol, "hard_cap": policy.hard_cap,
            }),
        ),
        summary: serde_json::json!({ "points": rows.len() }),
        columns: vec!["x", "value"],
        rows,
    })
}

fn voronovskaja_cmd(
    beta: f64,
    f_text: &str,
    x: f64,
    n_list: &[u32],
) -> Result<CommandOutput, Error> {
    let f = FunctionSpec::parse(f_text, None)?;
    let report = voronovskaja(
        &f,
        x,
        beta,
        n_list,
        &TruncationPolicy::default(),
        &QuadratureConfig::default(),
    )?;
    let mut rows = Vec::with_capacity(report.n_list.len());
    for (i, (&n, &scaled)) in report.n_list.iter().zip(&report.scaled_errors).enumerate() {
        let richardson =
            if i == 0 { Cell::Empty } else { Cell::Float(report.richardson[i - 1]) };
        rows.push(vec![Cell::UInt(n as u64), Cell::Float(scaled), richardson]);
    }
    Ok(CommandOutput {
        meta: meta(
            "voronovskaja",
            serde_json::json!({ "beta": beta, "f": f_text, "x": x, "n_list": n_list }),
        ),
        summary: serde_json::json!({
            "extrapolated": report.extrapolated,
            "formula": report.formula,
            "gap": report.gap,
        }),
        columns: vec!["n", "scaled_error", "richardson"],
        rows,
    })
}

fn korovkin_cmd(
    beta: f64,
    interval: &str,
    step: f64,
    n_list: &[u32],
    tol: Option<Vec<f64>>,
) -> Result<CommandOutput, Error> {
    let (a, b) = parse_range(interval)?;
    let n_max = *n_list.iter().max().ok_or_else(|| Error::Domain("empty n list".into()))? as f64;
    let tolerances: [f64; 3] = match tol {
        Some(t) if t.len() == 3 => [t[0], t[1], t[2]],
        Some(_) => return Err(Error::Domain("--tol needs exactly three values".into())),
        None => {
            // 1.25 × the closed-form leading terms at the largest n
            let c = 1.0 - beta;
            [
                1e-10,
                1.25 / (n_max * c),
                1.25 * (4.0 * b / (n_max * c) + 2.0 / (n_max * n_max * c)),
            ]
        }
    };
    let report = korovkin_check(
        beta,
        (a, b),
        step,
        n_list,
        tolerances,
        &TruncationPolicy::default(),
        &QuadratureConfig::default(),
    )?;
    let rows = report
        .rows
        .iter()
        .map(|row| {
            vec![
                Cell::UInt(row.n as u64),
                Cell::Float(row.e0_dist),
                Cell::Float(row.e1_dist),
                Cell::Float(row.e2_dist),
            ]
        })
        .collect();
    Ok(CommandOutput {
        meta: meta(
            "korovkin",
            serde_json::json!({
                "beta": beta, "interval": interval, "step": step, "n_list": n_list,
                "tolerances": tolerances,
            }),
        ),
        summary: serde_json::json!({ "converged": report.converged }),
        columns: vec!["n", "e0_dist", "e1_dist", "e2_dist"],
        rows,
    })
}

fn bound_check_cmd(
    args: &ParamArgs,
    f_text: &str,
    interval: &str,
    step: f64,
) -> Result<CommandOutput, Error> {
    let params = args.params()?;
    let (a, b) = parse_range(interval)?;
    let grid = Grid::uniform(a, b, step)?;
    let f = FunctionSpec::parse(f_text, None)?;
    let report = bound_check(
        &f,
        &params,
        &grid,
        &TruncationPolicy::default(),
        &QuadratureConfig::default(),
    )?;
    let rows = report
        .points
        .iter()
        .map(|p| {
            vec![
                Cell::Float(p.x),
                Cell::Float(p.lhs),
                Cell::Float(p.omega2_term),
                Cell::Float(p.omega_term),
                Cell::Float(p.local_c),
            ]
        })
        .collect();
    Ok(CommandOutput {
        meta: meta(
            "bound-check",
            serde_json::json!({
                "n": args.n, "beta": args.beta, "f": f_text,
                "interval": interval, "step": step,
            }),
        ),
        summary: serde_json::json!({
            "sup_lhs": report.sup_lhs,
            "omega_term": report.omega_term,
            "minimal_c": report.minimal_c,
            "inconclusive": report.inconclusive,
        }),
        columns: vec!["x", "lhs", "omega2_term", "omega_term", "local_c"],
        rows,
    })
}

fn order_check_cmd(beta: f64, r: u32, x: f64, n_list: &[u32]) -> Result<CommandOutput, Error> {
    let report = order_check(r, beta, x, n_list, &TruncationPolicy::default())?;
    let rows = report
        .rows
        .iter()
        .map(|row| vec![Cell::UInt(row.n as u64), Cell::Float(row.mu_abs)])
        .collect();
    Ok(CommandOutput {
        meta: meta(
            "order-check",
            serde_json::json!({ "beta": beta, "r": r, "x": x, "n_list": n_list }),
        ),
        summary: serde_json::json!({
            "slope": report.slope,
            "threshold": report.threshold,
            "pass": report.pass,
            "noise_flagged": report.noise_flagged,
        }),
        columns: vec!["n", "mu_abs"],
        rows,
    })
}
