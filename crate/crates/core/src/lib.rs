//! Jain and Jain-Durrmeyer positive linear operators.
//!
//! The Jain operator generalizes the Szász-Mirakyan operator through a shape
//! parameter `β ∈ [0, 1)`; its basis weights form a generalized (Consul)
//! Poisson distribution. The Durrmeyer variant replaces point evaluations
//! `f(k/n)` by basis-weighted integral averages, which changes the moment
//! structure and removes the usual `β → 0` coupling needed for convergence.
//!
//! The crate is organized around three layers that deliberately do not trust
//! each other:
//!
//! * an exact moment engine ([`moments`]) that computes basis moments,
//!   moment ratios and operator moments by independent routes (finite
//!   Stirling/θ sums, a three-term recurrence, adaptive quadrature, and a
//!   Tricomi-U closed form), exactly in rational arithmetic where possible;
//! * a transcription of the published closed-form moment tables ([`forms`]),
//!   kept verbatim so that the gap between the tables and the exact engine is
//!   a measurable quantity rather than a silent correction;
//! * operator application and convergence experiments ([`operators`],
//!   [`analysis`]): Korovkin distances, Voronovskaja limits, moduli of
//!   continuity and direct-estimate bound checks.
//!
//! [`kernel`] supplies the arithmetic substrate (big rationals, unsigned
//! Stirling numbers of the first kind, rising factorials, log-gamma, the
//! integer-gap Tricomi confluent hypergeometric function), [`basis`] the
//! log-space basis evaluation and truncation control, [`quad`] adaptive
//! Gauss-Kronrod quadrature on `[0, ∞)`, and [`expr`] a small expression
//! parser for user-supplied test functions.

// validation sites use `!(x > 0.0)` so NaN inputs land on the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod basis;
mod error;
pub mod expr;
pub mod forms;
pub mod kernel;
pub mod moments;
pub mod operators;
pub mod quad;
mod sum;

pub use basis::{basis_log_value, basis_mass, basis_value, truncation_index};
pub use basis::{OperatorParams, Truncation, TruncationPolicy};
pub use error::{Error, Result};
pub use expr::{parse_expr, ExprAst, ParseError};
pub use kernel::ExactRational;
pub use moments::{MomentMethod, MomentValue};
pub use operators::{FunctionSpec, GrowthClass};
pub use quad::QuadratureConfig;
