//! Numerical certification and falsification of quasiconvexity and
//! σ-strong quasiconvexity for differentiable functions on box domains.
//!
//! The crate evaluates the defining segment inequality
//!
//! ```text
//! f(λx + (1−λ)y) ≤ max{f(x), f(y)} − (σ/2)·λ(1−λ)·‖x − y‖²
//! ```
//!
//! together with its two first-order gradient counterparts as signed
//! margins, estimates the largest admissible σ, and searches adversarially
//! for witnesses that break any of the three conditions.
//!
//! Module map:
//!
//! - [`vecmath`]: pairing, norms, segment points.
//! - [`expr`]: expression language with forward-mode dual-number evaluation.
//! - [`field`]: scalar fields, gradient validation and the built-in catalog.
//! - [`conditions`]: margins, verdicts, σ* estimation and the 1-D lemma check.
//! - [`search`]: seeded sampling, falsification, the implication harness and
//!   the open-question campaign.
//! - [`cli`]: run configuration, command dispatch and JSON reports.

pub mod cli;
pub mod conditions;
pub mod error;
pub mod expr;
pub mod field;
pub mod search;
pub mod vecmath;

pub use conditions::{CheckConfig, Condition, Verdict, VerdictStatus, Witness};
pub use error::{Error, EvalError, EvalErrorKind, ParseError, ParseErrorKind, Result};
pub use expr::{Dual, Expr};
pub use field::{DomainBox, KnownStatus, ScalarField};
pub use vecmath::Norm;
