//! Scalar fields: evaluation, gradients, domain boxes and known
//! quasiconvexity status.

mod catalog;
mod gradcheck;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, EvalError, EvalErrorKind, Result};
use crate::expr::{self, Expr};

pub use catalog::{catalog, catalog_entries, catalog_names, entry, lookup, CatalogEntry};
pub use gradcheck::{default_step, fd_grad, validate_grad, GradReport};

/// Axis-aligned box `[lower, upper]`, the convex domain of a field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl DomainBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::usage("box bounds must be non-empty and of equal dimension"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::usage(format!("box bound {i} is not finite")));
            }
            if lo >= hi {
                return Err(Error::usage(format!("box coordinate {i}: lower {lo} must be < upper {hi}")));
            }
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^n`.
    pub fn cube(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), u)| l <= v && v <= u)
    }

    pub fn is_subset_of(&self, other: &DomainBox) -> bool {
        self.dim() == other.dim()
            && self.lower.iter().zip(&other.lower).all(|(a, b)| a >= b)
            && self.upper.iter().zip(&other.upper).all(|(a, b)| a <= b)
    }

    /// Clamps `x` into the box in place.
    pub fn project(&self, x: &mut [f64]) {
        for ((v, l), u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*l, *u);
        }
    }

    /// Shrinks each side by `margin`; errors if the box would collapse.
    pub fn inset(&self, margin: f64) -> Result<Self> {
        Self::new(self.lower.iter().map(|l| l + margin).collect(), self.upper.iter().map(|u| u - margin).collect())
    }

    /// Parses `lo:hi[,lo:hi...]`, broadcasting a single interval to `dim`
    /// coordinates.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let intervals = text
            .split(',')
            .map(|part| {
                let (lo, hi) = part
                    .split_once(':')
                    .ok_or_else(|| Error::usage(format!("box interval '{part}' must look like lo:hi")))?;
                let num =
                    |s: &str| s.trim().parse::<f64>().map_err(|_| Error::usage(format!("invalid box bound '{s}'")));
                Ok((num(lo)?, num(hi)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let intervals = match intervals.len() {
            1 => vec![intervals[0]; dim],
            n if n == dim => intervals,
            n => return Err(Error::usage(format!("box has {n} intervals but dimension is {dim}"))),
        };
        Self::new(intervals.iter().map(|p| p.0).collect(), intervals.iter().map(|p| p.1).collect())
    }
}

impl fmt::Display for DomainBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (l, u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}:{u}")?;
        }
        Ok(())
    }
}

/// What is known analytically about a field on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "sigma", rename_all = "snake_case")]
pub enum KnownStatus {
    SigmaQuasiconvex(f64),
    Quasiconvex,
    NotQuasiconvex,
    Unknown,
}

impl KnownStatus {
    /// Certified σ: the parameter for σ-quasiconvex fields, 0 for merely
    /// quasiconvex ones.
    pub fn known_sigma(self) -> Option<f64> {
        match self {
            KnownStatus::SigmaQuasiconvex(s) => Some(s),
            KnownStatus::Quasiconvex => Some(0.0),
            _ => None,
        }
    }
}

impl fmt::Display for KnownStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnownStatus::SigmaQuasiconvex(s) => write!(f, "sigma_quasiconvex({s})"),
            KnownStatus::Quasiconvex => f.write_str("quasiconvex"),
            KnownStatus::NotQuasiconvex => f.write_str("not_quasiconvex"),
            KnownStatus::Unknown => f.write_str("unknown"),
        }
    }
}

impl FromStr for KnownStatus {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quasiconvex" => Ok(Self::Quasiconvex),
            "not_quasiconvex" => Ok(Self::NotQuasiconvex),
            "unknown" => Ok(Self::Unknown),
            _ => s
                .strip_prefix("sigma_quasiconvex(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|v| *v >= 0.0)
                .map(Self::SigmaQuasiconvex)
                .ok_or_else(|| Error::usage(format!("unknown status '{s}'"))),
        }
    }
}

/// Function value and gradient. Implementations must be reentrant.
pub trait FieldFn: Send + Sync {
    fn value(&self, x: &[f64]) -> Result<f64, EvalError>;

    /// Gradient at `x`; a nondifferentiable point is an
    /// [`EvalErrorKind::Nondifferentiable`] error.
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError>;
}

struct ExprFn(Expr);

impl FieldFn for ExprFn {
    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        expr::eval_expr(&self.0, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let (_, g, nondiff) = expr::gradient(&self.0, x)?;
        if nondiff {
            return Err(EvalError::new(EvalErrorKind::Nondifferentiable, self.0.pos));
        }
        Ok(g)
    }
}

struct ClosureFn<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FieldFn for ClosureFn<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        finite((self.value)(x))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let g = (self.gradient)(x);
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(EvalError::new(EvalErrorKind::NonFinite, 0))
        }
    }
}

fn finite(v: f64) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::new(EvalErrorKind::NonFinite, 0))
    }
}

/// An evaluatable function with gradient, domain box and known status.
/// Cloning is cheap; the function itself is shared.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    domain: DomainBox,
    status: KnownStatus,
    status_everywhere: bool,
    func: Arc<dyn FieldFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("status", &self.status)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new(name: impl Into<String>, domain: DomainBox, status: KnownStatus, func: Arc<dyn FieldFn>) -> Self {
        Self { name: name.into(), domain, status, status_everywhere: false, func }
    }

    /// Field from closures; non-finite outputs become evaluation errors.
    pub fn from_fns<V, G>(
        name: impl Into<String>,
        domain: DomainBox,
        status: KnownStatus,
        value: V,
        gradient: G,
    ) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self::new(name, domain, status, Arc::new(ClosureFn { value, gradient }))
    }

    /// Field backed by an expression; the gradient is assembled from one
    /// dual-number pass per coordinate. Status is always unknown.
    pub fn from_expr(e: Expr, domain: DomainBox) -> Result<Self> {
        if e.max_var() > domain.dim() {
            return Err(Error::usage(format!(
                "expression uses x{} but the domain has dimension {}",
                e.max_var(),
                domain.dim()
            )));
        }
        if e.max_param() > 0 {
            return Err(Error::usage("expression has unbound parameters"));
        }
        Ok(Self::new(e.to_string(), domain, KnownStatus::Unknown, Arc::new(ExprFn(e))))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn status(&self) -> KnownStatus {
        self.status
    }

    pub fn known_sigma(&self) -> Option<f64> {
        self.status.known_sigma()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_status(mut self, status: KnownStatus) -> Self {
        self.status = status;
        self.status_everywhere = false;
        self
    }

    /// Marks the known status as valid on every box, not just the default.
    pub fn status_holds_everywhere(mut self) -> Self {
        self.status_everywhere = true;
        self
    }

    /// Same function on another box. Positive statuses survive shrinking the
    /// box and a negative one survives enlarging it; anything else becomes
    /// unknown.
    pub fn restricted_to(mut self, domain: DomainBox) -> Result<Self> {
        if domain.dim() != self.dim() {
            return Err(Error::usage("replacement box has a different dimension"));
        }
        let keep = self.status_everywhere
            || match self.status {
                KnownStatus::SigmaQuasiconvex(_) | KnownStatus::Quasiconvex => domain.is_subset_of(&self.domain),
                KnownStatus::NotQuasiconvex => self.domain.is_subset_of(&domain),
                KnownStatus::Unknown => true,
            };
        if !keep {
            self.status = KnownStatus::Unknown;
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn value(&self, x: &[f64]) -> Result<f64, EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::new(EvalErrorKind::DimensionMismatch, 0));
        }
        self.func.value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        if x.len() != self.dim() {
            return Err(EvalError::new(EvalErrorKind::DimensionMismatch, 0));
        }
        self.func.gradient(x)
    }
}
