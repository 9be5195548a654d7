//! Runtime selection of an instance, for models whose kind is only known
//! after loading.

use std::fmt;
use std::str::FromStr;

use super::{
    BooleanAlgebra, BooleanRelation, CommonalityAlgebra, CommonalityTable, ProbabilityAlgebra,
    ProbabilityPotential,
};
use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::variable::{Frames, VarId, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Probability,
    Commonality,
    Boolean,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Probability => "probability",
            InstanceKind::Commonality => "commonality",
            InstanceKind::Boolean => "boolean",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InstanceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "probability" => Ok(InstanceKind::Probability),
            "commonality" => Ok(InstanceKind::Commonality),
            "boolean" => Ok(InstanceKind::Boolean),
            other => Err(format!("unknown instance kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub enum AnyAlgebra {
    Probability(ProbabilityAlgebra),
    Commonality(CommonalityAlgebra),
    Boolean(BooleanAlgebra),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyValuation {
    Probability(ProbabilityPotential),
    Commonality(CommonalityTable),
    Boolean(BooleanRelation),
}

impl AnyValuation {
    pub fn kind(&self) -> InstanceKind {
        match self {
            AnyValuation::Probability(_) => InstanceKind::Probability,
            AnyValuation::Commonality(_) => InstanceKind::Commonality,
            AnyValuation::Boolean(_) => InstanceKind::Boolean,
        }
    }
}

impl AnyAlgebra {
    pub fn new(kind: InstanceKind, frames: Frames) -> Self {
        match kind {
            InstanceKind::Probability => AnyAlgebra::Probability(ProbabilityAlgebra::new(frames)),
            InstanceKind::Commonality => AnyAlgebra::Commonality(CommonalityAlgebra::new(frames)),
            InstanceKind::Boolean => AnyAlgebra::Boolean(BooleanAlgebra::new(frames)),
        }
    }

    pub fn kind(&self) -> InstanceKind {
        match self {
            AnyAlgebra::Probability(_) => InstanceKind::Probability,
            AnyAlgebra::Commonality(_) => InstanceKind::Commonality,
            AnyAlgebra::Boolean(_) => InstanceKind::Boolean,
        }
    }

    /// Builds a valuation of this instance from its raw table.
    pub fn valuation(&self, scope: VarSet, values: Vec<f64>) -> Result<AnyValuation> {
        Ok(match self {
            AnyAlgebra::Probability(a) => AnyValuation::Probability(a.potential(scope, values)?),
            AnyAlgebra::Commonality(a) => AnyValuation::Commonality(a.table(scope, values)?),
            AnyAlgebra::Boolean(a) => AnyValuation::Boolean(a.relation(scope, values)?),
        })
    }

    fn mismatch(&self, v: &AnyValuation) -> Error {
        Error::InstanceMismatch {
            left: self.kind().as_str(),
            right: v.kind().as_str(),
        }
    }
}

/// Dispatches a unary operation to the matching instance.
macro_rules! unary {
    ($self:expr, $v:expr, |$alg:ident, $x:ident| $body:expr) => {
        match ($self, $v) {
            (AnyAlgebra::Probability($alg), AnyValuation::Probability($x)) => Ok($body),
            (AnyAlgebra::Commonality($alg), AnyValuation::Commonality($x)) => Ok($body),
            (AnyAlgebra::Boolean($alg), AnyValuation::Boolean($x)) => Ok($body),
            (s, v) => Err(s.mismatch(v)),
        }
    };
}

/// Dispatches a binary operation, rejecting operands of different instances.
macro_rules! binary {
    ($self:expr, $a:expr, $b:expr, |$alg:ident, $x:ident, $y:ident| $body:expr) => {
        match ($self, $a, $b) {
            (AnyAlgebra::Probability($alg), AnyValuation::Probability($x), AnyValuation::Probability($y)) => {
                $body.map(AnyValuation::Probability)
            }
            (AnyAlgebra::Commonality($alg), AnyValuation::Commonality($x), AnyValuation::Commonality($y)) => {
                $body.map(AnyValuation::Commonality)
            }
            (AnyAlgebra::Boolean($alg), AnyValuation::Boolean($x), AnyValuation::Boolean($y)) => {
                $body.map(AnyValuation::Boolean)
            }
            (s, a, _) if a.kind() != s.kind() => Err(s.mismatch(a)),
            (s, _, b) => Err(s.mismatch(b)),
        }
    };
}

impl ValuationAlgebra for AnyAlgebra {
    type Value = AnyValuation;

    fn name(&self) -> &'static str {
        self.kind().as_str()
    }

    fn frames(&self) -> &Frames {
        match self {
            AnyAlgebra::Probability(a) => a.frames(),
            AnyAlgebra::Commonality(a) => a.frames(),
            AnyAlgebra::Boolean(a) => a.frames(),
        }
    }

    fn scope<'v>(&self, value: &'v AnyValuation) -> &'v VarSet {
        match value {
            AnyValuation::Probability(v) => v.scope(),
            AnyValuation::Commonality(v) => v.scope(),
            AnyValuation::Boolean(v) => v.scope(),
        }
    }

    fn entries<'v>(&self, value: &'v AnyValuation) -> &'v [f64] {
        match value {
            AnyValuation::Probability(v) => v.values(),
            AnyValuation::Commonality(v) => v.values(),
            AnyValuation::Boolean(v) => v.values(),
        }
    }

    fn combine(&self, a: &AnyValuation, b: &AnyValuation) -> Result<AnyValuation> {
        binary!(self, a, b, |alg, x, y| alg.combine(x, y))
    }

    fn delete_variable(&self, value: &AnyValuation, var: VarId) -> Result<AnyValuation> {
        match (self, value) {
            (AnyAlgebra::Probability(a), AnyValuation::Probability(x)) => {
                a.delete_variable(x, var).map(AnyValuation::Probability)
            }
            (AnyAlgebra::Commonality(a), AnyValuation::Commonality(x)) => {
                a.delete_variable(x, var).map(AnyValuation::Commonality)
            }
            (AnyAlgebra::Boolean(a), AnyValuation::Boolean(x)) => {
                a.delete_variable(x, var).map(AnyValuation::Boolean)
            }
            (s, v) => Err(s.mismatch(v)),
        }
    }

    fn marginalize(&self, value: &AnyValuation, target: &VarSet) -> Result<AnyValuation> {
        match (self, value) {
            (AnyAlgebra::Probability(a), AnyValuation::Probability(x)) => {
                a.marginalize(x, target).map(AnyValuation::Probability)
            }
            (AnyAlgebra::Commonality(a), AnyValuation::Commonality(x)) => {
                a.marginalize(x, target).map(AnyValuation::Commonality)
            }
            (AnyAlgebra::Boolean(a), AnyValuation::Boolean(x)) => {
                a.marginalize(x, target).map(AnyValuation::Boolean)
            }
            (s, v) => Err(s.mismatch(v)),
        }
    }

    fn identity(&self, scope: &VarSet) -> Result<AnyValuation> {
        Ok(match self {
            AnyAlgebra::Probability(a) => AnyValuation::Probability(a.identity(scope)?),
            AnyAlgebra::Commonality(a) => AnyValuation::Commonality(a.identity(scope)?),
            AnyAlgebra::Boolean(a) => AnyValuation::Boolean(a.identity(scope)?),
        })
    }

    fn zero(&self, scope: &VarSet) -> Result<AnyValuation> {
        Ok(match self {
            AnyAlgebra::Probability(a) => AnyValuation::Probability(a.zero(scope)?),
            AnyAlgebra::Commonality(a) => AnyValuation::Commonality(a.zero(scope)?),
            AnyAlgebra::Boolean(a) => AnyValuation::Boolean(a.zero(scope)?),
        })
    }

    fn is_zero(&self, value: &AnyValuation) -> bool {
        unary!(self, value, |a, x| a.is_zero(x)).unwrap_or(false)
    }

    fn is_normal(&self, value: &AnyValuation) -> bool {
        unary!(self, value, |a, x| a.is_normal(x)).unwrap_or(false)
    }

    fn is_positive_normal(&self, value: &AnyValuation) -> bool {
        unary!(self, value, |a, x| a.is_positive_normal(x)).unwrap_or(false)
    }

    fn supports_removal(&self) -> bool {
        match self {
            AnyAlgebra::Probability(a) => a.supports_removal(),
            AnyAlgebra::Commonality(a) => a.supports_removal(),
            AnyAlgebra::Boolean(a) => a.supports_removal(),
        }
    }

    fn remove(&self, a: &AnyValuation, b: &AnyValuation) -> Result<AnyValuation> {
        binary!(self, a, b, |alg, x, y| alg.remove(x, y))
    }

    fn configuration_values<'v>(&self, value: &'v AnyValuation) -> Result<&'v [f64]> {
        unary!(self, value, |a, x| a.configuration_values(x)?)
    }

    fn max_deviation(&self, a: &AnyValuation, b: &AnyValuation) -> Result<f64> {
        match (self, a, b) {
            (AnyAlgebra::Probability(s), AnyValuation::Probability(x), AnyValuation::Probability(y)) => {
                s.max_deviation(x, y)
            }
            (AnyAlgebra::Commonality(s), AnyValuation::Commonality(x), AnyValuation::Commonality(y)) => {
                s.max_deviation(x, y)
            }
            (AnyAlgebra::Boolean(s), AnyValuation::Boolean(x), AnyValuation::Boolean(y)) => {
                s.max_deviation(x, y)
            }
            (s, a, _) if a.kind() != s.kind() => Err(s.mismatch(a)),
            (s, _, b) => Err(s.mismatch(b)),
        }
    }
}
