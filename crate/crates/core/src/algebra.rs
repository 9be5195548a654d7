//! The abstract valuation algebra.
//!
//! An instance fixes what a valuation over a variable set looks like and
//! provides combination, single-variable deletion and identities. Removal
//! is an optional capability: instances without it report
//! [`Error::RemovalUnsupported`].

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::variable::{Frames, VarId, VarSet};

/// Default tolerance for comparing floating valuations.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub trait ValuationAlgebra {
    type Value: Clone + PartialEq + fmt::Debug;

    fn name(&self) -> &'static str;

    fn frames(&self) -> &Frames;

    fn scope<'v>(&self, value: &'v Self::Value) -> &'v VarSet;

    /// Raw table entries of a valuation, in the instance's index order.
    fn entries<'v>(&self, value: &'v Self::Value) -> &'v [f64];

    fn combine(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;

    /// Marginalizes `var` out of `value`.
    fn delete_variable(&self, value: &Self::Value, var: VarId) -> Result<Self::Value>;

    /// Marginalizes onto `target` by deleting the other variables one at a
    /// time in ascending id order.
    fn marginalize(&self, value: &Self::Value, target: &VarSet) -> Result<Self::Value> {
        let scope = self.scope(value);
        if !target.is_subset(scope) {
            return Err(Error::NotSubset {
                target: self.frames().show(target),
                scope: self.frames().show(scope),
            });
        }
        let mut out = value.clone();
        for var in scope.difference(target).iter() {
            out = self.delete_variable(&out, var)?;
        }
        Ok(out)
    }

    fn identity(&self, scope: &VarSet) -> Result<Self::Value>;

    fn zero(&self, scope: &VarSet) -> Result<Self::Value>;

    fn is_zero(&self, value: &Self::Value) -> bool;

    fn is_normal(&self, value: &Self::Value) -> bool;

    /// Membership in the positive normal class; instance-specific.
    fn is_positive_normal(&self, value: &Self::Value) -> bool;

    fn supports_removal(&self) -> bool {
        false
    }

    /// `a Ⓡ b`, defined for normal or zero `b`.
    fn remove(&self, _a: &Self::Value, _b: &Self::Value) -> Result<Self::Value> {
        Err(Error::RemovalUnsupported {
            instance: self.name(),
        })
    }

    /// Pseudo-inverse `ι_∅ Ⓡ b`.
    fn inverse(&self, b: &Self::Value) -> Result<Self::Value> {
        let unit = self.identity(&VarSet::empty())?;
        self.remove(&unit, b)
    }

    /// Per-configuration values over Θ(scope), for instances where a
    /// valuation assigns a number to each configuration.
    fn configuration_values<'v>(&self, _value: &'v Self::Value) -> Result<&'v [f64]> {
        Err(Error::ScalarUnsupported {
            instance: self.name(),
        })
    }

    /// Vacuous extension of `value` to `scope ⊇ scope(value)`.
    fn extend(&self, value: &Self::Value, scope: &VarSet) -> Result<Self::Value> {
        if self.scope(value) == scope {
            return Ok(value.clone());
        }
        self.combine(value, &self.identity(scope)?)
    }

    /// Largest absolute entry difference after extending both operands to
    /// the union of their scopes.
    fn max_deviation(&self, a: &Self::Value, b: &Self::Value) -> Result<f64> {
        let union = self.scope(a).union(self.scope(b));
        let ea = self.extend(a, &union)?;
        let eb = self.extend(b, &union)?;
        let (ta, tb) = (self.entries(&ea), self.entries(&eb));
        if ta.len() != tb.len() {
            return Ok(f64::INFINITY);
        }
        Ok(ta
            .iter()
            .zip(tb)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    fn approx_eq(&self, a: &Self::Value, b: &Self::Value, tolerance: f64) -> bool {
        self.max_deviation(a, b).is_ok_and(|d| d <= tolerance)
    }

    /// Combines a sequence of valuations; the empty product is `ι_∅`.
    fn combine_all<'a, I>(&self, values: I) -> Result<Self::Value>
    where
        I: IntoIterator<Item = &'a Self::Value>,
        Self::Value: 'a,
    {
        let mut iter = values.into_iter();
        let Some(first) = iter.next() else {
            return self.identity(&VarSet::empty());
        };
        iter.try_fold(first.clone(), |acc, v| self.combine(&acc, v))
    }
}

/// Operation tallies recorded by [`Counting`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub combinations: usize,
    pub marginalizations: usize,
    pub removals: usize,
}

impl std::ops::Sub for OpCounts {
    type Output = OpCounts;

    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts {
            combinations: self.combinations - rhs.combinations,
            marginalizations: self.marginalizations - rhs.marginalizations,
            removals: self.removals - rhs.removals,
        }
    }
}

/// Wraps an instance and counts combination, marginalization and removal
/// calls. Identity extensions made while comparing are not counted.
pub struct Counting<'a, A> {
    inner: &'a A,
    combinations: AtomicUsize,
    marginalizations: AtomicUsize,
    removals: AtomicUsize,
}

impl<'a, A: ValuationAlgebra> Counting<'a, A> {
    pub fn new(inner: &'a A) -> Self {
        Self {
            inner,
            combinations: AtomicUsize::new(0),
            marginalizations: AtomicUsize::new(0),
            removals: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> OpCounts {
        OpCounts {
            combinations: self.combinations.load(Ordering::Relaxed),
            marginalizations: self.marginalizations.load(Ordering::Relaxed),
            removals: self.removals.load(Ordering::Relaxed),
        }
    }

    pub fn inner(&self) -> &A {
        self.inner
    }
}

impl<A: ValuationAlgebra> ValuationAlgebra for Counting<'_, A> {
    type Value = A::Value;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn frames(&self) -> &Frames {
        self.inner.frames()
    }

    fn scope<'v>(&self, value: &'v Self::Value) -> &'v VarSet {
        self.inner.scope(value)
    }

    fn entries<'v>(&self, value: &'v Self::Value) -> &'v [f64] {
        self.inner.entries(value)
    }

    fn combine(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value> {
        self.combinations.fetch_add(1, Ordering::Relaxed);
        self.inner.combine(a, b)
    }

    fn delete_variable(&self, value: &Self::Value, var: VarId) -> Result<Self::Value> {
        self.marginalizations.fetch_add(1, Ordering::Relaxed);
        self.inner.delete_variable(value, var)
    }

    fn marginalize(&self, value: &Self::Value, target: &VarSet) -> Result<Self::Value> {
        if self.inner.scope(value) != target {
            self.marginalizations.fetch_add(1, Ordering::Relaxed);
        }
        self.inner.marginalize(value, target)
    }

    fn identity(&self, scope: &VarSet) -> Result<Self::Value> {
        self.inner.identity(scope)
    }

    fn zero(&self, scope: &VarSet) -> Result<Self::Value> {
        self.inner.zero(scope)
    }

    fn is_zero(&self, value: &Self::Value) -> bool {
        self.inner.is_zero(value)
    }

    fn is_normal(&self, value: &Self::Value) -> bool {
        self.inner.is_normal(value)
    }

    fn is_positive_normal(&self, value: &Self::Value) -> bool {
        self.inner.is_positive_normal(value)
    }

    fn supports_removal(&self) -> bool {
        self.inner.supports_removal()
    }

    fn remove(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value> {
        self.removals.fetch_add(1, Ordering::Relaxed);
        self.inner.remove(a, b)
    }

    fn inverse(&self, b: &Self::Value) -> Result<Self::Value> {
        self.removals.fetch_add(1, Ordering::Relaxed);
        self.inner.inverse(b)
    }

    fn configuration_values<'v>(&self, value: &'v Self::Value) -> Result<&'v [f64]> {
        self.inner.configuration_values(value)
    }

    fn extend(&self, value: &Self::Value, scope: &VarSet) -> Result<Self::Value> {
        self.inner.extend(value, scope)
    }

    fn max_deviation(&self, a: &Self::Value, b: &Self::Value) -> Result<f64> {
        self.inner.max_deviation(a, b)
    }
}
