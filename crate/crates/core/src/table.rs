//! Dense tables over Θ(scope), shared by the configuration-indexed instances.

use crate::error::{Error, Result};
use crate::variable::{config_count, projection_map, Frames, VarId, VarSet};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTable {
    scope: VarSet,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl DenseTable {
    pub fn new(frames: &Frames, scope: VarSet, values: Vec<f64>) -> Result<Self> {
        let cards = frames.cards(&scope)?;
        Self::from_parts(scope, cards, values)
    }

    pub(crate) fn from_parts(scope: VarSet, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let expected = config_count(&cards);
        if values.len() != expected {
            return Err(Error::TableLength {
                expected,
                found: values.len(),
            });
        }
        check_entries(&values)?;
        Ok(Self {
            scope,
            cards,
            values,
        })
    }

    pub fn constant(frames: &Frames, scope: &VarSet, value: f64) -> Result<Self> {
        let cards = frames.cards(scope)?;
        let n = config_count(&cards);
        Ok(Self {
            scope: scope.clone(),
            cards,
            values: vec![value; n],
        })
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            values: self.values.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Pointwise `op` over the union scope.
    pub(crate) fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (scope, cards) = union_cards(&self.scope, &self.cards, &other.scope, &other.cards)?;
        let left = projection_map(&scope, &cards, &self.scope);
        let right = projection_map(&scope, &cards, &other.scope);
        let values = left
            .iter()
            .zip(&right)
            .map(|(&i, &j)| op(self.values[i], other.values[j]))
            .collect();
        Ok(Self {
            scope,
            cards,
            values,
        })
    }

    /// Folds out every variable outside `target` with `op`, starting from `init`.
    pub(crate) fn fold_onto(&self, target: &VarSet, init: f64, op: impl Fn(f64, f64) -> f64) -> Self {
        let cards: Vec<usize> = target
            .iter()
            .map(|v| self.cards[self.scope.position(v).expect("target within scope")])
            .collect();
        let mut values = vec![init; config_count(&cards)];
        let map = projection_map(&self.scope, &self.cards, target);
        for (&j, &x) in map.iter().zip(&self.values) {
            values[j] = op(values[j], x);
        }
        Self {
            scope: target.clone(),
            cards,
            values,
        }
    }

    pub(crate) fn without(&self, var: VarId) -> VarSet {
        let mut s = self.scope.clone();
        s.remove(var);
        s
    }

    pub(crate) fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn check_entries(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidEntry { index, value });
        }
    }
    Ok(())
}

/// Union of two scopes together with the frame sizes of the union,
/// checking that shared variables agree.
pub(crate) fn union_cards(
    a: &VarSet,
    a_cards: &[usize],
    b: &VarSet,
    b_cards: &[usize],
) -> Result<(VarSet, Vec<usize>)> {
    let scope = a.union(b);
    let mut cards = Vec::with_capacity(scope.len());
    for v in scope.iter() {
        let ca = a.position(v).map(|p| a_cards[p]);
        let cb = b.position(v).map(|p| b_cards[p]);
        let c = match (ca, cb) {
            (Some(x), Some(y)) if x != y => {
                return Err(Error::CardinalityMismatch {
                    var: v.index(),
                    left: x,
                    right: y,
                })
            }
            (Some(x), _) | (None, Some(x)) => x,
            (None, None) => unreachable!("variable from the union"),
        };
        cards.push(c);
    }
    Ok((scope, cards))
}

/// Reciprocal with `0 ↦ 0`.
pub(crate) fn pseudo_reciprocal(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0 / x
    }
}
