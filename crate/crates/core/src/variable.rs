//! Variables, frames, variable sets and configurations.
//!
//! Tables throughout the crate are laid out in lexicographic configuration
//! order over the variables of a [`VarSet`] in ascending id order, with the
//! last variable varying fastest.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a variable within its [`Frames`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A named variable with its frame of possible values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    id: VarId,
    name: String,
    frame: Vec<String>,
}

impl Variable {
    pub fn id(&self) -> VarId {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn card(&self) -> usize {
        self.frame.len()
    }

    pub fn value_index(&self, label: &str) -> Option<usize> {
        self.frame.iter().position(|v| v == label)
    }
}

/// The variables of a model. Ids are dense indices in declaration order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frames {
    vars: Vec<Variable>,
    by_name: HashMap<String, VarId>,
}

impl Frames {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds frames where every variable is binary with values `false`/`true`.
    pub fn binary<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut frames = Self::new();
        for name in names {
            frames.add(name.as_ref(), ["false", "true"])?;
        }
        Ok(frames)
    }

    pub fn add<I, S>(&mut self, name: &str, frame: I) -> Result<VarId>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateVariable(name.to_string()));
        }
        let frame: Vec<String> = frame.into_iter().map(Into::into).collect();
        if frame.is_empty() {
            return Err(Error::InvalidFrame {
                var: name.to_string(),
                reason: "frame is empty".into(),
            });
        }
        for (i, v) in frame.iter().enumerate() {
            if frame[..i].contains(v) {
                return Err(Error::InvalidFrame {
                    var: name.to_string(),
                    reason: format!("duplicate value `{v}`"),
                });
            }
        }
        let id = VarId(self.vars.len());
        self.vars.push(Variable {
            id,
            name: name.to_string(),
            frame,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn get(&self, id: VarId) -> Result<&Variable> {
        self.vars.get(id.0).ok_or(Error::UnknownVariableId(id.0))
    }

    pub fn lookup(&self, name: &str) -> Result<VarId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn card(&self, id: VarId) -> Result<usize> {
        self.get(id).map(Variable::card)
    }

    pub fn cards(&self, scope: &VarSet) -> Result<Vec<usize>> {
        scope.iter().map(|v| self.card(v)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter()
    }

    pub fn all(&self) -> VarSet {
        VarSet::from_sorted((0..self.vars.len()).map(VarId).collect())
    }

    pub fn name(&self, id: VarId) -> String {
        self.get(id)
            .map(|v| v.name.clone())
            .unwrap_or_else(|_| id.to_string())
    }

    /// Renders a variable set with names, e.g. `{X1, X7}`.
    pub fn show(&self, set: &VarSet) -> String {
        let names: Vec<String> = set.iter().map(|v| self.name(v)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// A set of variables kept in ascending id order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(v: VarId) -> Self {
        Self(vec![v])
    }

    fn from_sorted(v: Vec<VarId>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = VarId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: VarId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VarSet(out)
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn insert(&mut self, v: VarId) {
        if let Err(pos) = self.0.binary_search(&v) {
            self.0.insert(pos, v);
        }
    }

    pub fn remove(&mut self, v: VarId) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VarSet(v)
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = VarId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, VarId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", v.0)?;
        }
        f.write_str("}")
    }
}

/// An assignment of one frame-value index to each variable of a scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    scope: VarSet,
    values: Vec<usize>,
}

impl Configuration {
    pub fn new(scope: VarSet, values: Vec<usize>, cards: &[usize]) -> Result<Self> {
        if values.len() != scope.len() || cards.len() != scope.len() {
            return Err(Error::TableLength {
                expected: scope.len(),
                found: values.len(),
            });
        }
        for (i, (&x, &c)) in values.iter().zip(cards).enumerate() {
            if x >= c {
                return Err(Error::InvalidEntry {
                    index: i,
                    value: x as f64,
                });
            }
        }
        Ok(Self { scope, values })
    }

    /// Decodes the configuration at `index` in table order.
    pub fn from_index(scope: &VarSet, cards: &[usize], mut index: usize) -> Self {
        let mut values = vec![0; cards.len()];
        for (slot, &c) in values.iter_mut().zip(cards).rev() {
            *slot = index % c;
            index /= c;
        }
        Self {
            scope: scope.clone(),
            values,
        }
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value_of(&self, v: VarId) -> Option<usize> {
        self.scope.position(v).map(|p| self.values[p])
    }

    /// Drops the variables outside `target`.
    pub fn project(&self, target: &VarSet) -> Configuration {
        let mut scope = Vec::new();
        let mut values = Vec::new();
        for (v, &x) in self.scope.iter().zip(&self.values) {
            if target.contains(v) {
                scope.push(v);
                values.push(x);
            }
        }
        Configuration {
            scope: VarSet(scope),
            values,
        }
    }

    /// Position of this configuration in table order.
    pub fn index(&self, cards: &[usize]) -> usize {
        self.values
            .iter()
            .zip(cards)
            .fold(0, |acc, (&x, &c)| acc * c + x)
    }
}

/// Number of configurations of a scope with the given frame sizes.
pub fn config_count(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// For every configuration of `scope` (in table order), the index of its
/// projection onto `sub` within a table over `sub`.
///
/// Variables of `sub` missing from `scope` are treated as fixed at zero,
/// which callers avoid by requiring `sub ⊆ scope`.
pub fn projection_map(scope: &VarSet, cards: &[usize], sub: &VarSet) -> Vec<usize> {
    let total = config_count(cards);
    let mut sub_strides = vec![0usize; scope.len()];
    let mut stride = 1;
    for v in sub.iter().rev() {
        if let Some(p) = scope.position(v) {
            sub_strides[p] = stride;
            stride *= cards[p];
        }
    }
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; scope.len()];
    let mut sub_index = 0usize;
    for _ in 0..total {
        out.push(sub_index);
        for p in (0..digits.len()).rev() {
            digits[p] += 1;
            sub_index += sub_strides[p];
            if digits[p] < cards[p] {
                break;
            }
            sub_index -= sub_strides[p] * cards[p];
            digits[p] = 0;
        }
    }
    out
}
