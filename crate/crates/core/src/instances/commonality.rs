//! Dempster–Shafer belief functions in commonality form.
//!
//! A table over a scope with `N = |Θ(scope)|` configurations holds one entry
//! per non-empty subset of Θ(scope), so `2^N − 1` entries. Subset `A` is
//! encoded as a bitmask over configuration indices (bit `c` set when
//! configuration `c` is in `A`) and stored at position `mask − 1`.
//!
//! Unnormalized Dempster combination is pointwise multiplication of
//! commonalities after cylinder extension. Marginalization goes through
//! mass space: Möbius-transform to masses, project every focal set, sum
//! masses of equal projections, transform back. Mass assigned to the empty
//! set (conflict) is not tracked.

use crate::algebra::{ValuationAlgebra, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::table::{check_entries, pseudo_reciprocal, union_cards};
use crate::variable::{config_count, projection_map, Frames, VarId, VarSet};

/// Largest supported |Θ(scope)|; the subset lattice has `2^MAX_FRAME` elements.
pub const MAX_FRAME: usize = 20;

fn frame_size(cards: &[usize]) -> Result<usize> {
    let n = cards
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .unwrap_or(usize::MAX);
    if n > MAX_FRAME {
        return Err(Error::FrameTooLarge {
            size: n,
            limit: MAX_FRAME,
        });
    }
    Ok(n)
}

fn lattice_len(cards: &[usize]) -> Result<usize> {
    Ok((1usize << frame_size(cards)?) - 1)
}

/// For every subset mask of Θ(scope), the mask of its projection onto `sub`.
fn subset_projection(scope: &VarSet, cards: &[usize], sub: &VarSet) -> Vec<usize> {
    let cfg = projection_map(scope, cards, sub);
    let mut proj = vec![0usize; 1 << cfg.len()];
    for m in 1..proj.len() {
        let low = m.trailing_zeros() as usize;
        proj[m] = proj[m & (m - 1)] | (1 << cfg[low]);
    }
    proj
}

/// Superset-sum transform in place; `f[0]` is ignored on input.
fn superset_sums(f: &mut [f64]) {
    let n = f.len().trailing_zeros();
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..f.len() {
            if m & b == 0 {
                f[m] += f[m | b];
            }
        }
    }
}

/// Inverse of [`superset_sums`] on non-empty masks.
fn superset_differences(f: &mut [f64]) {
    let n = f.len().trailing_zeros();
    for bit in 0..n {
        let b = 1usize << bit;
        for m in 0..f.len() {
            if m & b == 0 {
                f[m] -= f[m | b];
            }
        }
    }
}

fn with_empty_slot(values: &[f64]) -> Vec<f64> {
    let mut f = Vec::with_capacity(values.len() + 1);
    f.push(0.0);
    f.extend_from_slice(values);
    f
}

/// A (possibly unnormalized) mass assignment over the non-empty subsets of
/// Θ(scope), indexed like [`CommonalityTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    scope: VarSet,
    cards: Vec<usize>,
    masses: Vec<f64>,
}

impl MassFunction {
    pub fn new(frames: &Frames, scope: VarSet, masses: Vec<f64>) -> Result<Self> {
        let cards = frames.cards(&scope)?;
        let expected = lattice_len(&cards)?;
        if masses.len() != expected {
            return Err(Error::TableLength {
                expected,
                found: masses.len(),
            });
        }
        check_entries(&masses)?;
        Ok(Self {
            scope,
            cards,
            masses,
        })
    }

    /// Builds a mass function from `(subset mask, mass)` pairs; repeated
    /// masks accumulate.
    pub fn from_focal_sets(frames: &Frames, scope: VarSet, focal: &[(usize, f64)]) -> Result<Self> {
        let cards = frames.cards(&scope)?;
        let len = lattice_len(&cards)?;
        let mut masses = vec![0.0; len];
        for &(mask, m) in focal {
            if mask == 0 || mask > len {
                return Err(Error::InvalidEntry {
                    index: mask,
                    value: m,
                });
            }
            masses[mask - 1] += m;
        }
        Self::new(frames, scope, masses)
    }

    /// All mass on Θ(scope).
    pub fn vacuous(frames: &Frames, scope: &VarSet) -> Result<Self> {
        let cards = frames.cards(scope)?;
        let len = lattice_len(&cards)?;
        let mut masses = vec![0.0; len];
        masses[len - 1] = 1.0;
        Ok(Self {
            scope: scope.clone(),
            cards,
            masses,
        })
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, mask: usize) -> f64 {
        self.masses[mask - 1]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Projects every focal set onto `target`, summing coinciding images.
    pub fn project(&self, target: &VarSet) -> Result<MassFunction> {
        if !target.is_subset(&self.scope) {
            return Err(Error::NotSubset {
                target: target.to_string(),
                scope: self.scope.to_string(),
            });
        }
        let cards: Vec<usize> = target
            .iter()
            .map(|v| self.cards[self.scope.position(v).expect("subset")])
            .collect();
        let proj = subset_projection(&self.scope, &self.cards, target);
        let mut masses = vec![0.0; lattice_len(&cards)?];
        for (i, &m) in self.masses.iter().enumerate() {
            if m != 0.0 {
                masses[proj[i + 1] - 1] += m;
            }
        }
        Ok(MassFunction {
            scope: target.clone(),
            cards,
            masses,
        })
    }
}

/// `Q(A) = Σ_{B ⊇ A} m(B)` for every non-empty `A`.
pub fn mass_to_commonality(m: &MassFunction) -> CommonalityTable {
    let mut f = with_empty_slot(&m.masses);
    superset_sums(&mut f);
    CommonalityTable {
        scope: m.scope.clone(),
        cards: m.cards.clone(),
        values: f[1..].to_vec(),
    }
}

/// Möbius inversion of [`mass_to_commonality`]. Masses of tables that are
/// not commonality functions may come out slightly negative.
pub fn commonality_to_mass(q: &CommonalityTable) -> MassFunction {
    let mut f = with_empty_slot(&q.values);
    superset_differences(&mut f);
    MassFunction {
        scope: q.scope.clone(),
        cards: q.cards.clone(),
        masses: f[1..].to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommonalityTable {
    scope: VarSet,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl CommonalityTable {
    pub fn new(frames: &Frames, scope: VarSet, values: Vec<f64>) -> Result<Self> {
        let cards = frames.cards(&scope)?;
        let expected = lattice_len(&cards)?;
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

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Commonality of the subset with the given mask.
    pub fn at(&self, mask: usize) -> f64 {
        self.values[mask - 1]
    }

    /// Number of configurations of the underlying frame.
    pub fn frame_len(&self) -> usize {
        config_count(&self.cards)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (scope, cards) = union_cards(&self.scope, &self.cards, &other.scope, &other.cards)?;
        frame_size(&cards)?;
        let left = subset_projection(&scope, &cards, &self.scope);
        let right = subset_projection(&scope, &cards, &other.scope);
        let values = (1..left.len())
            .map(|m| op(self.values[left[m] - 1], other.values[right[m] - 1]))
            .collect();
        Ok(Self {
            scope,
            cards,
            values,
        })
    }

    fn filled(frames: &Frames, scope: &VarSet, value: f64) -> Result<Self> {
        let cards = frames.cards(scope)?;
        let len = lattice_len(&cards)?;
        Ok(Self {
            scope: scope.clone(),
            cards,
            values: vec![value; len],
        })
    }
}

#[derive(Debug, Clone)]
pub struct CommonalityAlgebra {
    frames: Frames,
}

impl CommonalityAlgebra {
    pub fn new(frames: Frames) -> Self {
        Self { frames }
    }

    pub fn table(&self, scope: VarSet, values: Vec<f64>) -> Result<CommonalityTable> {
        CommonalityTable::new(&self.frames, scope, values)
    }

    pub fn from_masses(&self, scope: VarSet, masses: Vec<f64>) -> Result<CommonalityTable> {
        MassFunction::new(&self.frames, scope, masses).map(|m| mass_to_commonality(&m))
    }

    /// Total mass on non-empty sets.
    pub fn total_mass(&self, q: &CommonalityTable) -> f64 {
        commonality_to_mass(q).total()
    }
}

impl ValuationAlgebra for CommonalityAlgebra {
    type Value = CommonalityTable;

    fn name(&self) -> &'static str {
        "commonality"
    }

    fn frames(&self) -> &Frames {
        &self.frames
    }

    fn scope<'v>(&self, value: &'v CommonalityTable) -> &'v VarSet {
        value.scope()
    }

    fn entries<'v>(&self, value: &'v CommonalityTable) -> &'v [f64] {
        value.values()
    }

    fn combine(&self, a: &CommonalityTable, b: &CommonalityTable) -> Result<CommonalityTable> {
        a.zip_with(b, |x, y| x * y)
    }

    fn delete_variable(&self, value: &CommonalityTable, var: VarId) -> Result<CommonalityTable> {
        if !value.scope.contains(var) {
            return Err(Error::NotSubset {
                target: self.frames.show(&VarSet::singleton(var)),
                scope: self.frames.show(&value.scope),
            });
        }
        let mut target = value.scope.clone();
        target.remove(var);
        let projected = commonality_to_mass(value).project(&target)?;
        Ok(mass_to_commonality(&projected))
    }

    fn identity(&self, scope: &VarSet) -> Result<CommonalityTable> {
        CommonalityTable::filled(&self.frames, scope, 1.0)
    }

    fn zero(&self, scope: &VarSet) -> Result<CommonalityTable> {
        CommonalityTable::filled(&self.frames, scope, 0.0)
    }

    fn is_zero(&self, value: &CommonalityTable) -> bool {
        value.values.iter().all(|&x| x == 0.0)
    }

    fn is_normal(&self, value: &CommonalityTable) -> bool {
        (self.total_mass(value) - 1.0).abs() <= DEFAULT_TOLERANCE
    }

    /// Normal with every commonality strictly positive, i.e. `m(Θ) > 0`.
    fn is_positive_normal(&self, value: &CommonalityTable) -> bool {
        self.is_normal(value) && value.values.iter().all(|&x| x > 0.0)
    }

    fn supports_removal(&self) -> bool {
        true
    }

    fn remove(&self, a: &CommonalityTable, b: &CommonalityTable) -> Result<CommonalityTable> {
        a.zip_with(b, |x, y| x * pseudo_reciprocal(y))
    }
}
