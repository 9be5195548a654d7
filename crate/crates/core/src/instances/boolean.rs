//! Boolean relations: {0,1} tables combined by natural join and
//! marginalized by projection. No removal.

use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::table::DenseTable;
use crate::variable::{Frames, VarId, VarSet};

#[derive(Debug, Clone, PartialEq)]
pub struct BooleanRelation(DenseTable);

impl BooleanRelation {
    /// Any non-zero entry is read as `true`.
    pub fn new(frames: &Frames, scope: VarSet, values: Vec<f64>) -> Result<Self> {
        let table = DenseTable::new(frames, scope, values)?;
        Ok(Self(table.map(|x| if x != 0.0 { 1.0 } else { 0.0 })))
    }

    pub fn scope(&self) -> &VarSet {
        self.0.scope()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn holds(&self, index: usize) -> bool {
        self.0.values()[index] != 0.0
    }
}

#[derive(Debug, Clone)]
pub struct BooleanAlgebra {
    frames: Frames,
}

impl BooleanAlgebra {
    pub fn new(frames: Frames) -> Self {
        Self { frames }
    }

    pub fn relation(&self, scope: VarSet, values: Vec<f64>) -> Result<BooleanRelation> {
        BooleanRelation::new(&self.frames, scope, values)
    }
}

impl ValuationAlgebra for BooleanAlgebra {
    type Value = BooleanRelation;

    fn name(&self) -> &'static str {
        "boolean"
    }

    fn frames(&self) -> &Frames {
        &self.frames
    }

    fn scope<'v>(&self, value: &'v BooleanRelation) -> &'v VarSet {
        value.scope()
    }

    fn entries<'v>(&self, value: &'v BooleanRelation) -> &'v [f64] {
        value.values()
    }

    fn combine(&self, a: &BooleanRelation, b: &BooleanRelation) -> Result<BooleanRelation> {
        a.0.zip_with(&b.0, |x, y| if x != 0.0 && y != 0.0 { 1.0 } else { 0.0 })
            .map(BooleanRelation)
    }

    fn delete_variable(&self, value: &BooleanRelation, var: VarId) -> Result<BooleanRelation> {
        if !value.scope().contains(var) {
            return Err(Error::NotSubset {
                target: self.frames.show(&VarSet::singleton(var)),
                scope: self.frames.show(value.scope()),
            });
        }
        let target = value.0.without(var);
        Ok(BooleanRelation(value.0.fold_onto(&target, 0.0, f64::max)))
    }

    fn identity(&self, scope: &VarSet) -> Result<BooleanRelation> {
        DenseTable::constant(&self.frames, scope, 1.0).map(BooleanRelation)
    }

    fn zero(&self, scope: &VarSet) -> Result<BooleanRelation> {
        DenseTable::constant(&self.frames, scope, 0.0).map(BooleanRelation)
    }

    fn is_zero(&self, value: &BooleanRelation) -> bool {
        value.values().iter().all(|&x| x == 0.0)
    }

    fn is_normal(&self, value: &BooleanRelation) -> bool {
        !self.is_zero(value)
    }

    fn is_positive_normal(&self, value: &BooleanRelation) -> bool {
        self.is_normal(value)
    }

    fn configuration_values<'v>(&self, value: &'v BooleanRelation) -> Result<&'v [f64]> {
        Ok(value.values())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_and_projection() {
        let frames = Frames::binary(&["A", "B", "C"]).unwrap();
        let alg = BooleanAlgebra::new(frames);
        let ab = alg
            .relation([VarId(0), VarId(1)].into_iter().collect(), vec![1.0, 0.0, 0.0, 1.0])
            .unwrap();
        let bc = alg
            .relation([VarId(1), VarId(2)].into_iter().collect(), vec![0.0, 1.0, 1.0, 1.0])
            .unwrap();
        let j = alg.combine(&ab, &bc).unwrap();
        // A=B, and (B,C) != (0,0)
        assert_eq!(j.values(), &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let ac = alg
            .marginalize(&j, &[VarId(0), VarId(2)].into_iter().collect())
            .unwrap();
        assert_eq!(ac.values(), &[0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn removal_is_a_capability_error() {
        let frames = Frames::binary(&["A"]).unwrap();
        let alg = BooleanAlgebra::new(frames);
        let r = alg.identity(&VarSet::singleton(VarId(0))).unwrap();
        assert_eq!(
            alg.remove(&r, &r),
            Err(Error::RemovalUnsupported { instance: "boolean" })
        );
        assert!(alg.inverse(&r).is_err());
        assert!(!alg.supports_removal());
    }
}
