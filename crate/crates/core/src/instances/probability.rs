//! Probability potentials: non-negative tables over Θ(scope), combined by
//! multiplication and marginalized by summation. Tables are kept
//! unnormalized; [`ProbabilityAlgebra::normalize`] rescales on request.

use crate::algebra::{ValuationAlgebra, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::table::{pseudo_reciprocal, DenseTable};
use crate::variable::{Frames, VarId, VarSet};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityPotential(DenseTable);

impl ProbabilityPotential {
    pub fn new(frames: &Frames, scope: VarSet, values: Vec<f64>) -> Result<Self> {
        DenseTable::new(frames, scope, values).map(Self)
    }

    pub fn scope(&self) -> &VarSet {
        self.0.scope()
    }

    pub fn cards(&self) -> &[usize] {
        self.0.cards()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    pub fn total(&self) -> f64 {
        self.values().iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct ProbabilityAlgebra {
    frames: Frames,
}

impl ProbabilityAlgebra {
    pub fn new(frames: Frames) -> Self {
        Self { frames }
    }

    pub fn potential(&self, scope: VarSet, values: Vec<f64>) -> Result<ProbabilityPotential> {
        ProbabilityPotential::new(&self.frames, scope, values)
    }

    /// Rescales to total mass 1; the zero potential is returned unchanged.
    pub fn normalize(&self, p: &ProbabilityPotential) -> ProbabilityPotential {
        let total = p.total();
        if total == 0.0 {
            return p.clone();
        }
        ProbabilityPotential(p.0.map(|x| x / total))
    }
}

impl ValuationAlgebra for ProbabilityAlgebra {
    type Value = ProbabilityPotential;

    fn name(&self) -> &'static str {
        "probability"
    }

    fn frames(&self) -> &Frames {
        &self.frames
    }

    fn scope<'v>(&self, value: &'v ProbabilityPotential) -> &'v VarSet {
        value.scope()
    }

    fn entries<'v>(&self, value: &'v ProbabilityPotential) -> &'v [f64] {
        value.values()
    }

    fn combine(&self, a: &ProbabilityPotential, b: &ProbabilityPotential) -> Result<ProbabilityPotential> {
        a.0.zip_with(&b.0, |x, y| x * y).map(ProbabilityPotential)
    }

    fn delete_variable(&self, value: &ProbabilityPotential, var: VarId) -> Result<ProbabilityPotential> {
        if !value.scope().contains(var) {
            return Err(Error::NotSubset {
                target: self.frames.show(&VarSet::singleton(var)),
                scope: self.frames.show(value.scope()),
            });
        }
        let target = value.0.without(var);
        Ok(ProbabilityPotential(value.0.fold_onto(&target, 0.0, |acc, x| acc + x)))
    }

    fn identity(&self, scope: &VarSet) -> Result<ProbabilityPotential> {
        DenseTable::constant(&self.frames, scope, 1.0).map(ProbabilityPotential)
    }

    fn zero(&self, scope: &VarSet) -> Result<ProbabilityPotential> {
        DenseTable::constant(&self.frames, scope, 0.0).map(ProbabilityPotential)
    }

    fn is_zero(&self, value: &ProbabilityPotential) -> bool {
        value.values().iter().all(|&x| x == 0.0)
    }

    fn is_normal(&self, value: &ProbabilityPotential) -> bool {
        (value.total() - 1.0).abs() <= DEFAULT_TOLERANCE
    }

    fn is_positive_normal(&self, value: &ProbabilityPotential) -> bool {
        self.is_normal(value) && value.values().iter().all(|&x| x > 0.0)
    }

    fn supports_removal(&self) -> bool {
        true
    }

    fn remove(&self, a: &ProbabilityPotential, b: &ProbabilityPotential) -> Result<ProbabilityPotential> {
        a.0.zip_with(&b.0, |x, y| x * pseudo_reciprocal(y))
            .map(ProbabilityPotential)
    }

    fn configuration_values<'v>(&self, value: &'v ProbabilityPotential) -> Result<&'v [f64]> {
        Ok(value.values())
    }

    fn max_deviation(&self, a: &ProbabilityPotential, b: &ProbabilityPotential) -> Result<f64> {
        if a.scope() == b.scope() {
            return Ok(a.0.max_abs_diff(&b.0));
        }
        let union = a.scope().union(b.scope());
        let ea = self.extend(a, &union)?;
        let eb = self.extend(b, &union)?;
        Ok(ea.0.max_abs_diff(&eb.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ProbabilityAlgebra, VarId, VarId) {
        let frames = Frames::binary(&["A", "B"]).unwrap();
        (ProbabilityAlgebra::new(frames), VarId(0), VarId(1))
    }

    #[test]
    fn combine_with_identity() {
        let (alg, a, _) = setup();
        let p = alg.potential(VarSet::singleton(a), vec![0.6, 0.4]).unwrap();
        let one = alg.potential(VarSet::singleton(a), vec![1.0, 1.0]).unwrap();
        assert_eq!(alg.combine(&p, &one).unwrap(), p);
    }

    #[test]
    fn marginal_of_two_variable_table() {
        let (alg, a, b) = setup();
        let p = alg
            .potential([a, b].into_iter().collect(), vec![0.1, 0.2, 0.3, 0.4])
            .unwrap();
        let m = alg.marginalize(&p, &VarSet::singleton(a)).unwrap();
        assert!((m.values()[0] - 0.3).abs() < 1e-15);
        assert!((m.values()[1] - 0.7).abs() < 1e-15);
        let mb = alg.marginalize(&p, &VarSet::singleton(b)).unwrap();
        assert!((mb.values()[0] - 0.4).abs() < 1e-15);
        assert!((mb.values()[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn removal_then_recombination_restores() {
        let (alg, a, b) = setup();
        let p = alg
            .potential([a, b].into_iter().collect(), vec![0.1, 0.2, 0.3, 0.4])
            .unwrap();
        let pa = alg.marginalize(&p, &VarSet::singleton(a)).unwrap();
        let back = alg.combine(&alg.remove(&p, &pa).unwrap(), &pa).unwrap();
        assert!(alg.approx_eq(&back, &p, 1e-12));
    }

    #[test]
    fn pseudo_inverse_maps_zero_to_zero() {
        let (alg, a, b) = setup();
        let p = alg
            .potential([a, b].into_iter().collect(), vec![0.5, 0.25, 0.25, 0.0])
            .unwrap();
        let inv = alg.inverse(&p).unwrap();
        assert_eq!(inv.values(), &[2.0, 4.0, 4.0, 0.0]);
        let back = alg.combine(&alg.combine(&p, &inv).unwrap(), &p).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_tables() {
        let (alg, a, _) = setup();
        assert!(matches!(
            alg.potential(VarSet::singleton(a), vec![0.5]),
            Err(Error::TableLength { expected: 2, found: 1 })
        ));
        assert!(matches!(
            alg.potential(VarSet::singleton(a), vec![0.5, -0.1]),
            Err(Error::InvalidEntry { .. })
        ));
        assert!(alg.potential(VarSet::singleton(a), vec![0.5, f64::NAN]).is_err());
    }

    #[test]
    fn marginalize_outside_scope_fails() {
        let (alg, a, b) = setup();
        let p = alg.potential(VarSet::singleton(a), vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            alg.marginalize(&p, &VarSet::singleton(b)),
            Err(Error::NotSubset { .. })
        ));
    }

    #[test]
    fn empty_scope_identity_is_scalar_one() {
        let (alg, _, _) = setup();
        let unit = alg.identity(&VarSet::empty()).unwrap();
        assert_eq!(unit.values(), &[1.0]);
        assert!(alg.is_normal(&unit));
    }
}
