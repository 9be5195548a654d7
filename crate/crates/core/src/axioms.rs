//! Randomized conformance checks for the valuation axioms.
//!
//! [`run_axiom_suite`] draws random valuations from a [`Sampler`] and checks
//! each combination, marginalization and removal axiom on them. Failures are
//! report entries carrying a witness, never panics.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::ValuationAlgebra;
use crate::error::Result;
use crate::variable::{VarId, VarSet};

/// Source of random valuations for an instance.
pub trait Sampler<A: ValuationAlgebra> {
    /// Any valuation over `scope`, not necessarily normal.
    fn sample<R: Rng + ?Sized>(&self, algebra: &A, scope: &VarSet, rng: &mut R) -> Result<A::Value>;

    /// A normal valuation over `scope`.
    fn sample_normal<R: Rng + ?Sized>(&self, algebra: &A, scope: &VarSet, rng: &mut R) -> Result<A::Value>;

    /// A positive normal valuation over `scope`.
    fn sample_positive_normal<R: Rng + ?Sized>(
        &self,
        algebra: &A,
        scope: &VarSet,
        rng: &mut R,
    ) -> Result<A::Value>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    M1,
    M2,
    M3,
    M4,
    CM1,
    CM2,
    R1,
    R2,
    CR,
}

impl Axiom {
    pub const ALL: [Axiom; 15] = [
        Axiom::C1,
        Axiom::C2,
        Axiom::C3,
        Axiom::C4,
        Axiom::C5,
        Axiom::C6,
        Axiom::M1,
        Axiom::M2,
        Axiom::M3,
        Axiom::M4,
        Axiom::CM1,
        Axiom::CM2,
        Axiom::R1,
        Axiom::R2,
        Axiom::CR,
    ];

    pub fn needs_removal(self) -> bool {
        matches!(self, Axiom::R1 | Axiom::R2 | Axiom::CR)
    }

    pub fn describe(self) -> &'static str {
        match self {
            Axiom::C1 => "combination scope is the union",
            Axiom::C2 => "combination is associative",
            Axiom::C3 => "combination is commutative",
            Axiom::C4 => "zero absorbs",
            Axiom::C5 => "identity is neutral",
            Axiom::C6 => "unique normal empty-scope valuation",
            Axiom::M1 => "deletion order is irrelevant",
            Axiom::M2 => "marginal of zero is zero",
            Axiom::M3 => "marginalization preserves normality",
            Axiom::M4 => "marginalization preserves positive normality",
            Axiom::CM1 => "deletion passes through combination",
            Axiom::CM2 => "marginal identities are neutral",
            Axiom::R1 => "removal scope is the union",
            Axiom::R2 => "self-removal is an identity",
            Axiom::CR => "removal distributes over combination",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Random cases per axiom.
    pub cases: usize,
    /// Largest number of variables in a sampled scope.
    pub max_scope: usize,
    /// Tolerance, relative to `max(1, largest entry)`.
    pub tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            cases: 200,
            max_scope: 2,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub cases: usize,
    pub skipped: bool,
    pub counterexample: Option<String>,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.skipped || self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub instance: &'static str,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(AxiomOutcome::passed)
    }

    pub fn outcome(&self, axiom: Axiom) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| o.axiom == axiom)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let status = if o.skipped {
                "skip"
            } else if o.passed() {
                "pass"
            } else {
                "FAIL"
            };
            write!(f, "{} {:<4} {:<48} ({} cases)", status, o.axiom, o.axiom.describe(), o.cases)?;
            if let Some(w) = &o.counterexample {
                write!(f, "\n    witness: {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

type Check = std::result::Result<(), String>;

struct Harness<'a, A: ValuationAlgebra, S> {
    algebra: &'a A,
    sampler: &'a S,
    config: SuiteConfig,
    vars: Vec<VarId>,
}

impl<A: ValuationAlgebra, S: Sampler<A>> Harness<'_, A, S> {
    fn scope<R: Rng + ?Sized>(&self, rng: &mut R, min: usize) -> VarSet {
        let max = self.config.max_scope.min(self.vars.len()).max(min);
        let n = rng.gen_range(min..=max);
        self.vars.choose_multiple(rng, n).copied().collect()
    }

    fn close(&self, a: &A::Value, b: &A::Value) -> Check {
        let dev = self.algebra.max_deviation(a, b).map_err(|e| e.to_string())?;
        let scale = self
            .algebra
            .entries(a)
            .iter()
            .chain(self.algebra.entries(b))
            .fold(1.0f64, |m, &x| m.max(x.abs()));
        if dev <= self.config.tolerance * scale {
            Ok(())
        } else {
            Err(format!("deviation {dev:e}; left {a:?}; right {b:?}"))
        }
    }

    fn ensure(&self, cond: bool, witness: impl FnOnce() -> String) -> Check {
        if cond {
            Ok(())
        } else {
            Err(witness())
        }
    }

    fn check<R: Rng + ?Sized>(&self, axiom: Axiom, rng: &mut R) -> Check {
        let alg = self.algebra;
        let smp = self.sampler;
        let e = |e: crate::error::Error| e.to_string();
        match axiom {
            Axiom::C1 => {
                let (r, s) = (self.scope(rng, 0), self.scope(rng, 0));
                let rho = smp.sample(alg, &r, rng).map_err(e)?;
                let sigma = smp.sample(alg, &s, rng).map_err(e)?;
                let c = alg.combine(&rho, &sigma).map_err(e)?;
                let want = r.union(&s);
                self.ensure(alg.scope(&c) == &want, || {
                    format!("scope {} != {}", alg.scope(&c), want)
                })
            }
            Axiom::C2 => {
                let rho = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let sigma = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let tau = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let left = alg.combine(&rho, &alg.combine(&sigma, &tau).map_err(e)?).map_err(e)?;
                let right = alg.combine(&alg.combine(&rho, &sigma).map_err(e)?, &tau).map_err(e)?;
                self.close(&left, &right)
            }
            Axiom::C3 => {
                let rho = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let sigma = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                self.close(
                    &alg.combine(&rho, &sigma).map_err(e)?,
                    &alg.combine(&sigma, &rho).map_err(e)?,
                )
            }
            Axiom::C4 => {
                let (r, s) = (self.scope(rng, 0), self.scope(rng, 0));
                let rho = smp.sample(alg, &r, rng).map_err(e)?;
                let zero = alg.zero(&s).map_err(e)?;
                let c = alg.combine(&rho, &zero).map_err(e)?;
                self.ensure(alg.is_zero(&c) && alg.scope(&c) == &r.union(&s), || {
                    format!("{rho:?} ⊗ ζ = {c:?}")
                })
            }
            Axiom::C5 => {
                let s = self.scope(rng, 0);
                let sigma = if rng.gen_bool(0.1) {
                    alg.zero(&s).map_err(e)?
                } else {
                    smp.sample_normal(alg, &s, rng).map_err(e)?
                };
                let id = alg.identity(&s).map_err(e)?;
                self.close(&alg.combine(&sigma, &id).map_err(e)?, &sigma)
            }
            Axiom::C6 => {
                let unit = alg.identity(&VarSet::empty()).map_err(e)?;
                self.ensure(alg.is_normal(&unit), || format!("ι_∅ = {unit:?} is not normal"))?;
                let sigma = smp.sample_normal(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let m = alg.marginalize(&sigma, &VarSet::empty()).map_err(e)?;
                self.close(&m, &unit)
            }
            Axiom::M1 => {
                let s = self.scope(rng, 2);
                let sigma = smp.sample(alg, &s, rng).map_err(e)?;
                let picked: Vec<VarId> = s.as_slice().choose_multiple(rng, 2).copied().collect();
                let (x, y) = (picked[0], picked[1]);
                let xy = alg
                    .delete_variable(&alg.delete_variable(&sigma, x).map_err(e)?, y)
                    .map_err(e)?;
                let yx = alg
                    .delete_variable(&alg.delete_variable(&sigma, y).map_err(e)?, x)
                    .map_err(e)?;
                self.close(&xy, &yx)
            }
            Axiom::M2 => {
                let s = self.scope(rng, 1);
                let x = *s.as_slice().choose(rng).expect("non-empty scope");
                let zero = alg.zero(&s).map_err(e)?;
                let m = alg.delete_variable(&zero, x).map_err(e)?;
                let want = s.difference(&VarSet::singleton(x));
                self.ensure(alg.is_zero(&m) && alg.scope(&m) == &want, || format!("ζ↓ = {m:?}"))
            }
            Axiom::M3 => {
                let s = self.scope(rng, 1);
                let x = *s.as_slice().choose(rng).expect("non-empty scope");
                let sigma = if rng.gen_bool(0.5) {
                    smp.sample_normal(alg, &s, rng).map_err(e)?
                } else {
                    smp.sample(alg, &s, rng).map_err(e)?
                };
                let m = alg.delete_variable(&sigma, x).map_err(e)?;
                self.ensure(alg.is_normal(&m) == alg.is_normal(&sigma), || {
                    format!("normality differs: {sigma:?} vs {m:?}")
                })
            }
            Axiom::M4 => {
                let s = self.scope(rng, 1);
                let x = *s.as_slice().choose(rng).expect("non-empty scope");
                let sigma = smp.sample_positive_normal(alg, &s, rng).map_err(e)?;
                self.ensure(alg.is_positive_normal(&sigma), || {
                    format!("sampler produced {sigma:?}, not positive normal")
                })?;
                let m = alg.delete_variable(&sigma, x).map_err(e)?;
                self.ensure(alg.is_positive_normal(&m), || format!("{m:?} not positive normal"))
            }
            Axiom::CM1 => {
                let s = self.scope(rng, 1);
                let x = *s.as_slice().choose(rng).expect("non-empty scope");
                let r = self.scope(rng, 0).difference(&VarSet::singleton(x));
                let rho = smp.sample(alg, &r, rng).map_err(e)?;
                let sigma = smp.sample(alg, &s, rng).map_err(e)?;
                let left = alg
                    .delete_variable(&alg.combine(&rho, &sigma).map_err(e)?, x)
                    .map_err(e)?;
                let right = alg
                    .combine(&rho, &alg.delete_variable(&sigma, x).map_err(e)?)
                    .map_err(e)?;
                self.close(&left, &right)
            }
            Axiom::CM2 => {
                let s = self.scope(rng, 0);
                let k = rng.gen_range(0..=s.len());
                let r: VarSet = s.as_slice().choose_multiple(rng, k).copied().collect();
                let sigma = smp.sample_normal(alg, &s, rng).map_err(e)?;
                let id = alg.identity(&r).map_err(e)?;
                self.close(&alg.combine(&sigma, &id).map_err(e)?, &sigma)
            }
            Axiom::R1 => {
                let (r, s) = (self.scope(rng, 0), self.scope(rng, 0));
                let sigma = smp.sample(alg, &s, rng).map_err(e)?;
                let rho = smp.sample_normal(alg, &r, rng).map_err(e)?;
                let out = alg.remove(&sigma, &rho).map_err(e)?;
                let finite = alg.entries(&out).iter().all(|x| x.is_finite() && *x >= 0.0);
                self.ensure(finite && alg.scope(&out) == &r.union(&s), || {
                    format!("{sigma:?} Ⓡ {rho:?} = {out:?}")
                })
            }
            Axiom::R2 => {
                let r = self.scope(rng, 0);
                let rho = smp.sample_normal(alg, &r, rng).map_err(e)?;
                let id = alg.remove(&rho, &rho).map_err(e)?;
                self.ensure(alg.scope(&id) == &r, || format!("scope of ρ Ⓡ ρ is {}", alg.scope(&id)))?;
                self.close(&alg.combine(&id, &id).map_err(e)?, &id)?;
                self.close(&alg.combine(&rho, &id).map_err(e)?, &rho)
            }
            Axiom::CR => {
                let sigma = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let tau = smp.sample(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let rho = smp.sample_normal(alg, &self.scope(rng, 0), rng).map_err(e)?;
                let left = alg.remove(&alg.combine(&sigma, &tau).map_err(e)?, &rho).map_err(e)?;
                let right = alg.combine(&sigma, &alg.remove(&tau, &rho).map_err(e)?).map_err(e)?;
                self.close(&left, &right)
            }
        }
    }
}

/// Runs every axiom `config.cases` times on valuations drawn from `sampler`.
pub fn run_axiom_suite<A, S, R>(algebra: &A, sampler: &S, config: SuiteConfig, rng: &mut R) -> AxiomReport
where
    A: ValuationAlgebra,
    S: Sampler<A>,
    R: Rng + ?Sized,
{
    let harness = Harness {
        algebra,
        sampler,
        config,
        vars: algebra.frames().all().iter().collect(),
    };
    let outcomes = Axiom::ALL
        .iter()
        .map(|&axiom| {
            if axiom.needs_removal() && !algebra.supports_removal() {
                return AxiomOutcome {
                    axiom,
                    cases: 0,
                    skipped: true,
                    counterexample: None,
                };
            }
            let mut counterexample = None;
            let mut cases = 0;
            for _ in 0..config.cases {
                cases += 1;
                if let Err(w) = harness.check(axiom, rng) {
                    counterexample = Some(w);
                    break;
                }
            }
            AxiomOutcome {
                axiom,
                cases,
                skipped: false,
                counterexample,
            }
        })
        .collect();
    AxiomReport {
        instance: algebra.name(),
        outcomes,
    }
}

/// Largest deviation of `(ρ Ⓡ ρ↓r) ⊗ ρ↓r` from `ρ` over every subscope
/// `r ⊆ scope(ρ)`, including `∅` and the full scope.
pub fn removal_round_trip_deviation<A: ValuationAlgebra>(algebra: &A, rho: &A::Value) -> Result<f64> {
    let scope = algebra.scope(rho).clone();
    let vars: Vec<VarId> = scope.iter().collect();
    let mut worst = 0.0f64;
    for bits in 0u64..(1u64 << vars.len()) {
        let r: VarSet = vars
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let marginal = algebra.marginalize(rho, &r)?;
        let back = algebra.combine(&algebra.remove(rho, &marginal)?, &marginal)?;
        worst = worst.max(algebra.max_deviation(&back, rho)?);
    }
    Ok(worst)
}
