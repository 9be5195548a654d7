//! Random valuations and random models, for property checks and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::ValuationAlgebra;
use crate::axioms::Sampler;
use crate::error::Result;
use crate::instances::{
    mass_to_commonality, BooleanAlgebra, BooleanRelation, CommonalityAlgebra, CommonalityTable,
    MassFunction, ProbabilityAlgebra, ProbabilityPotential,
};
use crate::markov_tree::MarkovTree;
use crate::variable::{config_count, Frames, VarId, VarSet};

/// Probability tables with entries in `[0, 1)`; a fraction of entries is
/// forced to zero so that pseudo-inverses get exercised.
#[derive(Debug, Clone, Copy)]
pub struct ProbabilitySampler {
    pub zero_fraction: f64,
}

impl Default for ProbabilitySampler {
    fn default() -> Self {
        Self { zero_fraction: 0.1 }
    }
}

impl ProbabilitySampler {
    fn raw<R: Rng + ?Sized>(&self, alg: &ProbabilityAlgebra, scope: &VarSet, rng: &mut R, floor: f64, zeros: bool) -> Result<Vec<f64>> {
        let n = config_count(&alg.frames().cards(scope)?);
        let mut values: Vec<f64> = (0..n)
            .map(|_| {
                if zeros && rng.gen_bool(self.zero_fraction) {
                    0.0
                } else {
                    rng.gen_range(floor..1.0)
                }
            })
            .collect();
        if values.iter().all(|&x| x == 0.0) {
            values[rng.gen_range(0..n)] = rng.gen_range(0.1..1.0);
        }
        Ok(values)
    }
}

impl Sampler<ProbabilityAlgebra> for ProbabilitySampler {
    fn sample<R: Rng + ?Sized>(&self, alg: &ProbabilityAlgebra, scope: &VarSet, rng: &mut R) -> Result<ProbabilityPotential> {
        let scale = rng.gen_range(0.25..2.0);
        let values = self.raw(alg, scope, rng, 0.0, true)?.into_iter().map(|x| x * scale).collect();
        alg.potential(scope.clone(), values)
    }

    fn sample_normal<R: Rng + ?Sized>(&self, alg: &ProbabilityAlgebra, scope: &VarSet, rng: &mut R) -> Result<ProbabilityPotential> {
        let p = alg.potential(scope.clone(), self.raw(alg, scope, rng, 0.0, true)?)?;
        Ok(alg.normalize(&p))
    }

    fn sample_positive_normal<R: Rng + ?Sized>(&self, alg: &ProbabilityAlgebra, scope: &VarSet, rng: &mut R) -> Result<ProbabilityPotential> {
        let p = alg.potential(scope.clone(), self.raw(alg, scope, rng, 0.05, false)?)?;
        Ok(alg.normalize(&p))
    }
}

/// Commonality tables of random mass functions with a handful of focal sets.
#[derive(Debug, Clone, Copy)]
pub struct CommonalitySampler {
    pub max_focal: usize,
}

impl Default for CommonalitySampler {
    fn default() -> Self {
        Self { max_focal: 4 }
    }
}

impl CommonalitySampler {
    /// A random mass function summing to `total`.
    pub fn mass<R: Rng + ?Sized>(&self, frames: &Frames, scope: &VarSet, rng: &mut R, total: f64, with_frame: bool) -> Result<MassFunction> {
        let n = config_count(&frames.cards(scope)?);
        let len = (1usize << n) - 1;
        let k = rng.gen_range(1..=self.max_focal.max(1));
        let mut focal: Vec<(usize, f64)> = (0..k)
            .map(|_| (rng.gen_range(1..=len), rng.gen_range(0.05..1.0)))
            .collect();
        if with_frame {
            focal.push((len, rng.gen_range(0.05..1.0)));
        }
        let sum: f64 = focal.iter().map(|f| f.1).sum();
        for f in &mut focal {
            f.1 *= total / sum;
        }
        MassFunction::from_focal_sets(frames, scope.clone(), &focal)
    }
}

impl Sampler<CommonalityAlgebra> for CommonalitySampler {
    fn sample<R: Rng + ?Sized>(&self, alg: &CommonalityAlgebra, scope: &VarSet, rng: &mut R) -> Result<CommonalityTable> {
        let total = rng.gen_range(0.25..1.5);
        Ok(mass_to_commonality(&self.mass(alg.frames(), scope, rng, total, false)?))
    }

    fn sample_normal<R: Rng + ?Sized>(&self, alg: &CommonalityAlgebra, scope: &VarSet, rng: &mut R) -> Result<CommonalityTable> {
        Ok(mass_to_commonality(&self.mass(alg.frames(), scope, rng, 1.0, false)?))
    }

    fn sample_positive_normal<R: Rng + ?Sized>(&self, alg: &CommonalityAlgebra, scope: &VarSet, rng: &mut R) -> Result<CommonalityTable> {
        Ok(mass_to_commonality(&self.mass(alg.frames(), scope, rng, 1.0, true)?))
    }
}

/// Random relations where each configuration holds with probability `density`.
#[derive(Debug, Clone, Copy)]
pub struct BooleanSampler {
    pub density: f64,
}

impl Default for BooleanSampler {
    fn default() -> Self {
        Self { density: 0.6 }
    }
}

impl Sampler<BooleanAlgebra> for BooleanSampler {
    fn sample<R: Rng + ?Sized>(&self, alg: &BooleanAlgebra, scope: &VarSet, rng: &mut R) -> Result<BooleanRelation> {
        let n = config_count(&alg.frames().cards(scope)?);
        let values = (0..n).map(|_| if rng.gen_bool(self.density) { 1.0 } else { 0.0 }).collect();
        alg.relation(scope.clone(), values)
    }

    fn sample_normal<R: Rng + ?Sized>(&self, alg: &BooleanAlgebra, scope: &VarSet, rng: &mut R) -> Result<BooleanRelation> {
        let n = config_count(&alg.frames().cards(scope)?);
        let mut values: Vec<f64> = (0..n).map(|_| if rng.gen_bool(self.density) { 1.0 } else { 0.0 }).collect();
        values[rng.gen_range(0..n)] = 1.0;
        alg.relation(scope.clone(), values)
    }

    fn sample_positive_normal<R: Rng + ?Sized>(&self, alg: &BooleanAlgebra, scope: &VarSet, rng: &mut R) -> Result<BooleanRelation> {
        self.sample_normal(alg, scope, rng)
    }
}

/// Random subset of `vars` with between `min` and `max` elements.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, vars: &VarSet, min: usize, max: usize) -> VarSet {
    let max = max.min(vars.len());
    let n = rng.gen_range(min.min(max)..=max);
    vars.as_slice().choose_multiple(rng, n).copied().collect()
}

/// A random Markov tree with at most `max_nodes` nodes covering the
/// variables `0..var_count`. Each new node hangs off a random earlier node,
/// sharing a random part of it and adding unused variables, so the running
/// intersection property holds by construction.
pub fn random_markov_tree<R: Rng + ?Sized>(rng: &mut R, var_count: usize, max_nodes: usize) -> MarkovTree {
    assert!(var_count >= 1 && max_nodes >= 1);
    let mut unused: Vec<VarId> = (0..var_count).map(VarId).collect();
    unused.shuffle(rng);
    let first_len = rng.gen_range(1..=unused.len().min(3));
    let first: VarSet = unused.drain(..first_len).collect();
    let mut nodes = vec![first];
    let mut links = Vec::new();
    let mut attempts = 0;
    while nodes.len() < max_nodes && attempts < 20 * max_nodes {
        attempts += 1;
        let parent = rng.gen_range(0..nodes.len());
        let shared = random_subset(rng, &nodes[parent], 0, 2);
        let fresh_len = rng.gen_range(0..=unused.len().min(2));
        let fresh: VarSet = unused[..fresh_len].iter().copied().collect();
        let node = shared.union(&fresh);
        if node.is_empty() || nodes.contains(&node) {
            continue;
        }
        unused.drain(..fresh_len);
        links.push((parent, nodes.len()));
        nodes.push(node);
    }
    // a fresh variable can join any single node without breaking the
    // running intersection property
    for v in unused {
        let i = rng.gen_range(0..nodes.len());
        nodes[i].insert(v);
    }
    MarkovTree::from_links(nodes, &links).expect("generated tree is valid")
}

/// Random factor scopes over a tree: one factor inside every node plus a
/// few extra factors inside random nodes.
pub fn random_factor_scopes<R: Rng + ?Sized>(rng: &mut R, tree: &MarkovTree, extra: usize) -> Vec<VarSet> {
    let mut scopes = Vec::new();
    for node in tree.nodes() {
        scopes.push(if rng.gen_bool(0.7) {
            node.clone()
        } else {
            random_subset(rng, node, 1, node.len())
        });
    }
    for _ in 0..extra {
        let node = &tree.nodes()[rng.gen_range(0..tree.len())];
        scopes.push(random_subset(rng, node, 1, node.len()));
    }
    scopes
}

/// Draws one valuation per scope.
pub fn sample_factors<A, S, R>(algebra: &A, sampler: &S, scopes: &[VarSet], rng: &mut R) -> Result<Vec<A::Value>>
where
    A: ValuationAlgebra,
    S: Sampler<A>,
    R: Rng + ?Sized,
{
    scopes.iter().map(|s| sampler.sample(algebra, s, rng)).collect()
}
