//! Random models and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use vbs_core::axioms::Sampler;
use vbs_core::instances::commonality_to_mass;
use vbs_core::random::{random_factor_scopes, random_markov_tree, CommonalitySampler, ProbabilitySampler};
use vbs_core::{
    CommonalityAlgebra, CommonalityTable, Frames, MarkovTree, ProbabilityAlgebra, ProbabilityPotential, QueryExpr,
    TreeAssignment, ValuationAlgebra, VarId, VarSet,
};
use vbs_testkit::belief::Mass;
use vbs_testkit::Space;

pub fn ids(s: &VarSet) -> Vec<usize> {
    s.iter().map(VarId::index).collect()
}

pub fn binary_frames(n: usize) -> Frames {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    Frames::binary(&names).unwrap()
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    Any,
    Normal,
    Positive,
}

pub struct Model<A: ValuationAlgebra> {
    pub alg: A,
    pub space: Space,
    pub factors: Vec<A::Value>,
    pub assignment: TreeAssignment<A::Value>,
}

impl<A: ValuationAlgebra> Model<A> {
    pub fn tree(&self) -> &MarkovTree {
        self.assignment.tree()
    }
}

/// Factors inside the nodes of a random tree; every tree variable occurs in
/// at least one factor.
fn model<A, S, R>(alg: A, sampler: &S, rng: &mut R, vars: usize, max_nodes: usize, how: Draw) -> Model<A>
where
    A: ValuationAlgebra,
    S: Sampler<A>,
    R: Rng,
{
    let tree = random_markov_tree(rng, vars, max_nodes);
    let mut scopes = random_factor_scopes(rng, &tree, 2);
    let covered = scopes.iter().fold(VarSet::empty(), |acc, s| acc.union(s));
    for v in tree.variables().difference(&covered).iter() {
        scopes.push(VarSet::singleton(v));
    }
    let factors: Vec<A::Value> = scopes
        .iter()
        .map(|s| {
            match how {
                Draw::Any => sampler.sample(&alg, s, rng),
                Draw::Normal => sampler.sample_normal(&alg, s, rng),
                Draw::Positive => sampler.sample_positive_normal(&alg, s, rng),
            }
            .unwrap()
        })
        .collect();
    let assignment = TreeAssignment::assign(&alg, tree, factors.clone()).unwrap();
    Model {
        space: Space::binary(vars),
        alg,
        factors,
        assignment,
    }
}

pub fn probability_model<R: Rng>(rng: &mut R, max_vars: usize, max_nodes: usize, how: Draw) -> Model<ProbabilityAlgebra> {
    let n = rng.gen_range(2..=max_vars);
    model(ProbabilityAlgebra::new(binary_frames(n)), &ProbabilitySampler::default(), rng, n, max_nodes, how)
}

pub fn commonality_model<R: Rng>(rng: &mut R, max_vars: usize, max_nodes: usize, how: Draw) -> Model<CommonalityAlgebra> {
    let n = rng.gen_range(2..=max_vars);
    model(CommonalityAlgebra::new(binary_frames(n)), &CommonalitySampler::default(), rng, n, max_nodes, how)
}

impl Model<ProbabilityAlgebra> {
    pub fn oracle_joint(&self) -> Vec<f64> {
        let plain: Vec<(Vec<usize>, Vec<f64>)> = self
            .factors
            .iter()
            .map(|p| (ids(p.scope()), p.values().to_vec()))
            .collect();
        vbs_testkit::joint_product(&self.space, &plain)
    }

    pub fn oracle_marginal(&self, joint: &[f64], scope: &VarSet) -> ProbabilityPotential {
        let values = vbs_testkit::marginal(&self.space, joint, &ids(scope));
        self.alg.potential(scope.clone(), values).unwrap()
    }
}

pub fn plain_mass(space: &Space, q: &CommonalityTable) -> Mass {
    let m = commonality_to_mass(q);
    let masks: Vec<(usize, f64)> = m
        .masses()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0.0)
        .map(|(i, &x)| (i + 1, x))
        .collect();
    Mass::from_masks(space, &ids(q.scope()), &masks)
}

impl Model<CommonalityAlgebra> {
    pub fn oracle_joint(&self) -> Mass {
        let masses: Vec<Mass> = self.factors.iter().map(|q| plain_mass(&self.space, q)).collect();
        vbs_testkit::belief::joint(&self.space, &masses)
    }

    pub fn oracle_marginal(&self, joint: &Mass, scope: &VarSet) -> CommonalityTable {
        let values = joint.project(&ids(scope)).commonality(&self.space);
        self.alg.table(scope.clone(), values).unwrap()
    }
}

fn random_literal<R: Rng>(rng: &mut R, frames: &Frames, vars: &[VarId]) -> QueryExpr {
    let v = *vars.choose(rng).unwrap();
    let lit = QueryExpr::Literal {
        var: v,
        value: rng.gen_range(0..frames.card(v).unwrap()),
    };
    if rng.gen_bool(0.3) {
        lit.not()
    } else {
        lit
    }
}

/// One to three conjunctions of one to three (possibly negated) literals.
pub fn random_dnf<R: Rng>(rng: &mut R, frames: &Frames, vars: &[VarId]) -> QueryExpr {
    let mut q: Option<QueryExpr> = None;
    for _ in 0..rng.gen_range(1..=3) {
        let mut t = random_literal(rng, frames, vars);
        for _ in 0..rng.gen_range(0..3) {
            t = t.and(random_literal(rng, frames, vars));
        }
        q = Some(match q {
            None => t,
            Some(q) => q.or(t),
        });
    }
    q.unwrap()
}

/// Brute-force value of `q`: the joint summed over satisfying configurations.
pub fn oracle_query(space: &Space, joint: &[f64], q: &QueryExpr) -> f64 {
    vbs_testkit::weighted_sum(space, joint, |c| q.holds(&|v| Some(c[v.index()])))
}

/// Connected node subsets of `tree` whose union covers `keep`.
pub fn covering_subtrees(tree: &MarkovTree, keep: &VarSet) -> Vec<Vec<usize>> {
    (1u32..1 << tree.len())
        .map(|bits| (0..tree.len()).filter(|i| bits >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| tree.is_connected_subset(s))
        .filter(|s| keep.is_subset(&node_union(tree, s)))
        .collect()
}

pub fn node_union(tree: &MarkovTree, nodes: &[usize]) -> VarSet {
    nodes.iter().fold(VarSet::empty(), |acc, &i| acc.union(&tree.nodes()[i]))
}
