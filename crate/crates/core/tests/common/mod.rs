#![allow(dead_code)]

use rand::Rng;
use vbs_core::axioms::Sampler;
use vbs_core::instances::commonality_to_mass;
use vbs_core::random::{random_factor_scopes, random_markov_tree, BooleanSampler, CommonalitySampler, ProbabilitySampler};
use vbs_core::{
    BooleanAlgebra, BooleanRelation, CommonalityAlgebra, CommonalityTable, Frames, Hypergraph, ProbabilityAlgebra,
    ProbabilityPotential, TreeAssignment, ValuationAlgebra, VarId, VarSet,
};
use vbs_testkit::belief::Mass;
use vbs_testkit::Space;

pub fn set(ids: &[usize]) -> VarSet {
    ids.iter().map(|&i| VarId(i)).collect()
}

pub fn ids(s: &VarSet) -> Vec<usize> {
    s.iter().map(VarId::index).collect()
}

/// Variables X1..X12 and the twelve-variable example hypergraph; `VarId(i)`
/// is `X{i+1}`.
pub fn h1() -> (Frames, Hypergraph) {
    let names: Vec<String> = (1..=12).map(|i| format!("X{i}")).collect();
    let frames = Frames::binary(&names).unwrap();
    let x = |ns: &[usize]| ns.iter().map(|&n| VarId(n - 1)).collect::<VarSet>();
    let h = Hypergraph::new(vec![
        x(&[1, 7, 8]),
        x(&[2, 5, 6, 7]),
        x(&[3, 6]),
        x(&[4, 5]),
        x(&[8, 9, 10]),
        x(&[10, 11, 12]),
    ])
    .unwrap();
    (frames, h)
}

pub fn binary_frames(n: usize) -> Frames {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    Frames::binary(&names).unwrap()
}

pub struct Model<A: ValuationAlgebra> {
    pub alg: A,
    pub space: Space,
    pub factors: Vec<A::Value>,
    pub assignment: TreeAssignment<A::Value>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Draw {
    Any,
    Normal,
    Positive,
}

fn draw<A: ValuationAlgebra, S: Sampler<A>, R: Rng>(alg: &A, sampler: &S, scope: &VarSet, rng: &mut R, how: Draw) -> A::Value {
    match how {
        Draw::Any => sampler.sample(alg, scope, rng),
        Draw::Normal => sampler.sample_normal(alg, scope, rng),
        Draw::Positive => sampler.sample_positive_normal(alg, scope, rng),
    }
    .unwrap()
}

fn model<A, S, R>(alg: A, sampler: &S, rng: &mut R, vars: usize, max_nodes: usize, how: Draw) -> Model<A>
where
    A: ValuationAlgebra,
    S: Sampler<A>,
    R: Rng,
{
    let tree = random_markov_tree(rng, vars, max_nodes);
    let mut scopes = random_factor_scopes(rng, &tree, 2);
    // every tree variable occurs in some factor, as in compiled models
    let covered = scopes.iter().fold(VarSet::empty(), |acc, s| acc.union(s));
    for v in tree.variables().difference(&covered).iter() {
        scopes.push(VarSet::singleton(v));
    }
    let factors: Vec<A::Value> = scopes.iter().map(|s| draw(&alg, sampler, s, rng, how)).collect();
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
    let alg = ProbabilityAlgebra::new(binary_frames(n));
    model(alg, &ProbabilitySampler::default(), rng, n, max_nodes, how)
}

pub fn commonality_model<R: Rng>(rng: &mut R, max_vars: usize, max_nodes: usize, how: Draw) -> Model<CommonalityAlgebra> {
    let n = rng.gen_range(2..=max_vars);
    let alg = CommonalityAlgebra::new(binary_frames(n));
    model(alg, &CommonalitySampler::default(), rng, n, max_nodes, how)
}

pub fn boolean_model<R: Rng>(rng: &mut R, max_vars: usize, max_nodes: usize) -> Model<BooleanAlgebra> {
    let n = rng.gen_range(2..=max_vars);
    let alg = BooleanAlgebra::new(binary_frames(n));
    model(alg, &BooleanSampler::default(), rng, n, max_nodes, Draw::Normal)
}

pub fn plain_probability(p: &ProbabilityPotential) -> (Vec<usize>, Vec<f64>) {
    (ids(p.scope()), p.values().to_vec())
}

pub fn plain_boolean(b: &BooleanRelation) -> (Vec<usize>, Vec<f64>) {
    (ids(b.scope()), b.values().to_vec())
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

impl Model<ProbabilityAlgebra> {
    pub fn oracle_joint(&self) -> Vec<f64> {
        let plain: Vec<_> = self.factors.iter().map(plain_probability).collect();
        vbs_testkit::joint_product(&self.space, &plain)
    }

    /// Oracle marginal on `scope` as an engine valuation.
    pub fn oracle_marginal(&self, joint: &[f64], scope: &VarSet) -> ProbabilityPotential {
        let values = vbs_testkit::marginal(&self.space, joint, &ids(scope));
        self.alg.potential(scope.clone(), values).unwrap()
    }
}

impl Model<BooleanAlgebra> {
    pub fn oracle_joint(&self) -> Vec<f64> {
        let plain: Vec<_> = self.factors.iter().map(plain_boolean).collect();
        vbs_testkit::joint_product(&self.space, &plain)
    }

    pub fn oracle_marginal(&self, joint: &[f64], scope: &VarSet) -> BooleanRelation {
        let values = vbs_testkit::marginal_with(&self.space, joint, &ids(scope), 0.0, f64::max);
        self.alg.relation(scope.clone(), values).unwrap()
    }
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
