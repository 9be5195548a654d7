//! Query plans: the part of a Markov tree a query needs, and the marginal
//! on it assembled from set-chain factors.

use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::hypergraph::{reduce, GrahamOutcome, Hypergraph};
use crate::markov_tree::MarkovTree;
use crate::query::expr::QueryExpr;
use crate::setchain::SetChain;
use crate::variable::{config_count, Configuration, Frames, VarSet};

/// Graham's reduction in which the variables of `keep` are never deleted.
pub fn modified_graham(h: &Hypergraph, keep: &VarSet) -> GrahamOutcome {
    reduce(h, keep)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanNode {
    pub node: usize,
    /// Full node scope `h_i`.
    pub scope: VarSet,
    /// The part of `h_i` the query needs: query variables and variables
    /// shared with another plan node.
    pub projected: VarSet,
    /// Neighbour toward the plan root.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    pub keep: VarSet,
    /// Plan nodes in breadth-first order from the root.
    pub nodes: Vec<PlanNode>,
    pub root: usize,
    /// Union of the plan's full node scopes.
    pub union: VarSet,
    /// Union of the projected scopes.
    pub projected_union: VarSet,
    pub reduction: GrahamOutcome,
    /// Nodes absent from the reduction's residual that were added to make
    /// the plan connected.
    pub connectors: Vec<usize>,
}

impl QueryPlan {
    /// Plan node ids in ascending order.
    pub fn node_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.nodes.iter().map(|n| n.node).collect();
        ids.sort_unstable();
        ids
    }

    pub fn get(&self, node: usize) -> Option<&PlanNode> {
        self.nodes.iter().find(|n| n.node == node)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// One line per node in ascending id: `node 0: {X1, X7, X8} -> {X1, X7}`.
    pub fn show(&self, frames: &Frames) -> String {
        let mut out = String::new();
        for id in self.node_ids() {
            let n = self.get(id).expect("listed node");
            let role = if n.node == self.root { " (root)" } else { "" };
            out.push_str(&format!(
                "node {}: {} -> {}{}\n",
                n.node,
                frames.show(&n.scope),
                frames.show(&n.projected),
                role
            ));
        }
        out
    }
}

/// Selects the tree nodes surviving the reduction of the tree's node
/// hypergraph with the query variables kept. If the survivors are not
/// connected in `tree`, the nodes on the paths between them are added.
/// The root is the node with the largest projected scope, lowest id first.
pub fn plan_query(tree: &MarkovTree, frames: &Frames, keep: &VarSet) -> Result<QueryPlan> {
    let covered = tree.variables();
    if let Some(v) = keep.difference(&covered).iter().next() {
        return Err(Error::UncoveredVariable(frames.name(v)));
    }
    let reduction = modified_graham(&tree.hypergraph(), keep);
    let mut members: Vec<usize> = reduction.residual.iter().map(|(i, _)| *i).collect();
    if members.is_empty() {
        members.push(tree.construction_order()[0]);
    }
    let connectors = if tree.is_connected_subset(&members) {
        Vec::new()
    } else {
        let span = steiner_subtree(tree, &members);
        let extra: Vec<usize> = span.iter().copied().filter(|i| !members.contains(i)).collect();
        members = span;
        extra
    };
    members.sort_unstable();

    let projected: Vec<(usize, VarSet)> = members
        .iter()
        .map(|&i| {
            let others = members
                .iter()
                .filter(|&&j| j != i)
                .fold(keep.clone(), |acc, &j| acc.union(&tree.nodes()[j]));
            (i, tree.nodes()[i].intersection(&others))
        })
        .collect();
    let root = projected
        .iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
        .map(|p| p.0)
        .expect("plan has a node");

    let (order, parent) = tree.bfs_within(root, |j| members.contains(&j));
    let nodes: Vec<PlanNode> = order
        .iter()
        .map(|&i| PlanNode {
            node: i,
            scope: tree.nodes()[i].clone(),
            projected: projected.iter().find(|p| p.0 == i).expect("member").1.clone(),
            parent: parent[i],
        })
        .collect();
    let union = nodes.iter().fold(VarSet::empty(), |acc, n| acc.union(&n.scope));
    let projected_union = nodes.iter().fold(VarSet::empty(), |acc, n| acc.union(&n.projected));
    Ok(QueryPlan {
        keep: keep.clone(),
        nodes,
        root,
        union,
        projected_union,
        reduction,
        connectors,
    })
}

/// Smallest subtree containing `terminals`: prune non-terminal leaves.
fn steiner_subtree(tree: &MarkovTree, terminals: &[usize]) -> Vec<usize> {
    let mut alive = vec![true; tree.len()];
    loop {
        let leaf = (0..tree.len()).find(|&i| {
            alive[i]
                && !terminals.contains(&i)
                && tree.neighbors(i).iter().filter(|&&j| alive[j]).count() <= 1
        });
        match leaf {
            Some(i) => alive[i] = false,
            None => break,
        }
    }
    (0..tree.len()).filter(|&i| alive[i]).collect()
}

/// The joint marginalized to the plan's projected union:
/// `R_r↓P_r ⊗ ⊗(R_i↓P_i Ⓡ S_i)` with `S_i` on the separator toward the
/// plan parent.
pub fn union_marginal<A: ValuationAlgebra>(algebra: &A, plan: &QueryPlan, chain: &SetChain<A::Value>) -> Result<A::Value> {
    assemble(algebra, plan, chain, true)
}

/// Like [`union_marginal`] on the full node scopes, giving the joint on
/// the plan's whole union.
pub fn union_marginal_unprojected<A: ValuationAlgebra>(
    algebra: &A,
    plan: &QueryPlan,
    chain: &SetChain<A::Value>,
) -> Result<A::Value> {
    assemble(algebra, plan, chain, false)
}

fn assemble<A: ValuationAlgebra>(algebra: &A, plan: &QueryPlan, chain: &SetChain<A::Value>, project: bool) -> Result<A::Value> {
    if plan.len() > 1 && !algebra.supports_removal() {
        return Err(Error::RemovalUnsupported {
            instance: algebra.name(),
        });
    }
    let mut parts = Vec::with_capacity(plan.len());
    for n in &plan.nodes {
        let factor = chain
            .factor_for_node(n.node)
            .ok_or_else(|| Error::InvalidChain(format!("no factor for node {}", n.node)))?;
        let target = if project { &n.projected } else { &n.scope };
        let local = algebra.marginalize(&factor.marginal, target)?;
        match n.parent {
            None => parts.push(local),
            Some(p) => {
                let parent = plan.get(p).expect("parent is a plan node");
                let sep = n.scope.intersection(&parent.scope).intersection(target);
                let s = algebra.marginalize(&local, &sep)?;
                parts.push(algebra.remove(&local, &s)?);
            }
        }
    }
    algebra.combine_all(&parts)
}

/// Total weight of the configurations of the query variables that satisfy
/// `query`.
pub fn evaluate_query<A: ValuationAlgebra>(
    algebra: &A,
    plan: &QueryPlan,
    chain: &SetChain<A::Value>,
    query: &QueryExpr,
) -> Result<f64> {
    // fail on instances without per-configuration values before any work
    algebra.configuration_values(&algebra.identity(&VarSet::empty())?)?;
    let vars = query.vars();
    let union = union_marginal(algebra, plan, chain)?;
    let rho = algebra.marginalize(&union, &vars)?;
    sum_satisfying(algebra, &rho, query)
}

/// Sums the entries of `rho` over configurations of its scope that satisfy
/// `query`.
pub fn sum_satisfying<A: ValuationAlgebra>(algebra: &A, rho: &A::Value, query: &QueryExpr) -> Result<f64> {
    let scope = algebra.scope(rho);
    let cards = algebra.frames().cards(scope)?;
    let values = algebra.configuration_values(rho)?;
    Ok((0..config_count(&cards))
        .filter(|&idx| query.eval(&Configuration::from_index(scope, &cards, idx)))
        .map(|idx| values[idx])
        .sum())
}
