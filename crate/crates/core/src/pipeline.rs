//! From a list of factors to a populated Markov tree.

use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::hypergraph::{cover_with_details, Covering, Hypergraph};
use crate::markov_tree::{build_markov_tree, MarkovTree};
use crate::propagation::TreeAssignment;
use crate::variable::VarSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Compiled<V> {
    /// Distinct non-empty factor scopes, in order of first appearance.
    pub source: Hypergraph,
    pub covering: Covering,
    pub tree: MarkovTree,
    pub assignment: TreeAssignment<V>,
}

/// Covers the factor hypergraph by a hypertree, builds its Markov tree and
/// assigns the factors to nodes.
pub fn compile<A: ValuationAlgebra>(algebra: &A, factors: Vec<A::Value>) -> Result<Compiled<A::Value>> {
    let mut edges: Vec<VarSet> = Vec::new();
    for f in &factors {
        let s = algebra.scope(f);
        if !s.is_empty() && !edges.contains(s) {
            edges.push(s.clone());
        }
    }
    if edges.is_empty() {
        return Err(Error::InvalidHypergraph("no factor mentions a variable".into()));
    }
    let source = Hypergraph::new(edges)?;
    let covering = cover_with_details(&source);
    let tree = build_markov_tree(&covering.hypergraph)?;
    let assignment = TreeAssignment::assign(algebra, tree.clone(), factors)?;
    Ok(Compiled {
        source,
        covering,
        tree,
        assignment,
    })
}
