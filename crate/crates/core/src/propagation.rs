//! Two-phase message passing on a Markov tree.

use std::collections::BTreeMap;

use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::markov_tree::MarkovTree;
use crate::variable::VarSet;

/// What a node without factors holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Padding {
    /// The scalar identity on the empty scope.
    #[default]
    Empty,
    /// The identity on the node's own scope.
    Node,
}

/// One valuation per tree node, with scope inside the node.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeAssignment<V> {
    tree: MarkovTree,
    valuations: Vec<V>,
}

impl<V: Clone> TreeAssignment<V> {
    pub fn new<A>(algebra: &A, tree: MarkovTree, valuations: Vec<V>) -> Result<Self>
    where
        A: ValuationAlgebra<Value = V>,
    {
        if valuations.len() != tree.len() {
            return Err(Error::InvalidTree(format!(
                "{} valuations for {} nodes",
                valuations.len(),
                tree.len()
            )));
        }
        for (i, v) in valuations.iter().enumerate() {
            let scope = algebra.scope(v);
            if !scope.is_subset(&tree.nodes()[i]) {
                return Err(Error::NotSubset {
                    target: tree.nodes()[i].to_string(),
                    scope: scope.to_string(),
                });
            }
        }
        Ok(Self { tree, valuations })
    }

    /// Places every factor on the smallest node containing its scope (lowest
    /// index on ties) and combines factors sharing a node.
    pub fn assign<A, I>(algebra: &A, tree: MarkovTree, factors: I) -> Result<Self>
    where
        A: ValuationAlgebra<Value = V>,
        I: IntoIterator<Item = V>,
    {
        Self::assign_with(algebra, tree, factors, Padding::Empty)
    }

    pub fn assign_with<A, I>(algebra: &A, tree: MarkovTree, factors: I, padding: Padding) -> Result<Self>
    where
        A: ValuationAlgebra<Value = V>,
        I: IntoIterator<Item = V>,
    {
        let mut slots: Vec<Vec<V>> = vec![Vec::new(); tree.len()];
        for f in factors {
            let scope = algebra.scope(&f).clone();
            let node = tree
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, h)| scope.is_subset(h))
                .min_by_key(|(i, h)| (h.len(), *i))
                .map(|(i, _)| i)
                .ok_or_else(|| Error::UnassignableFactor(scope.to_string()))?;
            slots[node].push(f);
        }
        let mut valuations = Vec::with_capacity(tree.len());
        for (i, slot) in slots.into_iter().enumerate() {
            let v = match (slot.is_empty(), padding) {
                (true, Padding::Empty) => algebra.identity(&VarSet::empty())?,
                (true, Padding::Node) => algebra.identity(&tree.nodes()[i])?,
                (false, _) => algebra.combine_all(&slot)?,
            };
            valuations.push(v);
        }
        Self::new(algebra, tree, valuations)
    }

    pub fn tree(&self) -> &MarkovTree {
        &self.tree
    }

    pub fn valuations(&self) -> &[V] {
        &self.valuations
    }

    pub fn valuation(&self, i: usize) -> Result<&V> {
        self.valuations.get(i).ok_or(Error::NodeOutOfRange(i))
    }

    /// Combination of every node valuation.
    pub fn joint<A>(&self, algebra: &A) -> Result<V>
    where
        A: ValuationAlgebra<Value = V>,
    {
        let joint = algebra.combine_all(&self.valuations)?;
        algebra.extend(&joint, &self.tree.variables())
    }
}

/// Messages keyed by directed link `(from, to)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageStore<V> {
    messages: BTreeMap<(usize, usize), V>,
}

impl<V> Default for MessageStore<V> {
    fn default() -> Self {
        Self {
            messages: BTreeMap::new(),
        }
    }
}

impl<V> MessageStore<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, from: usize, to: usize) -> Option<&V> {
        self.messages.get(&(from, to))
    }

    pub fn insert(&mut self, from: usize, to: usize, message: V) {
        self.messages.insert((from, to), message);
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &V)> {
        self.messages.iter()
    }
}

fn incoming<'s, V>(tree: &MarkovTree, store: &'s MessageStore<V>, node: usize, skip: Option<usize>) -> Result<Vec<&'s V>> {
    tree.neighbors(node)
        .iter()
        .filter(|&&k| Some(k) != skip)
        .map(|&k| store.get(k, node).ok_or(Error::MissingMessage { from: k, to: node }))
        .collect()
}

/// The message `from -> to`: the node valuation combined with all other
/// incoming messages, marginalized to the separator.
pub fn message<A: ValuationAlgebra>(
    algebra: &A,
    assignment: &TreeAssignment<A::Value>,
    store: &MessageStore<A::Value>,
    from: usize,
    to: usize,
) -> Result<A::Value> {
    let tree = assignment.tree();
    if from >= tree.len() {
        return Err(Error::NodeOutOfRange(from));
    }
    if !tree.are_adjacent(from, to) {
        return Err(Error::InvalidTree(format!("nodes {from} and {to} are not linked")));
    }
    let mut parts = vec![assignment.valuations[from].clone()];
    parts.extend(incoming(tree, store, from, Some(to))?.into_iter().cloned());
    let combined = algebra.combine_all(&parts)?;
    let target = tree.separator(from, to).intersection(algebra.scope(&combined));
    algebra.marginalize(&combined, &target)
}

/// The marginal at node `j`, on the node's full scope.
pub fn marginal_at<A: ValuationAlgebra>(
    algebra: &A,
    assignment: &TreeAssignment<A::Value>,
    store: &MessageStore<A::Value>,
    j: usize,
) -> Result<A::Value> {
    let tree = assignment.tree();
    let node = tree.node(j)?;
    let mut parts = vec![assignment.valuations[j].clone()];
    parts.extend(incoming(tree, store, j, None)?.into_iter().cloned());
    let combined = algebra.combine_all(&parts)?;
    algebra.extend(&combined, node)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation<V> {
    pub root: usize,
    pub store: MessageStore<V>,
    pub marginals: Vec<V>,
}

/// Computes every message once, inward toward `root` and then back out,
/// and all node marginals. The root defaults to the first node of the
/// construction order.
pub fn propagate_all<A: ValuationAlgebra>(
    algebra: &A,
    assignment: &TreeAssignment<A::Value>,
    root: Option<usize>,
) -> Result<Propagation<A::Value>> {
    let tree = assignment.tree();
    let root = root.unwrap_or(tree.construction_order()[0]);
    if root >= tree.len() {
        return Err(Error::NodeOutOfRange(root));
    }
    let (order, parent) = tree.bfs(root);
    let mut store = MessageStore::new();
    for &i in order.iter().rev() {
        if let Some(p) = parent[i] {
            let m = message(algebra, assignment, &store, i, p)?;
            store.insert(i, p, m);
        }
    }
    for &i in &order {
        if let Some(p) = parent[i] {
            let m = message(algebra, assignment, &store, p, i)?;
            store.insert(p, i, m);
        }
    }
    let marginals = (0..tree.len())
        .map(|j| marginal_at(algebra, assignment, &store, j))
        .collect::<Result<_>>()?;
    Ok(Propagation {
        root,
        store,
        marginals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ProbabilityAlgebra;
    use crate::variable::{Frames, VarId};

    fn set(ids: &[usize]) -> VarSet {
        ids.iter().map(|&i| VarId(i)).collect()
    }

    fn chain() -> (ProbabilityAlgebra, TreeAssignment<crate::instances::ProbabilityPotential>) {
        let alg = ProbabilityAlgebra::new(Frames::binary(&["A", "B"]).unwrap());
        let tree = MarkovTree::from_links(vec![set(&[0]), set(&[0, 1]), set(&[1])], &[(0, 1), (1, 2)]).unwrap();
        let pa = alg.potential(set(&[0]), vec![0.3, 0.7]).unwrap();
        let pba = alg.potential(set(&[0, 1]), vec![0.9, 0.1, 0.2, 0.8]).unwrap();
        let a = TreeAssignment::assign(&alg, tree, vec![pa, pba]).unwrap();
        (alg, a)
    }

    #[test]
    fn factors_go_to_smallest_node() {
        let (alg, a) = chain();
        assert_eq!(*alg.scope(&a.valuations()[0]), set(&[0]));
        assert_eq!(*alg.scope(&a.valuations()[1]), set(&[0, 1]));
        assert_eq!(*alg.scope(&a.valuations()[2]), VarSet::empty());
    }

    #[test]
    fn chain_marginals() {
        let (alg, a) = chain();
        let p = propagate_all(&alg, &a, None).unwrap();
        assert_eq!(p.store.len(), 4);
        assert!(alg.approx_eq(&p.marginals[1], &alg.potential(set(&[0, 1]), vec![0.27, 0.03, 0.14, 0.56]).unwrap(), 1e-12));
        assert!(alg.approx_eq(&p.marginals[2], &alg.potential(set(&[1]), vec![0.41, 0.59]).unwrap(), 1e-12));
    }

    #[test]
    fn premature_message_is_an_error() {
        let (alg, a) = chain();
        let store = MessageStore::new();
        assert_eq!(
            message(&alg, &a, &store, 1, 2),
            Err(Error::MissingMessage { from: 0, to: 1 })
        );
        assert!(message(&alg, &a, &store, 0, 1).is_ok());
        assert!(message(&alg, &a, &store, 0, 2).is_err());
    }

    #[test]
    fn single_node_marginal_is_the_valuation() {
        let alg = ProbabilityAlgebra::new(Frames::binary(&["A"]).unwrap());
        let tree = MarkovTree::from_links(vec![set(&[0])], &[]).unwrap();
        let v = alg.potential(set(&[0]), vec![0.5, 2.0]).unwrap();
        let a = TreeAssignment::assign(&alg, tree, vec![v.clone()]).unwrap();
        assert_eq!(propagate_all(&alg, &a, None).unwrap().marginals, vec![v]);
    }

    #[test]
    fn unassignable_factor() {
        let alg = ProbabilityAlgebra::new(Frames::binary(&["A", "B"]).unwrap());
        let tree = MarkovTree::from_links(vec![set(&[0]), set(&[1])], &[(0, 1)]).unwrap();
        let v = alg.identity(&set(&[0, 1])).unwrap();
        assert!(matches!(
            TreeAssignment::assign(&alg, tree, vec![v]),
            Err(Error::UnassignableFactor(_))
        ));
    }
}
