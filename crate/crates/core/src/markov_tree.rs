//! Markov trees: trees of variable sets with the running intersection
//! property.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::hypergraph::{graham_test, GrahamAction, Hypergraph};
use crate::variable::{Frames, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovTree {
    nodes: Vec<VarSet>,
    links: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    construction_order: Vec<usize>,
}

impl MarkovTree {
    /// Builds a tree from node sets and undirected links. The construction
    /// order is breadth-first from node 0.
    pub fn from_links(nodes: Vec<VarSet>, links: &[(usize, usize)]) -> Result<Self> {
        let tree = Self::skeleton(nodes, links)?;
        let order = tree.bfs(0).0;
        tree.finish(order)
    }

    /// Like [`MarkovTree::from_links`] with an explicit construction order,
    /// in which every node after the first must have an earlier neighbour.
    pub fn with_order(nodes: Vec<VarSet>, links: &[(usize, usize)], order: Vec<usize>) -> Result<Self> {
        Self::skeleton(nodes, links)?.finish(order)
    }

    fn skeleton(nodes: Vec<VarSet>, links: &[(usize, usize)]) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one node".into()));
        }
        if links.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{n} nodes need {} links, found {}",
                n - 1,
                links.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in links {
            if a >= n || b >= n {
                return Err(Error::NodeOutOfRange(a.max(b)));
            }
            if a == b || adjacency[a].contains(&b) {
                return Err(Error::InvalidTree(format!("bad link {a} - {b}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        let tree = Self {
            nodes,
            links: links.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
            adjacency,
            construction_order: Vec::new(),
        };
        if tree.bfs(0).0.len() != n {
            return Err(Error::InvalidTree("links do not connect all nodes".into()));
        }
        Ok(tree)
    }

    fn finish(mut self, order: Vec<usize>) -> Result<Self> {
        let n = self.nodes.len();
        let mut seen = vec![false; n];
        for (pos, &node) in order.iter().enumerate() {
            if node >= n || seen[node] {
                return Err(Error::InvalidTree("construction order is not a permutation".into()));
            }
            if pos > 0 && !self.adjacency[node].iter().any(|&m| seen[m]) {
                return Err(Error::InvalidTree(format!(
                    "node {node} has no earlier neighbour in the construction order"
                )));
            }
            seen[node] = true;
        }
        if order.len() != n {
            return Err(Error::InvalidTree("construction order is not a permutation".into()));
        }
        self.construction_order = order;
        if !self.has_running_intersection() {
            return Err(Error::InvalidTree(
                "running intersection property does not hold".into(),
            ));
        }
        Ok(self)
    }

    pub fn nodes(&self) -> &[VarSet] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Result<&VarSet> {
        self.nodes.get(i).ok_or(Error::NodeOutOfRange(i))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn links(&self) -> &[(usize, usize)] {
        &self.links
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a).is_some_and(|adj| adj.contains(&b))
    }

    pub fn separator(&self, a: usize, b: usize) -> VarSet {
        self.nodes[a].intersection(&self.nodes[b])
    }

    pub fn construction_order(&self) -> &[usize] {
        &self.construction_order
    }

    pub fn variables(&self) -> VarSet {
        self.nodes.iter().fold(VarSet::empty(), |acc, n| acc.union(n))
    }

    pub fn hypergraph(&self) -> Hypergraph {
        Hypergraph::from_edges_unchecked(self.nodes.clone())
    }

    /// Breadth-first order from `root` (neighbours in ascending index) and
    /// each node's parent in that traversal.
    pub fn bfs(&self, root: usize) -> (Vec<usize>, Vec<Option<usize>>) {
        self.bfs_within(root, |_| true)
    }

    /// Breadth-first traversal restricted to nodes accepted by `allowed`.
    pub fn bfs_within(&self, root: usize, allowed: impl Fn(usize) -> bool) -> (Vec<usize>, Vec<Option<usize>>) {
        let mut parent = vec![None; self.nodes.len()];
        let mut seen = vec![false; self.nodes.len()];
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] && allowed(j) {
                    seen[j] = true;
                    parent[j] = Some(i);
                    order.push(j);
                    queue.push_back(j);
                }
            }
        }
        (order, parent)
    }

    /// True when `set` induces a connected subtree.
    pub fn is_connected_subset(&self, set: &[usize]) -> bool {
        match set.first() {
            None => true,
            Some(&start) => self.bfs_within(start, |j| set.contains(&j)).0.len() == set.len(),
        }
    }

    /// Every node after the first in construction order shares with the
    /// earlier nodes only variables that one earlier neighbour holds.
    pub fn has_running_intersection(&self) -> bool {
        let mut earlier = VarSet::empty();
        for (pos, &i) in self.construction_order.iter().enumerate() {
            if pos > 0 {
                let shared = self.nodes[i].intersection(&earlier);
                let placed = &self.construction_order[..pos];
                let ok = self.adjacency[i]
                    .iter()
                    .any(|j| placed.contains(j) && shared.is_subset(&self.nodes[*j]));
                if !ok {
                    return false;
                }
            }
            earlier = earlier.union(&self.nodes[i]);
        }
        true
    }

    /// For every link, the two sides of the cut share exactly the link's
    /// separator.
    pub fn has_separator_property(&self) -> bool {
        self.links.iter().all(|&(a, b)| {
            let side = |from: usize, avoid: usize| {
                self.bfs_within(from, |j| j != avoid)
                    .0
                    .iter()
                    .fold(VarSet::empty(), |acc, &k| acc.union(&self.nodes[k]))
            };
            side(a, b).intersection(&side(b, a)) == self.separator(a, b)
        })
    }

    pub fn show(&self, frames: &Frames) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            out.push_str(&format!("node {i}: {}\n", frames.show(n)));
        }
        for &(a, b) in &self.links {
            out.push_str(&format!("link {a} - {b}: {}\n", frames.show(&self.separator(a, b))));
        }
        out
    }
}

/// The Markov tree of a hypertree: one node per edge, each edge linked to
/// the edge that absorbed it during Graham's reduction. The construction
/// order is the reverse of the edge deletion order.
pub fn build_markov_tree(h: &Hypergraph) -> Result<MarkovTree> {
    let outcome = graham_test(h);
    if !outcome.is_hypertree() {
        return Err(Error::NotHypertree {
            residual: outcome
                .residual_edges()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", "),
        });
    }
    let mut links = Vec::new();
    let mut deleted = Vec::new();
    for step in &outcome.trace.steps {
        if let GrahamAction::DeleteEdge {
            edge, absorbed_into, ..
        } = step.action
        {
            deleted.push(edge);
            if let Some(f) = absorbed_into {
                links.push((edge, f));
            }
        }
    }
    deleted.reverse();
    MarkovTree::with_order(h.edges().to_vec(), &links, deleted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variable::VarId;

    fn set(ids: &[usize]) -> VarSet {
        ids.iter().map(|&i| VarId(i)).collect()
    }

    #[test]
    fn rejects_cycles_and_disconnection() {
        let nodes = vec![set(&[0]), set(&[0, 1]), set(&[1])];
        assert!(MarkovTree::from_links(nodes.clone(), &[(0, 1)]).is_err());
        assert!(MarkovTree::from_links(nodes.clone(), &[(0, 1), (0, 1)]).is_err());
        assert!(MarkovTree::from_links(nodes, &[(0, 1), (1, 2)]).is_ok());
    }

    #[test]
    fn rejects_broken_running_intersection() {
        let nodes = vec![set(&[0, 1]), set(&[1, 2]), set(&[0, 2])];
        assert!(MarkovTree::from_links(nodes, &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn tree_from_hypertree() {
        let h = Hypergraph::new(vec![set(&[0, 1]), set(&[1, 2]), set(&[2, 3]), set(&[4])]).unwrap();
        let t = build_markov_tree(&h).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.has_separator_property());
        assert!(t.has_running_intersection());
        // disconnected edge is joined through an empty separator
        let sep_sizes: Vec<usize> = t.links().iter().map(|&(a, b)| t.separator(a, b).len()).collect();
        assert!(sep_sizes.contains(&0));
    }

    #[test]
    fn non_hypertree_is_refused() {
        let h = Hypergraph::new(vec![set(&[0, 1]), set(&[1, 2]), set(&[0, 2])]).unwrap();
        assert!(matches!(build_markov_tree(&h), Err(Error::NotHypertree { .. })));
    }

    #[test]
    fn connected_subsets() {
        let nodes = vec![set(&[0]), set(&[0, 1]), set(&[1])];
        let t = MarkovTree::from_links(nodes, &[(0, 1), (1, 2)]).unwrap();
        assert!(t.is_connected_subset(&[0, 1]));
        assert!(!t.is_connected_subset(&[0, 2]));
        assert_eq!(t.bfs(2).0, vec![2, 1, 0]);
    }
}
