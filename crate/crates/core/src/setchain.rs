//! Set-chain form of the joint valuation: node marginals `R_k` and
//! separator marginals `S_k` with `R = R_1 ⊗ ⊗(R_k Ⓡ S_k)`.

use std::collections::HashMap;

use crate::algebra::ValuationAlgebra;
use crate::error::{Error, Result};
use crate::markov_tree::MarkovTree;
use crate::propagation::TreeAssignment;
use crate::variable::VarSet;

/// Node numbering `1..=n` in which every node after the first has exactly
/// one lower-numbered neighbour, its predecessor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Numbering {
    order: Vec<usize>,
    number: Vec<usize>,
    predecessor: Vec<Option<usize>>,
}

impl Numbering {
    /// Node carrying number `k` (1-based).
    pub fn node(&self, k: usize) -> usize {
        self.order[k - 1]
    }

    /// Number (1-based) of `node`.
    pub fn number(&self, node: usize) -> usize {
        self.number[node]
    }

    pub fn predecessor(&self, node: usize) -> Option<usize> {
        self.predecessor[node]
    }

    /// Nodes in number order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Every `k >= 2` has exactly one neighbour numbered below `k`.
    pub fn is_valid_for(&self, tree: &MarkovTree) -> bool {
        self.order.len() == tree.len()
            && self.order.iter().enumerate().all(|(pos, &node)| {
                let lower = tree
                    .neighbors(node)
                    .iter()
                    .filter(|&&m| self.number[m] < pos + 1)
                    .count();
                lower == usize::from(pos > 0)
            })
    }
}

/// Breadth-first numbering from `root`; the root defaults to the first node
/// of the tree's construction order.
pub fn order_nodes(tree: &MarkovTree, root: Option<usize>) -> Result<Numbering> {
    let root = root.unwrap_or(tree.construction_order()[0]);
    if root >= tree.len() {
        return Err(Error::NodeOutOfRange(root));
    }
    let (order, predecessor) = tree.bfs(root);
    let mut number = vec![0; tree.len()];
    for (pos, &node) in order.iter().enumerate() {
        number[node] = pos + 1;
    }
    Ok(Numbering {
        order,
        number,
        predecessor,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetChainFactor<V> {
    /// Position `k` in the numbering.
    pub number: usize,
    pub node: usize,
    pub scope: VarSet,
    /// `R_k`, the joint marginalized to the node.
    pub marginal: V,
    /// `S_k`, `R_k` marginalized to the separator with the predecessor.
    pub separator: Option<V>,
    pub predecessor: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainStats {
    /// Messages computed from scratch.
    pub messages: usize,
    /// Messages taken from an earlier pass unchanged.
    pub memo_hits: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetChain<V> {
    factors: Vec<SetChainFactor<V>>,
    pub stats: ChainStats,
}

impl<V> SetChain<V> {
    /// Builds a chain from stored factors, checking that numbers run
    /// `1..=n` and that only the first factor lacks a separator.
    pub fn from_factors(mut factors: Vec<SetChainFactor<V>>) -> Result<Self> {
        factors.sort_by_key(|f| f.number);
        for (pos, f) in factors.iter().enumerate() {
            if f.number != pos + 1 {
                return Err(Error::InvalidChain(format!("missing factor number {}", pos + 1)));
            }
            if (pos == 0) != f.separator.is_none() || (pos == 0) != f.predecessor.is_none() {
                return Err(Error::InvalidChain(format!(
                    "factor {} has a misplaced separator",
                    f.number
                )));
            }
        }
        if factors.is_empty() {
            return Err(Error::InvalidChain("chain has no factors".into()));
        }
        Ok(Self {
            factors,
            stats: ChainStats::default(),
        })
    }

    /// Factors in number order.
    pub fn factors(&self) -> &[SetChainFactor<V>] {
        &self.factors
    }

    pub fn factor_for_node(&self, node: usize) -> Option<&SetChainFactor<V>> {
        self.factors.iter().find(|f| f.node == node)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainOptions {
    pub memoize: bool,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self { memoize: true }
    }
}

/// Snapshot handed to the observer after step `k` has been finalized.
#[derive(Debug)]
pub struct ChainState<'a, V> {
    pub step: usize,
    pub numbering: &'a Numbering,
    /// Working valuations by node; `None` once a node is finalized.
    pub working: &'a [Option<V>],
    pub finalized: &'a [SetChainFactor<V>],
}

struct Memo<V> {
    version: u64,
    inputs: Vec<(usize, u64)>,
    combined: V,
    message: V,
    stamp: u64,
}

pub fn build_setchain<A: ValuationAlgebra>(
    algebra: &A,
    assignment: &TreeAssignment<A::Value>,
    numbering: &Numbering,
) -> Result<SetChain<A::Value>> {
    build_setchain_with(algebra, assignment, numbering, ChainOptions::default(), |_| {})
}

/// For `k = n, …, 2`: an inward pass over nodes `1..=k` toward node `k`,
/// dividing each sent message out of its sender except at `k`'s
/// predecessor; then `R_k` is fixed and the predecessor absorbs `S_k`.
/// Finally `R_1` is what remains at node 1.
pub fn build_setchain_with<A, F>(
    algebra: &A,
    assignment: &TreeAssignment<A::Value>,
    numbering: &Numbering,
    options: ChainOptions,
    mut observer: F,
) -> Result<SetChain<A::Value>>
where
    A: ValuationAlgebra,
    F: FnMut(&ChainState<'_, A::Value>),
{
    if !algebra.supports_removal() {
        return Err(Error::RemovalUnsupported {
            instance: algebra.name(),
        });
    }
    let tree = assignment.tree();
    if !numbering.is_valid_for(tree) {
        return Err(Error::InvalidTree("numbering does not fit the tree".into()));
    }
    let n = tree.len();
    let mut working: Vec<Option<A::Value>> = assignment.valuations().iter().cloned().map(Some).collect();
    let mut versions = vec![0u64; n];
    let mut memo: HashMap<(usize, usize), Memo<A::Value>> = HashMap::new();
    let mut next_stamp = 0u64;
    let mut stats = ChainStats::default();
    let mut factors = Vec::with_capacity(n);

    for k in (2..=n).rev() {
        let target = numbering.node(k);
        let (order, parent) = tree.bfs_within(target, |j| numbering.number(j) <= k);
        let mut sent: HashMap<usize, (A::Value, u64)> = HashMap::new();
        let mut pred_combined = None;

        for &i in order.iter().rev() {
            let Some(j) = parent[i] else { continue };
            let children: Vec<usize> = tree
                .neighbors(i)
                .iter()
                .copied()
                .filter(|&l| l != j && numbering.number(l) <= k)
                .collect();
            let inputs: Vec<(usize, u64)> = children.iter().map(|&l| (l, sent[&l].1)).collect();
            let cached = memo
                .get(&(i, j))
                .filter(|m| options.memoize && m.version == versions[i] && m.inputs == inputs);

            let (combined, message, stamp) = if let Some(m) = cached {
                // Inputs are unchanged, so the last stripping at `i` was a
                // no-op and need not be repeated.
                stats.memo_hits += 1;
                (m.combined.clone(), m.message.clone(), m.stamp)
            } else {
                stats.messages += 1;
                let current = working[i].as_ref().expect("active node");
                let mut parts = vec![current.clone()];
                parts.extend(children.iter().map(|l| sent[l].0.clone()));
                let combined = algebra.combine_all(&parts)?;
                let sep = tree.separator(i, j).intersection(algebra.scope(&combined));
                let message = algebra.marginalize(&combined, &sep)?;
                let stamp = match memo.get(&(i, j)) {
                    Some(old) if old.message == message => old.stamp,
                    _ => {
                        next_stamp += 1;
                        next_stamp
                    }
                };
                memo.insert(
                    (i, j),
                    Memo {
                        version: versions[i],
                        inputs,
                        combined: combined.clone(),
                        message: message.clone(),
                        stamp,
                    },
                );
                if j != target {
                    let stripped = algebra.remove(&combined, &message)?;
                    if working[i].as_ref() != Some(&stripped) {
                        versions[i] += 1;
                        working[i] = Some(stripped);
                    }
                }
                (combined, message, stamp)
            };
            if j == target {
                pred_combined = Some(combined);
            }
            sent.insert(i, (message, stamp));
        }

        let pred = numbering.predecessor(target).expect("numbered node has a predecessor");
        let (incoming, _) = sent.remove(&pred).expect("predecessor sent a message");
        let pred_combined = pred_combined.expect("predecessor combined");
        let scope = tree.nodes()[target].clone();
        let own = working[target].take().expect("active node");
        let marginal = algebra.extend(&algebra.combine(&own, &incoming)?, &scope)?;
        let separator = algebra.marginalize(&marginal, &tree.separator(target, pred))?;
        let rebalanced = algebra.combine(&algebra.remove(&pred_combined, &incoming)?, &separator)?;
        if working[pred].as_ref() != Some(&rebalanced) {
            versions[pred] += 1;
            working[pred] = Some(rebalanced);
        }
        factors.push(SetChainFactor {
            number: k,
            node: target,
            scope,
            marginal,
            separator: Some(separator),
            predecessor: Some(pred),
        });
        observer(&ChainState {
            step: k,
            numbering,
            working: &working,
            finalized: &factors,
        });
    }

    let first = numbering.node(1);
    let scope = tree.nodes()[first].clone();
    let own = working[first].take().expect("root stays active");
    factors.push(SetChainFactor {
        number: 1,
        node: first,
        marginal: algebra.extend(&own, &scope)?,
        scope,
        separator: None,
        predecessor: None,
    });
    observer(&ChainState {
        step: 1,
        numbering,
        working: &working,
        finalized: &factors,
    });
    factors.reverse();
    Ok(SetChain { factors, stats })
}

/// `R_1 ⊗ ⊗(R_k Ⓡ S_k)`.
pub fn reconstruct_joint<A: ValuationAlgebra>(algebra: &A, chain: &SetChain<A::Value>) -> Result<A::Value> {
    let mut parts = Vec::with_capacity(chain.len());
    for f in chain.factors() {
        parts.push(match &f.separator {
            Some(s) => algebra.remove(&f.marginal, s)?,
            None => f.marginal.clone(),
        });
    }
    algebra.combine_all(&parts)
}

/// Largest deviation of each `R_k` from the directly computed joint
/// marginal, by node.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalReport {
    pub deviations: Vec<(usize, f64)>,
}

impl MarginalReport {
    pub fn max(&self) -> f64 {
        self.deviations.iter().map(|d| d.1).fold(0.0, f64::max)
    }
}

/// Compares every chain marginal with the joint of `assignment`
/// marginalized to the node. Only feasible when the joint fits in memory.
pub fn verify_marginals<A: ValuationAlgebra>(
    algebra: &A,
    chain: &SetChain<A::Value>,
    assignment: &TreeAssignment<A::Value>,
) -> Result<MarginalReport> {
    let joint = assignment.joint(algebra)?;
    let mut deviations = Vec::with_capacity(chain.len());
    for f in chain.factors() {
        let expected = algebra.marginalize(&joint, &f.scope)?;
        deviations.push((f.node, algebra.max_deviation(&f.marginal, &expected)?));
    }
    deviations.sort_by_key(|d| d.0);
    Ok(MarginalReport { deviations })
}
