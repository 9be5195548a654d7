//! Hypergraphs, Graham's reduction and hypertree covers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::variable::{Frames, VarId, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    variables: VarSet,
    edges: Vec<VarSet>,
}

impl Hypergraph {
    /// A hypergraph whose vertex set is the union of its edges.
    pub fn new(edges: Vec<VarSet>) -> Result<Self> {
        let variables = edges.iter().fold(VarSet::empty(), |acc, e| acc.union(e));
        Self::with_variables(variables, edges)
    }

    pub fn with_variables(variables: VarSet, edges: Vec<VarSet>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidHypergraph(format!("edge {i} is empty")));
            }
            if !e.is_subset(&variables) {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {i} mentions variables outside the vertex set"
                )));
            }
            if let Some(j) = edges[..i].iter().position(|f| f == e) {
                return Err(Error::InvalidHypergraph(format!("edges {j} and {i} are equal")));
            }
        }
        let covered = edges.iter().fold(VarSet::empty(), |acc, e| acc.union(e));
        if let Some(v) = variables.difference(&covered).iter().next() {
            return Err(Error::InvalidHypergraph(format!("variable {v} is in no edge")));
        }
        Ok(Self { variables, edges })
    }

    /// Skips validation; used for the node sets of Markov trees, which may
    /// repeat.
    pub(crate) fn from_edges_unchecked(edges: Vec<VarSet>) -> Self {
        let variables = edges.iter().fold(VarSet::empty(), |acc, e| acc.union(e));
        Self { variables, edges }
    }

    pub fn variables(&self) -> &VarSet {
        &self.variables
    }

    pub fn edges(&self) -> &[VarSet] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// True when every edge of `other` lies inside some edge of `self`.
    pub fn covers(&self, other: &Hypergraph) -> bool {
        other
            .edges
            .iter()
            .all(|s| self.edges.iter().any(|h| s.is_subset(h)))
    }

    pub fn show(&self, frames: &Frames) -> String {
        let parts: Vec<String> = self.edges.iter().map(|e| frames.show(e)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GrahamAction {
    /// `var` occurred only in `edge` and was removed from it.
    DeleteVariable { var: VarId, edge: usize },
    /// `edge`, whose remaining contents were `contents`, was contained in
    /// `absorbed_into`. `None` when the last remaining edge, by then empty,
    /// is dropped.
    DeleteEdge {
        edge: usize,
        contents: VarSet,
        absorbed_into: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrahamStep {
    /// 1-based round; each round runs all vertex deletions, then all edge
    /// deletions.
    pub round: usize,
    pub action: GrahamAction,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GrahamTrace {
    pub steps: Vec<GrahamStep>,
}

impl GrahamTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Variables deleted in `round`, in trace order.
    pub fn deleted_variables(&self, round: usize) -> Vec<VarId> {
        self.steps
            .iter()
            .filter(|s| s.round == round)
            .filter_map(|s| match s.action {
                GrahamAction::DeleteVariable { var, .. } => Some(var),
                _ => None,
            })
            .collect()
    }

    /// Edge deletions of `round` as `(edge, contents, absorbed_into)`.
    pub fn deleted_edges(&self, round: usize) -> Vec<(usize, VarSet, Option<usize>)> {
        self.steps
            .iter()
            .filter(|s| s.round == round)
            .filter_map(|s| match &s.action {
                GrahamAction::DeleteEdge {
                    edge,
                    contents,
                    absorbed_into,
                } => Some((*edge, contents.clone(), *absorbed_into)),
                _ => None,
            })
            .collect()
    }

    /// Replays the trace on `h`, returning what is left of each edge.
    /// Fails when a step does not apply.
    pub fn replay(&self, h: &Hypergraph) -> Result<Vec<Option<VarSet>>> {
        let mut live: Vec<Option<VarSet>> = h.edges.iter().cloned().map(Some).collect();
        for step in &self.steps {
            match &step.action {
                GrahamAction::DeleteVariable { var, edge } => {
                    let e = live
                        .get_mut(*edge)
                        .and_then(Option::as_mut)
                        .filter(|e| e.contains(*var))
                        .ok_or_else(|| Error::InvalidHypergraph(format!("bad step {step:?}")))?;
                    e.remove(*var);
                }
                GrahamAction::DeleteEdge {
                    edge,
                    contents,
                    absorbed_into,
                } => {
                    let current = live.get(*edge).cloned().flatten();
                    if current.as_ref() != Some(contents) {
                        return Err(Error::InvalidHypergraph(format!("bad step {step:?}")));
                    }
                    if let Some(f) = absorbed_into {
                        let ok = live
                            .get(*f)
                            .and_then(Option::as_ref)
                            .is_some_and(|f| contents.is_subset(f));
                        if !ok {
                            return Err(Error::InvalidHypergraph(format!("bad step {step:?}")));
                        }
                    }
                    live[*edge] = None;
                }
            }
        }
        Ok(live)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrahamOutcome {
    pub trace: GrahamTrace,
    /// Surviving edges as `(original index, remaining contents)`.
    pub residual: Vec<(usize, VarSet)>,
    /// The first single-edge state reached, as `(index, contents)`.
    pub terminal: Option<(usize, VarSet)>,
}

impl GrahamOutcome {
    pub fn is_hypertree(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn residual_edges(&self) -> Vec<VarSet> {
        self.residual.iter().map(|(_, e)| e.clone()).collect()
    }

    pub fn show_residual(&self, frames: &Frames) -> String {
        let parts: Vec<String> = self.residual.iter().map(|(_, e)| frames.show(e)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for GrahamOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} steps, {} residual edges", self.trace.len(), self.residual.len())
    }
}

/// Runs Graham's two rules to a fixpoint: delete a vertex that lies in only
/// one edge (unless it is in `keep`), and delete an edge contained in
/// another. Each round applies all eligible vertex deletions in ascending
/// variable id, then edge deletions in ascending edge index. Of two equal
/// edges the lower index absorbs the higher.
pub fn reduce(h: &Hypergraph, keep: &VarSet) -> GrahamOutcome {
    let mut live: Vec<Option<VarSet>> = h.edges.iter().cloned().map(Some).collect();
    let mut trace = GrahamTrace::default();
    let mut terminal = None;
    let note_terminal = |live: &[Option<VarSet>], terminal: &mut Option<(usize, VarSet)>| {
        if terminal.is_none() {
            let mut alive = live.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|e| (i, e)));
            if let (Some((i, e)), None) = (alive.next(), alive.next()) {
                *terminal = Some((i, e.clone()));
            }
        }
    };
    note_terminal(&live, &mut terminal);

    let mut round = 0;
    loop {
        round += 1;
        let mut progressed = false;

        let mut occurrences: BTreeMap<VarId, Vec<usize>> = BTreeMap::new();
        for (i, e) in live.iter().enumerate() {
            if let Some(e) = e {
                for v in e.iter() {
                    occurrences.entry(v).or_default().push(i);
                }
            }
        }
        for (var, edges) in occurrences {
            if edges.len() == 1 && !keep.contains(var) {
                let edge = edges[0];
                live[edge].as_mut().expect("live edge").remove(var);
                trace.steps.push(GrahamStep {
                    round,
                    action: GrahamAction::DeleteVariable { var, edge },
                });
                progressed = true;
            }
        }
        note_terminal(&live, &mut terminal);

        for e in 0..live.len() {
            let Some(contents) = live[e].clone() else { continue };
            let absorber = live.iter().enumerate().position(|(f, other)| {
                f != e
                    && other
                        .as_ref()
                        .is_some_and(|o| contents.is_subset(o) && (contents != *o || f < e))
            });
            let alone = live.iter().filter(|x| x.is_some()).count() == 1;
            if absorber.is_some() || (alone && contents.is_empty()) {
                live[e] = None;
                trace.steps.push(GrahamStep {
                    round,
                    action: GrahamAction::DeleteEdge {
                        edge: e,
                        contents,
                        absorbed_into: absorber,
                    },
                });
                progressed = true;
            }
        }
        note_terminal(&live, &mut terminal);

        if !progressed {
            break;
        }
    }

    let residual = live
        .into_iter()
        .enumerate()
        .filter_map(|(i, e)| e.map(|e| (i, e)))
        .collect();
    GrahamOutcome {
        trace,
        residual,
        terminal,
    }
}

/// Graham's test: `h` is a hypertree iff the reduction empties it.
pub fn graham_test(h: &Hypergraph) -> GrahamOutcome {
    reduce(h, &VarSet::empty())
}

/// A hypertree cover together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covering {
    pub hypergraph: Hypergraph,
    /// Elimination order used; empty when the input was already a hypertree.
    pub elimination_order: Vec<VarId>,
    /// Number of fill-in edges added to the primal graph.
    pub fill_ins: usize,
}

/// A hypertree covering `h`; `h` itself when it already is one.
pub fn cover_hypertree(h: &Hypergraph) -> Hypergraph {
    cover_with_details(h).hypergraph
}

/// Covers `h` by the maximal cliques of a min-fill elimination of its
/// primal graph. Ties go to the smaller resulting clique, then to the lower
/// variable id.
pub fn cover_with_details(h: &Hypergraph) -> Covering {
    if graham_test(h).is_hypertree() {
        return Covering {
            hypergraph: h.clone(),
            elimination_order: Vec::new(),
            fill_ins: 0,
        };
    }
    let mut adj: BTreeMap<VarId, BTreeSet<VarId>> =
        h.variables.iter().map(|v| (v, BTreeSet::new())).collect();
    for e in &h.edges {
        for a in e.iter() {
            for b in e.iter().filter(|&b| b != a) {
                adj.get_mut(&a).expect("vertex").insert(b);
            }
        }
    }

    let mut order = Vec::new();
    let mut cliques: Vec<VarSet> = Vec::new();
    let mut fill_ins = 0;
    while !adj.is_empty() {
        let (_, _, pick) = adj
            .iter()
            .map(|(&v, nbrs)| {
                let n: Vec<VarId> = nbrs.iter().copied().collect();
                let mut fill = 0;
                for (i, a) in n.iter().enumerate() {
                    for b in &n[i + 1..] {
                        if !adj[a].contains(b) {
                            fill += 1;
                        }
                    }
                }
                (fill, n.len() + 1, v)
            })
            .min()
            .expect("non-empty graph");
        let nbrs: Vec<VarId> = adj.remove(&pick).expect("vertex").into_iter().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj.get_mut(&a).expect("vertex").remove(&pick);
            for &b in &nbrs[i + 1..] {
                if adj.get_mut(&a).expect("vertex").insert(b) {
                    adj.get_mut(&b).expect("vertex").insert(a);
                    fill_ins += 1;
                }
            }
        }
        let clique: VarSet = nbrs.iter().copied().chain([pick]).collect();
        cliques.push(clique);
        order.push(pick);
    }

    let maximal: Vec<VarSet> = cliques
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !cliques
                .iter()
                .enumerate()
                .any(|(j, d)| j != *i && c.is_subset(d) && (*c != d || j < *i))
        })
        .map(|(_, c)| c.clone())
        .collect();
    Covering {
        hypergraph: Hypergraph::with_variables(h.variables.clone(), maximal)
            .expect("cliques of an elimination cover every vertex"),
        elimination_order: order,
        fill_ins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> VarSet {
        ids.iter().map(|&i| VarId(i)).collect()
    }

    fn triangle() -> Hypergraph {
        Hypergraph::new(vec![set(&[0, 1]), set(&[1, 2]), set(&[0, 2])]).unwrap()
    }

    #[test]
    fn rejects_invalid_hypergraphs() {
        assert!(Hypergraph::new(vec![VarSet::empty()]).is_err());
        assert!(Hypergraph::new(vec![set(&[0]), set(&[0])]).is_err());
        assert!(Hypergraph::with_variables(set(&[0, 1]), vec![set(&[0])]).is_err());
        assert!(Hypergraph::with_variables(set(&[0]), vec![set(&[0, 1])]).is_err());
    }

    #[test]
    fn single_edge_takes_two_steps() {
        let h = Hypergraph::new(vec![set(&[0])]).unwrap();
        let out = graham_test(&h);
        assert!(out.is_hypertree());
        assert_eq!(out.trace.len(), 2);
        assert_eq!(out.terminal, Some((0, set(&[0]))));
        assert_eq!(
            out.trace.steps[1].action,
            GrahamAction::DeleteEdge {
                edge: 0,
                contents: VarSet::empty(),
                absorbed_into: None
            }
        );
    }

    #[test]
    fn triangle_is_not_a_hypertree() {
        let out = graham_test(&triangle());
        assert!(!out.is_hypertree());
        assert!(out.trace.is_empty());
        assert_eq!(out.residual.len(), 3);
    }

    #[test]
    fn equal_edges_absorbed_by_lower_index() {
        let h = Hypergraph::new(vec![set(&[0, 1]), set(&[1, 2])]).unwrap();
        let out = graham_test(&h);
        // round 1 leaves {1}, {1}; edge 1 goes into edge 0
        assert_eq!(out.trace.deleted_edges(1), vec![(1, set(&[1]), Some(0))]);
        assert!(out.is_hypertree());
    }

    #[test]
    fn replay_reaches_residual() {
        let out = graham_test(&triangle());
        let live = out.trace.replay(&triangle()).unwrap();
        assert_eq!(live.iter().flatten().count(), 3);
        let h = Hypergraph::new(vec![set(&[0, 1, 2]), set(&[2, 3]), set(&[3, 4])]).unwrap();
        let out = graham_test(&h);
        assert!(out.trace.replay(&h).unwrap().iter().all(Option::is_none));
    }

    #[test]
    fn triangle_cover_is_one_clique() {
        let c = cover_with_details(&triangle());
        assert_eq!(c.hypergraph.edges(), &[set(&[0, 1, 2])]);
        assert_eq!(c.fill_ins, 0);
        assert!(graham_test(&c.hypergraph).is_hypertree());
        assert!(c.hypergraph.covers(&triangle()));
    }

    #[test]
    fn four_cycle_needs_a_fill_in() {
        let h = Hypergraph::new(vec![set(&[0, 1]), set(&[1, 2]), set(&[2, 3]), set(&[0, 3])]).unwrap();
        let c = cover_with_details(&h);
        assert_eq!(c.fill_ins, 1);
        assert_eq!(c.hypergraph.len(), 2);
        assert!(c.hypergraph.edges().iter().all(|e| e.len() == 3));
        assert!(graham_test(&c.hypergraph).is_hypertree());
        assert!(c.hypergraph.covers(&h));
    }

    #[test]
    fn hypertree_cover_is_identity() {
        let h = Hypergraph::new(vec![set(&[0])]).unwrap();
        assert_eq!(cover_hypertree(&h), h);
    }
}
