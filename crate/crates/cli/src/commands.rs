//! Command bodies. Each takes file contents and returns the text to print,
//! so they can be driven without touching the file system.

use std::fmt::Write as _;

use vbs_core::{
    build_setchain, compile, config_count, graham_test, order_nodes, plan_query, propagate_all, reconstruct_joint,
    verify_marginals, AnyAlgebra, AnyValuation, Compiled, Configuration, Counting, Error, GrahamAction,
    InstanceKind, OpCounts, QueryExpr, QueryPlan, SetChain, SetChainFactor, ValuationAlgebra, VarSet,
};

use crate::error::{CliError, CliResult};
use crate::format::{parse_chain, parse_model, write_chain, ModelFile};
use crate::number::fmt_num;

#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    /// Root node for propagation and for the chain numbering.
    pub root: Option<usize>,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Graham's test on the file's `@hypergraph`, or on its factor scopes.
pub fn cmd_check(text: &str) -> CliResult<String> {
    let model = parse_model(text)?;
    let h = model.hypergraph()?;
    let frames = &model.frames;
    let outcome = graham_test(&h);
    let mut out = String::new();
    for (i, e) in h.edges().iter().enumerate() {
        let _ = writeln!(out, "edge {i}: {}", frames.show(e));
    }
    for step in &outcome.trace.steps {
        let _ = match &step.action {
            GrahamAction::DeleteVariable { var, edge } => writeln!(
                out,
                "round {}: delete variable {} from edge {edge}",
                step.round,
                frames.name(*var)
            ),
            GrahamAction::DeleteEdge {
                edge,
                contents,
                absorbed_into: Some(f),
            } => writeln!(
                out,
                "round {}: delete edge {edge} {} contained in edge {f}",
                step.round,
                frames.show(contents)
            ),
            GrahamAction::DeleteEdge {
                edge,
                contents,
                absorbed_into: None,
            } => writeln!(out, "round {}: delete edge {edge} {} (last edge)", step.round, frames.show(contents)),
        };
    }
    if let Some((e, set)) = &outcome.terminal {
        let _ = writeln!(out, "terminal edge: {} (edge {e})", frames.show(set));
    }
    if outcome.is_hypertree() {
        out.push_str("verdict: hypertree\n");
    } else {
        for (e, set) in &outcome.residual {
            let _ = writeln!(out, "residual edge {e}: {}", frames.show(set));
        }
        out.push_str("verdict: not a hypertree\n");
    }
    Ok(out)
}

/// The marginal of a tree node, or of a variable set inside one node.
pub fn cmd_marginal(text: &str, vars: &[String], node: Option<usize>, opts: Options) -> CliResult<String> {
    let model = parse_model(text)?;
    let (alg, compiled) = load(&model)?;
    let frames = alg.frames();
    let tree = &compiled.tree;
    let mut target = VarSet::empty();
    for name in vars {
        target.insert(frames.lookup(name)?);
    }
    let node = match node {
        Some(n) => {
            if !target.is_subset(tree.node(n)?) {
                return Err(CliError::Usage(format!(
                    "variables {} are not all in node {n} {}",
                    frames.show(&target),
                    frames.show(tree.node(n)?)
                )));
            }
            n
        }
        None if vars.is_empty() => {
            return Err(CliError::Usage("give variables or --node".into()));
        }
        None => smallest_node(&compiled, &target).ok_or_else(|| CliError::NotInOneNode {
            vars: frames.show(&target),
        })?,
    };
    let prop = propagate_all(alg, &compiled.assignment, opts.root)?;
    let r = &prop.marginals[node];
    let m = if vars.is_empty() {
        r.clone()
    } else {
        alg.marginalize(r, &target)?
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "marginal {} at node {node} {}",
        frames.show(alg.scope(&m)),
        frames.show(tree.node(node)?)
    );
    out.push_str(&render(alg, &m));
    Ok(out)
}

/// Answers a query through the set-chain and the reduced plan. With
/// `stats`, also reports the plan and operation counts next to those of a
/// full propagation.
pub fn cmd_query(text: &str, query: &str, stats: bool, opts: Options) -> CliResult<String> {
    let model = parse_model(text)?;
    let (alg, compiled) = load(&model)?;
    let frames = alg.frames();
    let q = QueryExpr::parse(query, frames)?;
    alg.configuration_values(&alg.identity(&VarSet::empty())?)?;
    let plan = plan_query(&compiled.tree, frames, &q.vars())?;
    let chain = query_chain(alg, &compiled, &plan, opts)?;

    let counting = Counting::new(alg);
    let value = vbs_core::evaluate_query(&counting, &plan, &chain, &q)?;
    let used = counting.counts();

    let mut out = String::new();
    let _ = writeln!(out, "query: {}", q.show(frames));
    let _ = writeln!(out, "value: {}", fmt_num(value));
    if stats {
        let baseline = Counting::new(alg);
        propagate_all(&baseline, &compiled.assignment, opts.root)?;
        let _ = writeln!(out, "plan root: node {}", plan.root);
        out.push_str("plan nodes:\n");
        out.push_str(&plan.show(frames));
        let connectors: Vec<String> = plan.connectors.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(
            out,
            "connectors: {}",
            if connectors.is_empty() {
                "none".to_string()
            } else {
                connectors.join(", ")
            }
        );
        let _ = writeln!(out, "operations: {}", show_counts(used));
        let _ = writeln!(out, "full repropagation: {}", show_counts(baseline.counts()));
    }
    Ok(out)
}

/// The set-chain of the model, serialized, and a one-line-per-factor summary.
pub fn cmd_chain(text: &str, opts: Options) -> CliResult<(String, String)> {
    let model = parse_model(text)?;
    let (alg, compiled) = load(&model)?;
    let chain = build_chain(alg, &compiled, opts)?;
    let frames = alg.frames();
    let mut summary = String::new();
    let _ = writeln!(summary, "chain of {} factors", chain.len());
    for f in chain.factors() {
        let _ = write!(summary, "factor {}: node {} {}", f.number, f.node, frames.show(&f.scope));
        if let Some(p) = f.predecessor {
            let _ = write!(summary, " pred {p}");
        }
        summary.push('\n');
    }
    Ok((write_chain(alg, &chain), summary))
}

/// Rebuilds (or reloads) the chain and compares it with the joint: the
/// reconstruction as a whole and every factor against the node marginal.
pub fn cmd_chain_verify(text: &str, chain_text: Option<&str>, tolerance: f64, opts: Options) -> CliResult<String> {
    let model = parse_model(text)?;
    let (alg, compiled) = load(&model)?;
    let chain = match chain_text {
        Some(t) => {
            let file = parse_chain(t)?;
            if file.algebra.kind() != alg.kind() || file.algebra.frames() != alg.frames() {
                return Err(CliError::Usage(
                    "the chain file's kind or variables differ from the model's".into(),
                ));
            }
            file.chain
        }
        None => build_chain(alg, &compiled, opts)?,
    };
    let frames = alg.frames();
    let joint = compiled.assignment.joint(alg)?;
    let recon = reconstruct_joint(alg, &chain)?;
    let recon_dev = alg.max_deviation(&recon, &joint)?;
    let report = verify_marginals(alg, &chain, &compiled.assignment)?;

    let mut out = String::new();
    let _ = writeln!(out, "reconstruction deviation: {}", fmt_num(recon_dev));
    for (node, dev) in &report.deviations {
        let scope = chain.factor_for_node(*node).map(|f| frames.show(&f.scope)).unwrap_or_default();
        let _ = writeln!(out, "node {node} {scope}: {}", fmt_num(*dev));
    }
    let worst = recon_dev.max(report.max());
    let _ = writeln!(out, "largest deviation: {}", fmt_num(worst));
    if worst <= tolerance {
        out.push_str("verdict: ok\n");
        Ok(out)
    } else {
        let _ = writeln!(out, "verdict: exceeds tolerance {}", fmt_num(tolerance));
        Err(CliError::Deviation {
            report: out,
            worst,
            tolerance,
        })
    }
}

fn load(model: &ModelFile) -> CliResult<(&AnyAlgebra, Compiled<AnyValuation>)> {
    let alg = model.algebra()?;
    let compiled = compile(alg, model.factors.clone())?;
    Ok((alg, compiled))
}

fn build_chain(alg: &AnyAlgebra, compiled: &Compiled<AnyValuation>, opts: Options) -> CliResult<SetChain<AnyValuation>> {
    let numbering = order_nodes(&compiled.tree, opts.root)?;
    Ok(build_setchain(alg, &compiled.assignment, &numbering)?)
}

/// Instances without removal can still answer queries confined to one
/// node, from that node's propagated marginal.
fn query_chain(
    alg: &AnyAlgebra,
    compiled: &Compiled<AnyValuation>,
    plan: &QueryPlan,
    opts: Options,
) -> CliResult<SetChain<AnyValuation>> {
    if alg.supports_removal() {
        return build_chain(alg, compiled, opts);
    }
    if plan.len() > 1 {
        return Err(Error::RemovalUnsupported { instance: alg.name() }.into());
    }
    let prop = propagate_all(alg, &compiled.assignment, opts.root)?;
    let node = plan.root;
    Ok(SetChain::from_factors(vec![SetChainFactor {
        number: 1,
        node,
        scope: compiled.tree.node(node)?.clone(),
        marginal: prop.marginals[node].clone(),
        separator: None,
        predecessor: None,
    }])?)
}

/// Smallest node containing `target`, lowest id on ties.
fn smallest_node(compiled: &Compiled<AnyValuation>, target: &VarSet) -> Option<usize> {
    compiled
        .tree
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, h)| target.is_subset(h))
        .min_by_key(|(i, h)| (h.len(), *i))
        .map(|(i, _)| i)
}

fn show_counts(c: OpCounts) -> String {
    format!(
        "{} combinations, {} marginalizations, {} removals",
        c.combinations, c.marginalizations, c.removals
    )
}

/// Configuration tables list one configuration per row; commonality
/// tables one subset of configurations per row, by mask.
fn render(alg: &AnyAlgebra, v: &AnyValuation) -> String {
    let frames = alg.frames();
    let scope = alg.scope(v);
    let cards = frames.cards(scope).expect("declared variables");
    let label = |idx: usize| {
        let c = Configuration::from_index(scope, &cards, idx);
        let parts: Vec<&str> = scope
            .iter()
            .zip(c.values())
            .map(|(var, &x)| frames.get(var).expect("declared variable").frame()[x].as_str())
            .collect();
        parts.join(" ")
    };
    let entries = alg.entries(v);
    let mut out = String::new();
    match alg.kind() {
        InstanceKind::Commonality => {
            out.push_str("subset commonality\n");
            let n = config_count(&cards);
            for (m, x) in entries.iter().enumerate() {
                let mask = m + 1;
                let members: Vec<String> = (0..n)
                    .filter(|c| mask & (1 << c) != 0)
                    .map(|c| if scope.len() > 1 { format!("({})", label(c)) } else { label(c) })
                    .collect();
                let _ = writeln!(out, "{{{}}} {}", members.join(", "), fmt_num(*x));
            }
        }
        _ => {
            let names: Vec<String> = scope.iter().map(|x| frames.name(x)).collect();
            let _ = writeln!(out, "{}", names.into_iter().chain(["value".to_string()]).collect::<Vec<_>>().join(" "));
            for (idx, x) in entries.iter().enumerate() {
                let l = label(idx);
                if l.is_empty() {
                    let _ = writeln!(out, "{}", fmt_num(*x));
                } else {
                    let _ = writeln!(out, "{l} {}", fmt_num(*x));
                }
            }
        }
    }
    out
}
