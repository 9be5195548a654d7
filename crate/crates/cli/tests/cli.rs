mod support;

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{oracle_query, probability_model, random_dnf, Draw, Model};
use vbs_cli::{
    cmd_chain, cmd_chain_verify, cmd_marginal, cmd_query, parse_chain, write_model, CliError, ModelFile, Options,
};
use vbs_core::{reconstruct_joint, AnyAlgebra, AnyValuation, ProbabilityAlgebra, ValuationAlgebra, VarId};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn vbs(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_vbs")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn model_text(m: &Model<ProbabilityAlgebra>) -> String {
    write_model(&ModelFile {
        algebra: Some(AnyAlgebra::Probability(m.alg.clone())),
        frames: m.alg.frames().clone(),
        factors: m.factors.iter().cloned().map(AnyValuation::Probability).collect(),
        edges: None,
    })
}

#[test]
fn check_reports_verdicts_and_parse_errors() {
    let h1 = vbs(&["check", path_str(&fixture("h1.hg"))]);
    assert_eq!(h1.code, 0);
    assert!(h1.stdout.ends_with("terminal edge: {X7, X8} (edge 0)\nverdict: hypertree\n"));

    let tri = vbs(&["check", path_str(&fixture("triangle.hg"))]);
    assert_eq!(tri.code, 0);
    assert!(!tri.stdout.contains("round "), "triangle has no reduction step:\n{}", tri.stdout);
    assert!(tri.stdout.ends_with("verdict: not a hypertree\n"));

    let empty = vbs(&["check", path_str(&fixture("empty_edge.hg"))]);
    assert_eq!(empty.code, 2);
    assert!(empty.stderr.contains("line 3, column 1: empty hyperedge"), "{}", empty.stderr);

    let missing = vbs(&["check", "/nonexistent/file.hg"]);
    assert_eq!(missing.code, 2);
}

#[test]
fn check_accepts_models() {
    let run = vbs(&["check", path_str(&fixture("chain2.vbs"))]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("edge 0: {A, B}\nedge 1: {B, C}\n"));
    assert!(run.stdout.ends_with("verdict: hypertree\n"));
}

#[test]
fn marginal_of_two_factor_chain_matches_hand_computation() {
    // P(B) = (0.4, 0.6); P(C = c0) = 0.4 * 0.9 + 0.6 * 0.5
    let run = vbs(&["marginal", path_str(&fixture("chain2.vbs")), "C"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout, "marginal {C} at node 1 {B, C}\nC value\nc0 0.66\nc1 0.34\n");

    let b = vbs(&["marginal", path_str(&fixture("chain2.vbs")), "B"]);
    assert!(b.stdout.ends_with("B value\nb0 0.4\nb1 0.6\n"), "{}", b.stdout);
}

#[test]
fn marginal_of_whole_node_is_the_node_table() {
    let run = vbs(&["marginal", path_str(&fixture("chain2.vbs")), "--node", "0"]);
    assert_eq!(run.code, 0);
    assert_eq!(
        run.stdout,
        "marginal {A, B} at node 0 {A, B}\nA B value\na0 b0 0.3\na0 b1 0.2\na1 b0 0.1\na1 b1 0.4\n"
    );
}

#[test]
fn marginal_spanning_nodes_points_to_query() {
    let run = vbs(&["marginal", path_str(&fixture("chain2.vbs")), "A", "C"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("vbs query"), "{}", run.stderr);

    let unknown = vbs(&["marginal", path_str(&fixture("chain2.vbs")), "Z"]);
    assert_eq!(unknown.code, 2);
    assert!(unknown.stderr.contains("`Z`"));
}

#[test]
fn output_is_deterministic() {
    let model = fixture("h1_model.vbs");
    let cases: [&[&str]; 3] = [
        &["marginal", path_str(&model), "X7", "X8"],
        &["query", path_str(&model), "(X1=1 & X2=1) | X3=1", "--stats"],
        &["chain-verify", path_str(&model)],
    ];
    for args in cases {
        let a = vbs(args);
        let b = vbs(args);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn root_choice_leaves_answers_unchanged() {
    let model = fixture("h1_model.vbs");
    let base = vbs(&["query", path_str(&model), "X1=0 | X12=1"]);
    for root in 0..6 {
        let r = root.to_string();
        let other = vbs(&["--root", &r, "query", path_str(&model), "X1=0 | X12=1"]);
        let x: f64 = base.stdout.lines().nth(1).unwrap()[7..].parse().unwrap();
        let y: f64 = other.stdout.lines().nth(1).unwrap()[7..].parse().unwrap();
        assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "root {root}: {x} vs {y}");
    }
    let bad = vbs(&["--root", "99", "query", path_str(&model), "X1=0"]);
    assert_eq!(bad.code, 2);
}

#[test]
fn query_reports_plan_and_tautology_gives_total_mass() {
    let run = vbs(&["query", path_str(&fixture("h1_model.vbs")), "X1=1 & X2=1 & X3=1", "--stats"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains(
        "plan nodes:\nnode 0: {X1, X7, X8} -> {X1, X7}\nnode 1: {X2, X5, X6, X7} -> {X2, X6, X7} (root)\nnode 2: {X3, X6} -> {X3, X6}\n"
    ));

    let taut = vbs(&["query", path_str(&fixture("chain2.vbs")), "A=a0 | !(A=a0)"]);
    assert_eq!(taut.stdout, "query: (A=a0 | !A=a0)\nvalue: 1\n");
}

#[test]
fn query_errors_have_exit_codes() {
    let model = path_str(&fixture("chain2.vbs")).to_string();
    let unknown = vbs(&["query", &model, "Q=a0"]);
    assert_eq!(unknown.code, 2);
    assert!(unknown.stderr.contains("`Q`"));
    let value = vbs(&["query", &model, "A=zz"]);
    assert_eq!(value.code, 2);
    assert!(value.stderr.contains("`zz`"));
    let syntax = vbs(&["query", &model, "A=a0 &"]);
    assert_eq!(syntax.code, 2);
    assert!(syntax.stderr.contains("column"), "{}", syntax.stderr);

    let ds = vbs(&["query", path_str(&fixture("commonality.vbs")), "A=a0"]);
    assert_eq!(ds.code, 3);
    let boolean = vbs(&["query", path_str(&fixture("boolean.vbs")), "A=t & C=t"]);
    assert_eq!(boolean.code, 3);
    let local = vbs(&["query", path_str(&fixture("boolean.vbs")), "A=t & B=t"]);
    assert_eq!(local.stdout, "query: (A=t & B=t)\nvalue: 1\n");
}

/// The query answer equals summing the printed marginal by hand.
#[test]
fn query_agrees_with_marginal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let m = probability_model(&mut rng, 5, 4, Draw::Any);
        let text = model_text(&m);
        // a factor scope always lies inside one node of the compiled tree
        let node = m.factors[0].scope().clone();
        let names: Vec<String> = node.iter().map(|v| m.alg.frames().name(v)).collect();
        let vars: Vec<VarId> = node.iter().collect();
        let q = random_dnf(&mut rng, m.alg.frames(), &vars);
        let shown = q.show(m.alg.frames());

        let table = cmd_marginal(&text, &names, None, Options::default()).unwrap();
        let mut by_hand = 0.0;
        for row in table.lines().skip(2) {
            let cells: Vec<&str> = row.split(' ').collect();
            let (labels, value) = cells.split_at(cells.len() - 1);
            let holds = q.holds(&|v| {
                let pos = node.position(v)?;
                m.alg.frames().get(v).unwrap().value_index(labels[pos])
            });
            if holds {
                by_hand += value[0].parse::<f64>().unwrap();
            }
        }
        let answer = cmd_query(&text, &shown, false, Options::default()).unwrap();
        let answer: f64 = answer.lines().nth(1).unwrap()[7..].parse().unwrap();
        assert!((answer - by_hand).abs() <= 1e-9 * answer.abs().max(1.0), "{shown}: {answer} vs {by_hand}");

        let exact = oracle_query(&m.space, &m.oracle_joint(), &q);
        assert!((answer - exact).abs() <= 1e-9 * exact.abs().max(1.0));
    }
}

#[test]
fn chain_round_trip_reconstructs_the_joint() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let m = probability_model(&mut rng, 6, 5, Draw::Any);
        let text = model_text(&m);
        let (chain_text, _) = cmd_chain(&text, Options::default()).unwrap();
        let loaded = parse_chain(&chain_text).unwrap();
        let joint = reconstruct_joint(&loaded.algebra, &loaded.chain).unwrap();
        let AnyValuation::Probability(joint) = joint else {
            panic!("wrong instance")
        };
        let oracle = m.oracle_marginal(&m.oracle_joint(), joint.scope());
        assert!(m.alg.max_deviation(&joint, &oracle).unwrap() <= 1e-9);

        let report = cmd_chain_verify(&text, Some(&chain_text), 1e-9, Options::default()).unwrap();
        assert!(report.ends_with("verdict: ok\n"));
    }
}

#[test]
fn chain_files_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h1.chain");
    let model = fixture("h1_model.vbs");
    let written = vbs(&["chain", path_str(&model), "--out", path_str(&out)]);
    assert_eq!(written.code, 0, "{}", written.stderr);
    assert!(written.stdout.starts_with("chain of 6 factors\n"));

    let verify = vbs(&["chain-verify", path_str(&model), "--chain", path_str(&out)]);
    assert_eq!(verify.code, 0, "{}", verify.stderr);
    assert!(verify.stdout.ends_with("verdict: ok\n"));

    // a tampered entry is caught as an invariant failure
    let text = std::fs::read_to_string(&out).unwrap();
    let r = text.find("@r\n").unwrap() + 3;
    let end = r + text[r..].find(' ').unwrap();
    let tampered = format!("{}0.5{}", &text[..r], &text[end..]);
    let bad = dir.path().join("bad.chain");
    std::fs::write(&bad, tampered).unwrap();
    let verify = vbs(&["chain-verify", path_str(&model), "--chain", path_str(&bad)]);
    assert_eq!(verify.code, 4);
    assert!(verify.stdout.contains("verdict: exceeds tolerance"));

    let garbled = dir.path().join("garbled.chain");
    std::fs::write(&garbled, "@kind probability\n@r\n").unwrap();
    assert_eq!(vbs(&["chain-verify", path_str(&model), "--chain", path_str(&garbled)]).code, 2);
}

#[test]
fn single_node_model_has_one_chain_factor() {
    let (text, summary) = cmd_chain(&read_fixture("single.vbs"), Options::default()).unwrap();
    assert_eq!(summary, "chain of 1 factors\nfactor 1: node 0 {A, B}\n");
    assert_eq!(parse_chain(&text).unwrap().chain.len(), 1);
}

#[test]
fn chain_needs_removal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.chain");
    let run = vbs(&["chain", path_str(&fixture("boolean.vbs")), "--out", path_str(&out)]);
    assert_eq!(run.code, 3);
    assert!(!out.exists());
    assert_eq!(vbs(&["chain-verify", path_str(&fixture("boolean.vbs"))]).code, 3);
    assert!(matches!(
        cmd_chain(&read_fixture("boolean.vbs"), Options::default()),
        Err(CliError::Core(vbs_core::Error::RemovalUnsupported { .. }))
    ));
}

#[test]
fn commonality_chain_verifies() {
    let run = vbs(&["chain-verify", path_str(&fixture("commonality.vbs"))]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let table = vbs(&["marginal", path_str(&fixture("commonality.vbs")), "B"]);
    assert_eq!(table.code, 0);
    assert!(table.stdout.contains("subset commonality\n{b0} "));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(vbs(&[]).code, 2);
    assert_eq!(vbs(&["frobnicate"]).code, 2);
    assert_eq!(vbs(&["marginal", path_str(&fixture("chain2.vbs"))]).code, 2);
    assert_eq!(vbs(&["--help"]).code, 0);
}
