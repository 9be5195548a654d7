//! Line-oriented text format for models, hypergraphs and set-chains.
//!
//! ```text
//! # comment
//! @kind probability
//! @variables
//! A: a0 a1
//! B: b0 b1 b2
//! @factor B A
//! 0.1 0.2
//! 0.3 0.1
//! 0.2 0.1
//! @hypergraph
//! {A, B}
//! ```
//!
//! Factor tables list configurations of the written variable order with
//! the last variable running fastest; commonality tables list the
//! non-empty subsets of those configurations by bit mask, mask 1 first.
//! A file holding only `@hypergraph` declares its variables implicitly.
//!
//! Chain files share the header and hold one `@chain` block per factor:
//!
//! ```text
//! @chain 2 node 0 {A, B} pred 1
//! @r
//! ...
//! @s {B}
//! ...
//! ```

use std::fmt::Write as _;

use vbs_core::{
    config_count, AnyAlgebra, AnyValuation, Frames, Hypergraph, InstanceKind, SetChain, SetChainFactor,
    ValuationAlgebra, VarId, VarSet,
};

use crate::error::{CliError, CliResult, FormatError};

const IMPLICIT_FRAME: [&str; 2] = ["0", "1"];

#[derive(Debug, Clone)]
pub struct ModelFile {
    /// Absent for hypergraph-only files.
    pub algebra: Option<AnyAlgebra>,
    pub frames: Frames,
    /// One factor per distinct scope; repeated scopes in the file are
    /// combined on load.
    pub factors: Vec<AnyValuation>,
    pub edges: Option<Vec<VarSet>>,
}

impl ModelFile {
    pub fn algebra(&self) -> CliResult<&AnyAlgebra> {
        self.algebra
            .as_ref()
            .ok_or_else(|| CliError::Usage("the file has no @kind and no factor tables".into()))
    }

    /// The `@hypergraph` section if present, otherwise the factor scopes.
    pub fn hypergraph(&self) -> CliResult<Hypergraph> {
        let edges = match &self.edges {
            Some(e) => e.clone(),
            None => {
                let mut edges: Vec<VarSet> = Vec::new();
                if let Some(alg) = &self.algebra {
                    for f in &self.factors {
                        let s = alg.scope(f);
                        if !s.is_empty() && !edges.contains(s) {
                            edges.push(s.clone());
                        }
                    }
                }
                edges
            }
        };
        Ok(Hypergraph::new(edges)?)
    }
}

#[derive(Debug, Clone)]
pub struct ChainFile {
    pub algebra: AnyAlgebra,
    pub chain: SetChain<AnyValuation>,
}

pub fn parse_model(text: &str) -> Result<ModelFile, FormatError> {
    let doc = Document::parse(text)?;
    if let Some(c) = doc.chain.first() {
        return Err(FormatError::new(c.line, 1, "@chain blocks belong in chain files"));
    }
    let algebra = doc.kind.map(|k| AnyAlgebra::new(k, doc.frames.clone()));
    let mut factors: Vec<AnyValuation> = Vec::new();
    if let Some(alg) = &algebra {
        for raw in &doc.factors {
            let v = raw.build(alg)?;
            let scope = alg.scope(&v).clone();
            match factors.iter().position(|f| *alg.scope(f) == scope) {
                Some(i) => {
                    factors[i] = alg
                        .combine(&factors[i], &v)
                        .map_err(|e| FormatError::new(raw.line, raw.column, e.to_string()))?;
                }
                None => factors.push(v),
            }
        }
    }
    Ok(ModelFile {
        algebra,
        frames: doc.frames,
        factors,
        edges: doc.edges,
    })
}

pub fn parse_chain(text: &str) -> CliResult<ChainFile> {
    let doc = Document::parse(text)?;
    if let Some(f) = doc.factors.first() {
        return Err(FormatError::new(f.line, 1, "@factor blocks belong in model files").into());
    }
    if doc.edges.is_some() {
        return Err(CliError::Usage("a chain file cannot hold a @hypergraph section".into()));
    }
    let kind = doc
        .kind
        .ok_or_else(|| FormatError::new(1, 1, "chain file has no @kind"))?;
    let algebra = AnyAlgebra::new(kind, doc.frames);
    let mut factors = Vec::with_capacity(doc.chain.len());
    for c in &doc.chain {
        let r = c
            .r
            .as_ref()
            .ok_or_else(|| FormatError::new(c.line, 1, format!("chain factor {} has no @r block", c.number)))?;
        let marginal = r.build(&algebra)?;
        if *algebra.scope(&marginal) != c.scope {
            return Err(FormatError::new(r.line, 1, "@r scope differs from the @chain scope").into());
        }
        let separator = match (&c.s, c.predecessor) {
            (Some(s), Some(_)) => Some(s.build(&algebra)?),
            (None, None) => None,
            (Some(s), None) => return Err(FormatError::new(s.line, 1, "@s given for a factor without predecessor").into()),
            (None, Some(_)) => {
                return Err(FormatError::new(c.line, 1, format!("chain factor {} has no @s block", c.number)).into())
            }
        };
        factors.push(SetChainFactor {
            number: c.number,
            node: c.node,
            scope: c.scope.clone(),
            marginal,
            separator,
            predecessor: c.predecessor,
        });
    }
    let chain = SetChain::from_factors(factors)?;
    Ok(ChainFile { algebra, chain })
}

pub fn write_model(model: &ModelFile) -> String {
    let mut out = String::new();
    write_header(&mut out, model.algebra.as_ref().map(|a| a.kind()), &model.frames);
    if let Some(alg) = &model.algebra {
        for f in &model.factors {
            let names: Vec<String> = alg.scope(f).iter().map(|v| model.frames.name(v)).collect();
            if names.is_empty() {
                out.push_str("@factor\n");
            } else {
                let _ = writeln!(out, "@factor {}", names.join(" "));
            }
            write_values(&mut out, alg, f);
        }
    }
    if let Some(edges) = &model.edges {
        out.push_str("@hypergraph\n");
        for e in edges {
            let _ = writeln!(out, "{}", model.frames.show(e));
        }
    }
    out
}

/// Values are written with the shortest representation that parses back
/// to the same `f64`, so a reload is exact.
pub fn write_chain(algebra: &AnyAlgebra, chain: &SetChain<AnyValuation>) -> String {
    let frames = algebra.frames();
    let mut out = String::new();
    write_header(&mut out, Some(algebra.kind()), frames);
    for f in chain.factors() {
        let _ = write!(out, "@chain {} node {} {}", f.number, f.node, frames.show(&f.scope));
        if let Some(p) = f.predecessor {
            let _ = write!(out, " pred {p}");
        }
        out.push_str("\n@r\n");
        write_values(&mut out, algebra, &f.marginal);
        if let Some(s) = &f.separator {
            let _ = writeln!(out, "@s {}", frames.show(algebra.scope(s)));
            write_values(&mut out, algebra, s);
        }
    }
    out
}

fn write_header(out: &mut String, kind: Option<InstanceKind>, frames: &Frames) {
    if let Some(k) = kind {
        let _ = writeln!(out, "@kind {k}");
    }
    if !frames.is_empty() {
        out.push_str("@variables\n");
        for v in frames.iter() {
            let _ = writeln!(out, "{}: {}", v.name(), v.frame().join(" "));
        }
    }
}

fn write_values(out: &mut String, algebra: &AnyAlgebra, v: &AnyValuation) {
    let entries = algebra.entries(v);
    let row = match algebra.kind() {
        InstanceKind::Commonality => 8,
        _ => algebra
            .scope(v)
            .iter()
            .last()
            .map(|x| algebra.frames().card(x).expect("declared variable"))
            .unwrap_or(1),
    };
    for chunk in entries.chunks(row.max(1)) {
        let line: Vec<String> = chunk.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// A table as written in the file, before reordering.
#[derive(Debug)]
struct RawTable {
    line: usize,
    column: usize,
    written: Vec<VarId>,
    values: Vec<f64>,
}

impl RawTable {
    fn build(&self, algebra: &AnyAlgebra) -> Result<AnyValuation, FormatError> {
        let at = |msg: String| FormatError::new(self.line, self.column, msg);
        let frames = algebra.frames();
        let cards: Vec<usize> = self
            .written
            .iter()
            .map(|&v| frames.card(v).expect("resolved variable"))
            .collect();
        let configs = config_count(&cards);
        let expected = match algebra.kind() {
            InstanceKind::Commonality if configs < 31 => Some((1usize << configs) - 1),
            InstanceKind::Commonality => None,
            _ => Some(configs),
        };
        if let Some(n) = expected {
            if n != self.values.len() {
                return Err(at(format!("table needs {n} values, found {}", self.values.len())));
            }
        }
        let scope: VarSet = self.written.iter().copied().collect();
        let values = if scope.as_slice() == self.written.as_slice() {
            self.values.clone()
        } else {
            let perm = config_permutation(frames, &self.written, &scope);
            match algebra.kind() {
                InstanceKind::Commonality => {
                    let mut out = vec![0.0; self.values.len()];
                    for (m, &x) in self.values.iter().enumerate() {
                        let mask = m + 1;
                        let mut mapped = 0usize;
                        for (w, &c) in perm.iter().enumerate() {
                            if mask & (1 << w) != 0 {
                                mapped |= 1 << c;
                            }
                        }
                        out[mapped - 1] = x;
                    }
                    out
                }
                _ => {
                    let mut out = vec![0.0; self.values.len()];
                    for (w, &c) in perm.iter().enumerate() {
                        out[c] = self.values[w];
                    }
                    out
                }
            }
        };
        algebra.valuation(scope, values).map_err(|e| at(e.to_string()))
    }
}

/// `perm[w]` is the index in `scope` order of the configuration with index
/// `w` in `written` order.
fn config_permutation(frames: &Frames, written: &[VarId], scope: &VarSet) -> Vec<usize> {
    let card = |v: VarId| frames.card(v).expect("resolved variable");
    let wcards: Vec<usize> = written.iter().map(|&v| card(v)).collect();
    let n = config_count(&wcards);
    let mut digits = vec![0usize; written.len()];
    (0..n)
        .map(|w| {
            let mut rest = w;
            for (i, &c) in wcards.iter().enumerate().rev() {
                digits[i] = rest % c;
                rest /= c;
            }
            scope.iter().fold(0, |acc, v| {
                let pos = written.iter().position(|&x| x == v).expect("same variables");
                acc * card(v) + digits[pos]
            })
        })
        .collect()
}

#[derive(Debug)]
struct RawChain {
    line: usize,
    number: usize,
    node: usize,
    scope: VarSet,
    predecessor: Option<usize>,
    r: Option<RawTable>,
    s: Option<RawTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Closed,
    Variables,
    Factor,
    Hypergraph,
    Chain,
    R,
    S,
}

#[derive(Debug, Default)]
struct Document {
    kind: Option<InstanceKind>,
    frames: Frames,
    declared: bool,
    implicit: bool,
    factors: Vec<RawTable>,
    edges: Option<Vec<VarSet>>,
    chain: Vec<RawChain>,
}

impl Document {
    fn parse(text: &str) -> Result<Self, FormatError> {
        let mut doc = Document::default();
        let mut section = Section::Start;
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("");
            let mut sc = Scanner::new(i + 1, content);
            if sc.at_end() {
                continue;
            }
            if sc.peek() == Some('@') {
                section = doc.directive(&mut sc)?;
                continue;
            }
            match section {
                Section::Start | Section::Closed | Section::Chain => {
                    return Err(sc.err("expected a section header such as @variables"));
                }
                Section::Variables => doc.declare(&mut sc)?,
                Section::Hypergraph => doc.edge(&mut sc)?,
                Section::Factor => {
                    let t = doc.factors.last_mut().expect("open factor");
                    read_numbers(&mut sc, &mut t.values)?;
                }
                Section::R | Section::S => {
                    let c = doc.chain.last_mut().expect("open chain factor");
                    let t = if section == Section::R { &mut c.r } else { &mut c.s };
                    read_numbers(&mut sc, &mut t.as_mut().expect("open table").values)?;
                }
            }
        }
        Ok(doc)
    }

    fn directive(&mut self, sc: &mut Scanner) -> Result<Section, FormatError> {
        let col = sc.column();
        sc.eat('@');
        let (name, _) = sc.word().ok_or_else(|| FormatError::new(sc.line, col, "missing directive name"))?;
        let line = sc.line;
        let section = match name.as_str() {
            "kind" => {
                if self.kind.is_some() {
                    return Err(FormatError::new(line, col, "@kind given twice"));
                }
                let (k, kc) = sc.expect_word("an instance kind")?;
                self.kind = Some(k.parse().map_err(|e: String| FormatError::new(line, kc, e))?);
                Section::Closed
            }
            "variables" => {
                if self.implicit {
                    return Err(FormatError::new(line, col, "@variables must come before @hypergraph"));
                }
                self.declared = true;
                Section::Variables
            }
            "factor" => {
                if self.kind.is_none() {
                    return Err(FormatError::new(line, col, "@kind must come before the first @factor"));
                }
                let mut written = Vec::new();
                while let Some((n, c)) = sc.word() {
                    let v = self.resolve(&n, line, c)?;
                    if written.contains(&v) {
                        return Err(FormatError::new(line, c, format!("`{n}` repeated in factor scope")));
                    }
                    written.push(v);
                }
                self.factors.push(RawTable {
                    line,
                    column: col,
                    written,
                    values: Vec::new(),
                });
                Section::Factor
            }
            "hypergraph" => {
                if self.edges.is_some() {
                    return Err(FormatError::new(line, col, "@hypergraph given twice"));
                }
                self.edges = Some(Vec::new());
                Section::Hypergraph
            }
            "chain" => {
                let number = sc.expect_number("a factor number")?;
                sc.expect_keyword("node")?;
                let node = sc.expect_number("a node id")?;
                let written = self.set(sc, false)?;
                let predecessor = if sc.at_end() {
                    None
                } else {
                    sc.expect_keyword("pred")?;
                    Some(sc.expect_number("a node id")?)
                };
                self.chain.push(RawChain {
                    line,
                    number,
                    node,
                    scope: written.iter().copied().collect(),
                    predecessor,
                    r: None,
                    s: None,
                });
                Section::Chain
            }
            "r" | "s" => {
                let Some(c) = self.chain.last_mut() else {
                    return Err(FormatError::new(line, col, format!("@{name} outside a @chain block")));
                };
                let written = if name == "r" {
                    c.scope.iter().collect()
                } else {
                    let c_scope = c.scope.clone();
                    let w = self.set(sc, false)?;
                    if !w.iter().all(|v| c_scope.contains(*v)) {
                        return Err(FormatError::new(line, col, "@s scope is not inside the chain factor scope"));
                    }
                    w
                };
                let c = self.chain.last_mut().expect("checked above");
                let slot = if name == "r" { &mut c.r } else { &mut c.s };
                if slot.is_some() {
                    return Err(FormatError::new(line, col, format!("@{name} given twice")));
                }
                *slot = Some(RawTable {
                    line,
                    column: col,
                    written,
                    values: Vec::new(),
                });
                if name == "r" {
                    Section::R
                } else {
                    Section::S
                }
            }
            other => return Err(FormatError::new(line, col, format!("unknown directive `@{other}`"))),
        };
        sc.finish()?;
        Ok(section)
    }

    fn declare(&mut self, sc: &mut Scanner) -> Result<(), FormatError> {
        let (name, col) = sc.expect_word("a variable name")?;
        sc.expect(':')?;
        let mut values = Vec::new();
        while let Some((v, _)) = sc.word() {
            values.push(v);
        }
        sc.finish()?;
        if values.is_empty() {
            return Err(sc.err(format!("variable `{name}` needs at least one value")));
        }
        self.frames
            .add(&name, values)
            .map_err(|e| FormatError::new(sc.line, col, e.to_string()))?;
        Ok(())
    }

    fn edge(&mut self, sc: &mut Scanner) -> Result<(), FormatError> {
        let col = sc.column();
        let written = self.set(sc, true)?;
        sc.finish()?;
        if written.is_empty() {
            return Err(FormatError::new(sc.line, col, "empty hyperedge"));
        }
        let e: VarSet = written.into_iter().collect();
        let edges = self.edges.as_mut().expect("open hypergraph");
        if edges.contains(&e) {
            return Err(FormatError::new(sc.line, col, "duplicate hyperedge"));
        }
        edges.push(e);
        Ok(())
    }

    /// `{A, B}` in written order; commas are optional.
    fn set(&mut self, sc: &mut Scanner, implicit: bool) -> Result<Vec<VarId>, FormatError> {
        sc.expect('{')?;
        let mut out = Vec::new();
        loop {
            if sc.eat('}') {
                return Ok(out);
            }
            let (n, c) = sc.expect_word("a variable name or `}`")?;
            let v = if implicit && !self.declared {
                self.implicit = true;
                match self.frames.lookup(&n) {
                    Ok(v) => v,
                    Err(_) => self
                        .frames
                        .add(&n, IMPLICIT_FRAME)
                        .map_err(|e| FormatError::new(sc.line, c, e.to_string()))?,
                }
            } else {
                self.resolve(&n, sc.line, c)?
            };
            if out.contains(&v) {
                return Err(FormatError::new(sc.line, c, format!("`{n}` repeated in set")));
            }
            out.push(v);
            sc.eat(',');
        }
    }

    fn resolve(&self, name: &str, line: usize, column: usize) -> Result<VarId, FormatError> {
        self.frames
            .lookup(name)
            .map_err(|_| FormatError::new(line, column, format!("unknown variable `{name}`")))
    }
}

fn read_numbers(sc: &mut Scanner, into: &mut Vec<f64>) -> Result<(), FormatError> {
    while let Some((w, c)) = sc.word() {
        let x: f64 = w
            .parse()
            .map_err(|_| FormatError::new(sc.line, c, format!("`{w}` is not a number")))?;
        into.push(x);
    }
    sc.finish()
}

struct Scanner {
    line: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Scanner {
    fn new(line: usize, text: &str) -> Self {
        Self {
            line,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::new(self.line, self.column(), message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), FormatError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn word(&mut self) -> Option<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|&c| !c.is_whitespace() && !"{},:@".contains(c))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| (self.chars[start..self.pos].iter().collect(), start + 1))
    }

    fn expect_word(&mut self, what: &str) -> Result<(String, usize), FormatError> {
        self.word().ok_or_else(|| self.err(format!("expected {what}")))
    }

    fn expect_number(&mut self, what: &str) -> Result<usize, FormatError> {
        let (w, c) = self.expect_word(what)?;
        w.parse()
            .map_err(|_| FormatError::new(self.line, c, format!("expected {what}, found `{w}`")))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), FormatError> {
        let col = self.column();
        match self.word() {
            Some((w, _)) if w == kw => Ok(()),
            _ => Err(FormatError::new(self.line, col, format!("expected `{kw}`"))),
        }
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.err(format!("unexpected `{c}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# two variables
@kind probability
@variables
A: a0 a1
B: b0 b1 b2
@factor B A
0.1 0.2
0.3 0.4
0.5 0.6
";

    #[test]
    fn factor_is_reordered_to_declaration_order() {
        let m = parse_model(SMALL).unwrap();
        let alg = m.algebra().unwrap();
        assert_eq!(alg.entries(&m.factors[0]), &[0.1, 0.3, 0.5, 0.2, 0.4, 0.6]);
    }

    #[test]
    fn commonality_masks_follow_the_reordering() {
        // written order (B, A) over binary frames: configurations b0a0, b0a1, b1a0, b1a1
        // canonical order (A, B): a0b0, a0b1, a1b0, a1b1, so written 1 -> canonical 2
        let text = "@kind commonality\n@variables\nA: a0 a1\nB: b0 b1\n@factor B A\n".to_string()
            + &(1..16).map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        let m = parse_model(&text).unwrap();
        let alg = m.algebra().unwrap();
        let q = alg.entries(&m.factors[0]);
        // written mask 0b0010 ({b0a1}) is canonical mask 0b0100 ({a1b0})
        assert_eq!(q[0b0100 - 1], 2.0);
        assert_eq!(q[0b0010 - 1], 4.0);
        assert_eq!(q[0b1001 - 1], 9.0);
        assert_eq!(q[0b1111 - 1], 15.0);
    }

    #[test]
    fn repeated_scopes_are_combined() {
        let text = "@kind probability\n@variables\nA: x y\n@factor A\n0.5 2\n@factor A\n4 0.25\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.factors.len(), 1);
        assert_eq!(m.algebra().unwrap().entries(&m.factors[0]), &[2.0, 0.5]);
    }

    #[test]
    fn model_round_trip() {
        let m = parse_model(SMALL).unwrap();
        let again = parse_model(&write_model(&m)).unwrap();
        assert_eq!(m.factors, again.factors);
        assert_eq!(m.frames, again.frames);
    }

    #[test]
    fn hypergraph_only_file_declares_variables() {
        let m = parse_model("@hypergraph\n{P, Q}\n{Q, R}\n").unwrap();
        assert!(m.algebra.is_none());
        assert_eq!(m.frames.len(), 3);
        assert_eq!(m.hypergraph().unwrap().len(), 2);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_model("@hypergraph\n{A, B}\n  {}\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 3));
        assert!(e.message.contains("empty hyperedge"));

        let e = parse_model("@kind probability\n@variables\nA: 0 1\n@factor A C\n").unwrap_err();
        assert_eq!((e.line, e.column), (4, 11));

        let e = parse_model("@kind probability\n@variables\nA: 0 1\n@factor A\n0.5 x\n").unwrap_err();
        assert_eq!((e.line, e.column), (5, 5));

        let e = parse_model("@kind probability\n@variables\nA: 0 1\n@factor A\n0.5\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("needs 2 values"));

        let e = parse_model("@kind fuzzy\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 7));

        let e = parse_model("A: 0 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
    }

    #[test]
    fn chain_blocks_are_checked() {
        let head = "@kind probability\n@variables\nA: 0 1\nB: 0 1\n";
        let ok = format!("{head}@chain 1 node 0 {{A, B}}\n@r\n0.1 0.2\n0.3 0.4\n");
        assert_eq!(parse_chain(&ok).unwrap().chain.len(), 1);

        let missing_s = format!("{head}@chain 1 node 0 {{A}}\n@r\n0.5 0.5\n@chain 2 node 1 {{A, B}} pred 0\n@r\n0.1 0.2 0.3 0.4\n");
        assert!(parse_chain(&missing_s).is_err());

        let stray = format!("{head}@r\n1 1\n");
        assert!(parse_chain(&stray).is_err());
    }
}
