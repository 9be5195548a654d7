//! Boolean queries over variable assignments.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := term ('|' term)*
//! term    := factor ('&' factor)*
//! factor  := '!' factor | '(' expr ')' | name '=' name
//! ```

use std::fmt;

use crate::error::{Error, Result};
use crate::variable::{Configuration, Frames, VarId, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryExpr {
    /// `var` takes the frame value with index `value`.
    Literal { var: VarId, value: usize },
    Not(Box<QueryExpr>),
    And(Box<QueryExpr>, Box<QueryExpr>),
    Or(Box<QueryExpr>, Box<QueryExpr>),
}

impl QueryExpr {
    pub fn parse(text: &str, frames: &Frames) -> Result<Self> {
        let mut parser = Parser {
            tokens: tokenize(text)?,
            pos: 0,
            frames,
        };
        let expr = parser.expr()?;
        match parser.peek() {
            (Token::End, _) => Ok(expr),
            (tok, column) => Err(Error::QuerySyntax {
                column,
                message: format!("unexpected {tok}"),
            }),
        }
    }

    pub fn literal(frames: &Frames, var: &str, value: &str) -> Result<Self> {
        let id = frames.lookup(var)?;
        let value = frames.get(id)?.value_index(value).ok_or_else(|| Error::UnknownValue {
            var: var.to_string(),
            value: value.to_string(),
        })?;
        Ok(QueryExpr::Literal { var: id, value })
    }

    pub fn and(self, other: QueryExpr) -> Self {
        QueryExpr::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: QueryExpr) -> Self {
        QueryExpr::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        QueryExpr::Not(Box::new(self))
    }

    /// Variables mentioned anywhere in the query.
    pub fn vars(&self) -> VarSet {
        let mut out = VarSet::empty();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut VarSet) {
        match self {
            QueryExpr::Literal { var, .. } => out.insert(*var),
            QueryExpr::Not(a) => a.collect_vars(out),
            QueryExpr::And(a, b) | QueryExpr::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Truth value under `config`; a literal on a variable outside the
    /// configuration is false.
    pub fn eval(&self, config: &Configuration) -> bool {
        self.holds(&|v| config.value_of(v))
    }

    /// Truth value under an arbitrary assignment lookup.
    pub fn holds(&self, value_of: &dyn Fn(VarId) -> Option<usize>) -> bool {
        match self {
            QueryExpr::Literal { var, value } => value_of(*var) == Some(*value),
            QueryExpr::Not(a) => !a.holds(value_of),
            QueryExpr::And(a, b) => a.holds(value_of) && b.holds(value_of),
            QueryExpr::Or(a, b) => a.holds(value_of) || b.holds(value_of),
        }
    }

    /// Renders the query in the parser's syntax.
    pub fn show(&self, frames: &Frames) -> String {
        Shown { expr: self, frames }.to_string()
    }
}

struct Shown<'a> {
    expr: &'a QueryExpr,
    frames: &'a Frames,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |e| Shown {
            expr: e,
            frames: self.frames,
        };
        match self.expr {
            QueryExpr::Literal { var, value } => {
                let label = self
                    .frames
                    .get(*var)
                    .map(|v| v.frame()[*value].clone())
                    .unwrap_or_else(|_| value.to_string());
                write!(f, "{}={}", self.frames.name(*var), label)
            }
            QueryExpr::Not(a) => write!(f, "!{}", sub(a)),
            QueryExpr::And(a, b) => write!(f, "({} & {})", sub(a), sub(b)),
            QueryExpr::Or(a, b) => write!(f, "({} | {})", sub(a), sub(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(String),
    And,
    Or,
    Not,
    Eq,
    Open,
    Close,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Name(n) => write!(f, "`{n}`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Not => f.write_str("`!`"),
            Token::Eq => f.write_str("`=`"),
            Token::Open => f.write_str("`(`"),
            Token::Close => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '+' | '\'')
}

/// Tokens with their 1-based character column.
fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let simple = match c {
            '&' => Some(Token::And),
            '|' => Some(Token::Or),
            '!' => Some(Token::Not),
            '=' => Some(Token::Eq),
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push((tok, column));
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if is_name_char(c) {
            let start = i;
            while i < chars.len() && is_name_char(chars[i]) {
                i += 1;
            }
            out.push((Token::Name(chars[start..i].iter().collect()), column));
        } else {
            return Err(Error::QuerySyntax {
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    frames: &'a Frames,
}

impl Parser<'_> {
    fn peek(&self) -> (Token, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Token, usize) {
        let t = self.peek();
        if t.0 != Token::End {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<QueryExpr> {
        let mut left = self.term()?;
        while self.peek().0 == Token::Or {
            self.bump();
            left = left.or(self.term()?);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<QueryExpr> {
        let mut left = self.factor()?;
        while self.peek().0 == Token::And {
            self.bump();
            left = left.and(self.factor()?);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<QueryExpr> {
        match self.bump() {
            (Token::Not, _) => Ok(self.factor()?.not()),
            (Token::Open, _) => {
                let inner = self.expr()?;
                match self.bump() {
                    (Token::Close, _) => Ok(inner),
                    (tok, column) => Err(Error::QuerySyntax {
                        column,
                        message: format!("expected `)`, found {tok}"),
                    }),
                }
            }
            (Token::Name(var), _) => {
                match self.bump() {
                    (Token::Eq, _) => {}
                    (tok, column) => {
                        return Err(Error::QuerySyntax {
                            column,
                            message: format!("expected `=`, found {tok}"),
                        })
                    }
                }
                match self.bump() {
                    (Token::Name(value), _) => QueryExpr::literal(self.frames, &var, &value),
                    (tok, column) => Err(Error::QuerySyntax {
                        column,
                        message: format!("expected a value, found {tok}"),
                    }),
                }
            }
            (tok, column) => Err(Error::QuerySyntax {
                column,
                message: format!("expected a literal, `!` or `(`, found {tok}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frames() -> Frames {
        Frames::binary(&["x1", "x2", "x3"]).unwrap()
    }

    #[test]
    fn precedence_and_over_or() {
        let f = frames();
        let q = QueryExpr::parse("x1=true & x2=true | x3=true", &f).unwrap();
        let expected = QueryExpr::literal(&f, "x1", "true")
            .unwrap()
            .and(QueryExpr::literal(&f, "x2", "true").unwrap())
            .or(QueryExpr::literal(&f, "x3", "true").unwrap());
        assert_eq!(q, expected);
        assert_eq!(q.vars().len(), 3);
    }

    #[test]
    fn negation_and_parentheses() {
        let f = frames();
        let q = QueryExpr::parse("!(x1=true | !x2=false)", &f).unwrap();
        let config = Configuration::new(f.all(), vec![0, 0, 1], &[2, 2, 2]).unwrap();
        assert!(q.eval(&config));
        assert_eq!(QueryExpr::parse(&q.show(&f), &f).unwrap(), q);
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let f = frames();
        let err = |s: &str| match QueryExpr::parse(s, &f) {
            Err(Error::QuerySyntax { column, .. }) => column,
            other => panic!("{other:?}"),
        };
        assert_eq!(err("x1=true &"), 10);
        assert_eq!(err("x1 true"), 4);
        assert_eq!(err("(x1=true"), 9);
        assert_eq!(err("x1=true # x2"), 9);
        assert_eq!(err(""), 1);
    }

    #[test]
    fn unknown_names() {
        let f = frames();
        assert_eq!(
            QueryExpr::parse("y=true", &f),
            Err(Error::UnknownVariable("y".into()))
        );
        assert!(matches!(
            QueryExpr::parse("x1=maybe", &f),
            Err(Error::UnknownValue { .. })
        ));
    }
}
