//! Concrete formula syntax.
//!
//! Grammar (precedence low to high: `|`, `&`, `U`, unary):
//!
//! ```text
//! formula  := or
//! or       := and ('|' and)*
//! and      := until ('&' until)*
//! until    := unary ('U' until)?            // right-associative
//! unary    := '!' unary | 'G' unary | 'F' unary
//!           | '<<' id (',' id)* '>>' unary | primary
//! primary  := '(' formula ')' | 'true' | 'false' | ident cmp int
//! cmp      := '=' | '!=' | '<' | '>' | '<=' | '>='
//! ```
//!
//! `U`, `G`, `F` are reserved words; every other identifier names a variable
//! or, inside `<<...>>`, an agent. Coalition ids are agent names or 1-based
//! indices. Comparisons other than `=` are sugar, expanded at parse time into
//! boolean combinations of equalities over the domain. The next-step
//! operator `X` is reserved and rejected with a dedicated error.

use super::Formula;
use crate::system::System;
use crate::values::Domain;
use thiserror::Error;

/// A syntax error with its position (1-based line and column).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

/// Context the parser needs beyond the text: the value domain (to expand
/// comparisons) and the agents (to resolve coalition ids).
#[derive(Clone, Debug)]
pub struct ParseContext {
    domain: Domain,
    n_agents: usize,
    names: Vec<String>,
}

impl ParseContext {
    /// A context with `n_agents` anonymous agents: coalitions can only use
    /// numeric ids.
    pub fn new(domain: Domain, n_agents: usize) -> Self {
        ParseContext {
            domain,
            n_agents,
            names: Vec::new(),
        }
    }

    /// The context matching a system: its domain and its agent names.
    pub fn for_system(sys: &System) -> Self {
        ParseContext {
            domain: sys.domain,
            n_agents: sys.agents.len(),
            names: sys.agent_names(),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
}

/// Parses `text` into a [`Formula`]. Variables are not checked against any
/// system here; unknown variables surface later, when the formula is bound
/// to a model.
pub fn parse_formula(text: &str, ctx: &ParseContext) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        ctx,
    };
    let f = p.or()?;
    match p.peek() {
        Tok::End => Ok(f),
        other => Err(p.err_here(format!("unexpected {}", other.describe()))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    True,
    False,
    UntilOp,
    GloballyOp,
    FinallyOp,
    NextOp,
    Bang,
    Amp,
    Pipe,
    LPar,
    RPar,
    CoopOpen,
    CoopClose,
    Comma,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("number `{n}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::UntilOp => "`U`".into(),
            Tok::GloballyOp => "`G`".into(),
            Tok::FinallyOp => "`F`".into(),
            Tok::NextOp => "`X`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::LPar => "`(`".into(),
            Tok::RPar => "`)`".into(),
            Tok::CoopOpen => "`<<`".into(),
            Tok::CoopClose => "`>>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: u32,
    column: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    macro_rules! push {
        ($tok:expr, $l:expr, $c:expr) => {
            out.push(Spanned {
                tok: $tok,
                line: $l,
                column: $c,
            })
        };
    }
    while let Some(&c) = chars.peek() {
        let (l, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '(' => {
                chars.next();
                col += 1;
                push!(Tok::LPar, l, c0);
            }
            ')' => {
                chars.next();
                col += 1;
                push!(Tok::RPar, l, c0);
            }
            ',' => {
                chars.next();
                col += 1;
                push!(Tok::Comma, l, c0);
            }
            '&' => {
                chars.next();
                col += 1;
                push!(Tok::Amp, l, c0);
            }
            '|' => {
                chars.next();
                col += 1;
                push!(Tok::Pipe, l, c0);
            }
            '=' => {
                chars.next();
                col += 1;
                push!(Tok::Eq, l, c0);
            }
            '!' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'=') {
                    chars.next();
                    col += 1;
                    push!(Tok::Ne, l, c0);
                } else {
                    push!(Tok::Bang, l, c0);
                }
            }
            '<' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some('<') => {
                        chars.next();
                        col += 1;
                        push!(Tok::CoopOpen, l, c0);
                    }
                    Some('=') => {
                        chars.next();
                        col += 1;
                        push!(Tok::Le, l, c0);
                    }
                    _ => push!(Tok::Lt, l, c0),
                }
            }
            '>' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some('>') => {
                        chars.next();
                        col += 1;
                        push!(Tok::CoopClose, l, c0);
                    }
                    Some('=') => {
                        chars.next();
                        col += 1;
                        push!(Tok::Ge, l, c0);
                    }
                    _ => push!(Tok::Gt, l, c0),
                }
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        chars.next();
                        col += 1;
                        n = n * 10 + v as u64;
                        if n > u32::MAX as u64 {
                            return Err(ParseError {
                                line: l,
                                column: c0,
                                message: "number too large".into(),
                            });
                        }
                    } else {
                        break;
                    }
                }
                push!(Tok::Int(n as u32), l, c0);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' {
                        word.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "U" => Tok::UntilOp,
                    "G" => Tok::GloballyOp,
                    "F" => Tok::FinallyOp,
                    "X" => Tok::NextOp,
                    _ => Tok::Ident(word),
                };
                push!(tok, l, c0);
            }
            other => {
                return Err(ParseError {
                    line: l,
                    column: c0,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    push!(Tok::End, line, col);
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    ctx: &'a ParseContext,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    /// An error located at the token currently under the cursor.
    fn err_here(&self, message: String) -> ParseError {
        let s = &self.tokens[self.pos];
        ParseError {
            line: s.line,
            column: s.column,
            message,
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and()?;
        while self.peek() == &Tok::Pipe {
            self.bump();
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.until()?;
        while self.peek() == &Tok::Amp {
            self.bump();
            f = Formula::and(f, self.until()?);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.peek() == &Tok::UntilOp {
            self.bump();
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::GloballyOp => {
                self.bump();
                Ok(Formula::globally(self.unary()?))
            }
            Tok::FinallyOp => {
                self.bump();
                Ok(Formula::finally(self.unary()?))
            }
            Tok::NextOp => {
                Err(self.err_here("the next-step operator X is not supported".into()))
            }
            Tok::CoopOpen => {
                self.bump();
                let agents = self.coalition()?;
                Ok(Formula::coop(agents, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn coalition(&mut self) -> Result<Vec<usize>, ParseError> {
        let mut agents = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Int(k) => {
                    if k == 0 || k as usize > self.ctx.n_agents {
                        return Err(self.err_here(format!(
                            "agent index {k} out of range (1..{})",
                            self.ctx.n_agents
                        )));
                    }
                    self.bump();
                    agents.push(k as usize - 1);
                }
                Tok::Ident(name) => match self.ctx.names.iter().position(|n| n == &name) {
                    Some(i) => {
                        self.bump();
                        agents.push(i);
                    }
                    None => return Err(self.err_here(format!("unknown agent `{name}`"))),
                },
                _ => return Err(self.err_here("expected agent name or index".into())),
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::CoopClose => {
                    self.bump();
                    return Ok(agents);
                }
                _ => return Err(self.err_here("expected `,` or `>>` in coalition".into())),
            }
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LPar => {
                self.bump();
                let f = self.or()?;
                match self.peek() {
                    Tok::RPar => {
                        self.bump();
                        Ok(f)
                    }
                    _ => Err(self.err_here("expected `)`".into())),
                }
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(var) => {
                self.bump();
                let cmp = match self.peek() {
                    Tok::Eq | Tok::Ne | Tok::Lt | Tok::Gt | Tok::Le | Tok::Ge => self.bump(),
                    other => {
                        return Err(self.err_here(format!(
                            "expected a comparison after `{var}`, found {}",
                            other.describe()
                        )))
                    }
                };
                let val = match self.peek() {
                    Tok::Int(v) => {
                        let v = *v;
                        if !self.ctx.domain.contains(v) {
                            return Err(self.err_here(format!(
                                "value {v} outside domain {}",
                                self.ctx.domain
                            )));
                        }
                        self.bump();
                        v
                    }
                    other => {
                        return Err(self.err_here(format!(
                            "expected a value after the comparison, found {}",
                            other.describe()
                        )))
                    }
                };
                Ok(self.comparison(var, &cmp, val))
            }
            other => Err(self.err_here(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn comparison(&self, var: String, cmp: &Tok, val: u32) -> Formula {
        let size = self.ctx.domain.size();
        let or_of = |values: Vec<u32>| -> Formula {
            let mut it = values.into_iter().map(|v| Formula::atom(var.clone(), v));
            match it.next() {
                None => Formula::False,
                Some(first) => it.fold(first, Formula::or),
            }
        };
        match cmp {
            Tok::Eq => Formula::atom(var.clone(), val),
            Tok::Ne => Formula::not(Formula::atom(var.clone(), val)),
            Tok::Lt => or_of((0..val).collect()),
            Tok::Gt => or_of((val + 1..size).collect()),
            Tok::Le => or_of((0..=val).collect()),
            Tok::Ge => or_of((val..size).collect()),
            _ => unreachable!("caller filtered comparison tokens"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_tgc;
    use crate::logic::{classify, FormulaClass};
    use crate::values::Value;

    fn ctx() -> ParseContext {
        ParseContext::new(Domain::new(3), 3)
    }

    fn a(var: &str, val: Value) -> Formula {
        Formula::atom(var, val)
    }

    #[test]
    fn parses_the_coalition_liveness_goal() {
        let f = parse_formula("<<1,2>>(G F x1=1 & G F x2=1)", &ctx()).unwrap();
        let expected = Formula::coop(
            [0, 1],
            Formula::and(
                Formula::globally(Formula::finally(a("x1", 1))),
                Formula::globally(Formula::finally(a("x2", 1))),
            ),
        );
        assert_eq!(f, expected);
        assert_eq!(classify(&f), FormulaClass::OneAtls);
        assert_eq!(f.to_string(), "<<1,2>>(G F x1=1 & G F x2=1)");
    }

    #[test]
    fn parses_pure_linear_time_formulas() {
        let f = parse_formula("G F s=1", &ctx()).unwrap();
        assert_eq!(
            f,
            Formula::globally(Formula::finally(a("s", 1)))
        );
        assert_eq!(classify(&f), FormulaClass::Ltl);
    }

    #[test]
    fn rejects_the_next_step_operator() {
        let err = parse_formula("<<1>> X x1=1", &ctx()).unwrap_err();
        assert!(err.message.contains("next-step operator X"));
        assert_eq!((err.line, err.column), (1, 7));
    }

    #[test]
    fn until_is_right_associative_and_binds_between_boolean_ops() {
        let f = parse_formula("x=0 U y=0 U z=0", &ctx()).unwrap();
        assert_eq!(
            f,
            Formula::until(a("x", 0), Formula::until(a("y", 0), a("z", 0)))
        );
        let g = parse_formula("!x=0 & y=1 | z=0", &ctx()).unwrap();
        assert_eq!(
            g,
            Formula::or(
                Formula::and(Formula::not(a("x", 0)), a("y", 1)),
                a("z", 0)
            )
        );
        let h = parse_formula("x=0 U y=1 & z=0", &ctx()).unwrap();
        assert_eq!(
            h,
            Formula::and(Formula::until(a("x", 0), a("y", 1)), a("z", 0))
        );
    }

    #[test]
    fn comparisons_expand_over_the_domain() {
        let gt = parse_formula("e>0", &ctx()).unwrap();
        assert_eq!(gt, Formula::or(a("e", 1), a("e", 2)));
        let le = parse_formula("e<=1", &ctx()).unwrap();
        assert_eq!(le, Formula::or(a("e", 0), a("e", 1)));
        let ne = parse_formula("e!=1", &ctx()).unwrap();
        assert_eq!(ne, Formula::not(a("e", 1)));
        let lt0 = parse_formula("e<0", &ctx()).unwrap();
        assert_eq!(lt0, Formula::False);
        let gt_top = parse_formula("e>2", &ctx()).unwrap();
        assert_eq!(gt_top, Formula::False);
    }

    #[test]
    fn values_outside_the_domain_are_rejected() {
        let err = parse_formula("e=5", &ctx()).unwrap_err();
        assert!(err.message.contains("outside domain"));
    }

    #[test]
    fn coalition_ids_resolve_names_and_indices() {
        let (sys, _) = gen_tgc(2);
        let sctx = ParseContext::for_system(&sys);
        let f = parse_formula("<<controller>>F s=1", &sctx).unwrap();
        assert_eq!(f, Formula::coop([2], Formula::finally(a("s", 1))));
        let g = parse_formula("<<train2,1>>F s=1", &sctx).unwrap();
        assert_eq!(g, Formula::coop([0, 1], Formula::finally(a("s", 1))));
        assert!(parse_formula("<<wrong>>F s=1", &sctx)
            .unwrap_err()
            .message
            .contains("unknown agent"));
        assert!(parse_formula("<<0>>F s=1", &sctx)
            .unwrap_err()
            .message
            .contains("out of range"));
        assert!(parse_formula("<<4>>F s=1", &sctx)
            .unwrap_err()
            .message
            .contains("out of range"));
    }

    #[test]
    fn error_positions_are_line_and_column_accurate() {
        let err = parse_formula("x=1 &\n& y=1", &ctx()).unwrap_err();
        assert_eq!((err.line, err.column), (2, 1));
    }

    #[test]
    fn reserved_words_are_single_letters_only() {
        // `Gx` is an identifier, not `G` applied to `x`.
        let f = parse_formula("Gx=1", &ctx()).unwrap();
        assert_eq!(f, a("Gx", 1));
        let g = parse_formula("true U x=1", &ctx()).unwrap();
        assert_eq!(g, Formula::until(Formula::True, a("x", 1)));
    }

    #[test]
    fn trailing_input_is_rejected() {
        let err = parse_formula("x=1 y=2", &ctx()).unwrap_err();
        assert!(err.message.contains("unexpected"));
    }
}
