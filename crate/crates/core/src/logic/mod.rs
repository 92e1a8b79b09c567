//! Objective formulas: abstract syntax, printing, classification, and the
//! structural checks used by the assume-guarantee rules.
//!
//! Formulas combine boolean connectives, the temporal operators `F`, `G`,
//! `U` (no next-step operator), and the strategic modality `⟨⟨C⟩⟩`
//! (written `<<...>>` in concrete syntax) quantifying over joint strategies
//! of coalition `C`. Atoms constrain the values of labeled variables.

pub mod parser;

pub use parser::{parse_formula, ParseContext, ParseError};

use crate::system::System;
use crate::values::{Valuation, Value};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// An objective formula.
///
/// Coalitions in [`Formula::Coop`] are 0-based agent indices into the system
/// the formula is interpreted over, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    /// Holds in a state whose label extends the constraint.
    Atom(Valuation),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `F φ` — eventually.
    Finally(Box<Formula>),
    /// `G φ` — always.
    Globally(Box<Formula>),
    /// `φ U ψ` — until (strong).
    Until(Box<Formula>, Box<Formula>),
    /// `⟨⟨C⟩⟩ φ` — coalition `C` has a joint strategy enforcing `φ`.
    Coop(Vec<usize>, Box<Formula>),
}

impl Formula {
    /// Atom constraining a single variable.
    pub fn atom<S: Into<String>>(var: S, val: Value) -> Formula {
        Formula::Atom(Valuation::from_pairs([(var, val)]))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// Strategic modality; `agents` are 0-based indices (deduplicated and
    /// sorted here).
    pub fn coop<I: IntoIterator<Item = usize>>(agents: I, body: Formula) -> Formula {
        let set: BTreeSet<usize> = agents.into_iter().collect();
        Formula::Coop(set.into_iter().collect(), Box::new(body))
    }

    /// All variables mentioned by atoms, anywhere in the formula.
    pub fn atom_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atom_vars(&mut out);
        out
    }

    fn collect_atom_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(v) => out.extend(v.vars().map(String::from)),
            Formula::Not(f) | Formula::Finally(f) | Formula::Globally(f) | Formula::Coop(_, f) => {
                f.collect_atom_vars(out)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                a.collect_atom_vars(out);
                b.collect_atom_vars(out);
            }
        }
    }

    /// Whether any strategic modality occurs in the formula.
    pub fn has_coop(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => false,
            Formula::Coop(_, _) => true,
            Formula::Not(f) | Formula::Finally(f) | Formula::Globally(f) => f.has_coop(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                a.has_coop() || b.has_coop()
            }
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Or(_, _) => 1,
            Formula::And(_, _) => 2,
            Formula::Until(_, _) => 3,
            Formula::Not(_) | Formula::Finally(_) | Formula::Globally(_) | Formula::Coop(_, _) => 4,
            Formula::True | Formula::False | Formula::Atom(_) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(v) => {
                // Multi-variable atoms are not producible by the grammar;
                // print them as the equivalent conjunction.
                match v.len() {
                    0 => write!(f, "true"),
                    1 => write!(f, "{v}"),
                    _ => {
                        write!(f, "(")?;
                        for (i, (k, val)) in v.iter().enumerate() {
                            if i > 0 {
                                write!(f, " & ")?;
                            }
                            write!(f, "{k}={val}")?;
                        }
                        write!(f, ")")
                    }
                }
            }
            Formula::Not(g) => {
                write!(f, "!")?;
                g.fmt_prec(f, 4)
            }
            Formula::Finally(g) => {
                write!(f, "F ")?;
                g.fmt_prec(f, 4)
            }
            Formula::Globally(g) => {
                write!(f, "G ")?;
                g.fmt_prec(f, 4)
            }
            Formula::Coop(c, g) => {
                write!(f, "<<")?;
                for (i, a) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a + 1)?;
                }
                write!(f, ">>")?;
                g.fmt_prec(f, 4)
            }
            Formula::Until(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " U ")?;
                b.fmt_prec(f, 3)
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Syntactic class of a formula, driving verification dispatch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaClass {
    /// No strategic modality anywhere: a pure linear-time formula.
    Ltl,
    /// A single leading strategic modality over a modality-free body.
    OneAtls,
    /// Anything else (nested or non-leading modalities).
    Nested,
}

/// Classifies a formula by the literal placement of its strategic modalities.
pub fn classify(f: &Formula) -> FormulaClass {
    match f {
        Formula::Coop(_, body) if !body.has_coop() => FormulaClass::OneAtls,
        _ if !f.has_coop() => FormulaClass::Ltl,
        _ => FormulaClass::Nested,
    }
}

/// Truth of an atomic constraint in a state label: the label assigns every
/// constrained variable its required value.
pub fn eval_atom(constraint: &Valuation, label: &Valuation) -> bool {
    label.extends(constraint)
}

/// Rejection reasons for [`check_rule_shape`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("formula must be a single strategic modality over a conjunction of objectives")]
    NotOneAtls,
    #[error("coalition {{{coalition}}} does not match the union of the parts {{{parts}}}")]
    CoalitionMismatch { coalition: String, parts: String },
    #[error("agent `{agent}` appears in more than one part")]
    OverlappingParts { agent: String },
    #[error("part references agent index {index} outside the system")]
    BadAgentIndex { index: usize },
    #[error("objective `{conjunct}` mentions variable(s) {variables} visible to no single part")]
    Unassignable { conjunct: String, variables: String },
}

/// Splits a coalition goal `⟨⟨C⟩⟩(ψ_1 ∧ … ∧ ψ_m)` into per-part objectives.
///
/// `parts` partitions the coalition into groups of 0-based agent indices;
/// `extra_vars[i]` names additional variables part `i` may mention (the state
/// variables of its assumption, when one is used). A part may mention its own
/// members' state variables plus its extras.
///
/// Conjuncts are matched to parts positionally when their number equals the
/// number of parts and every conjunct is visible to its positional part.
/// Otherwise each conjunct goes to the first part that can see all its
/// variables, and parts left without a conjunct receive `true`. The returned
/// objectives, re-conjoined, are the input body up to associativity and
/// order.
pub fn check_rule_shape(
    f: &Formula,
    sys: &System,
    parts: &[Vec<usize>],
    extra_vars: &[BTreeSet<String>],
) -> Result<Vec<Formula>, ShapeError> {
    assert_eq!(parts.len(), extra_vars.len(), "one extra-var set per part");
    let (coalition, body) = match f {
        Formula::Coop(c, body) if !body.has_coop() => (c, body),
        _ => return Err(ShapeError::NotOneAtls),
    };

    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for part in parts {
        for &a in part {
            if a >= sys.agents.len() {
                return Err(ShapeError::BadAgentIndex { index: a });
            }
            if !seen.insert(a) {
                return Err(ShapeError::OverlappingParts {
                    agent: sys.agents[a].name().to_string(),
                });
            }
        }
    }
    let coalition_set: BTreeSet<usize> = coalition.iter().copied().collect();
    if coalition_set != seen {
        let names = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|&a| {
                    sys.agents
                        .get(a)
                        .map_or_else(|| format!("#{}", a + 1), |ag| ag.name().to_string())
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        return Err(ShapeError::CoalitionMismatch {
            coalition: names(&coalition_set),
            parts: names(&seen),
        });
    }

    let visible: Vec<BTreeSet<String>> = parts
        .iter()
        .zip(extra_vars)
        .map(|(part, extra)| {
            let mut vars = extra.clone();
            for &a in part {
                vars.extend(sys.agents[a].module.state_vars.iter().cloned());
            }
            vars
        })
        .collect();

    let mut conjuncts = Vec::new();
    flatten_and(body, &mut conjuncts);
    let admissible = |c: &Formula, i: usize| c.atom_vars().is_subset(&visible[i]);

    if conjuncts.len() == parts.len() && conjuncts.iter().enumerate().all(|(i, c)| admissible(c, i))
    {
        return Ok(conjuncts.into_iter().cloned().collect());
    }

    let mut assigned: Vec<Vec<&Formula>> = vec![Vec::new(); parts.len()];
    for c in &conjuncts {
        match (0..parts.len()).find(|&i| admissible(c, i)) {
            Some(i) => assigned[i].push(c),
            None => {
                return Err(ShapeError::Unassignable {
                    conjunct: c.to_string(),
                    variables: c
                        .atom_vars()
                        .into_iter()
                        .collect::<Vec<_>>()
                        .join(","),
                })
            }
        }
    }
    Ok(assigned
        .into_iter()
        .map(|group| {
            let mut it = group.into_iter().cloned();
            match it.next() {
                None => Formula::True,
                Some(first) => it.fold(first, Formula::and),
            }
        })
        .collect())
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        _ => out.push(f),
    }
}
