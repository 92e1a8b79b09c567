//! The guarantee relation between a module and an assumption.
//!
//! A module guarantees an assumption when every infinite trace it can
//! produce — read as a word over the assumption's state and input
//! variables — has a curtailment accepted by the assumption: consecutive
//! positions that agree on those variables may be collapsed into one
//! assumption step. The check never complements the module; the assumption
//! (the small, hand-written artifact) is stutter-expanded and complemented,
//! and the module's trace language is intersected with the result.

use crate::module::Module;
use crate::omega::{
    complement, find_accepting_lasso, intersect, stutter_expand, Acceptance,
    Alphabet, BuchiAutomaton, Edge, LassoWord, LetterSet, OmegaError, DEFAULT_COMPLEMENT_CAP,
};
use crate::system::Assumption;
use crate::values::Valuation;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurtailError {
    #[error("curtailment must start at index 0, found {0}")]
    FirstIndexNotZero(usize),
    #[error("curtailment indices must be strictly increasing, found {prev} before {next}")]
    NotIncreasing { prev: usize, next: usize },
    #[error("curtailment index {index} is outside the prefix of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("block {block} (positions {from}..{to}) is not constant on the projected variables")]
    NonConstantBlock { block: usize, from: usize, to: usize },
}

/// Contracts the prefix `w` along the cut points `c`: block `i` spans the
/// positions `c[i]` up to (excluding) `c[i+1]` — the last block runs to the
/// end — and is represented by its first position projected to `y`. Every
/// block must be constant on `y`.
pub fn curtail_prefix(
    w: &[Valuation],
    y: &BTreeSet<String>,
    c: &[usize],
) -> Result<Vec<Valuation>, CurtailError> {
    match c.first() {
        Some(0) => {}
        Some(&other) => return Err(CurtailError::FirstIndexNotZero(other)),
        None => return Err(CurtailError::FirstIndexNotZero(usize::MAX)),
    }
    for pair in c.windows(2) {
        if pair[1] <= pair[0] {
            return Err(CurtailError::NotIncreasing {
                prev: pair[0],
                next: pair[1],
            });
        }
    }
    if let Some(&last) = c.last() {
        if last >= w.len() {
            return Err(CurtailError::OutOfRange {
                index: last,
                len: w.len(),
            });
        }
    }
    let project = |v: &Valuation| v.restrict(y.iter().map(|s| s.as_str()));
    let mut out = Vec::with_capacity(c.len());
    for (block, &start) in c.iter().enumerate() {
        let end = c.get(block + 1).copied().unwrap_or(w.len());
        let representative = project(&w[start]);
        if w[start..end].iter().any(|v| project(v) != representative) {
            return Err(CurtailError::NonConstantBlock {
                block,
                from: start,
                to: end,
            });
        }
        out.push(representative);
    }
    Ok(out)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GuaranteeError {
    #[error("assumption state variables {vars:?} are not state variables of the module")]
    MissingStateVars { vars: Vec<String> },
    #[error("assumption input variables {vars:?} are neither state nor input variables of the module")]
    MissingInputVars { vars: Vec<String> },
    #[error(transparent)]
    Omega(#[from] OmegaError),
}

#[derive(Clone, Debug)]
pub struct GuaranteeOutcome {
    pub holds: bool,
    /// On failure, a trace of the module (projected to the assumption's
    /// variables) none of whose curtailments the assumption accepts.
    pub counterexample: Option<LassoWord>,
}

/// The module's traces as a Büchi automaton over the assumption's
/// variables: each step emits the source state's values of the
/// assumption's state variables, together with its input variables —
/// read from the source state when the module owns them as state
/// variables, and from the admitted input letter otherwise.
fn trace_automaton(m: &Module, a: &Assumption) -> Result<BuchiAutomaton, GuaranteeError> {
    let missing: Vec<String> = a
        .module
        .state_vars
        .iter()
        .filter(|v| !m.state_vars.contains(*v))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(GuaranteeError::MissingStateVars { vars: missing });
    }
    let missing: Vec<String> = a
        .module
        .input_vars
        .iter()
        .filter(|v| !m.state_vars.contains(*v) && !m.input_vars.contains(*v))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(GuaranteeError::MissingInputVars { vars: missing });
    }
    let vars: BTreeSet<String> = a
        .module
        .state_vars
        .union(&a.module.input_vars)
        .cloned()
        .collect();
    let alphabet = Alphabet::new(vars.iter().cloned(), m.domain);
    let mut letters: BTreeMap<(usize, usize), LetterSet> = BTreeMap::new();
    for t in &m.transitions {
        let label = m.label(t.from);
        let mut v = Valuation::new();
        for x in &vars {
            let val = if m.state_vars.contains(x) {
                label.get(x)
            } else {
                t.input.get(x)
            };
            v.set(x.clone(), val.expect("assumption variable is present"));
        }
        let code = alphabet.encode(&v).expect("letter fits the alphabet");
        letters.entry((t.from, t.to)).or_default().insert(code);
    }
    let edges = letters
        .into_iter()
        .map(|((from, to), letters)| Edge { from, letters, to })
        .collect();
    Ok(BuchiAutomaton {
        alphabet,
        n_states: m.states.len(),
        edges,
        initial: BTreeSet::from([m.init]),
        acceptance: Acceptance::StateBased((0..m.states.len()).collect()),
    })
}

/// Does every trace of `m` have a curtailment accepted by `a`? Decided by
/// intersecting `m`'s trace language with the complement of the stutter
/// expansion of `a`; the complementation cap bounds the assumption-side
/// blowup.
pub fn guarantees_with_cap(
    m: &Module,
    a: &Assumption,
    cap: usize,
) -> Result<GuaranteeOutcome, GuaranteeError> {
    let traces = trace_automaton(m, a)?;
    let rejected = complement(&stutter_expand(a), cap)?;
    let product = intersect(&traces, &rejected);
    Ok(match find_accepting_lasso(&product) {
        None => GuaranteeOutcome {
            holds: true,
            counterexample: None,
        },
        Some(lasso) => GuaranteeOutcome {
            holds: false,
            counterexample: Some(lasso.word(&product.alphabet)),
        },
    })
}

pub fn guarantees(m: &Module, a: &Assumption) -> Result<GuaranteeOutcome, GuaranteeError> {
    guarantees_with_cap(m, a, DEFAULT_COMPLEMENT_CAP)
}
