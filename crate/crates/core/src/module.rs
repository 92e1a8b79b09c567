//! Modules: finite-state agent skeletons with labeled states and
//! input-guarded transitions.
//!
//! A module owns a set of state variables `X` (its state labels assign a value
//! to each of them) and reads a set of input variables `I`. Transitions carry
//! a *total* input valuation over `I`; guards over a subset of `I` are
//! represented by one transition per matching input letter.
//!
//! Two invariants from the underlying formalism are enforced:
//! * (a) input-enabledness — every pair `(q, α)` of state and input letter has
//!   at least one outgoing transition;
//! * (b) no redundant self-loop — a self-loop `(q, α, q)` may only exist when
//!   there is no `(q, α, q')` with `q' ≠ q`; self-loops thus mark exactly the
//!   blocked input letters.

use crate::values::{Domain, Valuation};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A named module state together with its label over the state variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleState {
    pub name: String,
    pub label: Valuation,
}

/// A transition `(source, input letter, target)`; the input letter is a total
/// valuation over the module's input variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub input: Valuation,
    pub to: usize,
}

/// A finite-state module (agent skeleton).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    pub name: String,
    pub domain: Domain,
    pub state_vars: BTreeSet<String>,
    pub input_vars: BTreeSet<String>,
    pub states: Vec<ModuleState>,
    pub transitions: Vec<Transition>,
    pub init: usize,
}

/// A single violation of the module invariants, naming the offending element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The module has no states.
    NoStates,
    /// The initial state index is out of range.
    InitOutOfRange { init: usize },
    /// A variable is declared both as state variable and input variable.
    VarOverlap { var: String },
    /// Two states share a name.
    DuplicateStateName { name: String },
    /// A state label's scope is not exactly the state variables.
    LabelScope { state: String },
    /// A state label assigns a value outside the domain.
    LabelValue { state: String, var: String },
    /// A transition's input letter scope is not exactly the input variables.
    InputScope { index: usize },
    /// A transition's input letter assigns a value outside the domain.
    InputValue { index: usize },
    /// A transition endpoint is out of range.
    EndpointOutOfRange { index: usize },
    /// The same `(source, input, target)` triple appears twice.
    DuplicateTransition { index: usize },
    /// Clause (a): a `(state, input letter)` pair has no outgoing transition.
    NotInputEnabled { state: String, input: Valuation },
    /// Clause (b): a self-loop coexists with a distinct successor for the
    /// same input letter.
    SelfLoopWithAlternative { state: String, input: Valuation },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoStates => write!(f, "module has no states"),
            Violation::InitOutOfRange { init } => {
                write!(f, "initial state index {init} out of range")
            }
            Violation::VarOverlap { var } => write!(
                f,
                "disjointness: variable {var} is both a state and an input variable"
            ),
            Violation::DuplicateStateName { name } => write!(f, "duplicate state name {name}"),
            Violation::LabelScope { state } => write!(
                f,
                "label of state {state} does not cover exactly the state variables"
            ),
            Violation::LabelValue { state, var } => {
                write!(f, "label of state {state} assigns {var} outside the domain")
            }
            Violation::InputScope { index } => write!(
                f,
                "transition #{index}: input letter does not cover exactly the input variables"
            ),
            Violation::InputValue { index } => {
                write!(f, "transition #{index}: input value outside the domain")
            }
            Violation::EndpointOutOfRange { index } => {
                write!(f, "transition #{index}: endpoint out of range")
            }
            Violation::DuplicateTransition { index } => {
                write!(f, "transition #{index} duplicates an earlier one")
            }
            Violation::NotInputEnabled { state, input } => write!(
                f,
                "clause (a): state {state} has no transition for input {{{input}}}"
            ),
            Violation::SelfLoopWithAlternative { state, input } => write!(
                f,
                "clause (b): state {state} has a self-loop and a distinct successor for input {{{input}}}"
            ),
        }
    }
}

/// Errors raised by module construction operations.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ModuleError {
    #[error("module {module}: transition #{index} input letter is not over the input variables")]
    InputOutsideScope { module: String, index: usize },
    #[error("module {module} is invalid: {first}")]
    Invalid { module: String, first: String },
}

impl Module {
    /// Creates an empty module shell.
    pub fn new<S: Into<String>>(name: S, domain: Domain) -> Self {
        Module {
            name: name.into(),
            domain,
            state_vars: BTreeSet::new(),
            input_vars: BTreeSet::new(),
            states: Vec::new(),
            transitions: Vec::new(),
            init: 0,
        }
    }

    /// The unit module: no variables, a single state with an empty label and
    /// a self-loop on the empty input letter. Neutral element of composition.
    pub fn unit<S: Into<String>>(name: S, domain: Domain) -> Self {
        let mut m = Module::new(name, domain);
        let q = m.add_state("u", Valuation::new());
        m.transitions.push(Transition {
            from: q,
            input: Valuation::new(),
            to: q,
        });
        m
    }

    /// Adds a state and returns its index.
    pub fn add_state<S: Into<String>>(&mut self, name: S, label: Valuation) -> usize {
        self.states.push(ModuleState {
            name: name.into(),
            label,
        });
        self.states.len() - 1
    }

    /// Adds a transition.
    pub fn add_transition(&mut self, from: usize, input: Valuation, to: usize) {
        self.transitions.push(Transition { from, input, to });
    }

    /// Index of the state named `name`.
    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    /// Label of state `q`.
    pub fn label(&self, q: usize) -> &Valuation {
        &self.states[q].label
    }

    /// Transitions leaving state `q`, with their indices.
    pub fn transitions_from(&self, q: usize) -> impl Iterator<Item = (usize, &Transition)> {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.from == q)
    }

    /// All input letters of this module (total valuations over `I`).
    pub fn input_letters(&self) -> impl Iterator<Item = Valuation> {
        Valuation::enumerate(&self.input_vars, self.domain)
    }

    /// Restores input-enabledness: for every `(q, α)` with no outgoing
    /// transition, adds the blocked self-loop `(q, α, q)`. Also sorts the
    /// transition list into the canonical `(source, input, target)` order, so
    /// it must be called *before* any repertoire refers to transition indices.
    pub fn complete_inputs(&mut self) -> Result<(), ModuleError> {
        for (i, t) in self.transitions.iter().enumerate() {
            if !t.input.covers_exactly(&self.input_vars) {
                return Err(ModuleError::InputOutsideScope {
                    module: self.name.clone(),
                    index: i,
                });
            }
        }
        let covered: BTreeSet<(usize, &Valuation)> =
            self.transitions.iter().map(|t| (t.from, &t.input)).collect();
        let mut added = Vec::new();
        for q in 0..self.states.len() {
            for alpha in Valuation::enumerate(&self.input_vars, self.domain) {
                if !covered.contains(&(q, &alpha)) {
                    added.push(Transition {
                        from: q,
                        input: alpha,
                        to: q,
                    });
                }
            }
        }
        self.transitions.extend(added);
        self.transitions.sort();
        self.transitions.dedup();
        Ok(())
    }

    /// Checks every module invariant; returns the full list of violations
    /// (empty iff the module is valid).
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.states.is_empty() {
            out.push(Violation::NoStates);
            return out;
        }
        if self.init >= self.states.len() {
            out.push(Violation::InitOutOfRange { init: self.init });
        }
        for var in self.state_vars.intersection(&self.input_vars) {
            out.push(Violation::VarOverlap { var: var.clone() });
        }
        let mut seen_names = BTreeSet::new();
        for s in &self.states {
            if !seen_names.insert(&s.name) {
                out.push(Violation::DuplicateStateName {
                    name: s.name.clone(),
                });
            }
            if !s.label.covers_exactly(&self.state_vars) {
                out.push(Violation::LabelScope {
                    state: s.name.clone(),
                });
            }
            for (var, val) in s.label.iter() {
                if !self.domain.contains(val) {
                    out.push(Violation::LabelValue {
                        state: s.name.clone(),
                        var: var.to_string(),
                    });
                }
            }
        }
        let mut seen_transitions = BTreeSet::new();
        for (i, t) in self.transitions.iter().enumerate() {
            if t.from >= self.states.len() || t.to >= self.states.len() {
                out.push(Violation::EndpointOutOfRange { index: i });
                continue;
            }
            if !t.input.covers_exactly(&self.input_vars) {
                out.push(Violation::InputScope { index: i });
            }
            if t.input.iter().any(|(_, v)| !self.domain.contains(v)) {
                out.push(Violation::InputValue { index: i });
            }
            if !seen_transitions.insert((t.from, t.input.clone(), t.to)) {
                out.push(Violation::DuplicateTransition { index: i });
            }
        }
        if out.iter().any(|v| {
            matches!(
                v,
                Violation::EndpointOutOfRange { .. } | Violation::InputScope { .. }
            )
        }) {
            return out;
        }
        // Clauses (a) and (b) over the explicit letter enumeration.
        let mut by_key: BTreeMap<(usize, &Valuation), (bool, bool)> = BTreeMap::new();
        for t in &self.transitions {
            let entry = by_key.entry((t.from, &t.input)).or_insert((false, false));
            if t.to == t.from {
                entry.0 = true;
            } else {
                entry.1 = true;
            }
        }
        for q in 0..self.states.len() {
            for alpha in Valuation::enumerate(&self.input_vars, self.domain) {
                match by_key.get(&(q, &alpha)) {
                    None => out.push(Violation::NotInputEnabled {
                        state: self.states[q].name.clone(),
                        input: alpha,
                    }),
                    Some((true, true)) => out.push(Violation::SelfLoopWithAlternative {
                        state: self.states[q].name.clone(),
                        input: alpha,
                    }),
                    _ => {}
                }
            }
        }
        out
    }

    /// `Ok(())` if the module is valid, otherwise an error naming the first
    /// violation.
    pub fn check_valid(&self) -> Result<(), ModuleError> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(ModuleError::Invalid {
                module: self.name.clone(),
                first: v.to_string(),
            }),
        }
    }

    /// State indices reachable from the initial state, in ascending order.
    pub fn reachable_indices(&self) -> Vec<usize> {
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            succ[t.from].push(t.to);
        }
        let mut seen = vec![false; self.states.len()];
        let mut queue = std::collections::VecDeque::new();
        if self.init < self.states.len() {
            seen[self.init] = true;
            queue.push_back(self.init);
        }
        while let Some(q) = queue.pop_front() {
            for &r in &succ[q] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        (0..self.states.len()).filter(|&q| seen[q]).collect()
    }
}

/// Graph reachability from the initial state: returns the reachable state
/// count, the count of transitions between reachable states, and the
/// restriction of `m` to its reachable part (states renumbered in ascending
/// original order, labels and letters untouched).
pub fn reachable(m: &Module) -> (usize, usize, Module) {
    let kept = m.reachable_indices();
    let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
    for (new, &old) in kept.iter().enumerate() {
        renumber.insert(old, new);
    }
    let states: Vec<ModuleState> = kept.iter().map(|&q| m.states[q].clone()).collect();
    let transitions: Vec<Transition> = m
        .transitions
        .iter()
        .filter(|t| renumber.contains_key(&t.from) && renumber.contains_key(&t.to))
        .map(|t| Transition {
            from: renumber[&t.from],
            input: t.input.clone(),
            to: renumber[&t.to],
        })
        .collect();
    let restricted = Module {
        name: m.name.clone(),
        domain: m.domain,
        state_vars: m.state_vars.clone(),
        input_vars: m.input_vars.clone(),
        init: renumber.get(&m.init).copied().unwrap_or(0),
        states,
        transitions,
    };
    let (ns, nt) = (restricted.states.len(), restricted.transitions.len());
    (ns, nt, restricted)
}
