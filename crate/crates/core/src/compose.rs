//! Asynchronous module composition.
//!
//! Two modules with disjoint state variables compose into a product module.
//! A composite step is derived from a pair of component transitions with
//! mutually compatible letters — both components always *could* move — in one
//! of three ways: only the left component advances, only the right one does,
//! or both advance synchronously. A component "reads" the other's state
//! variables through its input letter, which must therefore agree with the
//! other's current state label.
//!
//! After collecting all derivable transitions, composite self-loops that
//! coexist with a distinct successor for the same letter are pruned (they
//! would violate the blocked-loop invariant), and input-enabledness is
//! restored for any letter whose only derivation was such a pruned loop.

use crate::module::{Module, ModuleState, Transition};
use crate::values::Valuation;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Errors raised by composition.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ComposeError {
    #[error("modules {a} and {b} are not asynchronous: both own state variable {var}")]
    NotAsynchronous { a: String, b: String, var: String },
    #[error("modules {a} and {b} have different domains")]
    DomainMismatch { a: String, b: String },
    #[error("cannot compose an empty list of modules")]
    Empty,
    #[error("{0}")]
    Inner(#[from] crate::module::ModuleError),
}

/// Composes two asynchronous modules.
///
/// The composite has state variables `X1 ∪ X2`, input variables
/// `(I1 ∪ I2) \ (X1 ∪ X2)`, the full product state space (state `(i, j)` is
/// indexed `i·|Q2| + j` and named `"n1|n2"`), labels `λ1(q1) ∪ λ2(q2)`, and
/// initial state `(q0_1, q0_2)`.
pub fn compose_pair(a: &Module, b: &Module) -> Result<Module, ComposeError> {
    if a.domain != b.domain {
        return Err(ComposeError::DomainMismatch {
            a: a.name.clone(),
            b: b.name.clone(),
        });
    }
    if let Some(var) = a.state_vars.intersection(&b.state_vars).next() {
        return Err(ComposeError::NotAsynchronous {
            a: a.name.clone(),
            b: b.name.clone(),
            var: var.clone(),
        });
    }
    let state_vars: BTreeSet<String> = a.state_vars.union(&b.state_vars).cloned().collect();
    let input_vars: BTreeSet<String> = a
        .input_vars
        .union(&b.input_vars)
        .filter(|v| !state_vars.contains(*v))
        .cloned()
        .collect();

    let nb = b.states.len();
    let mut composite = Module::new(format!("{}|{}", a.name, b.name), a.domain);
    composite.state_vars = state_vars.clone();
    composite.input_vars = input_vars.clone();
    for sa in &a.states {
        for sb in &b.states {
            let label = sa
                .label
                .union(&sb.label)
                .expect("state labels over disjoint variables cannot conflict");
            composite.states.push(ModuleState {
                name: format!("{}|{}", sa.name, sb.name),
                label,
            });
        }
    }
    composite.init = a.init * nb + b.init;

    // A component transition is usable at a composite state only if its input
    // letter agrees with the co-resident state's label on the variables the
    // letter reads from that state. Bucket transitions by that read-back part
    // so each pairing scans only compatible candidates.
    let a_reads: Vec<&str> = a
        .input_vars
        .intersection(&b.state_vars)
        .map(|s| s.as_str())
        .collect();
    let b_reads: Vec<&str> = b
        .input_vars
        .intersection(&a.state_vars)
        .map(|s| s.as_str())
        .collect();
    let bucket = |m: &Module, reads: &[&str]| -> Vec<BTreeMap<Valuation, Vec<usize>>> {
        let mut buckets: Vec<BTreeMap<Valuation, Vec<usize>>> = vec![BTreeMap::new(); m.states.len()];
        for (i, t) in m.transitions.iter().enumerate() {
            buckets[t.from]
                .entry(t.input.restrict(reads.iter().copied()))
                .or_default()
                .push(i);
        }
        buckets
    };
    let buckets_a = bucket(a, &a_reads);
    let buckets_b = bucket(b, &b_reads);

    let mut derived: BTreeSet<(usize, Valuation, usize)> = BTreeSet::new();
    for qa in 0..a.states.len() {
        for qb in 0..b.states.len() {
            let key_a = b.states[qb].label.restrict(a_reads.iter().copied());
            let key_b = a.states[qa].label.restrict(b_reads.iter().copied());
            let (Some(tas), Some(tbs)) = (buckets_a[qa].get(&key_a), buckets_b[qb].get(&key_b))
            else {
                continue;
            };
            let from = qa * nb + qb;
            for &ia in tas {
                let ta = &a.transitions[ia];
                for &ib in tbs {
                    let tb = &b.transitions[ib];
                    if !ta.input.compatible(&tb.input) {
                        continue;
                    }
                    let beta = ta
                        .input
                        .union(&tb.input)
                        .expect("compatibility was just checked")
                        .without(&state_vars);
                    derived.insert((from, beta.clone(), ta.to * nb + qb));
                    derived.insert((from, beta.clone(), qa * nb + tb.to));
                    derived.insert((from, beta, ta.to * nb + tb.to));
                }
            }
        }
    }

    // Prune composite self-loops that coexist with a distinct successor for
    // the same letter.
    let has_real: BTreeSet<(usize, &Valuation)> = derived
        .iter()
        .filter(|(from, _, to)| from != to)
        .map(|(from, beta, _)| (*from, beta))
        .collect();
    composite.transitions = derived
        .iter()
        .filter(|(from, beta, to)| from != to || !has_real.contains(&(*from, beta)))
        .map(|(from, beta, to)| Transition {
            from: *from,
            input: beta.clone(),
            to: *to,
        })
        .collect();

    composite.complete_inputs()?;
    Ok(composite)
}

/// Composes a list of pairwise-asynchronous modules by left fold.
///
/// Also returns the coordinate map: for each composite state index, the list
/// of component-local state indices (one entry per input module, in order).
pub fn compose_all(modules: &[&Module]) -> Result<(Module, Vec<Vec<usize>>), ComposeError> {
    let first = *modules.first().ok_or(ComposeError::Empty)?;
    let mut composed = first.clone();
    let mut coords: Vec<Vec<usize>> = (0..first.states.len()).map(|i| vec![i]).collect();
    for m in &modules[1..] {
        let next = compose_pair(&composed, m)?;
        let nb = m.states.len();
        let mut next_coords = Vec::with_capacity(next.states.len());
        for i in 0..composed.states.len() {
            for j in 0..nb {
                let mut c = coords[i].clone();
                c.push(j);
                next_coords.push(c);
            }
        }
        composed = next;
        coords = next_coords;
    }
    Ok((composed, coords))
}
