//! Translation of linear-time formulas to Büchi automata.
//!
//! Classic tableau construction: the formula is brought to negation normal
//! form (negations on atoms only, temporal operators `U` and its dual), then
//! expanded into a graph of nodes characterized by the obligations that hold
//! now (`old`) and those deferred to the next step (`next`). Each `U`
//! subformula contributes one acceptance set; a counter construction turns
//! the generalized condition into plain state-based acceptance.

use super::{degeneralize_state_sets, prune, Alphabet, BuchiAutomaton, Edge, LetterSet, OmegaError};
use crate::logic::{classify, Formula, FormulaClass};
use crate::values::{Domain, Valuation};
use std::collections::{BTreeMap, BTreeSet};

/// Negation-normal-form nodes, hash-consed into an arena.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Nnf {
    True,
    False,
    Lit { constraint: Valuation, positive: bool },
    And(usize, usize),
    Or(usize, usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Nnf>,
    index: BTreeMap<Nnf, usize>,
}

impl Arena {
    fn intern(&mut self, n: Nnf) -> usize {
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.index.insert(n, id);
        id
    }
}

/// Lowers `f` (under `neg` pending negations) into the arena. `F φ` becomes
/// `true U φ` and `G φ` its dual.
fn to_nnf(f: &Formula, neg: bool, arena: &mut Arena) -> Result<usize, OmegaError> {
    let id = match f {
        Formula::True => arena.intern(if neg { Nnf::False } else { Nnf::True }),
        Formula::False => arena.intern(if neg { Nnf::True } else { Nnf::False }),
        Formula::Atom(v) => arena.intern(Nnf::Lit {
            constraint: v.clone(),
            positive: !neg,
        }),
        Formula::Not(g) => to_nnf(g, !neg, arena)?,
        Formula::And(a, b) => {
            let x = to_nnf(a, neg, arena)?;
            let y = to_nnf(b, neg, arena)?;
            arena.intern(if neg { Nnf::Or(x, y) } else { Nnf::And(x, y) })
        }
        Formula::Or(a, b) => {
            let x = to_nnf(a, neg, arena)?;
            let y = to_nnf(b, neg, arena)?;
            arena.intern(if neg { Nnf::And(x, y) } else { Nnf::Or(x, y) })
        }
        Formula::Finally(g) => {
            let x = to_nnf(g, neg, arena)?;
            if neg {
                let f = arena.intern(Nnf::False);
                arena.intern(Nnf::Release(f, x))
            } else {
                let t = arena.intern(Nnf::True);
                arena.intern(Nnf::Until(t, x))
            }
        }
        Formula::Globally(g) => {
            let x = to_nnf(g, neg, arena)?;
            if neg {
                let t = arena.intern(Nnf::True);
                arena.intern(Nnf::Until(t, x))
            } else {
                let f = arena.intern(Nnf::False);
                arena.intern(Nnf::Release(f, x))
            }
        }
        Formula::Until(a, b) => {
            let x = to_nnf(a, neg, arena)?;
            let y = to_nnf(b, neg, arena)?;
            arena.intern(if neg { Nnf::Release(x, y) } else { Nnf::Until(x, y) })
        }
        Formula::Coop(_, _) => return Err(OmegaError::NotLtl),
    };
    Ok(id)
}

#[derive(Clone, Debug)]
struct Node {
    incoming: BTreeSet<usize>,
    new: BTreeSet<usize>,
    old: BTreeSet<usize>,
    next: BTreeSet<usize>,
}

/// Sentinel predecessor marking initial nodes.
const INIT: usize = usize::MAX;

/// Builds a Büchi automaton accepting exactly the words over `vars` that
/// satisfy `f`.
///
/// Errors: [`OmegaError::NotLtl`] if the formula contains a strategic
/// modality, [`OmegaError::VarOutsideAlphabet`] if it mentions a variable
/// not in `vars`.
pub fn ltl_to_buchi(
    f: &Formula,
    vars: &BTreeSet<String>,
    domain: Domain,
) -> Result<BuchiAutomaton, OmegaError> {
    if classify(f) != FormulaClass::Ltl {
        return Err(OmegaError::NotLtl);
    }
    for v in f.atom_vars() {
        if !vars.contains(&v) {
            return Err(OmegaError::VarOutsideAlphabet { var: v });
        }
    }
    let mut arena = Arena::default();
    let root = to_nnf(f, false, &mut arena)?;

    let mut done: Vec<Node> = Vec::new();
    let mut stack: Vec<Node> = vec![Node {
        incoming: [INIT].into(),
        new: [root].into(),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];
    while let Some(mut n) = stack.pop() {
        let Some(&g) = n.new.iter().next() else {
            // Fully expanded: merge with an equivalent node or register.
            if let Some(existing) = done
                .iter_mut()
                .find(|d| d.old == n.old && d.next == n.next)
            {
                existing.incoming.extend(n.incoming.iter().copied());
                continue;
            }
            let id = done.len();
            let next = n.next.clone();
            done.push(n);
            stack.push(Node {
                incoming: [id].into(),
                new: next,
                old: BTreeSet::new(),
                next: BTreeSet::new(),
            });
            continue;
        };
        n.new.remove(&g);
        match arena.nodes[g].clone() {
            Nnf::False => {} // inconsistent: drop the node
            Nnf::True => {
                // Recorded like any discharged obligation: an eventuality
                // whose right side is `true` is recognized as fulfilled by
                // finding that side in `old`.
                n.old.insert(g);
                stack.push(n);
            }
            Nnf::Lit { ref constraint, positive } => {
                let negation = Nnf::Lit {
                    constraint: constraint.clone(),
                    positive: !positive,
                };
                if arena.index.get(&negation).is_some_and(|id| n.old.contains(id)) {
                    continue; // contradiction: drop
                }
                n.old.insert(g);
                stack.push(n);
            }
            Nnf::And(a, b) => {
                for c in [a, b] {
                    if !n.old.contains(&c) {
                        n.new.insert(c);
                    }
                }
                n.old.insert(g);
                stack.push(n);
            }
            Nnf::Or(a, b) => {
                for c in [a, b] {
                    let mut m = n.clone();
                    if !m.old.contains(&c) {
                        m.new.insert(c);
                    }
                    m.old.insert(g);
                    stack.push(m);
                }
            }
            Nnf::Until(a, b) => {
                // Either the right side holds now, or the left side holds
                // and the obligation carries to the next step.
                let mut defer = n.clone();
                if !defer.old.contains(&a) {
                    defer.new.insert(a);
                }
                defer.next.insert(g);
                defer.old.insert(g);
                stack.push(defer);
                if !n.old.contains(&b) {
                    n.new.insert(b);
                }
                n.old.insert(g);
                stack.push(n);
            }
            Nnf::Release(a, b) => {
                // The right side holds until discharged by the left; it may
                // also hold forever.
                let mut defer = n.clone();
                if !defer.old.contains(&b) {
                    defer.new.insert(b);
                }
                defer.next.insert(g);
                defer.old.insert(g);
                stack.push(defer);
                for c in [a, b] {
                    if !n.old.contains(&c) {
                        n.new.insert(c);
                    }
                }
                n.old.insert(g);
                stack.push(n);
            }
        }
    }

    let alphabet = Alphabet::new(vars.iter().cloned(), domain);
    let decoded: Vec<Valuation> = alphabet.letters().map(|w| alphabet.decode(w)).collect();
    // Letters leaving a node: those satisfying all of its literals.
    let node_letters: Vec<LetterSet> = done
        .iter()
        .map(|n| {
            let mut pos: Vec<&Valuation> = Vec::new();
            let mut negs: Vec<&Valuation> = Vec::new();
            for &g in &n.old {
                if let Nnf::Lit { constraint, positive } = &arena.nodes[g] {
                    if *positive {
                        pos.push(constraint);
                    } else {
                        negs.push(constraint);
                    }
                }
            }
            decoded
                .iter()
                .enumerate()
                .filter(|(_, w)| {
                    pos.iter().all(|c| w.extends(c)) && !negs.iter().any(|c| w.extends(c))
                })
                .map(|(i, _)| i as u32)
                .collect()
        })
        .collect();

    let mut edges = Vec::new();
    let mut initial = BTreeSet::new();
    for (r, n) in done.iter().enumerate() {
        for &q in &n.incoming {
            if q == INIT {
                initial.insert(r);
            } else if !node_letters[q].is_empty() {
                edges.push(Edge {
                    from: q,
                    letters: node_letters[q].clone(),
                    to: r,
                });
            }
        }
    }

    // One acceptance set per Until: nodes that owe it nothing.
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    for (id, node) in arena.nodes.iter().enumerate() {
        if let Nnf::Until(_, b) = node {
            sets.push(
                done.iter()
                    .enumerate()
                    .filter(|(_, n)| !n.old.contains(&id) || n.old.contains(b))
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
    }
    let automaton =
        degeneralize_state_sets(alphabet, done.len(), edges, initial, &sets);
    Ok(prune(&automaton))
}
