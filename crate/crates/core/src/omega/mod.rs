//! ω-automata machinery: Büchi automata over valuation alphabets, emptiness
//! checking with concrete lasso witnesses, products, complementation, the
//! translation from linear-time formulas, and the stutter expansion of
//! assumptions.
//!
//! Letters are total valuations over a fixed variable set, stored as packed
//! integer codes (see [`Alphabet`]); letter predicates on transitions are
//! explicit sets of codes. Domains are small, so explicit sets keep every
//! construction deterministic and trivially testable.

pub mod complement;
pub mod stutter;
pub mod tableau;

pub use complement::{complement, DEFAULT_COMPLEMENT_CAP};
pub use stutter::stutter_expand;
pub use tableau::ltl_to_buchi;

use crate::module::Module;
use crate::values::{Domain, Valuation};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    /// Complementation would exceed the configured state cap.
    #[error("assumption too large: complementation needs more than {cap} states")]
    AssumptionTooLarge { cap: usize },
    #[error("formula is not linear-time (it contains a strategic modality)")]
    NotLtl,
    #[error("formula mentions variable `{var}` outside the alphabet")]
    VarOutsideAlphabet { var: String },
}

/// A finite alphabet of total valuations over a variable set.
///
/// Letters are identified with integer codes in `0..n_letters()`: variables
/// are taken in sorted order, earlier variables most significant, mirroring
/// [`Valuation::enumerate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    vars: Vec<String>,
    domain: Domain,
}

impl Alphabet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(vars: I, domain: Domain) -> Alphabet {
        let set: BTreeSet<String> = vars.into_iter().map(Into::into).collect();
        let a = Alphabet {
            vars: set.into_iter().collect(),
            domain,
        };
        assert!(
            a.letter_count() <= 1 << 21,
            "alphabet too large: {} variables over {} values",
            a.vars.len(),
            domain.size()
        );
        a
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    fn letter_count(&self) -> u64 {
        (self.domain.size() as u64).pow(self.vars.len() as u32)
    }

    pub fn n_letters(&self) -> u32 {
        self.letter_count() as u32
    }

    /// All letter codes.
    pub fn letters(&self) -> impl Iterator<Item = u32> {
        0..self.n_letters()
    }

    /// Encodes the restriction of `v` to this alphabet's variables; `None`
    /// if some variable is unassigned. Extra variables in `v` are ignored,
    /// so this doubles as projection.
    pub fn encode(&self, v: &Valuation) -> Option<u32> {
        let mut code: u64 = 0;
        for var in &self.vars {
            code = code * self.domain.size() as u64 + v.get(var)? as u64;
        }
        Some(code as u32)
    }

    /// The valuation a code stands for.
    pub fn decode(&self, code: u32) -> Valuation {
        let mut v = Valuation::new();
        let mut rest = code;
        for var in self.vars.iter().rev() {
            v.set(var.clone(), rest % self.domain.size());
            rest /= self.domain.size();
        }
        v
    }
}

/// A set of letter codes.
pub type LetterSet = BTreeSet<u32>;

/// A transition of a Büchi automaton: any letter in `letters` moves `from`
/// to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub letters: LetterSet,
    pub to: usize,
}

/// Acceptance condition of a [`BuchiAutomaton`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    /// A run is accepted iff it visits some state of the set infinitely
    /// often.
    StateBased(BTreeSet<usize>),
    /// Generalized, on transitions: a run is accepted iff, for every mark
    /// set (a set of edge indices), it takes marked edges infinitely often.
    /// Produced by [`stutter_expand`]; convert with [`degeneralize`] before
    /// running constructions that require state-based acceptance.
    TransitionMarked(Vec<BTreeSet<usize>>),
}

/// A nondeterministic Büchi automaton over a valuation alphabet.
#[derive(Clone, Debug)]
pub struct BuchiAutomaton {
    pub alphabet: Alphabet,
    pub n_states: usize,
    pub edges: Vec<Edge>,
    pub initial: BTreeSet<usize>,
    pub acceptance: Acceptance,
}

impl BuchiAutomaton {
    /// The one-state automaton accepting every word.
    pub fn universal(alphabet: Alphabet) -> BuchiAutomaton {
        let letters: LetterSet = alphabet.letters().collect();
        BuchiAutomaton {
            alphabet,
            n_states: 1,
            edges: vec![Edge {
                from: 0,
                letters,
                to: 0,
            }],
            initial: [0].into(),
            acceptance: Acceptance::StateBased([0].into()),
        }
    }

    /// Outgoing edge indices, by source state.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_states];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.from].push(i);
        }
        adj
    }

    fn state_based(&self) -> &BTreeSet<usize> {
        match &self.acceptance {
            Acceptance::StateBased(f) => f,
            Acceptance::TransitionMarked(_) => {
                panic!("state-based acceptance required; degeneralize first")
            }
        }
    }
}

/// An ultimately periodic word: `stem · cycle^ω`, letters as valuations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LassoWord {
    pub stem: Vec<Valuation>,
    pub cycle: Vec<Valuation>,
}

impl fmt::Display for LassoWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.stem {
            write!(f, "[{v}] ")?;
        }
        write!(f, "(")?;
        for (i, v) in self.cycle.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "[{v}]")?;
        }
        write!(f, ")^w")
    }
}

/// An accepting lasso run of an automaton: `states[i]` moves to
/// `states[i+1]` on `letters[i]`; the final letter moves back to
/// `states[loop_start]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub states: Vec<usize>,
    pub letters: Vec<u32>,
    pub loop_start: usize,
}

impl Lasso {
    /// The word this run reads.
    pub fn word(&self, alphabet: &Alphabet) -> LassoWord {
        LassoWord {
            stem: self.letters[..self.loop_start]
                .iter()
                .map(|&c| alphabet.decode(c))
                .collect(),
            cycle: self.letters[self.loop_start..]
                .iter()
                .map(|&c| alphabet.decode(c))
                .collect(),
        }
    }
}

/// Converts transition-marked acceptance to state-based acceptance.
///
/// With `k` mark sets the result tracks a counter `0..=k` alongside the
/// state: level `j < k` waits for a mark-`j` edge, level `k` (accepting) is
/// reached on an edge completing the last set and behaves like level 0.
/// State `(q, j)` is numbered `q·(k+1) + j`. For state-based input the
/// automaton is returned unchanged.
pub fn degeneralize(a: &BuchiAutomaton) -> BuchiAutomaton {
    let marks = match &a.acceptance {
        Acceptance::StateBased(_) => return a.clone(),
        Acceptance::TransitionMarked(m) => m,
    };
    let k = marks.len();
    if k == 0 {
        // Conjunction over no conditions: every run accepts.
        return BuchiAutomaton {
            acceptance: Acceptance::StateBased((0..a.n_states).collect()),
            ..a.clone()
        };
    }
    let levels = k + 1;
    let mut edges = Vec::new();
    for (id, e) in a.edges.iter().enumerate() {
        for l in 0..levels {
            let eff = if l == k { 0 } else { l };
            let l2 = eff + marks[eff].contains(&id) as usize;
            edges.push(Edge {
                from: e.from * levels + l,
                letters: e.letters.clone(),
                to: e.to * levels + l2,
            });
        }
    }
    BuchiAutomaton {
        alphabet: a.alphabet.clone(),
        n_states: a.n_states * levels,
        edges,
        initial: a.initial.iter().map(|&q| q * levels).collect(),
        acceptance: Acceptance::StateBased((0..a.n_states).map(|q| q * levels + k).collect()),
    }
}

/// Counter construction for generalized state-based acceptance: accepts runs
/// visiting every one of `sets` infinitely often. State `(q, i)` is numbered
/// `q·k + i`; level `i` advances when leaving a state in `sets[i]`;
/// accepting states are level-0 states in `sets[0]`.
pub(crate) fn degeneralize_state_sets(
    alphabet: Alphabet,
    n_states: usize,
    edges: Vec<Edge>,
    initial: BTreeSet<usize>,
    sets: &[BTreeSet<usize>],
) -> BuchiAutomaton {
    let k = sets.len();
    if k == 0 {
        return BuchiAutomaton {
            alphabet,
            n_states,
            edges,
            initial,
            acceptance: Acceptance::StateBased((0..n_states).collect()),
        };
    }
    if k == 1 {
        return BuchiAutomaton {
            alphabet,
            n_states,
            edges,
            initial,
            acceptance: Acceptance::StateBased(sets[0].clone()),
        };
    }
    let mut out_edges = Vec::new();
    for e in &edges {
        for i in 0..k {
            let i2 = if sets[i].contains(&e.from) { (i + 1) % k } else { i };
            out_edges.push(Edge {
                from: e.from * k + i,
                letters: e.letters.clone(),
                to: e.to * k + i2,
            });
        }
    }
    BuchiAutomaton {
        alphabet,
        n_states: n_states * k,
        edges: out_edges,
        initial: initial.iter().map(|&q| q * k).collect(),
        acceptance: Acceptance::StateBased(sets[0].iter().map(|&q| q * k).collect()),
    }
}

/// Whether the automaton's language is empty.
pub fn is_empty(a: &BuchiAutomaton) -> bool {
    find_accepting_lasso(a).is_none()
}

/// Searches for an accepting lasso run; `None` means the language is empty.
///
/// Nested depth-first search: a blue DFS explores the automaton; at the
/// post-order visit of each accepting state, a red DFS looks for a path back
/// into the blue stack. Red marks persist across red searches.
pub fn find_accepting_lasso(a: &BuchiAutomaton) -> Option<Lasso> {
    if let Acceptance::TransitionMarked(marks) = &a.acceptance {
        let levels = marks.len() + 1;
        let d = degeneralize(a);
        return find_accepting_lasso(&d).map(|mut l| {
            for s in &mut l.states {
                *s /= levels;
            }
            l
        });
    }
    let accepting = a.state_based();
    let adj = a.adjacency();
    // 0 = unvisited, 1 = on the blue stack (cyan), 2 = finished (blue).
    let mut color = vec![0u8; a.n_states];
    let mut red = vec![false; a.n_states];
    // Position of each cyan state on the blue stack.
    let mut stack_pos = vec![usize::MAX; a.n_states];

    struct Frame {
        state: usize,
        next: usize,
    }

    for &root in &a.initial {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![Frame {
            state: root,
            next: 0,
        }];
        // entry_letters[i] is the letter taken into stack[i] (root has none).
        let mut entry_letters: Vec<u32> = Vec::new();
        color[root] = 1;
        stack_pos[root] = 0;
        while let Some(top) = stack.last_mut() {
            let s = top.state;
            if top.next < adj[s].len() {
                let e = &a.edges[adj[s][top.next]];
                top.next += 1;
                if color[e.to] == 0 {
                    color[e.to] = 1;
                    stack_pos[e.to] = stack.len();
                    entry_letters.push(*e.letters.iter().next().expect("non-empty letter set"));
                    stack.push(Frame {
                        state: e.to,
                        next: 0,
                    });
                }
            } else {
                if accepting.contains(&s) {
                    let blue_states: Vec<usize> = stack.iter().map(|f| f.state).collect();
                    if let Some(lasso) =
                        red_search(a, &adj, &color, &mut red, &stack_pos, &blue_states, &entry_letters)
                    {
                        return Some(lasso);
                    }
                }
                color[s] = 2;
                stack_pos[s] = usize::MAX;
                stack.pop();
                if !stack.is_empty() {
                    entry_letters.pop();
                }
            }
        }
    }
    None
}

fn red_search(
    a: &BuchiAutomaton,
    adj: &[Vec<usize>],
    color: &[u8],
    red: &mut [bool],
    stack_pos: &[usize],
    blue_states: &[usize],
    entry_letters: &[u32],
) -> Option<Lasso> {
    struct RFrame {
        state: usize,
        next: usize,
    }
    let seed = *blue_states.last().expect("non-empty blue stack");
    red[seed] = true;
    let mut rstack = vec![RFrame {
        state: seed,
        next: 0,
    }];
    let mut rletters: Vec<u32> = Vec::new();
    while let Some(top) = rstack.last_mut() {
        let s = top.state;
        if top.next < adj[s].len() {
            let e = &a.edges[adj[s][top.next]];
            top.next += 1;
            let letter = *e.letters.iter().next().expect("non-empty letter set");
            if color[e.to] == 1 {
                // Closing edge into the blue stack: assemble the lasso.
                let j = stack_pos[e.to];
                let mut states: Vec<usize> = blue_states.to_vec();
                let mut letters: Vec<u32> = entry_letters.to_vec();
                for (rf, &rl) in rstack.iter().skip(1).zip(&rletters) {
                    states.push(rf.state);
                    letters.push(rl);
                }
                letters.push(letter);
                debug_assert_eq!(states.len(), letters.len());
                return Some(Lasso {
                    states,
                    letters,
                    loop_start: j,
                });
            }
            if !red[e.to] {
                red[e.to] = true;
                rletters.push(letter);
                rstack.push(RFrame {
                    state: e.to,
                    next: 0,
                });
            }
        } else {
            rstack.pop();
            if !rstack.is_empty() {
                rletters.pop();
            }
        }
    }
    None
}

/// Whether the automaton accepts `stem · cycle^ω`.
///
/// Word letters may carry extra variables beyond the automaton's alphabet
/// (they are projected away); every alphabet variable must be assigned.
///
/// # Panics
/// If a word letter leaves an alphabet variable unassigned.
pub fn accepts_lasso(a: &BuchiAutomaton, w: &LassoWord) -> bool {
    assert!(!w.cycle.is_empty(), "lasso cycle must be non-empty");
    let enc = |v: &Valuation| {
        a.alphabet
            .encode(v)
            .unwrap_or_else(|| panic!("letter {v} does not cover the alphabet"))
    };
    let stem: Vec<u32> = w.stem.iter().map(enc).collect();
    let cycle: Vec<u32> = w.cycle.iter().map(enc).collect();
    accepts_lasso_codes(a, &stem, &cycle)
}

pub(crate) fn accepts_lasso_codes(a: &BuchiAutomaton, stem: &[u32], cycle: &[u32]) -> bool {
    if let Acceptance::TransitionMarked(_) = &a.acceptance {
        return accepts_lasso_codes(&degeneralize(a), stem, cycle);
    }
    let accepting = a.state_based();
    let n_pos = stem.len() + cycle.len();
    let letter_at = |pos: usize| -> u32 {
        if pos < stem.len() {
            stem[pos]
        } else {
            cycle[pos - stem.len()]
        }
    };
    let next_pos = |pos: usize| -> usize {
        if pos + 1 < n_pos {
            pos + 1
        } else {
            stem.len()
        }
    };
    let adj = a.adjacency();
    let idx = |pos: usize, q: usize| pos * a.n_states + q;
    let mut seen = vec![false; n_pos * a.n_states];
    let mut queue: VecDeque<(usize, usize)> = a.initial.iter().map(|&q| (0, q)).collect();
    for &q in &a.initial {
        seen[idx(0, q)] = true;
    }
    let mut candidates = Vec::new();
    while let Some((pos, q)) = queue.pop_front() {
        if pos >= stem.len() && accepting.contains(&q) {
            candidates.push((pos, q));
        }
        for &e in &adj[q] {
            let edge = &a.edges[e];
            if edge.letters.contains(&letter_at(pos)) {
                let np = next_pos(pos);
                if !seen[idx(np, edge.to)] {
                    seen[idx(np, edge.to)] = true;
                    queue.push_back((np, edge.to));
                }
            }
        }
    }
    // Accepted iff some reachable accepting node lies on a cycle of the
    // position-product graph (cycles can only run through loop positions).
    for &(pos0, q0) in &candidates {
        let mut seen2 = vec![false; n_pos * a.n_states];
        let mut queue: VecDeque<(usize, usize)> = [(pos0, q0)].into();
        while let Some((pos, q)) = queue.pop_front() {
            for &e in &adj[q] {
                let edge = &a.edges[e];
                if edge.letters.contains(&letter_at(pos)) {
                    let np = next_pos(pos);
                    if (np, edge.to) == (pos0, q0) {
                        return true;
                    }
                    if !seen2[idx(np, edge.to)] {
                        seen2[idx(np, edge.to)] = true;
                        queue.push_back((np, edge.to));
                    }
                }
            }
        }
    }
    false
}

/// Product automaton accepting `L(a) ∩ L(b)`.
///
/// The alphabets may differ in variables (letters are aligned by
/// projection) but must share the domain. The result has at most
/// `2·|a|·|b|` states.
pub fn intersect(a: &BuchiAutomaton, b: &BuchiAutomaton) -> BuchiAutomaton {
    let a_norm;
    let a = match &a.acceptance {
        Acceptance::StateBased(_) => a,
        Acceptance::TransitionMarked(_) => {
            a_norm = degeneralize(a);
            &a_norm
        }
    };
    let b_norm;
    let b = match &b.acceptance {
        Acceptance::StateBased(_) => b,
        Acceptance::TransitionMarked(_) => {
            b_norm = degeneralize(b);
            &b_norm
        }
    };
    assert_eq!(
        a.alphabet.domain(),
        b.alphabet.domain(),
        "intersect requires a common domain"
    );
    let union = Alphabet::new(
        a.alphabet
            .vars()
            .iter()
            .chain(b.alphabet.vars())
            .cloned(),
        a.alphabet.domain(),
    );
    let expand_a = expand_letter_sets(a, &union);
    let expand_b = expand_letter_sets(b, &union);
    let adj_a = a.adjacency();
    let adj_b = b.adjacency();

    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for &qa in &a.initial {
        for &qb in &b.initial {
            index.entry((qa, qb)).or_insert_with(|| {
                order.push((qa, qb));
                queue.push_back((qa, qb));
                order.len() - 1
            });
        }
    }
    let mut edges: Vec<Edge> = Vec::new();
    while let Some((qa, qb)) = queue.pop_front() {
        let from = index[&(qa, qb)];
        for &ea in &adj_a[qa] {
            for &eb in &adj_b[qb] {
                let letters: LetterSet = expand_a[ea]
                    .intersection(&expand_b[eb])
                    .copied()
                    .collect();
                if letters.is_empty() {
                    continue;
                }
                let target = (a.edges[ea].to, b.edges[eb].to);
                let next_id = order.len();
                let to = *index.entry(target).or_insert_with(|| {
                    order.push(target);
                    queue.push_back(target);
                    next_id
                });
                edges.push(Edge { from, letters, to });
            }
        }
    }
    let fa = a.state_based();
    let fb = b.state_based();
    let set_a: BTreeSet<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, (qa, _))| fa.contains(qa))
        .map(|(i, _)| i)
        .collect();
    let set_b: BTreeSet<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, (_, qb))| fb.contains(qb))
        .map(|(i, _)| i)
        .collect();
    let index_ref = &index;
    let initial: BTreeSet<usize> = a
        .initial
        .iter()
        .flat_map(|&qa| b.initial.iter().map(move |&qb| index_ref[&(qa, qb)]))
        .collect();
    degeneralize_state_sets(union, order.len(), edges, initial, &[set_a, set_b])
}

/// Per-edge letter sets of `a`, re-encoded over the (super-)alphabet
/// `target`.
fn expand_letter_sets(a: &BuchiAutomaton, target: &Alphabet) -> Vec<LetterSet> {
    if a.alphabet.vars() == target.vars() {
        return a.edges.iter().map(|e| e.letters.clone()).collect();
    }
    // proj[w] = the a-letter w projects to.
    let proj: Vec<u32> = target
        .letters()
        .map(|w| {
            a.alphabet
                .encode(&target.decode(w))
                .expect("projection onto sub-alphabet")
        })
        .collect();
    a.edges
        .iter()
        .map(|e| {
            proj.iter()
                .enumerate()
                .filter(|(_, p)| e.letters.contains(p))
                .map(|(w, _)| w as u32)
                .collect()
        })
        .collect()
}

/// Removes states that are unreachable or cannot contribute to an accepted
/// word (cannot reach a cycle through acceptance). Requires state-based
/// acceptance. If nothing survives, a one-state automaton with the empty
/// language is returned.
pub fn prune(a: &BuchiAutomaton) -> BuchiAutomaton {
    let f = a.state_based().clone();
    let adj = a.adjacency();
    let mut reachable = vec![false; a.n_states];
    let mut queue: VecDeque<usize> = a.initial.iter().copied().collect();
    for &q in &a.initial {
        reachable[q] = true;
    }
    while let Some(q) = queue.pop_front() {
        for &e in &adj[q] {
            let t = a.edges[e].to;
            if !reachable[t] {
                reachable[t] = true;
                queue.push_back(t);
            }
        }
    }
    // Accepting states on a reachable cycle, found per candidate (sizes are
    // small enough that SCC machinery is not worth the code).
    let mut good_seeds = Vec::new();
    for &q in &f {
        if !reachable[q] {
            continue;
        }
        let mut seen = vec![false; a.n_states];
        let mut queue: VecDeque<usize> = [q].into();
        let mut on_cycle = false;
        'bfs: while let Some(s) = queue.pop_front() {
            for &e in &adj[s] {
                let t = a.edges[e].to;
                if !reachable[t] {
                    continue;
                }
                if t == q {
                    on_cycle = true;
                    break 'bfs;
                }
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if on_cycle {
            good_seeds.push(q);
        }
    }
    // Productive = can reach a good seed.
    let mut radj = vec![Vec::new(); a.n_states];
    for e in &a.edges {
        radj[e.to].push(e.from);
    }
    let mut productive = vec![false; a.n_states];
    let mut queue: VecDeque<usize> = good_seeds.iter().copied().collect();
    for &q in &good_seeds {
        productive[q] = true;
    }
    while let Some(q) = queue.pop_front() {
        for &p in &radj[q] {
            if !productive[p] {
                productive[p] = true;
                queue.push_back(p);
            }
        }
    }
    let keep: Vec<usize> = (0..a.n_states)
        .filter(|&q| reachable[q] && productive[q])
        .collect();
    if keep.is_empty() || keep.iter().all(|q| !a.initial.contains(q)) {
        return BuchiAutomaton {
            alphabet: a.alphabet.clone(),
            n_states: 1,
            edges: Vec::new(),
            initial: [0].into(),
            acceptance: Acceptance::StateBased(BTreeSet::new()),
        };
    }
    let mut renumber = vec![usize::MAX; a.n_states];
    for (i, &q) in keep.iter().enumerate() {
        renumber[q] = i;
    }
    let edges = a
        .edges
        .iter()
        .filter(|e| renumber[e.from] != usize::MAX && renumber[e.to] != usize::MAX)
        .map(|e| Edge {
            from: renumber[e.from],
            letters: e.letters.clone(),
            to: renumber[e.to],
        })
        .collect();
    BuchiAutomaton {
        alphabet: a.alphabet.clone(),
        n_states: keep.len(),
        edges,
        initial: a
            .initial
            .iter()
            .filter(|&&q| renumber[q] != usize::MAX)
            .map(|&q| renumber[q])
            .collect(),
        acceptance: Acceptance::StateBased(
            f.iter()
                .filter(|&&q| renumber[q] != usize::MAX)
                .map(|&q| renumber[q])
                .collect(),
        ),
    }
}

/// Views a module as a Büchi automaton over its state variables: each step
/// emits the label of the state being left; `accepting` is the fairness
/// set (pass all states for plain emptiness).
pub fn module_to_buchi(m: &Module, accepting: BTreeSet<usize>) -> BuchiAutomaton {
    let alphabet = Alphabet::new(m.state_vars.iter().cloned(), m.domain);
    let pairs: BTreeSet<(usize, usize)> = m.transitions.iter().map(|t| (t.from, t.to)).collect();
    let edges = pairs
        .into_iter()
        .map(|(from, to)| Edge {
            from,
            letters: [alphabet
                .encode(m.label(from))
                .expect("label covers state variables")]
            .into(),
            to,
        })
        .collect();
    BuchiAutomaton {
        alphabet,
        n_states: m.states.len(),
        edges,
        initial: [m.init].into(),
        acceptance: Acceptance::StateBased(accepting),
    }
}
