//! Shared helpers for the integration suites: a direct evaluator for
//! formulas on ultimately periodic words, random generators for small
//! systems, assumptions, and formulas, lasso enumeration, and an
//! independent product-reachability oracle.
#![allow(dead_code)]

use agv_core::logic::{eval_atom, Formula};
use agv_core::module::{Module, Transition};
use agv_core::system::{Agent, Assumption, Repertoire, System};
use agv_core::values::{Domain, Valuation};
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Evaluates an LTL formula directly on the word `stem · cycle^ω` by
/// fixpoint iteration over the finitely many distinct positions.
/// Position `i` ranges over `0..stem.len()+cycle.len()`; the successor of
/// the last position wraps to `stem.len()`.
///
/// Panics on strategic modalities — this oracle is for path formulas only.
pub fn eval_lasso(f: &Formula, stem: &[Valuation], cycle: &[Valuation]) -> bool {
    assert!(!cycle.is_empty(), "a lasso needs a non-empty cycle");
    let letters: Vec<&Valuation> = stem.iter().chain(cycle.iter()).collect();
    values(f, &letters, stem.len())[0]
}

fn values(f: &Formula, letters: &[&Valuation], stem_len: usize) -> Vec<bool> {
    let n = letters.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { stem_len };
    let fixpoint = |init: Vec<bool>, step: &dyn Fn(&Vec<bool>, usize) -> bool| {
        let mut v = init;
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let next = step(&v, i);
                if next != v[i] {
                    v[i] = next;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    };
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(c) => letters.iter().map(|l| eval_atom(c, l)).collect(),
        Formula::Not(g) => values(g, letters, stem_len).iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let va = values(a, letters, stem_len);
            let vb = values(b, letters, stem_len);
            (0..n).map(|i| va[i] && vb[i]).collect()
        }
        Formula::Or(a, b) => {
            let va = values(a, letters, stem_len);
            let vb = values(b, letters, stem_len);
            (0..n).map(|i| va[i] || vb[i]).collect()
        }
        Formula::Finally(g) => {
            let vg = values(g, letters, stem_len);
            fixpoint(vg.clone(), &|v, i| vg[i] || v[succ(i)])
        }
        Formula::Globally(g) => {
            let vg = values(g, letters, stem_len);
            fixpoint(vg.clone(), &|v, i| vg[i] && v[succ(i)])
        }
        Formula::Until(a, b) => {
            let va = values(a, letters, stem_len);
            let vb = values(b, letters, stem_len);
            fixpoint(vb.clone(), &|v, i| vb[i] || (va[i] && v[succ(i)]))
        }
        Formula::Coop(_, _) => panic!("direct evaluation is defined for path formulas only"),
    }
}

/// Bounds for [`random_system`].
#[derive(Clone, Copy)]
pub struct SystemShape {
    pub max_agents: usize,
    pub max_states: usize,
    pub domain: u32,
}

impl Default for SystemShape {
    fn default() -> Self {
        SystemShape {
            max_agents: 3,
            max_states: 3,
            domain: 2,
        }
    }
}

/// A random valid system: each agent owns one variable `v<i>`, reads a
/// random subset of the others' variables, and moves along randomly drawn
/// guarded transitions. Repertoires are random groupings of the outgoing
/// transitions; inputs are completed so every instance passes validation.
pub fn random_system<R: Rng>(rng: &mut R, shape: SystemShape) -> System {
    let domain = Domain::new(shape.domain);
    let n_agents = rng.gen_range(1..=shape.max_agents);
    let var = |i: usize| format!("v{i}");

    let mut agents = Vec::new();
    for i in 0..n_agents {
        let mut m = Module::new(format!("a{i}"), domain);
        m.state_vars.insert(var(i));
        for j in 0..n_agents {
            if j != i && rng.gen_bool(0.5) {
                m.input_vars.insert(var(j));
            }
        }
        let n_states = rng.gen_range(1..=shape.max_states);
        for q in 0..n_states {
            let label = Valuation::from_pairs([(var(i), rng.gen_range(0..shape.domain))]);
            m.add_state(format!("q{q}"), label);
        }
        let letters: Vec<Valuation> = Valuation::enumerate(&m.input_vars, domain).collect();
        for q in 0..n_states {
            for letter in &letters {
                // Draw a few candidate targets; self-targets only survive
                // when they are alone, keeping clause (b) intact.
                let mut targets = BTreeSet::new();
                for _ in 0..rng.gen_range(0..=2) {
                    targets.insert(rng.gen_range(0..n_states));
                }
                if targets.len() > 1 {
                    targets.remove(&q);
                }
                for to in targets {
                    m.add_transition(q, letter.clone(), to);
                }
            }
        }
        m.complete_inputs().expect("random module completes");
        m.check_valid().expect("random module is valid");

        let repertoire = random_repertoire(rng, &m);
        agents.push(Agent {
            module: m,
            repertoire,
        });
    }
    let sys = System { domain, agents };
    sys.check_valid().expect("random system is valid");
    sys
}

/// Randomly groups each state's outgoing transitions into repertoire
/// choices: sometimes the singleton default, sometimes a coarser random
/// partition (an agent may then commit to several transitions at once).
pub fn random_repertoire<R: Rng>(rng: &mut R, m: &Module) -> Repertoire {
    if rng.gen_bool(0.5) {
        return Repertoire::singletons(m);
    }
    let mut per_state: Vec<Vec<usize>> = vec![Vec::new(); m.states.len()];
    for (i, t) in m.transitions.iter().enumerate() {
        per_state[t.from].push(i);
    }
    let mut choices = Vec::new();
    for outgoing in per_state {
        let n_groups = rng.gen_range(1..=outgoing.len().max(1));
        let mut groups: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_groups];
        for (pos, t) in outgoing.into_iter().enumerate() {
            // Fill every group first so none stays empty, then scatter.
            let g = if pos < n_groups {
                pos
            } else {
                rng.gen_range(0..n_groups)
            };
            groups[g].insert(t);
        }
        groups.retain(|g| !g.is_empty());
        choices.push(groups);
    }
    Repertoire { choices }
}

/// A random assumption abstracting the agents in `covered`: its state
/// variables are theirs, its inputs a random subset of the rest, its
/// shape a random small Büchi module.
pub fn random_assumption<R: Rng>(
    rng: &mut R,
    sys: &System,
    covered: &[usize],
    max_states: usize,
) -> Assumption {
    let domain = sys.domain;
    let mut m = Module::new("A", domain);
    for &i in covered {
        m.state_vars
            .extend(sys.agents[i].module.state_vars.iter().cloned());
    }
    let outside: Vec<String> = sys
        .agents
        .iter()
        .enumerate()
        .filter(|(i, _)| !covered.contains(i))
        .flat_map(|(_, a)| a.module.state_vars.iter().cloned())
        .collect();
    for v in outside {
        if rng.gen_bool(0.5) {
            m.input_vars.insert(v);
        }
    }
    let n_states = rng.gen_range(1..=max_states);
    for q in 0..n_states {
        let label = Valuation::from_pairs(
            m.state_vars
                .iter()
                .map(|v| (v.clone(), rng.gen_range(0..domain.size())))
                .collect::<Vec<_>>(),
        );
        m.add_state(format!("s{q}"), label);
    }
    let letters: Vec<Valuation> = Valuation::enumerate(&m.input_vars, domain).collect();
    for q in 0..n_states {
        for letter in &letters {
            let mut targets = BTreeSet::new();
            for _ in 0..rng.gen_range(0..=2) {
                targets.insert(rng.gen_range(0..n_states));
            }
            if targets.len() > 1 {
                targets.remove(&q);
            }
            for to in targets {
                m.add_transition(q, letter.clone(), to);
            }
        }
    }
    m.complete_inputs().expect("random assumption completes");
    m.check_valid().expect("random assumption is valid");
    let accepting: BTreeSet<usize> = (0..n_states)
        .filter(|_| rng.gen_bool(0.8))
        .collect();
    let accepting = if accepting.is_empty() {
        (0..n_states).collect()
    } else {
        accepting
    };
    Assumption {
        name: "A".into(),
        module: m,
        accepting,
    }
}

/// A random assumption that pins the covered agents' variables to one
/// fixed valuation while staying ready to take a step at every point: two
/// states with the same label ticking between each other. Because the tick
/// never changes what the part observes, a premise model built on such an
/// assumption keeps every schedule of the full system — including the
/// schedules that exclude the part forever — which an assumption that can
/// only self-loop (pruned away in composition) or dead-end cannot offer.
pub fn random_steady_assumption<R: Rng>(
    rng: &mut R,
    sys: &System,
    covered: &[usize],
) -> Assumption {
    let domain = sys.domain;
    let mut m = Module::new("A", domain);
    for &i in covered {
        m.state_vars
            .extend(sys.agents[i].module.state_vars.iter().cloned());
    }
    // Bias each pinned value towards the owner's initial label so the
    // guarantee premise has a fighting chance of holding.
    let pairs: Vec<(String, u32)> = m
        .state_vars
        .iter()
        .map(|v| {
            let initial = sys.agents.iter().find_map(|a| {
                let m = &a.module;
                m.state_vars
                    .contains(v)
                    .then(|| m.states[m.init].label.get(v))
                    .flatten()
            });
            let value = match initial {
                Some(value) if rng.gen_bool(0.7) => value,
                _ => rng.gen_range(0..domain.size()),
            };
            (v.clone(), value)
        })
        .collect();
    let label = Valuation::from_pairs(pairs);
    m.add_state("s0", label.clone());
    m.add_state("s1", label);
    m.add_transition(0, Valuation::new(), 1);
    m.add_transition(1, Valuation::new(), 0);
    m.complete_inputs().expect("steady assumption completes");
    m.check_valid().expect("steady assumption is valid");
    Assumption {
        name: "A".into(),
        module: m,
        accepting: (0..2).collect(),
    }
}

/// A random path formula over `vars` with the given recursion budget.
pub fn random_ltl<R: Rng>(rng: &mut R, vars: &[String], domain: u32, budget: usize) -> Formula {
    if budget == 0 || vars.is_empty() {
        if vars.is_empty() {
            return Formula::True;
        }
        let var = vars[rng.gen_range(0..vars.len())].clone();
        return Formula::atom(var, rng.gen_range(0..domain));
    }
    match rng.gen_range(0..8) {
        0 => {
            let var = vars[rng.gen_range(0..vars.len())].clone();
            Formula::atom(var, rng.gen_range(0..domain))
        }
        1 => Formula::not(random_ltl(rng, vars, domain, budget - 1)),
        2 => Formula::and(
            random_ltl(rng, vars, domain, budget - 1),
            random_ltl(rng, vars, domain, budget - 1),
        ),
        3 => Formula::or(
            random_ltl(rng, vars, domain, budget - 1),
            random_ltl(rng, vars, domain, budget - 1),
        ),
        4 => Formula::finally(random_ltl(rng, vars, domain, budget - 1)),
        5 | 6 => Formula::globally(random_ltl(rng, vars, domain, budget - 1)),
        _ => Formula::until(
            random_ltl(rng, vars, domain, budget - 1),
            random_ltl(rng, vars, domain, budget - 1),
        ),
    }
}

/// All label lassos of a module reachable from its initial state whose runs
/// revisit a state within `max_len` steps, capped at `cap` results. Each
/// entry is `(stem labels, cycle labels)`.
pub fn label_lassos(m: &Module, max_len: usize, cap: usize) -> Vec<(Vec<Valuation>, Vec<Valuation>)> {
    let mut out = Vec::new();
    let mut run = vec![m.init];
    dfs_lassos(m, &mut run, max_len, cap, &mut out);
    out
}

fn dfs_lassos(
    m: &Module,
    run: &mut Vec<usize>,
    max_len: usize,
    cap: usize,
    out: &mut Vec<(Vec<Valuation>, Vec<Valuation>)>,
) {
    if out.len() >= cap {
        return;
    }
    let here = *run.last().unwrap();
    let successors: BTreeSet<usize> = m.transitions_from(here).map(|(_, t)| t.to).collect();
    for to in successors {
        if let Some(pos) = run.iter().position(|&q| q == to) {
            let stem: Vec<Valuation> = run[..pos].iter().map(|&q| m.label(q).clone()).collect();
            let cycle: Vec<Valuation> = run[pos..].iter().map(|&q| m.label(q).clone()).collect();
            out.push((stem, cycle));
            if out.len() >= cap {
                return;
            }
        } else if run.len() < max_len {
            run.push(to);
            dfs_lassos(m, run, max_len, cap, out);
            run.pop();
        }
    }
}

/// Counts the global states reachable in the product of the modules,
/// computed directly on local-state tuples: in one step a non-empty set of
/// modules take matching transitions while every other module stays put,
/// which is allowed whenever some transition of its own is enabled under
/// the same letter. This is an independent reference for the pairwise
/// composition operator.
pub fn product_reachable_count(modules: &[&Module], domain: Domain) -> usize {
    let owned: BTreeSet<String> = modules
        .iter()
        .flat_map(|m| m.state_vars.iter().cloned())
        .collect();
    let free: BTreeSet<String> = modules
        .iter()
        .flat_map(|m| m.input_vars.iter().cloned())
        .filter(|v| !owned.contains(v))
        .collect();
    let free_letters: Vec<Valuation> = Valuation::enumerate(&free, domain).collect();

    let start: Vec<usize> = modules.iter().map(|m| m.init).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(tuple) = queue.pop_front() {
        let mut full = Valuation::new();
        for (m, &q) in modules.iter().zip(&tuple) {
            full = full.union(m.label(q)).expect("state variables disjoint");
        }
        for free_letter in &free_letters {
            let ctx = full.union(free_letter).expect("free inputs are unowned");
            // Per module: the states it can move to, and whether it may
            // stay put. A module stays whenever *some* transition of its
            // is enabled under the letter — the transition is simply not
            // taken — so after input completion every module can stay.
            let mut moves: Vec<Vec<usize>> = Vec::new();
            let mut stays: Vec<bool> = Vec::new();
            for (m, &q) in modules.iter().zip(&tuple) {
                let input = ctx.restrict(m.input_vars.iter().map(String::as_str));
                let mut to = Vec::new();
                let mut enabled = false;
                for (_, t) in m.transitions_from(q) {
                    if t.input == input {
                        enabled = true;
                        if t.to != q {
                            to.push(t.to);
                        }
                    }
                }
                moves.push(to);
                stays.push(enabled);
            }
            // Enumerate which modules move (at least one), rest must stay.
            let n = modules.len();
            for mask in 1u32..(1 << n) {
                if (0..n).any(|i| {
                    let moving = mask & (1 << i) != 0;
                    (moving && moves[i].is_empty()) || (!moving && !stays[i])
                }) {
                    continue;
                }
                let movers: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let mut combos: Vec<Vec<usize>> = vec![Vec::new()];
                for &i in &movers {
                    combos = combos
                        .iter()
                        .flat_map(|combo| {
                            moves[i].iter().map(move |&to| {
                                let mut c = combo.clone();
                                c.push(to);
                                c
                            })
                        })
                        .collect();
                }
                for combo in combos {
                    let mut next = tuple.clone();
                    for (slot, &i) in movers.iter().enumerate() {
                        next[i] = combo[slot];
                    }
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    seen.len()
}

/// Collects, per reachable state count, the transition triples of a module
/// as `(from name, input letter, to name)` — a representation stable under
/// state reordering, for isomorphism-style comparisons.
pub fn named_transitions(m: &Module) -> BTreeSet<(String, Valuation, String)> {
    m.transitions
        .iter()
        .map(|t| {
            (
                m.states[t.from].name.clone(),
                t.input.clone(),
                m.states[t.to].name.clone(),
            )
        })
        .collect()
}

/// The labels of a module keyed by state name.
pub fn named_labels(m: &Module) -> BTreeMap<String, Valuation> {
    m.states
        .iter()
        .map(|s| (s.name.clone(), s.label.clone()))
        .collect()
}

/// Renames every state of a module with a prefix, leaving structure alone.
pub fn rename_states(m: &Module, prefix: &str) -> Module {
    let mut renamed = m.clone();
    for s in &mut renamed.states {
        s.name = format!("{prefix}{}", s.name);
    }
    renamed
}

/// Drops a transition by index and restores input-enabledness, yielding a
/// valid module whose behaviour is a restriction of the original.
pub fn drop_transition(m: &Module, index: usize) -> Module {
    let mut cut = m.clone();
    cut.transitions.remove(index);
    // Removing a move may leave a (state, letter) pair empty or may make a
    // surviving self-loop redundant; rebuild from the real transitions.
    let real: Vec<Transition> = cut
        .transitions
        .iter()
        .filter(|t| {
            t.from != t.to
                || !cut
                    .transitions
                    .iter()
                    .any(|u| u.from == t.from && u.input == t.input && u.to != t.to)
        })
        .cloned()
        .collect();
    cut.transitions = real;
    cut.complete_inputs().expect("restriction completes");
    cut
}
