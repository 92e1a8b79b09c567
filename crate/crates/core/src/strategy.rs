//! Strategy synthesis and verification.
//!
//! A strategy for an agent is memoryless in its *local* states (imperfect
//! information): per local state it fixes one choice from the agent's
//! repertoire. A coalition's joint strategy restricts the composed system to
//! the traces implementing it: every step that changes a member's local
//! state must use a transition from that member's chosen set; steps that
//! leave a member's local state unchanged are never filtered, and opponents
//! are unrestricted. The restriction is taken literally — no transitions
//! are re-added afterwards — so states can lose letters or go dead, and
//! satisfaction quantifies over the surviving infinite (fair) traces.

use crate::compose::{compose_all, ComposeError};
use crate::logic::{classify, Formula, FormulaClass};
use crate::module::{reachable, Module};
use crate::omega::{
    find_accepting_lasso, intersect, ltl_to_buchi, module_to_buchi, BuchiAutomaton, Lasso,
    LassoWord, OmegaError,
};
use crate::system::{Assumption, System};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error("formula mentions `{var}`, which is not a state variable of the model")]
    UnknownVariable { var: String },
    #[error("coalition member `{agent}` is not part of the verified composition")]
    CoalitionOutsideModel { agent: String },
}

/// A joint memoryless strategy: for each coalition member, the index of the
/// repertoire choice picked at each of its local states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointStrategy {
    pub picks: BTreeMap<usize, Vec<usize>>,
}

impl JointStrategy {
    /// Human-readable form: agent name → local state name → rendering of
    /// the chosen transition set.
    pub fn describe(&self, sys: &System) -> BTreeMap<String, BTreeMap<String, Vec<String>>> {
        self.picks
            .iter()
            .map(|(&agent, picks)| {
                let a = &sys.agents[agent];
                let m = &a.module;
                let states = picks
                    .iter()
                    .enumerate()
                    .map(|(q, &pick)| {
                        let rendered = a.repertoire.choices[q][pick]
                            .iter()
                            .map(|&ti| {
                                let t = &m.transitions[ti];
                                format!(
                                    "{} -[{}]-> {}",
                                    m.states[t.from].name, t.input, m.states[t.to].name
                                )
                            })
                            .collect();
                        (m.states[q].name.clone(), rendered)
                    })
                    .collect();
                (a.name().to_string(), states)
            })
            .collect()
    }
}

/// Iterator over all joint strategies of a coalition, odometer order: the
/// digits are the coalition members' local states (members ascending,
/// states in order), the last digit moving fastest.
pub struct StrategyIter {
    digits: Vec<(usize, usize, usize)>, // (agent, state, radix)
    current: Vec<usize>,
    exhausted: bool,
}

impl Iterator for StrategyIter {
    type Item = JointStrategy;

    fn next(&mut self) -> Option<JointStrategy> {
        if self.exhausted {
            return None;
        }
        let mut picks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (&(agent, _, _), &v) in self.digits.iter().zip(&self.current) {
            picks.entry(agent).or_default().push(v);
        }
        // Advance, last digit fastest.
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.exhausted = true;
                break;
            }
            i -= 1;
            self.current[i] += 1;
            if self.current[i] < self.digits[i].2 {
                break;
            }
            self.current[i] = 0;
        }
        Some(JointStrategy { picks })
    }
}

/// All joint strategies of `coalition` (0-based agent indices, deduplicated
/// and sorted). An empty coalition has exactly one (empty) strategy.
pub fn enumerate_joint_strategies(sys: &System, coalition: &[usize]) -> StrategyIter {
    let members: BTreeSet<usize> = coalition.iter().copied().collect();
    let mut digits = Vec::new();
    for &agent in &members {
        let a = &sys.agents[agent];
        for q in 0..a.module.states.len() {
            digits.push((agent, q, a.repertoire.width(q).max(1)));
        }
    }
    StrategyIter {
        current: vec![0; digits.len()],
        digits,
        exhausted: false,
    }
}

/// How many joint strategies the coalition has (saturating).
pub fn count_joint_strategies(sys: &System, coalition: &[usize]) -> u64 {
    let members: BTreeSet<usize> = coalition.iter().copied().collect();
    let mut n: u64 = 1;
    for &agent in &members {
        let a = &sys.agents[agent];
        for q in 0..a.module.states.len() {
            n = n.saturating_mul(a.repertoire.width(q).max(1) as u64);
        }
    }
    n
}

/// A composed model ready for strategic verification: the composite module,
/// the per-composite-state local coordinates of the composed agents (in
/// `members` order, with the assumption — if any — as the extra final
/// coordinate), and the fairness set (all states when no assumption).
#[derive(Clone, Debug)]
pub struct ExtendedModel {
    pub module: Module,
    pub coords: Vec<Vec<usize>>,
    pub members: Vec<usize>,
    pub fair: BTreeSet<usize>,
}

/// Composes the modules of `members` (sys agent indices, in the given
/// order), attaching `assumption`'s module last when present; fair states
/// are those whose assumption coordinate is accepting.
pub fn extended_model(
    sys: &System,
    members: &[usize],
    assumption: Option<&Assumption>,
) -> Result<ExtendedModel, ComposeError> {
    let mut modules: Vec<&Module> = members.iter().map(|&i| &sys.agents[i].module).collect();
    if let Some(a) = assumption {
        modules.push(&a.module);
    }
    let (module, coords) = compose_all(&modules)?;
    let fair = match assumption {
        None => (0..module.states.len()).collect(),
        Some(a) => {
            let last = modules.len() - 1;
            (0..module.states.len())
                .filter(|&q| a.accepting.contains(&coords[q][last]))
                .collect()
        }
    };
    Ok(ExtendedModel {
        module,
        coords,
        members: members.to_vec(),
        fair,
    })
}

/// The sub-module of `module` implementing `strategy`.
///
/// `members[pos]` names the sys agent composed at coordinate `pos` of
/// `coords`; coordinates beyond `members.len()` (an attached assumption)
/// are never filtered. Transitions are kept as-is — in particular no
/// completion is applied, so the result may have dead states.
pub fn restrict_by_strategy(
    module: &Module,
    sys: &System,
    members: &[usize],
    coords: &[Vec<usize>],
    strategy: &JointStrategy,
) -> Module {
    struct MemberCtx<'a> {
        pos: usize,
        inputs: Vec<&'a str>,
        transition_index: BTreeMap<(usize, &'a crate::values::Valuation, usize), usize>,
        chosen: Vec<&'a BTreeSet<usize>>,
    }
    let ctxs: Vec<MemberCtx> = strategy
        .picks
        .iter()
        .map(|(&agent, picks)| {
            let pos = members
                .iter()
                .position(|&m| m == agent)
                .expect("strategy agent is part of the composition");
            let a = &sys.agents[agent];
            assert_eq!(picks.len(), a.module.states.len());
            MemberCtx {
                pos,
                inputs: a.module.input_vars.iter().map(|s| s.as_str()).collect(),
                transition_index: a
                    .module
                    .transitions
                    .iter()
                    .enumerate()
                    .map(|(i, t)| ((t.from, &t.input, t.to), i))
                    .collect(),
                chosen: picks
                    .iter()
                    .enumerate()
                    .map(|(q, &pick)| &a.repertoire.choices[q][pick])
                    .collect(),
            }
        })
        .collect();
    let mut out = module.clone();
    out.transitions.retain(|t| {
        let full = module.states[t.from]
            .label
            .union(&t.input)
            .expect("state label and input letter are disjoint");
        ctxs.iter().all(|ctx| {
            let l = coords[t.from][ctx.pos];
            let l2 = coords[t.to][ctx.pos];
            if l == l2 {
                return true; // the member's local state does not change
            }
            let alpha = full.restrict(ctx.inputs.iter().copied());
            let ti = *ctx
                .transition_index
                .get(&(l, &alpha, l2))
                .expect("composite step matches a local transition");
            ctx.chosen[l].contains(&ti)
        })
    });
    out
}

/// Statistics of one verification run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Reachable states of the verified composition.
    pub states: usize,
    /// Transitions among its reachable states.
    pub transitions: usize,
    pub strategies_examined: u64,
    pub time_ms: u128,
}

#[derive(Clone, Debug)]
pub struct VerificationResult {
    pub verdict: bool,
    pub witness: Option<JointStrategy>,
    pub counterexample: Option<LassoWord>,
    pub stats: Stats,
}

/// A violating fair run of the restricted module, if any: the module's
/// fair traces all satisfy the objective iff this returns `None`.
fn violating_lasso(
    restricted: &Module,
    fair: &BTreeSet<usize>,
    negated_objective: &BuchiAutomaton,
) -> Option<Lasso> {
    let runs = module_to_buchi(restricted, fair.clone());
    find_accepting_lasso(&intersect(&runs, negated_objective))
}

/// Does every fair trace of `ext` restricted by `strategy` satisfy `g`?
/// Returns the violating trace when not.
pub fn holds_under_strategy(
    ext: &ExtendedModel,
    sys: &System,
    strategy: &JointStrategy,
    g: &Formula,
) -> Result<(bool, Option<LassoWord>), VerifyError> {
    let negated = ltl_to_buchi(
        &Formula::not(g.clone()),
        &ext.module.state_vars,
        ext.module.domain,
    )?;
    let restricted = restrict_by_strategy(&ext.module, sys, &ext.members, &ext.coords, strategy);
    match violating_lasso(&restricted, &ext.fair, &negated) {
        None => Ok((true, None)),
        Some(lasso) => {
            let alphabet = crate::omega::Alphabet::new(
                ext.module
                    .state_vars
                    .iter()
                    .cloned()
                    .collect::<Vec<String>>(),
                ext.module.domain,
            );
            Ok((false, Some(lasso.word(&alphabet))))
        }
    }
}

/// First joint strategy of `coalition` (odometer order) whose restriction
/// satisfies `body` on all fair traces; also returns how many strategies
/// were examined.
pub fn synthesize(
    ext: &ExtendedModel,
    sys: &System,
    coalition: &[usize],
    body: &Formula,
) -> Result<(Option<JointStrategy>, u64), VerifyError> {
    let negated = ltl_to_buchi(
        &Formula::not(body.clone()),
        &ext.module.state_vars,
        ext.module.domain,
    )?;
    let mut examined = 0;
    for strategy in enumerate_joint_strategies(sys, coalition) {
        examined += 1;
        let restricted =
            restrict_by_strategy(&ext.module, sys, &ext.members, &ext.coords, &strategy);
        if violating_lasso(&restricted, &ext.fair, &negated).is_none() {
            return Ok((Some(strategy), examined));
        }
    }
    Ok((None, examined))
}

/// Checks `f` on the composition of the whole system.
pub fn verify(sys: &System, f: &Formula) -> Result<VerificationResult, VerifyError> {
    let all: Vec<usize> = (0..sys.agents.len()).collect();
    verify_under(sys, &all, None, f)
}

/// Checks `f` on the composition of `members`, optionally under an
/// assumption (whose acceptance becomes a fairness constraint).
///
/// Dispatch: a formula with no strategic modality holds iff every fair
/// trace satisfies it (a violating trace is reported); a single leading
/// modality triggers strategy synthesis; nested modalities are eliminated
/// innermost-first by labelling each reachable state with the verdict of
/// the inner synthesis re-rooted at that state.
pub fn verify_under(
    sys: &System,
    members: &[usize],
    assumption: Option<&Assumption>,
    f: &Formula,
) -> Result<VerificationResult, VerifyError> {
    let start = Instant::now();
    let ext = extended_model(sys, members, assumption)?;
    for var in f.atom_vars() {
        if !ext.module.state_vars.contains(&var) {
            return Err(VerifyError::UnknownVariable { var });
        }
    }
    for coalition_member in coalition_agents(f) {
        if !members.contains(&coalition_member) {
            return Err(VerifyError::CoalitionOutsideModel {
                agent: sys
                    .agents
                    .get(coalition_member)
                    .map(|a| a.name().to_string())
                    .unwrap_or_else(|| format!("#{}", coalition_member + 1)),
            });
        }
    }
    let (n_states, n_transitions, _) = reachable(&ext.module);
    let mut stats = Stats {
        states: n_states,
        transitions: n_transitions,
        strategies_examined: 0,
        time_ms: 0,
    };
    let mut result = match classify(f) {
        FormulaClass::Ltl => {
            let negated = ltl_to_buchi(
                &Formula::not(f.clone()),
                &ext.module.state_vars,
                ext.module.domain,
            )?;
            match violating_lasso(&ext.module, &ext.fair, &negated) {
                None => VerificationResult {
                    verdict: true,
                    witness: None,
                    counterexample: None,
                    stats: stats.clone(),
                },
                Some(lasso) => {
                    let alphabet = crate::omega::Alphabet::new(
                        ext.module
                            .state_vars
                            .iter()
                            .cloned()
                            .collect::<Vec<String>>(),
                        ext.module.domain,
                    );
                    VerificationResult {
                        verdict: false,
                        witness: None,
                        counterexample: Some(lasso.word(&alphabet)),
                        stats: stats.clone(),
                    }
                }
            }
        }
        FormulaClass::OneAtls => {
            let Formula::Coop(coalition, body) = f else {
                unreachable!("single-modality formula has a cooperation root")
            };
            let (witness, examined) = synthesize(&ext, sys, coalition, body)?;
            stats.strategies_examined = examined;
            VerificationResult {
                verdict: witness.is_some(),
                witness,
                counterexample: None,
                stats: stats.clone(),
            }
        }
        FormulaClass::Nested => {
            let (verdict, examined) = verify_nested(ext.clone(), sys, f)?;
            stats.strategies_examined = examined;
            VerificationResult {
                verdict,
                witness: None,
                counterexample: None,
                stats: stats.clone(),
            }
        }
    };
    result.stats.time_ms = start.elapsed().as_millis();
    Ok(result)
}

/// Agents named by any cooperation modality in `f`.
fn coalition_agents(f: &Formula) -> BTreeSet<usize> {
    fn walk(f: &Formula, out: &mut BTreeSet<usize>) {
        match f {
            Formula::Coop(c, body) => {
                out.extend(c.iter().copied());
                walk(body, out);
            }
            Formula::Not(g) | Formula::Finally(g) | Formula::Globally(g) => walk(g, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            Formula::True | Formula::False | Formula::Atom(_) => {}
        }
    }
    let mut out = BTreeSet::new();
    walk(f, &mut out);
    out
}

/// The leftmost innermost cooperation subformula (its body is free of
/// further modalities).
fn innermost_coop(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Coop(_, body) => innermost_coop(body).or(Some(f)),
        Formula::Not(g) | Formula::Finally(g) | Formula::Globally(g) => innermost_coop(g),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => {
            innermost_coop(a).or_else(|| innermost_coop(b))
        }
        Formula::True | Formula::False | Formula::Atom(_) => None,
    }
}

fn substitute(f: &Formula, target: &Formula, replacement: &Formula) -> Formula {
    if f == target {
        return replacement.clone();
    }
    match f {
        Formula::Not(g) => Formula::not(substitute(g, target, replacement)),
        Formula::Finally(g) => Formula::finally(substitute(g, target, replacement)),
        Formula::Globally(g) => Formula::globally(substitute(g, target, replacement)),
        Formula::And(a, b) => Formula::and(
            substitute(a, target, replacement),
            substitute(b, target, replacement),
        ),
        Formula::Or(a, b) => Formula::or(
            substitute(a, target, replacement),
            substitute(b, target, replacement),
        ),
        Formula::Until(a, b) => Formula::until(
            substitute(a, target, replacement),
            substitute(b, target, replacement),
        ),
        Formula::Coop(c, body) => {
            Formula::Coop(c.clone(), Box::new(substitute(body, target, replacement)))
        }
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
    }
}

/// Eliminates nested modalities by labelling, then decides the remaining
/// formula. Returns the verdict and the total strategies examined.
fn verify_nested(
    mut ext: ExtendedModel,
    sys: &System,
    f: &Formula,
) -> Result<(bool, u64), VerifyError> {
    let mut formula = f.clone();
    let mut examined_total: u64 = 0;
    let mut fresh = 0usize;
    while classify(&formula) == FormulaClass::Nested {
        let target = innermost_coop(&formula)
            .expect("nested formula contains a modality")
            .clone();
        let Formula::Coop(coalition, body) = &target else {
            unreachable!()
        };
        let var = loop {
            let name = format!("goal{fresh}");
            fresh += 1;
            if !ext.module.state_vars.contains(&name) {
                break name;
            }
        };
        let mut values = vec![0u32; ext.module.states.len()];
        for q in ext.module.reachable_indices() {
            let mut rooted = ext.clone();
            rooted.module.init = q;
            let (witness, examined) = synthesize(&rooted, sys, coalition, body)?;
            examined_total += examined;
            values[q] = witness.is_some() as u32;
        }
        for (q, st) in ext.module.states.iter_mut().enumerate() {
            st.label.set(var.clone(), values[q]);
        }
        ext.module.state_vars.insert(var.clone());
        formula = substitute(&formula, &target, &Formula::atom(var, 1));
    }
    match classify(&formula) {
        FormulaClass::Ltl => {
            let negated = ltl_to_buchi(
                &Formula::not(formula.clone()),
                &ext.module.state_vars,
                ext.module.domain,
            )?;
            Ok((
                violating_lasso(&ext.module, &ext.fair, &negated).is_none(),
                examined_total,
            ))
        }
        FormulaClass::OneAtls => {
            let Formula::Coop(coalition, body) = &formula else {
                unreachable!()
            };
            let (witness, examined) = synthesize(&ext, sys, coalition, body)?;
            Ok((witness.is_some(), examined_total + examined))
        }
        FormulaClass::Nested => unreachable!("all inner modalities eliminated"),
    }
}
