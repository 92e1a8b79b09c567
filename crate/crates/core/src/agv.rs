//! Assume-guarantee rules over agent partitions.
//!
//! The engine derives a coalition objective ⟨⟨C⟩⟩⋀ψ compositionally: the
//! coalition is split into parts, each part proves its own conjunct
//! against a Büchi assumption about the rest of the system (premise 1),
//! and each assumption is discharged by showing that the part's
//! k-neighborhood guarantees it (premise 2). A derivation is sound; a
//! failed premise is inconclusive — the engine never claims the
//! conclusion false.

use crate::compose::{compose_all, ComposeError};
use crate::guarantee::{guarantees, GuaranteeError};
use crate::logic::{classify, Formula, FormulaClass};
use crate::module::{reachable, Module};
use crate::omega::LassoWord;
use crate::strategy::{extended_model, synthesize, JointStrategy, VerifyError};
use crate::system::{Assumption, System};
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgvError {
    #[error("partition part {part} is empty")]
    EmptyPart { part: usize },
    #[error("agent index {agent} appears in more than one part")]
    OverlappingParts { agent: usize },
    #[error("agent index {index} is outside the system")]
    BadAgentIndex { index: usize },
    #[error("expected one {what} per part ({parts} parts), got {got}")]
    ArityMismatch {
        what: &'static str,
        parts: usize,
        got: usize,
    },
    #[error("neighborhood depth k must be at least 1")]
    BadK,
    #[error("objective for part {part} contains a strategic modality")]
    NonLtlObjective { part: usize },
    #[error(
        "objective for part {part} mentions `{var}`, which is neither a \
         part variable nor an assumption variable"
    )]
    NonLocalObjective { part: usize, var: String },
    #[error(
        "assumption `{assumption}` for part {part} does not own `{var}`, \
         which the part reads; without it the premise model cannot show \
         the rest of the system moving while the part stays put"
    )]
    AssumptionMissesInput {
        part: usize,
        assumption: String,
        var: String,
    },
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Guarantee(#[from] GuaranteeError),
}

/// Disjoint non-empty agent-index sets; their union is the coalition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(parts: Vec<Vec<usize>>) -> Result<Partition, AgvError> {
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut normalized = Vec::with_capacity(parts.len());
        for (pi, part) in parts.into_iter().enumerate() {
            let set: BTreeSet<usize> = part.into_iter().collect();
            if set.is_empty() {
                return Err(AgvError::EmptyPart { part: pi });
            }
            if let Some(&dup) = set.intersection(&seen).next() {
                return Err(AgvError::OverlappingParts { agent: dup });
            }
            seen.extend(&set);
            normalized.push(set.into_iter().collect());
        }
        Ok(Partition { parts: normalized })
    }

    pub fn singletons(coalition: &[usize]) -> Result<Partition, AgvError> {
        Partition::new(coalition.iter().map(|&i| vec![i]).collect())
    }

    pub fn coalition(&self) -> BTreeSet<usize> {
        self.parts.iter().flatten().copied().collect()
    }
}

/// Agents within distance k of the seed in the variable-dependency graph
/// (an edge joins i and j when one reads a state variable the other
/// owns), excluding the seed itself.
pub fn neighborhood(sys: &System, seed: &[usize], k: usize) -> BTreeSet<usize> {
    assert!(k >= 1, "neighborhood depth must be at least 1");
    let seed: BTreeSet<usize> = seed.iter().copied().collect();
    let direct = |i: usize| -> BTreeSet<usize> {
        let mi = &sys.agents[i].module;
        (0..sys.agents.len())
            .filter(|&j| j != i)
            .filter(|&j| {
                let mj = &sys.agents[j].module;
                mj.input_vars.intersection(&mi.state_vars).next().is_some()
                    || mi.input_vars.intersection(&mj.state_vars).next().is_some()
            })
            .collect()
    };
    let mut frontier: BTreeSet<usize> = seed.iter().flat_map(|&i| direct(i)).collect();
    frontier = frontier.difference(&seed).copied().collect();
    for _ in 1..k {
        let grown: BTreeSet<usize> = frontier.iter().flat_map(|&j| direct(j)).collect();
        let next: BTreeSet<usize> = frontier
            .union(&grown)
            .copied()
            .filter(|j| !seed.contains(j))
            .collect();
        if next == frontier {
            break;
        }
        frontier = next;
    }
    frontier
}

/// Composition of the listed agents' modules in ascending agent order;
/// the empty list yields the unit module.
pub fn comp_module(sys: &System, indices: &[usize]) -> Result<Module, ComposeError> {
    let sorted: BTreeSet<usize> = indices.iter().copied().collect();
    if sorted.is_empty() {
        return Ok(Module::unit("unit", sys.domain));
    }
    let modules: Vec<&Module> = sorted.iter().map(|&i| &sys.agents[i].module).collect();
    let (m, _) = compose_all(&modules)?;
    Ok(m)
}

/// The all-accepting assumption describing exactly the agents outside the
/// coalition; for the full coalition it degenerates to the unit module.
pub fn trivial_assumption(sys: &System, coalition: &[usize]) -> Result<Assumption, ComposeError> {
    let c: BTreeSet<usize> = coalition.iter().copied().collect();
    let rest: Vec<usize> = (0..sys.agents.len()).filter(|i| !c.contains(i)).collect();
    let module = comp_module(sys, &rest)?;
    Ok(Assumption {
        name: "trivial".to_string(),
        accepting: (0..module.states.len()).collect(),
        module,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    Fixed(usize),
    /// Try k = 1, 2, … up to the number of agents until the guarantee
    /// premise holds (enlarging the neighborhood never spoils it).
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleVerdict {
    Derived,
    PremiseFailed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Premise {
    Strategy,
    Guarantee,
}

#[derive(Clone, Debug)]
pub struct PartReport {
    pub part: Vec<usize>,
    pub objective: Formula,
    pub assumption: String,
    pub strategy_holds: bool,
    pub strategy_witness: Option<JointStrategy>,
    pub strategies_examined: u64,
    /// Reachable size of the part's extended model (premise 1).
    pub states: usize,
    pub transitions: usize,
    pub guarantee_holds: bool,
    pub guarantee_counterexample: Option<LassoWord>,
    /// Agents composed for the guarantee premise at `k_used`.
    pub guarantee_base: Vec<usize>,
    pub k_used: usize,
}

#[derive(Clone, Debug)]
pub struct AgvReport {
    pub verdict: RuleVerdict,
    pub conclusion: Formula,
    pub parts: Vec<PartReport>,
    /// First failing premise in part order (strategy before guarantee).
    pub failure: Option<(usize, Premise)>,
    pub time_ms: u128,
}

fn conjunction(fs: &[Formula]) -> Formula {
    fs.iter()
        .cloned()
        .reduce(Formula::and)
        .unwrap_or(Formula::True)
}

/// Owner of `var` as a state variable, if any agent declares it.
fn owner(sys: &System, var: &str) -> Option<usize> {
    (0..sys.agents.len()).find(|&i| sys.agents[i].module.state_vars.contains(var))
}

/// Agents composed for the guarantee premise of `part` at depth `k`: the
/// k-neighborhood, minus the excluded coalition when asked, extended by
/// the owners of assumption variables the composition could not otherwise
/// read (so the guarantee check stays well-defined; a guarantee survives
/// any such enlargement).
fn premise_base(
    sys: &System,
    part: &[usize],
    k: usize,
    exclude: Option<&BTreeSet<usize>>,
    a: &Assumption,
) -> Vec<usize> {
    let mut base = neighborhood(sys, part, k);
    if let Some(c) = exclude {
        base.retain(|j| !c.contains(j));
    }
    let state_vars: BTreeSet<&String> = base
        .iter()
        .flat_map(|&j| &sys.agents[j].module.state_vars)
        .collect();
    let input_vars: BTreeSet<&String> = base
        .iter()
        .flat_map(|&j| &sys.agents[j].module.input_vars)
        .collect();
    let mut extra = BTreeSet::new();
    for var in &a.module.state_vars {
        if !state_vars.contains(var) {
            extra.extend(owner(sys, var));
        }
    }
    for var in &a.module.input_vars {
        if !state_vars.contains(var) && !input_vars.contains(var) {
            extra.extend(owner(sys, var));
        }
    }
    base.extend(extra);
    base.into_iter().collect()
}

/// Applies the partitioned assume-guarantee rule: per part, premise 1
/// synthesizes a joint strategy for the part's conjunction on the part's
/// modules composed with its assumption (acceptance read as fairness),
/// and premise 2 checks that the part's neighborhood guarantees the
/// assumption. `objectives` and `assumptions` align with the parts.
///
/// Each part's assumption must own every variable the part reads from
/// outside the part. An assumption that merely reads such a variable (or
/// ignores it) leaves it frozen in the premise model whenever the part
/// idles, so the premise could never exhibit the schedules in which the
/// rest of the system runs while the part is excluded — and a strategy
/// that only survives because those schedules are missing would let the
/// rule derive conclusions the full system refutes.
pub fn apply_rule_part(
    sys: &System,
    partition: &Partition,
    objectives: &[Vec<Formula>],
    assumptions: &[Assumption],
    k: KChoice,
    exclude_coalition: bool,
) -> Result<AgvReport, AgvError> {
    let start = Instant::now();
    let n_parts = partition.parts.len();
    if objectives.len() != n_parts {
        return Err(AgvError::ArityMismatch {
            what: "objective group",
            parts: n_parts,
            got: objectives.len(),
        });
    }
    if assumptions.len() != n_parts {
        return Err(AgvError::ArityMismatch {
            what: "assumption",
            parts: n_parts,
            got: assumptions.len(),
        });
    }
    if let KChoice::Fixed(0) = k {
        return Err(AgvError::BadK);
    }
    if let Some(&index) = partition
        .coalition()
        .iter()
        .find(|&&i| i >= sys.agents.len())
    {
        return Err(AgvError::BadAgentIndex { index });
    }
    let coalition = partition.coalition();
    let exclude = exclude_coalition.then_some(&coalition);
    let ks: Vec<usize> = match k {
        KChoice::Fixed(v) => vec![v],
        KChoice::Auto => (1..=sys.agents.len().max(1)).collect(),
    };

    let mut parts_out = Vec::with_capacity(n_parts);
    let mut failure: Option<(usize, Premise)> = None;
    for (pi, part) in partition.parts.iter().enumerate() {
        let a = &assumptions[pi];
        let objective = conjunction(&objectives[pi]);
        if classify(&objective) != FormulaClass::Ltl {
            return Err(AgvError::NonLtlObjective { part: pi });
        }
        let part_vars: BTreeSet<&String> = part
            .iter()
            .flat_map(|&j| &sys.agents[j].module.state_vars)
            .collect();
        for &j in part {
            for var in &sys.agents[j].module.input_vars {
                if !part_vars.contains(var) && !a.module.state_vars.contains(var) {
                    return Err(AgvError::AssumptionMissesInput {
                        part: pi,
                        assumption: a.name.clone(),
                        var: var.clone(),
                    });
                }
            }
        }
        let ext = extended_model(sys, part, Some(a))?;
        for var in objective.atom_vars() {
            if !ext.module.state_vars.contains(&var) {
                return Err(AgvError::NonLocalObjective { part: pi, var });
            }
        }
        let (states, transitions, _) = reachable(&ext.module);
        let (witness, examined) = synthesize(&ext, sys, part, &objective)?;
        let strategy_holds = witness.is_some();

        let mut guarantee_holds = false;
        let mut guarantee_counterexample = None;
        let mut guarantee_base = Vec::new();
        let mut k_used = 0;
        for &kk in &ks {
            let base = premise_base(sys, part, kk, exclude, a);
            let m = comp_module(sys, &base)?;
            let outcome = guarantees(&m, a)?;
            k_used = kk;
            guarantee_base = base;
            guarantee_holds = outcome.holds;
            guarantee_counterexample = outcome.counterexample;
            if guarantee_holds {
                break;
            }
        }

        if failure.is_none() {
            if !strategy_holds {
                failure = Some((pi, Premise::Strategy));
            } else if !guarantee_holds {
                failure = Some((pi, Premise::Guarantee));
            }
        }
        parts_out.push(PartReport {
            part: part.clone(),
            objective,
            assumption: a.name.clone(),
            strategy_holds,
            strategy_witness: witness,
            strategies_examined: examined,
            states,
            transitions,
            guarantee_holds,
            guarantee_counterexample,
            guarantee_base,
            k_used,
        });
    }

    let all_objectives: Vec<Formula> = parts_out.iter().map(|p| p.objective.clone()).collect();
    Ok(AgvReport {
        verdict: if failure.is_none() {
            RuleVerdict::Derived
        } else {
            RuleVerdict::PremiseFailed
        },
        conclusion: Formula::Coop(
            coalition.iter().copied().collect(),
            Box::new(conjunction(&all_objectives)),
        ),
        parts: parts_out,
        failure,
        time_ms: start.elapsed().as_millis(),
    })
}

/// The singleton-parts rule: one objective and one assumption per
/// coalition agent, in the coalition's given order.
pub fn apply_rule_rk(
    sys: &System,
    coalition: &[usize],
    objectives: &[Formula],
    assumptions: &[Assumption],
    k: KChoice,
    exclude_coalition: bool,
) -> Result<AgvReport, AgvError> {
    let partition = Partition::singletons(coalition)?;
    let grouped: Vec<Vec<Formula>> = objectives.iter().map(|f| vec![f.clone()]).collect();
    apply_rule_part(sys, &partition, &grouped, assumptions, k, exclude_coalition)
}
