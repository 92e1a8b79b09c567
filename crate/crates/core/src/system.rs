//! Agents, repertoires, assumptions, and multi-agent systems.

use crate::module::{Module, ModuleError, Violation};
use crate::values::Domain;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// A repertoire: for each local state, a non-empty menu of transition sets.
/// Picking one set per state is an agent's strategic choice; only transitions
/// inside the chosen set may change the agent's local state.
///
/// `choices[q]` lists the available sets at state `q`; each set contains
/// indices into the owning module's transition list, all with source `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repertoire {
    pub choices: Vec<Vec<BTreeSet<usize>>>,
}

impl Repertoire {
    /// The default repertoire: one singleton choice per transition, i.e. the
    /// agent commits to exactly one outgoing transition per state.
    pub fn singletons(m: &Module) -> Repertoire {
        let mut choices = vec![Vec::new(); m.states.len()];
        for (i, t) in m.transitions.iter().enumerate() {
            choices[t.from].push(BTreeSet::from([i]));
        }
        Repertoire { choices }
    }

    /// A repertoire with a single choice per state containing *all* outgoing
    /// transitions (the agent constrains nothing).
    pub fn permissive(m: &Module) -> Repertoire {
        let mut all = vec![BTreeSet::new(); m.states.len()];
        for (i, t) in m.transitions.iter().enumerate() {
            all[t.from].insert(i);
        }
        Repertoire {
            choices: all.into_iter().map(|set| vec![set]).collect(),
        }
    }

    /// Number of choices available at state `q`.
    pub fn width(&self, q: usize) -> usize {
        self.choices[q].len()
    }
}

/// A strategic agent: a module plus a repertoire over its transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    pub module: Module,
    pub repertoire: Repertoire,
}

impl Agent {
    /// The agent's name (the underlying module's name).
    pub fn name(&self) -> &str {
        &self.module.name
    }
}

/// A Büchi assumption: a module together with a set of accepting states.
/// It abstracts the environment of a component; its language is read modulo
/// stuttering through the guarantee relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assumption {
    pub name: String,
    pub module: Module,
    pub accepting: BTreeSet<usize>,
}

impl Assumption {
    /// Errors unless the accepting set is within range and the module valid.
    pub fn check_valid(&self) -> Result<(), SystemError> {
        self.module
            .check_valid()
            .map_err(SystemError::InvalidModule)?;
        if let Some(&q) = self.accepting.iter().find(|&&q| q >= self.module.states.len()) {
            return Err(SystemError::AcceptingOutOfRange {
                assumption: self.name.clone(),
                state: q,
            });
        }
        Ok(())
    }
}

/// A multi-agent system: an ordered list of pairwise-asynchronous agents
/// sharing one value domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    pub domain: Domain,
    pub agents: Vec<Agent>,
}

/// Errors raised when validating systems and assumptions.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("system has no agents")]
    NoAgents,
    #[error("{0}")]
    InvalidModule(#[from] ModuleError),
    #[error("agents {a} and {b} are not asynchronous: both own state variable {var}")]
    SharedStateVar { a: String, b: String, var: String },
    #[error("agent {agent}: domain differs from the system domain")]
    DomainMismatch { agent: String },
    #[error("agent {agent}: repertoire does not cover every state")]
    RepertoireArity { agent: String },
    #[error("agent {agent}, state {state}: empty repertoire group")]
    EmptyRepertoire { agent: String, state: String },
    #[error("agent {agent}, state {state}: a choice contains no transitions")]
    EmptyChoice { agent: String, state: String },
    #[error("agent {agent}, state {state}: choice refers to a transition not leaving the state")]
    ForeignChoice { agent: String, state: String },
    #[error("duplicate agent name {name}")]
    DuplicateAgentName { name: String },
    #[error("unknown agent {name}")]
    UnknownAgent { name: String },
    #[error("assumption {assumption}: accepting state #{state} out of range")]
    AcceptingOutOfRange { assumption: String, state: usize },
}

impl System {
    /// Validates every agent module, pairwise asynchrony, and repertoires.
    pub fn check_valid(&self) -> Result<(), SystemError> {
        if self.agents.is_empty() {
            return Err(SystemError::NoAgents);
        }
        let mut names = BTreeSet::new();
        for agent in &self.agents {
            if !names.insert(agent.name().to_string()) {
                return Err(SystemError::DuplicateAgentName {
                    name: agent.name().to_string(),
                });
            }
            if agent.module.domain != self.domain {
                return Err(SystemError::DomainMismatch {
                    agent: agent.name().to_string(),
                });
            }
            agent.module.check_valid()?;
            Self::check_repertoire(agent)?;
        }
        for i in 0..self.agents.len() {
            for j in i + 1..self.agents.len() {
                let (a, b) = (&self.agents[i], &self.agents[j]);
                if let Some(var) = a
                    .module
                    .state_vars
                    .intersection(&b.module.state_vars)
                    .next()
                {
                    return Err(SystemError::SharedStateVar {
                        a: a.name().to_string(),
                        b: b.name().to_string(),
                        var: var.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_repertoire(agent: &Agent) -> Result<(), SystemError> {
        let m = &agent.module;
        let r = &agent.repertoire;
        if r.choices.len() != m.states.len() {
            return Err(SystemError::RepertoireArity {
                agent: agent.name().to_string(),
            });
        }
        for (q, groups) in r.choices.iter().enumerate() {
            let state = m.states[q].name.clone();
            if groups.is_empty() {
                return Err(SystemError::EmptyRepertoire {
                    agent: agent.name().to_string(),
                    state,
                });
            }
            for set in groups {
                if set.is_empty() {
                    return Err(SystemError::EmptyChoice {
                        agent: agent.name().to_string(),
                        state,
                    });
                }
                for &ti in set {
                    if ti >= m.transitions.len() || m.transitions[ti].from != q {
                        return Err(SystemError::ForeignChoice {
                            agent: agent.name().to_string(),
                            state,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolves an agent reference: an agent name, or a 1-based index.
    pub fn agent_index(&self, reference: &str) -> Result<usize, SystemError> {
        if let Some(i) = self.agents.iter().position(|a| a.name() == reference) {
            return Ok(i);
        }
        if let Ok(n) = reference.parse::<usize>() {
            if n >= 1 && n <= self.agents.len() {
                return Ok(n - 1);
            }
        }
        Err(SystemError::UnknownAgent {
            name: reference.to_string(),
        })
    }

    /// The union of all agents' state variables.
    pub fn all_state_vars(&self) -> BTreeSet<String> {
        self.agents
            .iter()
            .flat_map(|a| a.module.state_vars.iter().cloned())
            .collect()
    }

    /// Agent names in order.
    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.name().to_string()).collect()
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "system[")?;
        for (i, a) in self.agents.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", a.name())?;
        }
        write!(f, "]")
    }
}

/// Convenience: panics with the first violation if the module is invalid.
/// Used by generators and tests on freshly built modules.
pub fn debug_assert_valid(m: &Module) {
    if cfg!(debug_assertions) {
        let violations: Vec<Violation> = m.validate();
        assert!(
            violations.is_empty(),
            "module {} invalid: {}",
            m.name,
            violations[0]
        );
    }
}
