//! Line-oriented text format for systems and assumptions.
//!
//! ```text
//! # comments run to end of line, blank lines are ignored
//! domain 3
//!
//! agent train1
//!   statevars x1
//!   inputvars s
//!   state w x1=0
//!   state t x1=1
//!   state a x1=2
//!   init w
//!   trans w -> t when s=1
//!   trans t -> a when s=1
//!   trans a -> w                 # no guard: any input value
//!   choice a: a -> w when s=0|2  # one repertoire option per line
//!
//! assumption A_1
//!   statevars s
//!   inputvars x1,x2
//!   ...
//!   accepting g1
//! ```
//!
//! A guard lists `var=value` constraints, comma-separated; `|` separates
//! alternative values, and input variables a guard never mentions range
//! over the whole domain. Self-loops that are the only transition on
//! their letter need not be written — input-enabledness is restored on
//! load — and the serializer omits them. A state without `choice` lines
//! gets the default repertoire: one singleton choice per transition.

use crate::module::Module;
use crate::system::{Agent, Assumption, Repertoire, System, SystemError};
use crate::values::{Domain, Valuation};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, TextError> {
    Err(TextError {
        line,
        message: message.into(),
    })
}

/// `var=val` or `var=v1|v2|…` → the variable and its allowed values.
fn parse_constraint(
    line: usize,
    piece: &str,
    domain: Domain,
) -> Result<(String, Vec<u32>), TextError> {
    let piece = piece.trim();
    let Some((var, spec)) = piece.split_once('=') else {
        return err(line, format!("expected `var=value`, found `{piece}`"));
    };
    let var = var.trim();
    if var.is_empty() {
        return err(line, "missing variable name before `=`");
    }
    let mut values = Vec::new();
    for v in spec.split('|') {
        let v = v.trim();
        let Ok(value) = v.parse::<u32>() else {
            return err(line, format!("`{v}` is not a value"));
        };
        if !domain.contains(value) {
            return err(
                line,
                format!(
                    "value {value} is outside the domain (size {})",
                    domain.size()
                ),
            );
        }
        values.push(value);
    }
    Ok((var.to_string(), values))
}

/// A guard string → per-variable allowed values, validated against the
/// declared input variables.
fn parse_guard(
    line: usize,
    guard: &str,
    inputs: &BTreeSet<String>,
    domain: Domain,
) -> Result<BTreeMap<String, Vec<u32>>, TextError> {
    let mut out = BTreeMap::new();
    for piece in guard.split(',') {
        let (var, values) = parse_constraint(line, piece, domain)?;
        if !inputs.contains(&var) {
            return err(line, format!("`{var}` is not a declared input variable"));
        }
        if out.insert(var, values).is_some() {
            return err(line, "a variable is constrained twice in one guard");
        }
    }
    Ok(out)
}

/// All total input valuations admitted by a guard; unmentioned input
/// variables range over the whole domain.
fn expand_guard(
    guard: &BTreeMap<String, Vec<u32>>,
    inputs: &BTreeSet<String>,
    domain: Domain,
) -> Vec<Valuation> {
    let mut letters = vec![Valuation::new()];
    for var in inputs {
        let values: Vec<u32> = match guard.get(var) {
            Some(vs) => vs.clone(),
            None => domain.values().collect(),
        };
        letters = letters
            .into_iter()
            .flat_map(|v| {
                values
                    .iter()
                    .map(move |&val| v.clone().with(var.clone(), val))
            })
            .collect();
    }
    letters
}

/// One `FROM -> TO [when …]` item: source and target state indices plus
/// the admitted input letters.
fn parse_transition_spec(
    line: usize,
    text: &str,
    m: &Module,
) -> Result<(usize, usize, Vec<Valuation>), TextError> {
    let (head, guard) = match text.split_once(" when ") {
        Some((head, guard)) => (head.trim(), Some(guard.trim())),
        None => (text.trim(), None),
    };
    let tokens: Vec<&str> = head.split_whitespace().collect();
    let [from, arrow, to] = tokens[..] else {
        return err(line, format!("expected `FROM -> TO`, found `{head}`"));
    };
    if arrow != "->" {
        return err(line, format!("expected `->` between states, found `{arrow}`"));
    }
    let Some(from) = m.state_index(from) else {
        return err(line, format!("unknown state `{from}`"));
    };
    let Some(to) = m.state_index(to) else {
        return err(line, format!("unknown state `{to}`"));
    };
    let guard = match guard {
        Some(g) if !g.is_empty() => parse_guard(line, g, &m.input_vars, m.domain)?,
        Some(_) => return err(line, "`when` must be followed by a guard"),
        None => BTreeMap::new(),
    };
    Ok((from, to, expand_guard(&guard, &m.input_vars, m.domain)))
}

struct BlockBuilder {
    kind: &'static str,
    start_line: usize,
    module: Module,
    init: Option<usize>,
    saw_states: bool,
    saw_transitions: bool,
    /// (line, state, one repertoire option as transition keys)
    choices: Vec<(usize, usize, Vec<(usize, usize, Vec<Valuation>)>)>,
    accepting: BTreeSet<usize>,
}

impl BlockBuilder {
    fn new(kind: &'static str, start_line: usize, name: &str, domain: Domain) -> BlockBuilder {
        BlockBuilder {
            kind,
            start_line,
            module: Module::new(name, domain),
            init: None,
            saw_states: false,
            saw_transitions: false,
            choices: Vec::new(),
            accepting: BTreeSet::new(),
        }
    }

    fn feed(&mut self, line: usize, keyword: &str, rest: &str) -> Result<(), TextError> {
        let domain = self.module.domain;
        match keyword {
            "statevars" | "inputvars" => {
                if self.saw_states || self.saw_transitions {
                    return err(
                        line,
                        format!("`{keyword}` must precede states and transitions"),
                    );
                }
                let vars = if keyword == "statevars" {
                    &mut self.module.state_vars
                } else {
                    &mut self.module.input_vars
                };
                for name in rest.split(',') {
                    let name = name.trim();
                    if name.is_empty() {
                        return err(line, format!("empty variable name in `{keyword}`"));
                    }
                    vars.insert(name.to_string());
                }
                Ok(())
            }
            "state" => {
                self.saw_states = true;
                let (name, label_text) = match rest.split_once(char::is_whitespace) {
                    Some((name, rest)) => (name.trim(), rest.trim()),
                    None => (rest.trim(), ""),
                };
                if name.is_empty() {
                    return err(line, "missing state name");
                }
                if self.module.state_index(name).is_some() {
                    return err(line, format!("duplicate state `{name}`"));
                }
                let mut label = Valuation::new();
                if !label_text.is_empty() {
                    for piece in label_text.split(',') {
                        let (var, values) = parse_constraint(line, piece, domain)?;
                        if !self.module.state_vars.contains(&var) {
                            return err(
                                line,
                                format!("`{var}` is not a declared state variable"),
                            );
                        }
                        let [value] = values[..] else {
                            return err(line, "state labels take a single value per variable");
                        };
                        label.set(var, value);
                    }
                }
                if !label.covers_exactly(&self.module.state_vars) {
                    return err(
                        line,
                        format!("state `{name}` must assign every declared state variable"),
                    );
                }
                self.module.add_state(name, label);
                Ok(())
            }
            "init" => {
                let name = rest.trim();
                let Some(q) = self.module.state_index(name) else {
                    return err(line, format!("unknown state `{name}`"));
                };
                if self.init.replace(q).is_some() {
                    return err(line, "init declared twice");
                }
                Ok(())
            }
            "trans" => {
                self.saw_transitions = true;
                let (from, to, letters) = parse_transition_spec(line, rest, &self.module)?;
                for alpha in letters {
                    self.module.add_transition(from, alpha, to);
                }
                Ok(())
            }
            "choice" => {
                if self.kind == "assumption" {
                    return err(line, "assumptions have no repertoire; remove `choice`");
                }
                self.saw_transitions = true;
                let Some((state, specs)) = rest.split_once(':') else {
                    return err(line, "expected `choice STATE: FROM -> TO …`");
                };
                let state = state.trim();
                let Some(q) = self.module.state_index(state) else {
                    return err(line, format!("unknown state `{state}`"));
                };
                let mut option = Vec::new();
                for spec in specs.split(';') {
                    if spec.trim().is_empty() {
                        continue;
                    }
                    let parsed = parse_transition_spec(line, spec, &self.module)?;
                    if parsed.0 != q {
                        return err(
                            line,
                            format!("choice for `{state}` lists a transition leaving a different state"),
                        );
                    }
                    option.push(parsed);
                }
                if option.is_empty() {
                    return err(line, format!("empty repertoire group for state `{state}`"));
                }
                self.choices.push((line, q, option));
                Ok(())
            }
            "accepting" => {
                if self.kind == "agent" {
                    return err(line, "agents have no accepting states; remove `accepting`");
                }
                for name in rest.split(',') {
                    let name = name.trim();
                    let Some(q) = self.module.state_index(name) else {
                        return err(line, format!("unknown state `{name}`"));
                    };
                    self.accepting.insert(q);
                }
                Ok(())
            }
            other => err(line, format!("unknown keyword `{other}`")),
        }
    }

    fn finish(mut self) -> Result<(Agent, BTreeSet<usize>, &'static str), TextError> {
        let Some(init) = self.init else {
            return err(self.start_line, format!("{} `{}` has no init state", self.kind, self.module.name));
        };
        self.module.init = init;
        if let Err(e) = self.module.complete_inputs() {
            return err(self.start_line, e.to_string());
        }
        if let Err(e) = self.module.check_valid() {
            return err(self.start_line, e.to_string());
        }
        let index: BTreeMap<(usize, &Valuation, usize), usize> = self
            .module
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| ((t.from, &t.input, t.to), i))
            .collect();
        let mut custom: BTreeMap<usize, Vec<BTreeSet<usize>>> = BTreeMap::new();
        for (line, q, option) in &self.choices {
            let mut set = BTreeSet::new();
            for (from, to, letters) in option {
                for alpha in letters {
                    let Some(&ti) = index.get(&(*from, alpha, *to)) else {
                        return err(
                            *line,
                            format!(
                                "choice references transition `{} -[{}]-> {}`, which the module does not have",
                                self.module.states[*from].name, alpha, self.module.states[*to].name
                            ),
                        );
                    };
                    set.insert(ti);
                }
            }
            custom.entry(*q).or_default().push(set);
        }
        let mut repertoire = Repertoire::singletons(&self.module);
        for (q, options) in custom {
            repertoire.choices[q] = options;
        }
        Ok((
            Agent {
                module: self.module,
                repertoire,
            },
            self.accepting,
            self.kind,
        ))
    }
}

/// Parses a model file into a system plus its named assumptions.
pub fn parse_model_file(
    text: &str,
) -> Result<(System, BTreeMap<String, Assumption>), TextError> {
    let mut domain: Option<(Domain, usize)> = None;
    let mut blocks: Vec<(BlockBuilder, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = match content.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (content, ""),
        };
        match keyword {
            "domain" => {
                if domain.is_some() {
                    return err(line, "domain declared twice");
                }
                let Ok(size) = rest.parse::<u32>() else {
                    return err(line, format!("`{rest}` is not a domain size"));
                };
                if size == 0 {
                    return err(line, "domain must have at least one value");
                }
                domain = Some((Domain::new(size), line));
            }
            "agent" | "assumption" => {
                let Some((d, _)) = domain else {
                    return err(line, "`domain N` must come first");
                };
                if rest.is_empty() {
                    return err(line, format!("missing {keyword} name"));
                }
                let kind = if keyword == "agent" { "agent" } else { "assumption" };
                blocks.push((BlockBuilder::new(kind, line, rest, d), rest.to_string()));
            }
            _ => {
                let Some((block, _)) = blocks.last_mut() else {
                    return err(line, "expected `agent NAME` or `assumption NAME` first");
                };
                block.feed(line, keyword, rest)?;
            }
        }
    }
    if domain.is_none() {
        return err(1, "missing `domain N` declaration");
    }
    let mut agents = Vec::new();
    let mut assumptions = BTreeMap::new();
    let mut block_lines: BTreeMap<String, usize> = BTreeMap::new();
    for (block, name) in blocks {
        let start_line = block.start_line;
        let (agent, accepting, kind) = block.finish()?;
        if kind == "agent" {
            block_lines.insert(agent.name().to_string(), start_line);
            agents.push(agent);
        } else {
            let assumption = Assumption {
                name: name.clone(),
                module: agent.module,
                accepting,
            };
            assumption
                .check_valid()
                .map_err(|e| TextError {
                    line: start_line,
                    message: e.to_string(),
                })?;
            if assumptions.insert(name.clone(), assumption).is_some() {
                return err(start_line, format!("duplicate assumption `{name}`"));
            }
        }
    }
    let sys = System {
        domain: domain.unwrap().0,
        agents,
    };
    sys.check_valid().map_err(|e| {
        let line = match &e {
            SystemError::InvalidModule(m) => {
                let text = m.to_string();
                block_lines
                    .iter()
                    .find(|(name, _)| text.contains(*name))
                    .map(|(_, &l)| l)
            }
            SystemError::DuplicateAgentName { name }
            | SystemError::DomainMismatch { agent: name }
            | SystemError::RepertoireArity { agent: name }
            | SystemError::EmptyRepertoire { agent: name, .. }
            | SystemError::EmptyChoice { agent: name, .. }
            | SystemError::ForeignChoice { agent: name, .. } => block_lines.get(name).copied(),
            _ => None,
        };
        TextError {
            line: line.unwrap_or(1),
            message: e.to_string(),
        }
    })?;
    Ok((sys, assumptions))
}

/// Is this self-loop the only transition on its `(state, letter)` pair?
/// Such loops are restored by input completion and need not be written.
fn is_completion_loop(m: &Module, index: usize) -> bool {
    let t = &m.transitions[index];
    t.from == t.to
        && !m
            .transitions
            .iter()
            .any(|u| u.from == t.from && u.input == t.input && u.to != u.from)
}

fn write_module_body(out: &mut String, m: &Module) {
    if !m.state_vars.is_empty() {
        let vars: Vec<&str> = m.state_vars.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(out, "  statevars {}", vars.join(","));
    }
    if !m.input_vars.is_empty() {
        let vars: Vec<&str> = m.input_vars.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(out, "  inputvars {}", vars.join(","));
    }
    for s in &m.states {
        if s.label.is_empty() {
            let _ = writeln!(out, "  state {}", s.name);
        } else {
            let _ = writeln!(out, "  state {} {}", s.name, s.label);
        }
    }
    let _ = writeln!(out, "  init {}", m.states[m.init].name);
    for (i, t) in m.transitions.iter().enumerate() {
        if is_completion_loop(m, i) {
            continue;
        }
        let guard = if t.input.is_empty() {
            String::new()
        } else {
            format!(" when {}", t.input)
        };
        let _ = writeln!(
            out,
            "  trans {} -> {}{}",
            m.states[t.from].name, m.states[t.to].name, guard
        );
    }
}

fn transition_spec(m: &Module, index: usize) -> String {
    let t = &m.transitions[index];
    let guard = if t.input.is_empty() {
        String::new()
    } else {
        format!(" when {}", t.input)
    };
    format!(
        "{} -> {}{}",
        m.states[t.from].name, m.states[t.to].name, guard
    )
}

/// Renders a system (and assumptions) in the format `parse_model_file`
/// reads back; parsing the output reproduces the input exactly.
pub fn serialize(sys: &System, assumptions: &BTreeMap<String, Assumption>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "domain {}", sys.domain.size());
    for agent in &sys.agents {
        let m = &agent.module;
        let _ = writeln!(out, "\nagent {}", m.name);
        write_module_body(&mut out, m);
        let default = Repertoire::singletons(m);
        for q in 0..m.states.len() {
            if agent.repertoire.choices[q] == default.choices[q] {
                continue;
            }
            for option in &agent.repertoire.choices[q] {
                let specs: Vec<String> =
                    option.iter().map(|&ti| transition_spec(m, ti)).collect();
                let _ = writeln!(
                    out,
                    "  choice {}: {}",
                    m.states[q].name,
                    specs.join(" ; ")
                );
            }
        }
    }
    for (name, a) in assumptions {
        let _ = writeln!(out, "\nassumption {name}");
        write_module_body(&mut out, &a.module);
        if !a.accepting.is_empty() {
            let names: Vec<&str> = a
                .accepting
                .iter()
                .map(|&q| a.module.states[q].name.as_str())
                .collect();
            let _ = writeln!(out, "  accepting {}", names.join(","));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_robots, gen_robots_split, gen_tgc};

    #[test]
    fn the_train_gate_benchmark_round_trips() {
        let (sys, assumptions) = gen_tgc(2);
        let text = serialize(&sys, &assumptions);
        let (sys2, assumptions2) = parse_model_file(&text).unwrap();
        assert_eq!(sys, sys2);
        assert_eq!(assumptions, assumptions2);
    }

    #[test]
    fn the_robot_benchmarks_round_trip() {
        for sys in [gen_robots(2, 2, 2), gen_robots_split(2, 2, 2)] {
            let text = serialize(&sys, &BTreeMap::new());
            let (sys2, assumptions2) = parse_model_file(&text).unwrap();
            assert_eq!(sys, sys2);
            assert!(assumptions2.is_empty());
        }
    }

    #[test]
    fn serialized_benchmark_modules_keep_their_shape() {
        let (sys, assumptions) = gen_tgc(2);
        let text = serialize(&sys, &assumptions);
        let (sys2, assumptions2) = parse_model_file(&text).unwrap();
        let train = &sys2.agents[0].module;
        assert_eq!(train.states.len(), 3);
        assert_eq!(train.state_vars.len(), 1);
        assert_eq!(train.input_vars.len(), 1);
        let a012 = &assumptions2["A_012"];
        assert_eq!(a012.accepting, (0..3).collect());
    }

    #[test]
    fn hand_written_files_parse_with_sugar() {
        let text = "
# a switch that one agent toggles and another observes
domain 2

agent toggler
  statevars bit
  inputvars go
  state off bit=0
  state on bit=1
  init off
  trans off -> on when go=1
  trans on -> off            # any go value
  choice on: on -> off when go=0|1

agent watcher
  statevars seen
  inputvars bit
  state idle seen=0
  state busy seen=1
  init idle
  trans idle -> busy when bit=1
  trans busy -> idle when bit=0

assumption fair_toggle
  statevars bit
  inputvars go
  state off bit=0
  state on bit=1
  init off
  trans off -> on when go=1
  trans on -> off
  accepting on
";
        let (sys, assumptions) = parse_model_file(text).unwrap();
        assert_eq!(sys.agents.len(), 2);
        let toggler = &sys.agents[0];
        // off: blocked loop on go=0 plus the real step on go=1.
        // on: two real steps (go wildcard expanded).
        assert_eq!(toggler.module.transitions.len(), 4);
        // The custom choice merges both `on` exits into one option.
        let on = toggler.module.state_index("on").unwrap();
        assert_eq!(toggler.repertoire.choices[on].len(), 1);
        assert_eq!(toggler.repertoire.choices[on][0].len(), 2);
        // The untouched state keeps singleton defaults.
        let off = toggler.module.state_index("off").unwrap();
        assert_eq!(toggler.repertoire.choices[off].len(), 2);
        let fair = &assumptions["fair_toggle"];
        assert_eq!(fair.accepting.len(), 1);
    }

    #[test]
    fn undeclared_guard_variables_are_reported_with_their_line() {
        let text = "domain 2\n\nagent a\n  statevars x\n  state s0 x=0\n  init s0\n  trans s0 -> s0 when y=1\n";
        let e = parse_model_file(text).unwrap_err();
        assert_eq!(e.line, 7);
        assert!(e.message.contains("y"), "{}", e.message);
    }

    #[test]
    fn duplicate_states_are_reported_with_their_line() {
        let text = "domain 2\nagent a\n  statevars x\n  state s0 x=0\n  state s0 x=1\n  init s0\n";
        let e = parse_model_file(text).unwrap_err();
        assert_eq!(e.line, 5);
        assert!(e.message.contains("duplicate state"));
    }

    #[test]
    fn out_of_domain_values_are_reported_with_their_line() {
        let text = "domain 2\nagent a\n  statevars x\n  state s0 x=5\n  init s0\n";
        let e = parse_model_file(text).unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("outside the domain"));
    }

    #[test]
    fn empty_repertoire_groups_are_reported_with_their_line() {
        let text = "domain 2\nagent a\n  statevars x\n  state s0 x=0\n  state s1 x=1\n  init s0\n  trans s0 -> s1\n  choice s0:\n";
        let e = parse_model_file(text).unwrap_err();
        assert_eq!(e.line, 8);
        assert!(e.message.contains("empty repertoire group"));
    }

    #[test]
    fn structural_mistakes_are_rejected() {
        // Missing init.
        let e = parse_model_file("domain 2\nagent a\n  statevars x\n  state s0 x=0\n").unwrap_err();
        assert!(e.message.contains("no init state"));
        // Unknown transition endpoint.
        let e = parse_model_file("domain 2\nagent a\n  statevars x\n  state s0 x=0\n  init s0\n  trans s0 -> zz\n")
            .unwrap_err();
        assert!(e.message.contains("unknown state `zz`"));
        // Accepting in an agent block.
        let e = parse_model_file("domain 2\nagent a\n  statevars x\n  state s0 x=0\n  init s0\n  accepting s0\n")
            .unwrap_err();
        assert!(e.message.contains("accepting"));
        // Choice in an assumption block.
        let e = parse_model_file(
            "domain 2\nassumption b\n  statevars x\n  state s0 x=0\n  init s0\n  choice s0: s0 -> s0\n",
        )
        .unwrap_err();
        assert!(e.message.contains("choice"));
        // Choice listing a transition that is not there.
        let e = parse_model_file(
            "domain 2\nagent a\n  statevars x\n  state s0 x=0\n  state s1 x=1\n  init s0\n  trans s0 -> s1\n  choice s0: s1 -> s0\n",
        )
        .unwrap_err();
        assert!(e.message.contains("different state") || e.message.contains("does not have"));
        // Missing domain.
        let e = parse_model_file("agent a\n  statevars x\n").unwrap_err();
        assert!(e.message.contains("domain"));
    }

    #[test]
    fn label_scope_must_match_declared_state_variables() {
        let e = parse_model_file("domain 2\nagent a\n  statevars x,y\n  state s0 x=0\n  init s0\n")
            .unwrap_err();
        assert_eq!(e.line, 4);
        assert!(e.message.contains("every declared state variable"));
    }
}
