//! `agv` — strategic-ability verification for asynchronous multi-agent
//! systems, monolithically or through assume-guarantee rules.

use agv_core::agv::{
    apply_rule_part, apply_rule_rk, trivial_assumption, AgvReport, KChoice, Partition, Premise,
    RuleVerdict,
};
use agv_core::compose::compose_all;
use agv_core::generators::{gen_robots, gen_robots_split, gen_tgc};
use agv_core::guarantee::guarantees;
use agv_core::logic::{parse_formula, Formula, ParseContext};
use agv_core::module::{reachable, Module};
use agv_core::omega::{find_accepting_lasso, module_to_buchi, LassoWord};
use agv_core::strategy::verify;
use agv_core::system::{Assumption, System};
use agv_core::textfmt::{parse_model_file, serialize};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "agv",
    version,
    about = "Verifies strategic abilities of asynchronous multi-agent systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a formula on the composed system.
    Verify(VerifyArgs),
    /// Derive a coalition objective with an assume-guarantee rule.
    Agverify(AgverifyArgs),
    /// Check that a (sub)composition guarantees an assumption.
    Guarantee(GuaranteeArgs),
    /// Compose the system and report (or export) the result.
    Compose(ComposeArgs),
    /// Composition size and emptiness-search timing.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Model file, or a builtin: tgc<N>, robots:R,L,E, robots-split:R,L,E.
    #[arg(long)]
    model: String,
    /// Print the machine-readable report (single JSON document) on stdout.
    #[arg(long)]
    json: bool,
    /// Strategy semantics. Only `ir` (imperfect information, memoryless)
    /// is implemented.
    #[arg(long, default_value = "ir")]
    semantics: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Formula, e.g. '<<1,2>>(G F x1=1 & G F x2=1)'. Agents are numbered
    /// from 1 in model order.
    #[arg(long)]
    formula: String,
}

#[derive(Args)]
struct AgverifyArgs {
    #[command(flatten)]
    common: Common,
    /// `rk` (one agent per premise) or `part` (explicit partition).
    #[arg(long)]
    rule: String,
    /// Neighborhood depth: a positive integer, or `auto` to grow it until
    /// the guarantee premise holds.
    #[arg(long, default_value = "1")]
    k: String,
    /// Partition for --rule part, e.g. "1,3|2,4" (agent numbers).
    #[arg(long)]
    part: Option<String>,
    /// Objective per part, repeated: --obj 1:"G F s=2". With --rule rk the
    /// tag is the agent number; with --rule part it is the part number.
    #[arg(long = "obj", value_name = "TAG:FORMULA")]
    obj: Vec<String>,
    /// Assumption per part, repeated: --assume 1:A_all. The value is an
    /// assumption name from the model, a file containing one assumption
    /// block, or `trivial` (the rest of the system, fully accepting).
    #[arg(long = "assume", value_name = "TAG:NAME")]
    assume: Vec<String>,
    /// Drop coalition members from premise-2 neighborhoods.
    #[arg(long)]
    exclude_coalition: bool,
}

#[derive(Args)]
struct GuaranteeArgs {
    #[command(flatten)]
    common: Common,
    /// Assumption name from the model, a file with one assumption block,
    /// or `trivial` (complement of --agents, fully accepting).
    #[arg(long)]
    assumption: String,
    /// Agents to compose (numbers from 1, comma-separated); default all.
    #[arg(long)]
    agents: Option<String>,
}

#[derive(Args)]
struct ComposeArgs {
    #[command(flatten)]
    common: Common,
    /// Write the composite (as a one-agent model file) to this path.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Optional formula to time instead of the plain emptiness search.
    #[arg(long)]
    formula: Option<String>,
}

/// One machine-readable report shape for every command.
#[derive(serde::Serialize)]
struct Report {
    result: String,
    states: usize,
    transitions: usize,
    strategies_examined: u64,
    time_ms: u128,
    witness: serde_json::Value,
    counterexample: Option<LassoWord>,
}

impl Report {
    fn new(result: &str) -> Report {
        Report {
            result: result.to_string(),
            states: 0,
            transitions: 0,
            strategies_examined: 0,
            time_ms: 0,
            witness: serde_json::Value::Null,
            counterexample: None,
        }
    }

    fn exit_code(&self) -> u8 {
        match self.result.as_str() {
            "true" | "derived" => 0,
            "false" => 1,
            _ => 2,
        }
    }

    fn print_human(&self, extra: &[String]) {
        println!("result: {}", self.result);
        println!("states: {}   transitions: {}", self.states, self.transitions);
        if self.strategies_examined > 0 {
            println!("strategies examined: {}", self.strategies_examined);
        }
        println!("time: {} ms", self.time_ms);
        if let serde_json::Value::Object(agents) = &self.witness {
            println!("witness:");
            for (agent, states) in agents {
                println!("  {agent}:");
                if let serde_json::Value::Object(states) = states {
                    for (state, moves) in states {
                        let rendered = match moves {
                            serde_json::Value::Array(items) => items
                                .iter()
                                .filter_map(|v| v.as_str())
                                .collect::<Vec<_>>()
                                .join(" ; "),
                            other => other.to_string(),
                        };
                        println!("    {state}: {rendered}");
                    }
                }
            }
        }
        if let Some(cex) = &self.counterexample {
            println!("counterexample: {cex}");
        }
        for line in extra {
            println!("{line}");
        }
    }
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(3)
}

fn emit(report: Report, extra: Vec<String>, json: bool) -> ExitCode {
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    } else {
        report.print_human(&extra);
    }
    ExitCode::from(report.exit_code())
}

fn load_model(spec: &str) -> Result<(System, BTreeMap<String, Assumption>), String> {
    if let Some(rest) = spec.strip_prefix("tgc") {
        if let Ok(n) = rest.parse::<usize>() {
            if n == 0 {
                return Err("tgc needs at least one train (tgc1, tgc2, …)".into());
            }
            return Ok(gen_tgc(n));
        }
    }
    for (prefix, split) in [("robots-split:", true), ("robots:", false)] {
        if let Some(rest) = spec.strip_prefix(prefix) {
            let nums: Vec<&str> = rest.split(',').collect();
            let [r, l, e] = nums[..] else {
                return Err(format!("expected {prefix}R,L,E"));
            };
            let parse = |s: &str, what: &str| -> Result<usize, String> {
                match s.trim().parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v),
                    _ => Err(format!("{what} must be a positive number, got `{s}`")),
                }
            };
            let r = parse(r, "robots")?;
            let l = parse(l, "locations")?;
            let e = parse(e, "energy")? as u32;
            let sys = if split {
                gen_robots_split(r, l, e)
            } else {
                gen_robots(r, l, e)
            };
            return Ok((sys, BTreeMap::new()));
        }
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| format!("cannot read model `{spec}`: {e}"))?;
    parse_model_file(&text).map_err(|e| format!("{spec}: {e}"))
}

fn check_semantics(s: &str) -> Result<(), String> {
    if s == "ir" {
        Ok(())
    } else {
        Err(format!(
            "unsupported semantics `{s}`: only `ir` (imperfect information, memoryless) is available"
        ))
    }
}

/// Agent numbers are 1-based on the command line and in formulas.
fn parse_agent_list(sys: &System, text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        let n: usize = piece
            .parse()
            .map_err(|_| format!("`{piece}` is not an agent number"))?;
        if n == 0 || n > sys.agents.len() {
            return Err(format!(
                "agent {n} does not exist (the model has {} agents)",
                sys.agents.len()
            ));
        }
        out.push(n - 1);
    }
    if out.is_empty() {
        return Err("empty agent list".into());
    }
    Ok(out)
}

fn resolve_assumption(
    sys: &System,
    named: &BTreeMap<String, Assumption>,
    coalition: &[usize],
    spec: &str,
) -> Result<Assumption, String> {
    if let Some(a) = named.get(spec) {
        return Ok(a.clone());
    }
    if spec == "trivial" {
        let coalition: Vec<usize> = coalition.to_vec();
        return trivial_assumption(sys, &coalition).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|_| format!("`{spec}` is neither a model assumption nor a readable file"))?;
    let (_, mut assumptions) =
        parse_model_file(&text).map_err(|e| format!("{spec}: {e}"))?;
    match assumptions.len() {
        1 => Ok(assumptions.pop_first().expect("one entry").1),
        0 => Err(format!("`{spec}` contains no assumption block")),
        n => Err(format!(
            "`{spec}` contains {n} assumptions; name one of them in the main model instead"
        )),
    }
}

/// `TAG:VALUE` as used by --obj and --assume.
fn split_tagged(arg: &str) -> Result<(usize, &str), String> {
    let Some((tag, value)) = arg.split_once(':') else {
        return Err(format!("expected TAG:VALUE, found `{arg}`"));
    };
    let tag: usize = tag
        .trim()
        .parse()
        .map_err(|_| format!("`{tag}` is not a part/agent number"))?;
    if tag == 0 {
        return Err("tags are numbered from 1".into());
    }
    Ok((tag, value))
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    if let Err(e) = check_semantics(&args.common.semantics) {
        return fail(e);
    }
    let (sys, _) = match load_model(&args.common.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let formula = match parse_formula(&args.formula, &ParseContext::for_system(&sys)) {
        Ok(f) => f,
        Err(e) => return fail(format!("formula: {e}")),
    };
    let outcome = match verify(&sys, &formula) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let mut report = Report::new(if outcome.verdict { "true" } else { "false" });
    report.states = outcome.stats.states;
    report.transitions = outcome.stats.transitions;
    report.strategies_examined = outcome.stats.strategies_examined;
    report.time_ms = outcome.stats.time_ms;
    if let Some(w) = &outcome.witness {
        report.witness =
            serde_json::to_value(w.describe(&sys)).expect("witness serializes");
    }
    report.counterexample = outcome.counterexample;
    emit(report, Vec::new(), args.common.json)
}

fn run_agverify(args: AgverifyArgs) -> ExitCode {
    if let Err(e) = check_semantics(&args.common.semantics) {
        return fail(e);
    }
    let (sys, named) = match load_model(&args.common.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let k = match args.k.as_str() {
        "auto" => KChoice::Auto,
        text => match text.parse::<usize>() {
            Ok(v) if v >= 1 => KChoice::Fixed(v),
            _ => return fail(format!("--k takes a positive integer or `auto`, got `{text}`")),
        },
    };

    // Determine the parts: explicit for --rule part, singleton per tagged
    // agent for --rule rk.
    let parts: Vec<Vec<usize>> = match args.rule.as_str() {
        "part" => {
            let Some(part) = &args.part else {
                return fail("--rule part needs --part \"a,b|c,d\"");
            };
            let mut parts = Vec::new();
            for group in part.split('|') {
                match parse_agent_list(&sys, group) {
                    Ok(p) => parts.push(p),
                    Err(e) => return fail(format!("--part: {e}")),
                }
            }
            parts
        }
        "rk" => {
            let mut agents: Vec<usize> = Vec::new();
            for obj in &args.obj {
                let (tag, _) = match split_tagged(obj) {
                    Ok(t) => t,
                    Err(e) => return fail(format!("--obj: {e}")),
                };
                if tag > sys.agents.len() {
                    return fail(format!("--obj: agent {tag} does not exist"));
                }
                if !agents.contains(&(tag - 1)) {
                    agents.push(tag - 1);
                }
            }
            if agents.is_empty() {
                return fail("--rule rk needs at least one --obj AGENT:FORMULA");
            }
            agents.sort_unstable();
            agents.iter().map(|&a| vec![a]).collect()
        }
        other => return fail(format!("unknown rule `{other}` (use rk or part)")),
    };
    let partition = match Partition::new(parts.clone()) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    let coalition: Vec<usize> = partition.coalition().into_iter().collect();

    // Attach objectives and assumptions to parts by tag.
    let tag_to_part = |tag: usize| -> Result<usize, String> {
        match args.rule.as_str() {
            "rk" => parts
                .iter()
                .position(|p| p == &vec![tag - 1])
                .ok_or_else(|| format!("agent {tag} carries no objective")),
            _ => {
                if tag > parts.len() {
                    Err(format!("part {tag} does not exist ({} parts)", parts.len()))
                } else {
                    Ok(tag - 1)
                }
            }
        }
    };
    let ctx = ParseContext::for_system(&sys);
    let mut objectives: Vec<Vec<Formula>> = vec![Vec::new(); parts.len()];
    for obj in &args.obj {
        let (tag, text) = match split_tagged(obj) {
            Ok(t) => t,
            Err(e) => return fail(format!("--obj: {e}")),
        };
        let pi = match tag_to_part(tag) {
            Ok(p) => p,
            Err(e) => return fail(format!("--obj: {e}")),
        };
        match parse_formula(text, &ctx) {
            Ok(f) => objectives[pi].push(f),
            Err(e) => return fail(format!("--obj {tag}: {e}")),
        }
    }
    let mut assumptions: Vec<Option<Assumption>> = vec![None; parts.len()];
    for assume in &args.assume {
        let (tag, spec) = match split_tagged(assume) {
            Ok(t) => t,
            Err(e) => return fail(format!("--assume: {e}")),
        };
        let pi = match tag_to_part(tag) {
            Ok(p) => p,
            Err(e) => return fail(format!("--assume: {e}")),
        };
        if assumptions[pi].is_some() {
            return fail(format!("--assume: part {tag} has two assumptions"));
        }
        match resolve_assumption(&sys, &named, &coalition, spec.trim()) {
            Ok(a) => assumptions[pi] = Some(a),
            Err(e) => return fail(format!("--assume: {e}")),
        }
    }
    let assumptions: Vec<Assumption> = match assumptions
        .into_iter()
        .enumerate()
        .map(|(pi, a)| a.ok_or(pi))
        .collect::<Result<_, _>>()
    {
        Ok(a) => a,
        Err(pi) => {
            return fail(format!(
                "part {} has no assumption (use --assume {}:NAME or --assume {}:trivial)",
                pi + 1,
                pi + 1,
                pi + 1
            ))
        }
    };

    let report = if args.rule == "rk" {
        let flat: Vec<Formula> = objectives
            .iter()
            .map(|group| {
                group
                    .iter()
                    .cloned()
                    .reduce(Formula::and)
                    .unwrap_or(Formula::True)
            })
            .collect();
        apply_rule_rk(
            &sys,
            &coalition,
            &flat,
            &assumptions,
            k,
            args.exclude_coalition,
        )
    } else {
        apply_rule_part(
            &sys,
            &partition,
            &objectives,
            &assumptions,
            k,
            args.exclude_coalition,
        )
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let (out, extra) = render_agv_report(&sys, &report);
    emit(out, extra, args.common.json)
}

fn render_agv_report(sys: &System, report: &AgvReport) -> (Report, Vec<String>) {
    let mut out = Report::new(match report.verdict {
        RuleVerdict::Derived => "derived",
        RuleVerdict::PremiseFailed => "premise-failed",
    });
    out.time_ms = report.time_ms;
    let mut witness_map = serde_json::Map::new();
    let mut extra = vec![format!("conclusion: {}", report.conclusion)];
    for (pi, part) in report.parts.iter().enumerate() {
        out.states = out.states.max(part.states);
        out.transitions = out.transitions.max(part.transitions);
        out.strategies_examined += part.strategies_examined;
        let names: Vec<&str> = part
            .part
            .iter()
            .map(|&i| sys.agents[i].name())
            .collect();
        extra.push(format!(
            "part {} {{{}}}: objective {} under {}: strategy {}, guarantee {} (k={}, base {{{}}})",
            pi + 1,
            names.join(","),
            part.objective,
            part.assumption,
            if part.strategy_holds { "ok" } else { "FAILED" },
            if part.guarantee_holds { "ok" } else { "FAILED" },
            part.k_used,
            part.guarantee_base
                .iter()
                .map(|&i| sys.agents[i].name())
                .collect::<Vec<_>>()
                .join(",")
        ));
        if let Some(w) = &part.strategy_witness {
            for (agent, states) in w.describe(sys) {
                witness_map.insert(
                    agent,
                    serde_json::to_value(states).expect("witness serializes"),
                );
            }
        }
        if out.counterexample.is_none() {
            out.counterexample = part.guarantee_counterexample.clone();
        }
    }
    if report.verdict == RuleVerdict::Derived && !witness_map.is_empty() {
        out.witness = serde_json::Value::Object(witness_map);
    }
    if let Some((pi, premise)) = report.failure {
        let part = &report.parts[pi];
        let names: Vec<&str> = part
            .part
            .iter()
            .map(|&i| sys.agents[i].name())
            .collect();
        extra.push(format!(
            "inconclusive: premise {} ({}) failed for part {} {{{}}}",
            match premise {
                Premise::Strategy => 1,
                Premise::Guarantee => 2,
            },
            match premise {
                Premise::Strategy => "strategy synthesis",
                Premise::Guarantee => "guarantee",
            },
            pi + 1,
            names.join(",")
        ));
    }
    (out, extra)
}

fn run_guarantee(args: GuaranteeArgs) -> ExitCode {
    if let Err(e) = check_semantics(&args.common.semantics) {
        return fail(e);
    }
    let (sys, named) = match load_model(&args.common.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let agents: Vec<usize> = match &args.agents {
        None => (0..sys.agents.len()).collect(),
        Some(list) => match parse_agent_list(&sys, list) {
            Ok(a) => a,
            Err(e) => return fail(format!("--agents: {e}")),
        },
    };
    // For `trivial`, the coalition is everyone *not* composed here.
    let coalition: Vec<usize> =
        (0..sys.agents.len()).filter(|i| !agents.contains(i)).collect();
    let assumption = match resolve_assumption(&sys, &named, &coalition, &args.assumption) {
        Ok(a) => a,
        Err(e) => return fail(format!("--assumption: {e}")),
    };
    let start = Instant::now();
    let module = match agv_core::agv::comp_module(&sys, &agents) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let (states, transitions, _) = reachable(&module);
    let outcome = match guarantees(&module, &assumption) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    let mut report = Report::new(if outcome.holds { "true" } else { "false" });
    report.states = states;
    report.transitions = transitions;
    report.time_ms = start.elapsed().as_millis();
    report.counterexample = outcome.counterexample;
    emit(report, Vec::new(), args.common.json)
}

fn composed(sys: &System) -> Result<Module, String> {
    let modules: Vec<&Module> = sys.agents.iter().map(|a| &a.module).collect();
    compose_all(&modules)
        .map(|(m, _)| m)
        .map_err(|e| e.to_string())
}

fn run_compose(args: ComposeArgs) -> ExitCode {
    if let Err(e) = check_semantics(&args.common.semantics) {
        return fail(e);
    }
    let (sys, _) = match load_model(&args.common.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let start = Instant::now();
    let module = match composed(&sys) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let declared = module.states.len();
    let (states, transitions, reachable_module) = reachable(&module);
    let mut report = Report::new("true");
    report.states = states;
    report.transitions = transitions;
    report.time_ms = start.elapsed().as_millis();
    if let Some(path) = &args.out {
        let one_agent = System {
            domain: sys.domain,
            agents: vec![agv_core::system::Agent {
                repertoire: agv_core::system::Repertoire::singletons(&reachable_module),
                module: reachable_module,
            }],
        };
        let text = serialize(&one_agent, &BTreeMap::new());
        if let Err(e) = std::fs::write(path, text) {
            return fail(format!("cannot write `{path}`: {e}"));
        }
    }
    let extra = vec![format!(
        "declared states: {declared} (reachable {states}), reachable transitions: {transitions}"
    )];
    emit(report, extra, args.common.json)
}

fn run_bench(args: BenchArgs) -> ExitCode {
    if let Err(e) = check_semantics(&args.common.semantics) {
        return fail(e);
    }
    let (sys, _) = match load_model(&args.common.model) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let module = match composed(&sys) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let (states, transitions, reachable_module) = reachable(&module);
    let mut report = Report::new("true");
    report.states = states;
    report.transitions = transitions;
    let dfs = Instant::now();
    match &args.formula {
        None => {
            let all = (0..reachable_module.states.len()).collect();
            let automaton = module_to_buchi(&reachable_module, all);
            let _ = find_accepting_lasso(&automaton);
        }
        Some(text) => {
            let formula = match parse_formula(text, &ParseContext::for_system(&sys)) {
                Ok(f) => f,
                Err(e) => return fail(format!("formula: {e}")),
            };
            match verify(&sys, &formula) {
                Ok(outcome) => {
                    report.result = if outcome.verdict { "true" } else { "false" }.into();
                    report.strategies_examined = outcome.stats.strategies_examined;
                }
                Err(e) => return fail(e),
            }
        }
    }
    report.time_ms = dfs.elapsed().as_millis();
    let line = format!(
        "#st {}   #tr {}   DFS {} ms",
        states, transitions, report.time_ms
    );
    if !args.common.json && args.formula.is_none() {
        // Plain timing run: the verdict block would be noise, print the tally alone.
        println!("{line}");
        return ExitCode::from(report.exit_code());
    }
    emit(report, vec![line], args.common.json)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Agverify(args) => run_agverify(args),
        Command::Guarantee(args) => run_guarantee(args),
        Command::Compose(args) => run_compose(args),
        Command::Bench(args) => run_bench(args),
    }
}
