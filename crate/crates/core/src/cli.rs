//! Command-line front end. Exit codes: 0 positive verdict, 1 negative
//! verdict, 2 usage or I/O error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::checker::{
    check_eventual_property, check_stable, explore, initial_set_with_leader, random_states,
    simulate, simulate_on_graph, ConfigProperty, Counterexample, GraphRun, InteractionGraph,
    StableVerdict, DEFAULT_NODE_BUDGET,
};
use crate::error::{Error, Result};
use crate::games::{recognize, Certificate, Dressing, GameMatrix, RecognitionVerdict};
use crate::library;
use crate::predicate::Predicate;
use crate::protocol::{Configuration, InputMultiset, Protocol, StateId};
use crate::search;
use crate::text::{parse_matrix, parse_protocol, print_matrix, print_protocol};
use crate::transform::symmetrize;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "popgame", about = "Population protocols derived from symmetric games")]
struct Cli {
    /// Emit one JSON object per verdict instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check stable computation of a predicate over every input of each size.
    Check {
        /// Protocol file, or `lib:NAME` for a catalog entry.
        #[arg(long)]
        protocol: String,
        #[arg(long)]
        predicate: String,
        /// Population size `N` or range `A..B`.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Check that exactly one leader eventually remains.
    LeaderCheck {
        #[arg(long)]
        protocol: String,
        /// Comma-separated leader states.
        #[arg(long)]
        leader_states: String,
        #[arg(long)]
        n: String,
        /// States allowed in initial configurations (default: all).
        #[arg(long)]
        initial_states: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Derive the protocol induced by a payoff matrix.
    Derive {
        #[arg(long)]
        matrix: PathBuf,
        /// Input map, e.g. "sigma->s zero->z" (default: each state is its own symbol).
        #[arg(long)]
        inputs: Option<String>,
        /// States outputting 1, e.g. "a=1 b=0".
        #[arg(long)]
        outputs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a protocol is induced by some game.
    Recognize {
        #[arg(long)]
        protocol: String,
    },
    /// Compile a protocol into a symmetric one.
    Symmetrize {
        #[arg(long)]
        protocol: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the random scheduler, on the whole population or on a graph.
    Simulate {
        #[arg(long)]
        protocol: String,
        /// Input counts, e.g. "sigma:3,zero:2".
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// `ring:N`, `complete:N` or `file:PATH`.
        #[arg(long)]
        graph: Option<String>,
        /// Graph runs are absorbed once every vertex is in this state.
        #[arg(long)]
        absorb: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Search every small game-derived protocol for one computing a predicate.
    Enumerate {
        #[arg(long, default_value_t = 3)]
        states: usize,
        /// Predicate over the symbols `sigma` and `zero`.
        #[arg(long)]
        predicate: String,
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// List the built-in protocols.
    Catalog,
    /// Write a built-in protocol (and its matrix, if any) to files.
    Export {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// Matrix destination (default: OUT with a `.matrix` extension).
        #[arg(long)]
        matrix_out: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    configure_threads();
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("PP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let json = cli.json;
    match cli.command {
        Command::Check {
            protocol,
            predicate,
            n,
            budget,
        } => cmd_check(out, json, &protocol, &predicate, &n, budget),
        Command::LeaderCheck {
            protocol,
            leader_states,
            n,
            initial_states,
            budget,
        } => cmd_leader_check(out, json, &protocol, &leader_states, &n, initial_states.as_deref(), budget),
        Command::Derive {
            matrix,
            inputs,
            outputs,
            out: dest,
        } => cmd_derive(out, json, &matrix, inputs.as_deref(), outputs.as_deref(), dest.as_deref()),
        Command::Recognize { protocol } => cmd_recognize(out, json, &protocol),
        Command::Symmetrize { protocol, out: dest } => {
            let p = load_protocol(&protocol)?;
            let s = symmetrize(&p);
            emit_file(out, dest.as_deref(), &print_protocol(&s))?;
            Ok(0)
        }
        Command::Simulate {
            protocol,
            input,
            steps,
            seed,
            graph,
            absorb,
            budget,
        } => cmd_simulate(
            out,
            json,
            &protocol,
            input.as_deref(),
            steps,
            seed,
            graph.as_deref(),
            absorb.as_deref(),
            budget,
        ),
        Command::Enumerate {
            states,
            predicate,
            n_max,
            report,
        } => cmd_enumerate(out, json, states, &predicate, n_max, report.as_deref()),
        Command::Catalog => cmd_catalog(out, json),
        Command::Export {
            name,
            out: dest,
            matrix_out,
        } => cmd_export(out, &name, &dest, matrix_out.as_deref()),
    }
}

fn load_protocol(source: &str) -> Result<Protocol> {
    if let Some(name) = source.strip_prefix("lib:") {
        return Ok(library::get(name)?.protocol);
    }
    parse_protocol(&std::fs::read_to_string(source)?)
}

fn emit_file(out: &mut dyn Write, dest: Option<&Path>, text: &str) -> Result<()> {
    match dest {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// `N` or `A..B` (inclusive).
pub fn parse_range(text: &str) -> Result<Vec<u32>> {
    let bad = || Error::invalid(format!("bad size range `{text}`"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = text.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn config_json(p: &Protocol, c: &Configuration) -> Value {
    let map: serde_json::Map<String, Value> = c
        .support()
        .map(|q| (p.state_name(q).to_string(), json!(c.count(q))))
        .collect();
    Value::Object(map)
}

fn input_json(p: &Protocol, x: &InputMultiset) -> Value {
    let map: serde_json::Map<String, Value> = p
        .symbols()
        .filter(|&s| x.count(s) > 0)
        .map(|s| (p.symbol_name(s).to_string(), json!(x.count(s))))
        .collect();
    Value::Object(map)
}

fn input_text(p: &Protocol, x: &InputMultiset) -> String {
    let parts: Vec<String> = p
        .symbols()
        .filter(|&s| x.count(s) > 0)
        .map(|s| format!("{}:{}", p.symbol_name(s), x.count(s)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn counterexample_json(p: &Protocol, c: &Counterexample) -> Value {
    json!({
        "input": c.input.as_ref().map(|x| input_json(p, x)),
        "initial": config_json(p, &c.initial),
        "configuration": config_json(p, &c.configuration),
        "bottom_scc": c.bottom_scc.iter().map(|b| config_json(p, b)).collect::<Vec<_>>(),
        "observed": c.observed.to_string(),
        "expected": c.expected.map(u8::from),
    })
}

fn counterexample_text(p: &Protocol, c: &Counterexample) -> String {
    let mut s = String::new();
    if let Some(x) = &c.input {
        s.push_str(&format!("input={} ", input_text(p, x)));
    } else {
        s.push_str(&format!("initial={} ", c.initial.display(p)));
    }
    s.push_str(&format!("configuration={}", c.configuration.display(p)));
    if let Some(e) = c.expected {
        s.push_str(&format!(" output={} expected={}", c.observed, u8::from(e)));
    }
    let scc: Vec<String> = c.bottom_scc.iter().map(|b| b.display(p).to_string()).collect();
    s.push_str(&format!(" bottom_scc=[{}]", scc.join(" ")));
    s
}

fn report_verdict(
    out: &mut dyn Write,
    json: bool,
    command: &str,
    p: &Protocol,
    n: u32,
    verdict: &StableVerdict,
) -> Result<()> {
    if json {
        let obj = json!({
            "command": command,
            "n": n,
            "verdict": if verdict.computes() { "computes" } else { "fails" },
            "witness": Value::Null,
            "counterexample": verdict.counterexample().map(|c| counterexample_json(p, c)),
        });
        writeln!(out, "{obj}")?;
    } else {
        match verdict.counterexample() {
            None => writeln!(out, "n={n} computes")?,
            Some(c) => writeln!(out, "n={n} fails {}", counterexample_text(p, c))?,
        }
    }
    Ok(())
}

fn cmd_check(
    out: &mut dyn Write,
    json: bool,
    protocol: &str,
    predicate: &str,
    sizes: &str,
    budget: usize,
) -> Result<i32> {
    let p = load_protocol(protocol)?;
    let pred = Predicate::parse(predicate, p.symbol_names())?;
    let mut code = 0;
    for n in parse_range(sizes)? {
        let verdict = check_stable(&p, &pred, n, budget)?;
        if !verdict.computes() {
            code = 1;
        }
        report_verdict(out, json, "check", &p, n, &verdict)?;
    }
    Ok(code)
}

fn state_list(p: &Protocol, text: &str) -> Result<BTreeSet<StateId>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| {
            p.state_id(name)
                .ok_or_else(|| Error::invalid(format!("unknown state `{name}`")))
        })
        .collect()
}

fn cmd_leader_check(
    out: &mut dyn Write,
    json: bool,
    protocol: &str,
    leaders: &str,
    sizes: &str,
    initial: Option<&str>,
    budget: usize,
) -> Result<i32> {
    let p = load_protocol(protocol)?;
    let leaders = state_list(&p, leaders)?;
    if leaders.is_empty() {
        return Err(Error::invalid("no leader states given"));
    }
    let allowed = match initial {
        Some(text) => state_list(&p, text)?,
        None => p.states().collect(),
    };
    let prop = ConfigProperty::ExactlyOneIn(leaders.clone());
    let mut code = 0;
    for n in parse_range(sizes)? {
        let set = initial_set_with_leader(&p, &allowed, &leaders, n);
        let verdict = check_eventual_property(&p, &set, &prop, budget)?;
        if !verdict.computes() {
            code = 1;
        }
        report_verdict(out, json, "leader-check", &p, n, &verdict)?;
    }
    Ok(code)
}

fn parse_dressing(inputs: Option<&str>, outputs: Option<&str>) -> Result<Dressing> {
    let mut d = Dressing::default();
    if let Some(text) = inputs {
        for item in text.split_whitespace() {
            let (s, q) = item
                .split_once("->")
                .ok_or_else(|| Error::invalid(format!("expected `symbol->state`, got `{item}`")))?;
            d.inputs.push((s.to_string(), q.to_string()));
        }
    }
    if let Some(text) = outputs {
        for item in text.split_whitespace() {
            let (q, bit) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected `state=bit`, got `{item}`")))?;
            let bit = match bit {
                "0" => false,
                "1" => true,
                _ => return Err(Error::invalid(format!("output must be 0 or 1, got `{bit}`"))),
            };
            d.outputs.insert(q.to_string(), bit);
        }
    }
    Ok(d)
}

fn cmd_derive(
    out: &mut dyn Write,
    json: bool,
    matrix: &Path,
    inputs: Option<&str>,
    outputs: Option<&str>,
    dest: Option<&Path>,
) -> Result<i32> {
    let m = parse_matrix(&std::fs::read_to_string(matrix)?)?;
    let p = m.derive(&parse_dressing(inputs, outputs)?)?;
    if json {
        let rules: Vec<String> = p.rules().iter().map(|r| p.display_rule(r).to_string()).collect();
        let obj = json!({
            "command": "derive",
            "verdict": "derived",
            "symmetric": p.is_symmetric(),
            "deterministic": p.is_deterministic(),
            "rules": rules,
        });
        writeln!(out, "{obj}")?;
        if let Some(path) = dest {
            std::fs::write(path, print_protocol(&p))?;
        }
    } else {
        emit_file(out, dest, &print_protocol(&p))?;
    }
    Ok(0)
}

fn matrix_json(m: &GameMatrix) -> Value {
    json!({
        "states": m.states(),
        "rows": m.rows().iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

fn certificate_json(p: &Protocol, c: &Certificate) -> Value {
    let var = |v: Option<crate::games::Var>| match v {
        Some(v) => json!([p.state_name(v.row), p.state_name(v.column)]),
        None => Value::Null,
    };
    json!({
        "column": p.state_name(c.column),
        "slack": c.slack(),
        "steps": c.steps.iter().map(|s| json!({
            "plus": var(s.inequality.plus),
            "minus": var(s.inequality.minus),
            "bound": s.inequality.bound,
            "state": p.state_name(s.constraint.state),
            "successors": s.constraint.successors.iter().map(|&q| p.state_name(q)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_recognize(out: &mut dyn Write, json: bool, protocol: &str) -> Result<i32> {
    let p = load_protocol(protocol)?;
    let verdict = recognize(&p);
    let code = if verdict.is_pavlovian() { 0 } else { 1 };
    if json {
        let obj = match &verdict {
            RecognitionVerdict::Pavlovian(m) => json!({
                "command": "recognize",
                "verdict": "pavlovian",
                "witness": matrix_json(m),
                "counterexample": Value::Null,
            }),
            RecognitionVerdict::NotSymmetric { rule, missing } => json!({
                "command": "recognize",
                "verdict": "not_symmetric",
                "witness": Value::Null,
                "counterexample": {
                    "rule": p.display_rule(rule).to_string(),
                    "missing": p.display_rule(missing).to_string(),
                },
            }),
            RecognitionVerdict::NotProduct { pair } => json!({
                "command": "recognize",
                "verdict": "not_product",
                "witness": Value::Null,
                "counterexample": { "pair": [p.state_name(pair[0]), p.state_name(pair[1])] },
            }),
            RecognitionVerdict::Infeasible(cert) => json!({
                "command": "recognize",
                "verdict": "infeasible",
                "witness": Value::Null,
                "counterexample": certificate_json(&p, cert),
            }),
        };
        writeln!(out, "{obj}")?;
    } else {
        match &verdict {
            RecognitionVerdict::Pavlovian(m) => {
                writeln!(out, "pavlovian; witness payoff matrix:")?;
                write!(out, "{}", print_matrix(m))?;
            }
            RecognitionVerdict::NotSymmetric { rule, missing } => writeln!(
                out,
                "not symmetric: `{}` has no mirror `{}`",
                p.display_rule(rule),
                p.display_rule(missing)
            )?,
            RecognitionVerdict::NotProduct { pair } => writeln!(
                out,
                "not induced by a game: successors of `{} {}` are not independent per agent",
                p.state_name(pair[0]),
                p.state_name(pair[1])
            )?,
            RecognitionVerdict::Infeasible(cert) => {
                writeln!(out, "infeasible; {}", cert.display(&p))?;
            }
        }
    }
    Ok(code)
}

fn parse_input(p: &Protocol, text: &str) -> Result<InputMultiset> {
    let mut counts = vec![0u32; p.num_symbols()];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (sym, count) = item
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("expected `symbol:count`, got `{item}`")))?;
        let id = p
            .symbol_id(sym.trim())
            .ok_or_else(|| Error::invalid(format!("unknown input symbol `{sym}`")))?;
        counts[id.index()] += count
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::invalid(format!("bad count `{count}`")))?;
    }
    InputMultiset::new(counts)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    out: &mut dyn Write,
    json: bool,
    protocol: &str,
    input: Option<&str>,
    steps: u64,
    seed: u64,
    graph: Option<&str>,
    absorb: Option<&str>,
    budget: usize,
) -> Result<i32> {
    let p = load_protocol(protocol)?;
    match graph {
        Some(spec) => {
            let g = InteractionGraph::from_spec(spec)?;
            let initial: Vec<StateId> = match input {
                Some(text) => {
                    let x = parse_input(&p, text)?;
                    if x.size() as usize != g.vertices() {
                        return Err(Error::invalid(format!(
                            "input has {} agents, graph has {} vertices",
                            x.size(),
                            g.vertices()
                        )));
                    }
                    p.symbols()
                        .flat_map(|s| std::iter::repeat_n(p.input_of(s), x.count(s) as usize))
                        .collect()
                }
                None => {
                    let choices: BTreeSet<StateId> = p.symbols().map(|s| p.input_of(s)).collect();
                    let choices: Vec<StateId> = if choices.is_empty() {
                        p.states().collect()
                    } else {
                        choices.into_iter().collect()
                    };
                    random_states(g.vertices(), &choices, seed ^ 0x9e37_79b9_7f4a_7c15)
                }
            };
            let target = match absorb {
                Some(name) => {
                    let q = p
                        .state_id(name)
                        .ok_or_else(|| Error::invalid(format!("unknown state `{name}`")))?;
                    Some(vec![q; g.vertices()])
                }
                None => None,
            };
            let run = simulate_on_graph(&p, &g, &initial, target.as_deref(), steps, seed)?;
            let names: Vec<&str> = run.states().iter().map(|&q| p.state_name(q)).collect();
            let (kind, taken) = match &run {
                GraphRun::Absorbed { steps, .. } => ("absorbed", *steps),
                GraphRun::Timeout { steps, .. } => ("timeout", *steps),
            };
            if json {
                let obj = json!({
                    "command": "simulate",
                    "verdict": kind,
                    "steps": taken,
                    "states": names,
                    "witness": Value::Null,
                    "counterexample": Value::Null,
                });
                writeln!(out, "{obj}")?;
            } else {
                writeln!(out, "{kind} steps={taken} states={}", names.join(" "))?;
            }
            Ok(if run.absorbed() { 0 } else { 1 })
        }
        None => {
            let text = input.ok_or_else(|| Error::invalid("--input is required without --graph"))?;
            let x = parse_input(&p, text)?;
            let c0 = p.initial_configuration(&x)?;
            let certified = explore(&p, &c0, budget).ok();
            let summary = simulate(&p, &c0, steps, seed, certified.as_ref());
            let settled = summary.in_bottom_scc.unwrap_or(summary.silent);
            if json {
                let obj = json!({
                    "command": "simulate",
                    "verdict": if settled { "settled" } else { "unsettled" },
                    "steps": summary.steps,
                    "silent": summary.silent,
                    "in_bottom_scc": summary.in_bottom_scc,
                    "final": config_json(&p, &summary.final_configuration),
                    "output": p.output_of_configuration(&summary.final_configuration).to_string(),
                    "witness": Value::Null,
                    "counterexample": Value::Null,
                });
                writeln!(out, "{obj}")?;
            } else {
                let bottom = match summary.in_bottom_scc {
                    Some(true) => "yes",
                    Some(false) => "no",
                    None => "unknown",
                };
                writeln!(
                    out,
                    "steps={} final={} output={} silent={} in_bottom_scc={}",
                    summary.steps,
                    summary.final_configuration.display(&p),
                    p.output_of_configuration(&summary.final_configuration),
                    summary.silent,
                    bottom
                )?;
            }
            Ok(if settled { 0 } else { 1 })
        }
    }
}

fn cmd_enumerate(
    out: &mut dyn Write,
    json: bool,
    states: usize,
    predicate: &str,
    n_max: u32,
    report: Option<&Path>,
) -> Result<i32> {
    let pred = Predicate::parse(predicate, &search::harness_symbols())?;
    let result = search::falsify(&pred, states, n_max)?;
    let mut text = String::new();
    for s in &result.survivors {
        if json {
            let obj = json!({
                "command": "enumerate",
                "verdict": "survivor",
                "witness": {
                    "index": s.index,
                    "protocol": print_protocol(&s.protocol),
                },
                "counterexample": Value::Null,
            });
            text.push_str(&format!("{obj}\n"));
        } else {
            let rules: Vec<String> = s
                .protocol
                .non_identity_rules()
                .iter()
                .map(|r| s.protocol.display_rule(r).to_string())
                .collect();
            let outputs: Vec<String> = s
                .protocol
                .states()
                .map(|q| format!("{}={}", s.protocol.state_name(q), u8::from(s.protocol.output_of(q))))
                .collect();
            text.push_str(&format!(
                "survivor index={} inputs=sigma->{},zero->{} outputs={} rules=[{}]\n",
                s.index,
                s.protocol.state_name(s.sigma_state),
                s.protocol.state_name(s.zero_state),
                outputs.join(","),
                rules.join("; ")
            ));
        }
    }
    if json {
        let obj = json!({
            "command": "enumerate",
            "verdict": if result.survivors.is_empty() { "no_survivors" } else { "survivors" },
            "candidates": result.candidates,
            "protocols": result.protocols,
            "survivors": result.survivors.len(),
            "sizes": result.sizes,
            "witness": Value::Null,
            "counterexample": Value::Null,
        });
        text.push_str(&format!("{obj}\n"));
    } else {
        text.push_str(&format!("# {}\n", result.scope()));
        text.push_str(&format!(
            "candidates={} survivors={}\n",
            result.candidates,
            result.survivors.len()
        ));
    }
    match report {
        Some(path) => {
            std::fs::write(path, &text)?;
            out.write_all(text.lines().last().unwrap_or("").as_bytes())?;
            out.write_all(b"\n")?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    // a completed search is a success whatever it found
    Ok(0)
}

fn cmd_catalog(out: &mut dyn Write, json: bool) -> Result<i32> {
    for a in library::catalog() {
        if json {
            let obj = json!({
                "name": a.name,
                "states": a.protocol.num_states(),
                "matrix": a.matrix.is_some(),
                "provenance": a.provenance,
            });
            writeln!(out, "{obj}")?;
        } else {
            let tag = if a.matrix.is_some() { " [matrix]" } else { "" };
            writeln!(out, "{:<22} {}{}", a.name, a.provenance, tag)?;
        }
    }
    Ok(0)
}

fn cmd_export(out: &mut dyn Write, name: &str, dest: &Path, matrix_out: Option<&Path>) -> Result<i32> {
    let a = library::get(name)?;
    std::fs::write(dest, print_protocol(&a.protocol))?;
    writeln!(out, "wrote {}", dest.display())?;
    if let Some(m) = &a.matrix {
        let path = matrix_out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| dest.with_extension("matrix"));
        std::fs::write(&path, print_matrix(m))?;
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(0)
}
