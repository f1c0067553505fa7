//! Line-oriented file formats.
//!
//! Protocol files hold one declaration per line; `#` starts a comment:
//!
//! ```text
//! states: q0 q1 q2
//! inputs: sigma->q1 zero->q0
//! outputs: q0=0 q1=0 q2=1
//! rule: q0 q2 -> q2 q2
//! ```
//!
//! Matrix files start with a `states:` header followed by one row of
//! whitespace-separated rationals per state (`-3`, `1/2`). An optional
//! `delta: <rational>` line is subtracted from every entry on load.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::games::GameMatrix;
use crate::protocol::{Protocol, Rule, StateId};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name.contains("->")
        && !name.contains('=')
        && !name.contains(',')
        && !name.contains(':')
}

pub fn parse_protocol(text: &str) -> Result<Protocol> {
    let mut states: Vec<String> = Vec::new();
    let mut inputs: Vec<(usize, String, String)> = Vec::new();
    let mut outputs: Vec<(usize, String, bool)> = Vec::new();
    let mut rules: Vec<(usize, [String; 4])> = Vec::new();

    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, format!("expected `key: ...`, got `{line}`")))?;
        let rest = rest.trim();
        match key.trim() {
            "states" => {
                for name in rest.split_whitespace() {
                    if !valid_name(name) {
                        return Err(Error::parse(line_no, format!("invalid state name `{name}`")));
                    }
                    if states.iter().any(|s| s == name) {
                        return Err(Error::parse(line_no, format!("duplicate state `{name}`")));
                    }
                    states.push(name.to_string());
                }
            }
            "inputs" => {
                for item in rest.split_whitespace() {
                    let (sym, q) = item.split_once("->").ok_or_else(|| {
                        Error::parse(line_no, format!("expected `symbol->state`, got `{item}`"))
                    })?;
                    if !valid_name(sym) {
                        return Err(Error::parse(line_no, format!("invalid symbol name `{sym}`")));
                    }
                    inputs.push((line_no, sym.to_string(), q.to_string()));
                }
            }
            "outputs" => {
                for item in rest.split_whitespace() {
                    let (q, bit) = item.split_once('=').ok_or_else(|| {
                        Error::parse(line_no, format!("expected `state=bit`, got `{item}`"))
                    })?;
                    let bit = match bit {
                        "0" => false,
                        "1" => true,
                        _ => return Err(Error::parse(line_no, format!("output must be 0 or 1, got `{bit}`"))),
                    };
                    outputs.push((line_no, q.to_string(), bit));
                }
            }
            "rule" => {
                let (lhs, rhs) = rest
                    .split_once("->")
                    .ok_or_else(|| Error::parse(line_no, "expected `q1 q2 -> r1 r2`"))?;
                let lhs: Vec<&str> = lhs.split_whitespace().collect();
                let rhs: Vec<&str> = rhs.split_whitespace().collect();
                let (&[a, b], &[c, d]) = (&lhs[..], &rhs[..]) else {
                    return Err(Error::parse(line_no, "a rule has two states on each side"));
                };
                rules.push((line_no, [a, b, c, d].map(str::to_string)));
            }
            other => return Err(Error::parse(line_no, format!("unknown declaration `{other}`"))),
        }
    }

    if states.is_empty() {
        return Err(Error::parse(text.lines().count().max(1), "no `states:` declaration"));
    }
    let lookup = |line: usize, name: &str| -> Result<StateId> {
        states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| Error::parse(line, format!("unknown state `{name}`")))
    };

    let mut symbols = Vec::new();
    let mut input_map = Vec::new();
    for (line, sym, q) in &inputs {
        if symbols.contains(sym) {
            return Err(Error::parse(*line, format!("duplicate input symbol `{sym}`")));
        }
        symbols.push(sym.clone());
        input_map.push(lookup(*line, q)?);
    }

    let mut output_of: BTreeMap<StateId, bool> = BTreeMap::new();
    for (line, q, bit) in &outputs {
        let id = lookup(*line, q)?;
        if output_of.insert(id, *bit).is_some() {
            return Err(Error::parse(*line, format!("output of `{q}` given twice")));
        }
    }
    let mut output_map = Vec::with_capacity(states.len());
    for (i, name) in states.iter().enumerate() {
        match output_of.get(&StateId(i as u16)) {
            Some(&bit) => output_map.push(bit),
            None => {
                let line = outputs.last().map_or(1, |o| o.0);
                return Err(Error::parse(line, format!("no output given for state `{name}`")));
            }
        }
    }

    let mut parsed = Vec::with_capacity(rules.len());
    for (line, [a, b, c, d]) in &rules {
        parsed.push(Rule::new(
            lookup(*line, a)?,
            lookup(*line, b)?,
            lookup(*line, c)?,
            lookup(*line, d)?,
        ));
    }

    Protocol::new(states, symbols, input_map, output_map, parsed)
}

pub fn print_protocol(p: &Protocol) -> String {
    let mut out = String::new();
    writeln!(out, "states: {}", p.state_names().join(" ")).unwrap();
    if p.num_symbols() > 0 {
        let inputs: Vec<String> = p
            .symbols()
            .map(|s| format!("{}->{}", p.symbol_name(s), p.state_name(p.input_of(s))))
            .collect();
        writeln!(out, "inputs: {}", inputs.join(" ")).unwrap();
    }
    let outputs: Vec<String> = p
        .states()
        .map(|q| format!("{}={}", p.state_name(q), u8::from(p.output_of(q))))
        .collect();
    writeln!(out, "outputs: {}", outputs.join(" ")).unwrap();
    for rule in p.rules() {
        writeln!(out, "rule: {}", p.display_rule(rule)).unwrap();
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<GameMatrix> {
    let mut states: Option<Vec<String>> = None;
    let mut delta = Rational64::from_integer(0);
    let mut rows: Vec<Vec<Rational64>> = Vec::new();
    let mut last_line = 1;
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        last_line = line_no;
        if let Some(rest) = line.strip_prefix("states:") {
            if states.is_some() {
                return Err(Error::parse(line_no, "`states:` given twice"));
            }
            states = Some(rest.split_whitespace().map(str::to_string).collect());
            continue;
        }
        if let Some(rest) = line.strip_prefix("delta:") {
            delta = parse_rational(rest.trim(), line_no)?;
            continue;
        }
        let Some(header) = &states else {
            return Err(Error::parse(line_no, "matrix rows must follow a `states:` header"));
        };
        let row = line
            .split_whitespace()
            .map(|v| parse_rational(v, line_no))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::parse(
                line_no,
                format!("row has {} entries, expected {}", row.len(), header.len()),
            ));
        }
        if rows.len() == header.len() {
            return Err(Error::parse(line_no, "more rows than states"));
        }
        rows.push(row);
    }
    let states = states.ok_or_else(|| Error::parse(last_line, "no `states:` header"))?;
    if rows.len() != states.len() {
        return Err(Error::parse(
            last_line,
            format!("{} rows for {} states", rows.len(), states.len()),
        ));
    }
    let m = GameMatrix::new(states, rows).map_err(|e| Error::parse(1, e.to_string()))?;
    Ok(m.normalized(delta))
}

fn parse_rational(text: &str, line: usize) -> Result<Rational64> {
    let value = Rational64::from_str(text)
        .map_err(|_| Error::parse(line, format!("invalid rational `{text}`")))?;
    Ok(value)
}

pub fn print_matrix(m: &GameMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "states: {}", m.states().join(" ")).unwrap();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}
