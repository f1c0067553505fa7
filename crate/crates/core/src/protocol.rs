//! Protocols, configurations and the single-interaction transition semantics.
//!
//! A protocol is stored with the rules exactly as they were declared. The
//! *effective* relation adds the identity successor for every ordered pair of
//! states that has no declared rule, and is what every analysis works on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of a state in its protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(pub u16);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of an input symbol in its protocol's alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolId(pub u16);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An ordered interaction `lhs[0] lhs[1] -> rhs[0] rhs[1]`; the first agent is
/// the initiator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rule {
    pub lhs: [StateId; 2],
    pub rhs: [StateId; 2],
}

impl Rule {
    pub fn new(q1: StateId, q2: StateId, r1: StateId, r2: StateId) -> Self {
        Rule {
            lhs: [q1, q2],
            rhs: [r1, r2],
        }
    }

    /// The same interaction seen with the roles of the two agents exchanged.
    pub fn mirrored(&self) -> Self {
        Rule::new(self.lhs[1], self.lhs[0], self.rhs[1], self.rhs[0])
    }

    pub fn is_identity(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Output of a whole configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Zero,
    One,
    Undefined,
}

impl Output {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Output::One
        } else {
            Output::Zero
        }
    }

    pub fn bit(self) -> Option<bool> {
        match self {
            Output::Zero => Some(false),
            Output::One => Some(true),
            Output::Undefined => None,
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Zero => f.write_str("0"),
            Output::One => f.write_str("1"),
            Output::Undefined => f.write_str("undefined"),
        }
    }
}

/// Multiset of input symbols, as a count per symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InputMultiset {
    counts: Vec<u32>,
}

impl InputMultiset {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let n: u64 = counts.iter().map(|&c| c as u64).sum();
        if n < 2 {
            return Err(Error::InvalidPopulation(n));
        }
        Ok(InputMultiset { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, symbol: SymbolId) -> u32 {
        self.counts.get(symbol.index()).copied().unwrap_or(0)
    }

    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Every multiset of size `n` over `num_symbols` symbols, in descending
    /// lexicographic order of the count vectors.
    pub fn all_of_size(num_symbols: usize, n: u32) -> Result<Vec<InputMultiset>> {
        if n < 2 {
            return Err(Error::InvalidPopulation(n as u64));
        }
        Ok(compositions(num_symbols, n)
            .into_iter()
            .map(|counts| InputMultiset { counts })
            .collect())
    }
}

/// Multiset of agent states, as a count per state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Configuration {
    counts: Vec<u32>,
}

impl Configuration {
    pub fn new(counts: Vec<u32>) -> Self {
        Configuration { counts }
    }

    /// Builds a configuration from `(state, count)` pairs over `num_states` states.
    pub fn from_pairs(num_states: usize, pairs: &[(StateId, u32)]) -> Self {
        let mut counts = vec![0; num_states];
        for &(q, c) in pairs {
            counts[q.index()] += c;
        }
        Configuration { counts }
    }

    /// Every configuration of `n` agents over `num_states` states.
    pub fn all_of_size(num_states: usize, n: u32) -> Vec<Configuration> {
        compositions(num_states, n)
            .into_iter()
            .map(Configuration::new)
            .collect()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, q: StateId) -> u32 {
        self.counts[q.index()]
    }

    pub fn size(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// States with a positive count.
    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| StateId(i as u16))
    }

    fn apply(&self, rule: &Rule) -> Configuration {
        let mut counts = self.counts.clone();
        counts[rule.lhs[0].index()] -= 1;
        counts[rule.lhs[1].index()] -= 1;
        counts[rule.rhs[0].index()] += 1;
        counts[rule.rhs[1].index()] += 1;
        Configuration { counts }
    }

    /// Renders as `{a:2, b:1}` using the protocol's state names.
    pub fn display<'a>(&'a self, p: &'a Protocol) -> impl fmt::Display + 'a {
        DisplayConfig { config: self, p }
    }
}

struct DisplayConfig<'a> {
    config: &'a Configuration,
    p: &'a Protocol,
}

impl fmt::Display for DisplayConfig<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for q in self.config.support() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}:{}", self.p.state_name(q), self.config.count(q))?;
        }
        f.write_str("}")
    }
}

fn compositions(parts: usize, n: u32) -> Vec<Vec<u32>> {
    fn go(parts: usize, n: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            go(parts - 1, n - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(parts, n, &mut Vec::with_capacity(parts), &mut out);
    }
    out
}

/// A population protocol `(Q, Σ, ι, ω, δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    states: Vec<String>,
    symbols: Vec<String>,
    input_map: Vec<StateId>,
    output_map: Vec<bool>,
    rules: BTreeSet<Rule>,
    // successors of the ordered pair (q1, q2) at q1 * |Q| + q2, sorted
    effective: Vec<Vec<[StateId; 2]>>,
}

impl Protocol {
    pub fn new(
        states: Vec<String>,
        symbols: Vec<String>,
        input_map: Vec<StateId>,
        output_map: Vec<bool>,
        rules: impl IntoIterator<Item = Rule>,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("a protocol needs at least one state"));
        }
        if states.len() > u16::MAX as usize {
            return Err(Error::invalid("too many states"));
        }
        check_unique("state", &states)?;
        check_unique("input symbol", &symbols)?;
        if input_map.len() != symbols.len() {
            return Err(Error::invalid("input map must be total on the alphabet"));
        }
        if output_map.len() != states.len() {
            return Err(Error::invalid("output map must be total on the states"));
        }
        let k = states.len();
        let in_range = |q: StateId| q.index() < k;
        if let Some(q) = input_map.iter().find(|q| !in_range(**q)) {
            return Err(Error::invalid(format!("input map targets unknown state {}", q.0)));
        }
        let rules: BTreeSet<Rule> = rules.into_iter().collect();
        for rule in &rules {
            if !rule.lhs.iter().chain(rule.rhs.iter()).all(|q| in_range(*q)) {
                return Err(Error::invalid(format!("rule {rule:?} mentions an unknown state")));
            }
        }

        let mut effective = vec![Vec::new(); k * k];
        for rule in &rules {
            effective[rule.lhs[0].index() * k + rule.lhs[1].index()].push(rule.rhs);
        }
        for (pair, succ) in effective.iter_mut().enumerate() {
            if succ.is_empty() {
                succ.push([StateId((pair / k) as u16), StateId((pair % k) as u16)]);
            }
            succ.sort_unstable();
            succ.dedup();
        }

        Ok(Protocol {
            states,
            symbols,
            input_map,
            output_map,
            rules,
            effective,
        })
    }

    pub fn builder() -> ProtocolBuilder {
        ProtocolBuilder::default()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.symbols.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.states.len() as u16).map(StateId)
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + Clone {
        (0..self.symbols.len() as u16).map(SymbolId)
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn symbol_names(&self) -> &[String] {
        &self.symbols
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        &self.symbols[s.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
    }

    pub fn symbol_id(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| SymbolId(i as u16))
    }

    pub fn input_of(&self, s: SymbolId) -> StateId {
        self.input_map[s.index()]
    }

    pub fn input_map(&self) -> &[StateId] {
        &self.input_map
    }

    pub fn output_of(&self, q: StateId) -> bool {
        self.output_map[q.index()]
    }

    pub fn output_map(&self) -> &[bool] {
        &self.output_map
    }

    /// Rules as declared, including any explicit identity rules.
    pub fn rules(&self) -> &BTreeSet<Rule> {
        &self.rules
    }

    /// Successor pairs of the ordered pair `(q1, q2)` in the effective relation.
    pub fn successors_of_pair(&self, q1: StateId, q2: StateId) -> &[[StateId; 2]] {
        &self.effective[q1.index() * self.states.len() + q2.index()]
    }

    /// The full effective relation, identity fallbacks included.
    pub fn effective_rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::new();
        for q1 in self.states() {
            for q2 in self.states() {
                for rhs in self.successors_of_pair(q1, q2) {
                    out.insert(Rule::new(q1, q2, rhs[0], rhs[1]));
                }
            }
        }
        out
    }

    /// Effective relation with every pair whose only successor is itself
    /// left implicit.
    pub fn non_identity_rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::new();
        for q1 in self.states() {
            for q2 in self.states() {
                let succ = self.successors_of_pair(q1, q2);
                if succ.len() == 1 && succ[0] == [q1, q2] {
                    continue;
                }
                out.extend(succ.iter().map(|rhs| Rule::new(q1, q2, rhs[0], rhs[1])));
            }
        }
        out
    }

    /// Same protocol with identity-only pairs left implicit.
    pub fn canonical(&self) -> Protocol {
        Protocol {
            rules: self.non_identity_rules(),
            ..self.clone()
        }
    }

    /// True when both protocols have the same effective relation.
    pub fn same_relation(&self, other: &Protocol) -> bool {
        self.effective == other.effective
    }

    pub fn is_deterministic(&self) -> bool {
        self.effective.iter().all(|succ| succ.len() == 1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    /// An effective rule whose mirror image is not effective, if any.
    pub fn symmetry_violation(&self) -> Option<Rule> {
        for q1 in self.states() {
            for q2 in self.states() {
                for rhs in self.successors_of_pair(q1, q2) {
                    let rule = Rule::new(q1, q2, rhs[0], rhs[1]);
                    let mirror = rule.mirrored();
                    if !self
                        .successors_of_pair(mirror.lhs[0], mirror.lhs[1])
                        .contains(&mirror.rhs)
                    {
                        return Some(rule);
                    }
                }
            }
        }
        None
    }

    pub fn with_output_map(&self, output_map: Vec<bool>) -> Result<Protocol> {
        if output_map.len() != self.states.len() {
            return Err(Error::invalid("output map must be total on the states"));
        }
        Ok(Protocol {
            output_map,
            ..self.clone()
        })
    }

    pub fn with_inputs(&self, symbols: Vec<String>, input_map: Vec<StateId>) -> Result<Protocol> {
        Protocol::new(
            self.states.clone(),
            symbols,
            input_map,
            self.output_map.clone(),
            self.rules.iter().copied(),
        )
    }

    /// Output of a configuration: the common output of every present state,
    /// or `Undefined` when outputs are mixed.
    pub fn output_of_configuration(&self, c: &Configuration) -> Output {
        let mut seen: Option<bool> = None;
        for q in c.support() {
            let bit = self.output_of(q);
            match seen {
                None => seen = Some(bit),
                Some(b) if b != bit => return Output::Undefined,
                Some(_) => {}
            }
        }
        // an empty configuration has no agent to disagree
        seen.map_or(Output::Undefined, Output::from_bit)
    }

    pub fn initial_configuration(&self, x: &InputMultiset) -> Result<Configuration> {
        if x.counts().len() != self.symbols.len() {
            return Err(Error::invalid(format!(
                "input has {} symbol counts, alphabet has {}",
                x.counts().len(),
                self.symbols.len()
            )));
        }
        let n = x.size();
        if n < 2 {
            return Err(Error::InvalidPopulation(n as u64));
        }
        let mut counts = vec![0; self.states.len()];
        for s in self.symbols() {
            counts[self.input_of(s).index()] += x.count(s);
        }
        Ok(Configuration { counts })
    }

    /// Every configuration reachable from `c` by one interaction, deduplicated
    /// and sorted.
    pub fn successors(&self, c: &Configuration) -> Vec<Configuration> {
        let mut out = BTreeSet::new();
        for q1 in c.support() {
            for q2 in c.support() {
                if q1 == q2 && c.count(q1) < 2 {
                    continue;
                }
                for rhs in self.successors_of_pair(q1, q2) {
                    out.insert(c.apply(&Rule::new(q1, q2, rhs[0], rhs[1])));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Applies one specific rule, if its left-hand side is present in `c`.
    pub fn fire(&self, c: &Configuration, rule: &Rule) -> Option<Configuration> {
        let [q1, q2] = rule.lhs;
        let needed = if q1 == q2 { 2 } else { 1 };
        if c.count(q1) < needed || c.count(q2) < 1 {
            return None;
        }
        if !self.successors_of_pair(q1, q2).contains(&rule.rhs) {
            return None;
        }
        Some(c.apply(rule))
    }

    pub fn display_rule<'a>(&'a self, rule: &'a Rule) -> impl fmt::Display + 'a {
        DisplayRule { rule, p: self }
    }
}

struct DisplayRule<'a> {
    rule: &'a Rule,
    p: &'a Protocol,
}

impl fmt::Display for DisplayRule<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |q| self.p.state_name(q);
        write!(
            f,
            "{} {} -> {} {}",
            n(self.rule.lhs[0]),
            n(self.rule.lhs[1]),
            n(self.rule.rhs[0]),
            n(self.rule.rhs[1])
        )
    }
}

fn check_unique(what: &str, names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for name in names {
        if name.is_empty() {
            return Err(Error::invalid(format!("empty {what} name")));
        }
        if !seen.insert(name) {
            return Err(Error::invalid(format!("duplicate {what} `{name}`")));
        }
    }
    Ok(())
}

/// Name-based construction of a [`Protocol`].
#[derive(Clone, Debug, Default)]
pub struct ProtocolBuilder {
    states: Vec<String>,
    inputs: Vec<(String, String)>,
    outputs: BTreeMap<String, bool>,
    rules: Vec<[String; 4]>,
}

impl ProtocolBuilder {
    pub fn states<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn input(mut self, symbol: &str, state: &str) -> Self {
        self.inputs.push((symbol.to_string(), state.to_string()));
        self
    }

    pub fn output(mut self, state: &str, bit: bool) -> Self {
        self.outputs.insert(state.to_string(), bit);
        self
    }

    /// Adds `q1 q2 -> r1 r2`.
    pub fn rule(mut self, q1: &str, q2: &str, r1: &str, r2: &str) -> Self {
        self.rules
            .push([q1.to_string(), q2.to_string(), r1.to_string(), r2.to_string()]);
        self
    }

    /// Adds `q1 q2 -> r1 r2` together with its mirror `q2 q1 -> r2 r1`.
    pub fn symmetric_rule(self, q1: &str, q2: &str, r1: &str, r2: &str) -> Self {
        self.rule(q1, q2, r1, r2).rule(q2, q1, r2, r1)
    }

    pub fn build(self) -> Result<Protocol> {
        let lookup = |name: &str| -> Result<StateId> {
            self.states
                .iter()
                .position(|s| s == name)
                .map(|i| StateId(i as u16))
                .ok_or_else(|| Error::invalid(format!("unknown state `{name}`")))
        };
        let mut symbols = Vec::new();
        let mut input_map = Vec::new();
        for (sym, state) in &self.inputs {
            symbols.push(sym.clone());
            input_map.push(lookup(state)?);
        }
        for name in self.outputs.keys() {
            lookup(name)?;
        }
        let output_map = self
            .states
            .iter()
            .map(|s| self.outputs.get(s).copied().unwrap_or(false))
            .collect();
        let mut rules = Vec::new();
        for [a, b, c, d] in &self.rules {
            rules.push(Rule::new(lookup(a)?, lookup(b)?, lookup(c)?, lookup(d)?));
        }
        Protocol::new(self.states.clone(), symbols, input_map, output_map, rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pavlov() -> Protocol {
        Protocol::builder()
            .states(["C", "D"])
            .input("C", "C")
            .input("D", "D")
            .output("C", true)
            .rule("C", "C", "C", "C")
            .rule("C", "D", "D", "D")
            .rule("D", "C", "D", "D")
            .rule("D", "D", "C", "C")
            .build()
            .unwrap()
    }

    fn id(p: &Protocol, name: &str) -> StateId {
        p.state_id(name).unwrap()
    }

    #[test]
    fn uniform_output_is_defined() {
        let p = pavlov();
        let all_c = Configuration::from_pairs(2, &[(id(&p, "C"), 3)]);
        assert_eq!(p.output_of_configuration(&all_c), Output::One);
        let one_d = Configuration::from_pairs(2, &[(id(&p, "D"), 1)]);
        assert_eq!(p.output_of_configuration(&one_d), Output::Zero);
    }

    #[test]
    fn mixed_output_is_undefined() {
        let p = pavlov();
        let mixed = Configuration::new(vec![1, 1]);
        assert_eq!(p.output_of_configuration(&mixed), Output::Undefined);
    }

    #[test]
    fn initial_configuration_sums_symbols_mapped_to_one_state() {
        let p = Protocol::builder()
            .states(["q0", "q1"])
            .input("a", "q0")
            .input("b", "q0")
            .build()
            .unwrap();
        let x = InputMultiset::new(vec![1, 1]).unwrap();
        assert_eq!(p.initial_configuration(&x).unwrap().counts(), &[2, 0]);
    }

    #[test]
    fn too_small_population_is_rejected() {
        assert!(matches!(
            InputMultiset::new(vec![1, 0]),
            Err(Error::InvalidPopulation(1))
        ));
    }

    #[test]
    fn pavlov_successors() {
        let p = pavlov();
        let cd = Configuration::new(vec![1, 1]);
        assert_eq!(p.successors(&cd), vec![Configuration::new(vec![0, 2])]);
        let dd = Configuration::new(vec![0, 2]);
        assert_eq!(p.successors(&dd), vec![Configuration::new(vec![2, 0])]);
        let single = Configuration::new(vec![1, 0]);
        assert!(p.successors(&single).is_empty());
    }

    #[test]
    fn unlisted_pairs_default_to_identity() {
        let p = Protocol::builder()
            .states(["a", "b"])
            .rule("a", "b", "b", "b")
            .build()
            .unwrap();
        let a = id(&p, "a");
        let b = id(&p, "b");
        assert_eq!(p.successors_of_pair(b, a), &[[b, a]]);
        assert!(!p.is_symmetric());
        assert!(p.is_deterministic());
        assert_eq!(p.symmetry_violation(), Some(Rule::new(a, b, b, b)));
    }

    #[test]
    fn explicit_identity_rules_canonicalize_away() {
        let with = pavlov();
        let without = Protocol::builder()
            .states(["C", "D"])
            .input("C", "C")
            .input("D", "D")
            .output("C", true)
            .rule("C", "D", "D", "D")
            .rule("D", "C", "D", "D")
            .rule("D", "D", "C", "C")
            .build()
            .unwrap();
        assert_ne!(with, without);
        assert!(with.same_relation(&without));
        assert_eq!(with.canonical(), without.canonical());
        assert_eq!(with.rules().len(), 4);
        assert_eq!(with.non_identity_rules().len(), 3);
    }

    #[test]
    fn nondeterministic_relation_keeps_all_successors() {
        let p = Protocol::builder()
            .states(["a", "b", "c"])
            .rule("a", "a", "b", "b")
            .rule("a", "a", "c", "c")
            .build()
            .unwrap();
        assert!(!p.is_deterministic());
        let c0 = Configuration::new(vec![2, 0, 0]);
        assert_eq!(
            p.successors(&c0),
            vec![Configuration::new(vec![0, 0, 2]), Configuration::new(vec![0, 2, 0])]
        );
    }

    #[test]
    fn builder_rejects_unknown_and_duplicate_states() {
        assert!(Protocol::builder().states(["a"]).rule("a", "b", "a", "a").build().is_err());
        assert!(Protocol::builder().states(["a", "a"]).build().is_err());
    }

    #[test]
    fn multisets_of_size_enumerate_all() {
        let all = InputMultiset::all_of_size(3, 2).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0].counts(), &[2, 0, 0]);
        assert!(all.iter().all(|x| x.size() == 2));
        assert!(InputMultiset::all_of_size(2, 1).is_err());
    }
}
