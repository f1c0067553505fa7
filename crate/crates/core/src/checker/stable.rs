use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::explore::{explore, ReachabilityGraph};
use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::protocol::{Configuration, InputMultiset, Output, Protocol, StateId};

/// A run that does not stabilize as required: `configuration` is reachable
/// from `initial` and lies in the bottom component `bottom_scc`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub input: Option<InputMultiset>,
    pub initial: Configuration,
    pub configuration: Configuration,
    pub bottom_scc: Vec<Configuration>,
    pub observed: Output,
    pub expected: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StableVerdict {
    Computes,
    Fails(Box<Counterexample>),
}

impl StableVerdict {
    pub fn computes(&self) -> bool {
        matches!(self, StableVerdict::Computes)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            StableVerdict::Computes => None,
            StableVerdict::Fails(c) => Some(c),
        }
    }
}

/// Property of a single configuration that must hold throughout every bottom
/// component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ConfigProperty {
    /// Exactly one agent is in one of the given states.
    ExactlyOneIn(BTreeSet<StateId>),
}

impl ConfigProperty {
    pub fn holds(&self, c: &Configuration) -> bool {
        match self {
            ConfigProperty::ExactlyOneIn(states) => {
                states.iter().map(|&q| c.count(q)).sum::<u32>() == 1
            }
        }
    }

    pub fn describe(&self, p: &Protocol) -> String {
        match self {
            ConfigProperty::ExactlyOneIn(states) => {
                let names: Vec<&str> = states.iter().map(|&q| p.state_name(q)).collect();
                format!("exactly one agent in {{{}}}", names.join(", "))
            }
        }
    }
}

/// First configuration, in bottom-component order, that fails `ok`.
fn first_violation(
    g: &ReachabilityGraph,
    ok: impl Fn(&Configuration) -> bool,
) -> Option<(usize, usize)> {
    g.bottom_sccs().find_map(|scc| {
        g.scc_members(scc)
            .iter()
            .find(|&&v| !ok(g.node(v)))
            .map(|&v| (scc, v))
    })
}

fn counterexample(
    p: &Protocol,
    g: &ReachabilityGraph,
    (scc, v): (usize, usize),
    input: Option<InputMultiset>,
    expected: Option<bool>,
) -> Counterexample {
    let mut bottom_scc: Vec<Configuration> =
        g.scc_members(scc).iter().map(|&i| g.node(i).clone()).collect();
    bottom_scc.sort();
    Counterexample {
        input,
        initial: g.initial().clone(),
        configuration: g.node(v).clone(),
        bottom_scc,
        observed: p.output_of_configuration(g.node(v)),
        expected,
    }
}

/// Checks one input: every configuration of every bottom component must
/// output `pred(x)`.
pub fn check_input(
    p: &Protocol,
    pred: &Predicate,
    x: &InputMultiset,
    node_budget: usize,
) -> Result<StableVerdict> {
    let c0 = p.initial_configuration(x)?;
    let g = explore(p, &c0, node_budget).map_err(|e| with_input(e, x))?;
    let expected = Output::from_bit(pred.evaluate(x));
    Ok(
        match first_violation(&g, |c| p.output_of_configuration(c) == expected) {
            None => StableVerdict::Computes,
            Some(at) => StableVerdict::Fails(Box::new(counterexample(
                p,
                &g,
                at,
                Some(x.clone()),
                expected.bit(),
            ))),
        },
    )
}

fn with_input(e: Error, x: &InputMultiset) -> Error {
    match e {
        Error::BudgetExceeded { explored, .. } => Error::BudgetExceeded {
            explored,
            input: Some(x.clone()),
        },
        other => other,
    }
}

/// Whether `p` stably computes `pred` on every input of size `n`. Inputs
/// are checked in parallel; the reported counterexample (or budget error)
/// is always the first in input order.
pub fn check_stable(
    p: &Protocol,
    pred: &Predicate,
    n: u32,
    node_budget: usize,
) -> Result<StableVerdict> {
    let inputs = InputMultiset::all_of_size(p.num_symbols(), n)?;
    let first_bad = inputs.par_iter().find_map_first(|x| {
        match check_input(p, pred, x, node_budget) {
            Ok(StableVerdict::Computes) => None,
            other => Some(other),
        }
    });
    first_bad.unwrap_or(Ok(StableVerdict::Computes))
}

/// Every configuration of `n` agents over `allowed` with at least one agent
/// in `leaders`.
pub fn initial_set_with_leader(
    p: &Protocol,
    allowed: &BTreeSet<StateId>,
    leaders: &BTreeSet<StateId>,
    n: u32,
) -> Vec<Configuration> {
    Configuration::all_of_size(p.num_states(), n)
        .into_iter()
        .filter(|c| c.support().all(|q| allowed.contains(&q)))
        .filter(|c| leaders.iter().any(|&q| c.count(q) > 0))
        .collect()
}

/// Whether, from each initial configuration, every configuration of every
/// reachable bottom component satisfies `prop`.
pub fn check_eventual_property(
    p: &Protocol,
    initial_set: &[Configuration],
    prop: &ConfigProperty,
    node_budget: usize,
) -> Result<StableVerdict> {
    let first_bad = initial_set.par_iter().find_map_first(|c0| {
        let g = match explore(p, c0, node_budget) {
            Ok(g) => g,
            Err(e) => return Some(Err(e)),
        };
        first_violation(&g, |c| prop.holds(c))
            .map(|at| Ok(StableVerdict::Fails(Box::new(counterexample(p, &g, at, None, None)))))
    });
    first_bad.unwrap_or(Ok(StableVerdict::Computes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::SymbolId;

    fn or_protocol() -> Protocol {
        Protocol::builder()
            .states(["zero", "one"])
            .input("zero", "zero")
            .input("one", "one")
            .output("one", true)
            .symmetric_rule("zero", "one", "one", "one")
            .build()
            .unwrap()
    }

    #[test]
    fn or_computes_at_least_one() {
        let p = or_protocol();
        let pred = Predicate::at_least(SymbolId(1), 1);
        for n in 2..=5 {
            assert!(check_stable(&p, &pred, n, 1000).unwrap().computes());
        }
    }

    #[test]
    fn wrong_predicate_fails_with_replayable_witness() {
        let p = or_protocol();
        let pred = Predicate::at_least(SymbolId(1), 2);
        let verdict = check_stable(&p, &pred, 3, 1000).unwrap();
        let cex = verdict.counterexample().unwrap();
        assert_eq!(cex.input.as_ref().unwrap().counts(), &[2, 1]);
        assert_eq!(cex.observed, Output::One);
        assert_eq!(cex.expected, Some(false));
        let g = explore(&p, &cex.initial, 1000).unwrap();
        assert_eq!(g.in_bottom_scc(&cex.configuration), Some(true));
    }

    #[test]
    fn budget_error_names_the_input() {
        let p = or_protocol();
        let pred = Predicate::at_least(SymbolId(1), 1);
        let err = check_stable(&p, &pred, 4, 1).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { input: Some(_), .. }));
    }

    #[test]
    fn exactly_one_property() {
        let prop = ConfigProperty::ExactlyOneIn(BTreeSet::from([StateId(0), StateId(1)]));
        assert!(prop.holds(&Configuration::new(vec![0, 1, 4])));
        assert!(!prop.holds(&Configuration::new(vec![1, 1, 4])));
        assert!(!prop.holds(&Configuration::new(vec![0, 0, 4])));
    }
}
