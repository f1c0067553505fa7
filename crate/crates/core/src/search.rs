//! Exhaustive search over small game-derived protocols.
//!
//! Under win-stay, lose-shift play the reactions to an opponent in state `c`
//! depend only on column `c` of the payoff matrix, so a derivable protocol
//! is exactly a choice of one realizable column response per column. For up
//! to three states every realizable response already shows up for integer
//! columns in `-3..=3`, which makes the enumeration complete.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::checker::{check_stable, explore, DEFAULT_NODE_BUDGET};
use crate::error::{Error, Result};
use crate::predicate::Predicate;
use crate::protocol::{Configuration, InputMultiset, Protocol, Rule, StateId};

pub const GRID: std::ops::RangeInclusive<i64> = -3..=3;
pub const MAX_STATES: usize = 3;

/// Successor set of every row state facing one column state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ColumnResponse {
    pub column: StateId,
    pub response: Vec<Vec<StateId>>,
}

/// The successor sets induced by one column of payoffs: stay on a
/// non-negative entry, otherwise move to every best alternative.
pub fn response_of_column(values: &[i64]) -> Vec<Vec<StateId>> {
    let k = values.len();
    (0..k)
        .map(|q| {
            if values[q] >= 0 || k == 1 {
                return vec![StateId(q as u16)];
            }
            let best = (0..k).filter(|&z| z != q).map(|z| values[z]).max().unwrap();
            (0..k)
                .filter(|&z| z != q && values[z] == best)
                .map(|z| StateId(z as u16))
                .collect()
        })
        .collect()
}

fn check_size(num_states: usize) -> Result<()> {
    if num_states > MAX_STATES {
        return Err(Error::BudgetExceeded {
            explored: 0,
            input: None,
        });
    }
    if num_states < 2 {
        return Err(Error::invalid("enumeration needs at least two states"));
    }
    Ok(())
}

/// Distinct responses over all integer columns in the grid, sorted.
pub fn grid_responses(num_states: usize) -> Result<Vec<Vec<Vec<StateId>>>> {
    check_size(num_states)?;
    let mut seen = BTreeSet::new();
    let mut column = vec![*GRID.start(); num_states];
    loop {
        seen.insert(response_of_column(&column));
        // odometer over the grid
        let mut i = 0;
        loop {
            if i == num_states {
                return Ok(seen.into_iter().collect());
            }
            if column[i] < *GRID.end() {
                column[i] += 1;
                break;
            }
            column[i] = *GRID.start();
            i += 1;
        }
    }
}

/// All protocols on `num_states` states induced by some payoff matrix.
#[derive(Clone, Debug)]
pub struct PavlovianSpace {
    num_states: usize,
    responses: Vec<Vec<Vec<StateId>>>,
    names: Vec<String>,
}

impl PavlovianSpace {
    pub fn len(&self) -> usize {
        self.responses.len().pow(self.num_states as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn responses(&self) -> &[Vec<Vec<StateId>>] {
        &self.responses
    }

    /// Column responses of the `index`-th protocol.
    pub fn columns(&self, mut index: usize) -> Vec<ColumnResponse> {
        let r = self.responses.len();
        (0..self.num_states)
            .map(|c| {
                let choice = index % r;
                index /= r;
                ColumnResponse {
                    column: StateId(c as u16),
                    response: self.responses[choice].clone(),
                }
            })
            .collect()
    }

    /// The `index`-th protocol, every state being its own input symbol.
    pub fn protocol(&self, index: usize) -> Protocol {
        self.protocol_with(index, self.names.clone(), (0..self.num_states as u16).map(StateId).collect(), vec![false; self.num_states])
    }

    fn protocol_with(
        &self,
        index: usize,
        symbols: Vec<String>,
        input_map: Vec<StateId>,
        output_map: Vec<bool>,
    ) -> Protocol {
        let columns = self.columns(index);
        let mut rules = Vec::new();
        for q1 in 0..self.num_states {
            for q2 in 0..self.num_states {
                let first = &columns[q2].response[q1];
                let second = &columns[q1].response[q2];
                for &a in first {
                    for &b in second {
                        rules.push(Rule::new(StateId(q1 as u16), StateId(q2 as u16), a, b));
                    }
                }
            }
        }
        Protocol::new(self.names.clone(), symbols, input_map, output_map, rules)
            .expect("enumerated protocol is well formed")
    }

    pub fn iter(&self) -> impl Iterator<Item = Protocol> + '_ {
        (0..self.len()).map(|i| self.protocol(i))
    }
}

/// Every protocol derivable from a `num_states`-dimensional matrix.
pub fn enumerate_pavlovian(num_states: usize) -> Result<PavlovianSpace> {
    let responses = grid_responses(num_states)?;
    Ok(PavlovianSpace {
        num_states,
        responses,
        names: (0..num_states).map(|i| format!("s{i}")).collect(),
    })
}

/// A candidate that stably computes the target predicate at every checked size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Survivor {
    pub index: usize,
    #[serde(skip)]
    pub protocol: Protocol,
    pub sigma_state: StateId,
    pub zero_state: StateId,
    pub outputs: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FalsifyReport {
    pub num_states: usize,
    pub column_responses: usize,
    pub protocols: usize,
    pub candidates: u64,
    pub sizes: Vec<u32>,
    pub survivors: Vec<Survivor>,
}

impl FalsifyReport {
    pub fn scope(&self) -> String {
        format!(
            "scope: all {}-state game-derived protocols (from {} distinct column responses), \
             injective input maps of {{sigma, zero}}, all output maps; population sizes {:?}. \
             Non-injective input maps are skipped. This is finite evidence, not a proof for \
             larger state counts or populations.",
            self.num_states,
            self.column_responses,
            self.sizes
        )
    }
}

/// Input alphabet of the harness; predicates are written over these names.
pub fn harness_symbols() -> Vec<String> {
    vec!["sigma".to_string(), "zero".to_string()]
}

/// Bitmask of states present in some bottom-component configuration
/// reachable from `c0`.
fn bottom_support(p: &Protocol, c0: &Configuration) -> Result<u32> {
    let g = explore(p, c0, DEFAULT_NODE_BUDGET)?;
    let mut mask = 0;
    for scc in g.bottom_sccs() {
        for &v in g.scc_members(scc) {
            for q in g.node(v).support() {
                mask |= 1 << q.0;
            }
        }
    }
    Ok(mask)
}

/// Tries every game-derived protocol on `num_states` states, every injective
/// input map of `{sigma, zero}` and every output map against `pred` for
/// population sizes `2..=n_max`. Size 3 is checked first since it rejects
/// most candidates.
///
/// For a fixed protocol and input map, an output map works on an input iff
/// every state seen in a reachable bottom component outputs the expected
/// bit, so each exploration serves all output maps at once. Survivors are
/// re-checked with [`check_stable`].
pub fn falsify(pred: &Predicate, num_states: usize, n_max: u32) -> Result<FalsifyReport> {
    if n_max < 3 {
        return Err(Error::invalid("n_max must be at least 3"));
    }
    let space = enumerate_pavlovian(num_states)?;
    let symbols = harness_symbols();
    let mut sizes: Vec<u32> = vec![3];
    sizes.extend((2..=n_max).filter(|&n| n != 3));
    let inputs: Vec<(InputMultiset, bool)> = sizes
        .iter()
        .flat_map(|&n| InputMultiset::all_of_size(symbols.len(), n).expect("n >= 2"))
        .map(|x| {
            let expected = pred.evaluate(&x);
            (x, expected)
        })
        .collect();
    let assignments: Vec<(StateId, StateId)> = (0..num_states as u16)
        .flat_map(|a| (0..num_states as u16).filter(move |&b| b != a).map(move |b| (StateId(a), StateId(b))))
        .collect();
    let output_maps = 1u32 << num_states;

    let per_protocol: Vec<Result<Vec<Survivor>>> = (0..space.len())
        .into_par_iter()
        .map(|index| {
            let bare = space.protocol(index);
            let mut memo: HashMap<Configuration, u32> = HashMap::new();
            let mut found = Vec::new();
            for &(sigma, zero) in &assignments {
                // states that must output 1, and states that must output 0
                let (mut ones, mut zeros) = (0u32, 0u32);
                for (x, expected) in &inputs {
                    let c0 = Configuration::from_pairs(
                        num_states,
                        &[(sigma, x.counts()[0]), (zero, x.counts()[1])],
                    );
                    let support = match memo.get(&c0) {
                        Some(&m) => m,
                        None => {
                            let m = bottom_support(&bare, &c0)?;
                            memo.insert(c0, m);
                            m
                        }
                    };
                    if *expected {
                        ones |= support;
                    } else {
                        zeros |= support;
                    }
                    if ones & zeros != 0 {
                        break;
                    }
                }
                if ones & zeros != 0 {
                    continue;
                }
                for omega in 0..output_maps {
                    if omega & ones == ones && omega & zeros == 0 {
                        let outputs: Vec<bool> = (0..num_states).map(|q| omega >> q & 1 == 1).collect();
                        let protocol = space.protocol_with(
                            index,
                            symbols.clone(),
                            vec![sigma, zero],
                            outputs.clone(),
                        );
                        found.push(Survivor {
                            index,
                            protocol,
                            sigma_state: sigma,
                            zero_state: zero,
                            outputs,
                        });
                    }
                }
            }
            Ok(found)
        })
        .collect();

    let mut survivors = Vec::new();
    for r in per_protocol {
        survivors.extend(r?);
    }
    for s in &survivors {
        for n in 2..=n_max {
            let verdict = check_stable(&s.protocol, pred, n, DEFAULT_NODE_BUDGET)?;
            assert!(
                verdict.computes(),
                "survivor {} rejected by the stable-computation checker at n = {n}",
                s.index
            );
        }
    }

    Ok(FalsifyReport {
        num_states,
        column_responses: space.responses().len(),
        protocols: space.len(),
        candidates: space.len() as u64 * assignments.len() as u64 * output_maps as u64,
        sizes,
        survivors,
    })
}
