//! Compiling an arbitrary protocol into a symmetric one.
//!
//! Every state `q` gets a primed twin `q'` (written `q_p`). A mixed pair
//! `q r'` breaks the tie between two agents: the unprimed agent plays the
//! initiator of the original rule. Toggle rules let any agent flip its
//! prime whenever it meets an agent in another state, so fairness can
//! always arrange the roles a rule needs; with at least three agents such a
//! partner exists.

use std::collections::BTreeSet;

use crate::protocol::{Protocol, Rule, StateId};

/// Name given to the primed copy of `name`, avoiding clashes with `taken`.
fn primed_name(name: &str, taken: &BTreeSet<String>) -> String {
    let mut candidate = format!("{name}_p");
    while taken.contains(&candidate) {
        candidate.push_str("_p");
    }
    candidate
}

/// The symmetric protocol on `Q ∪ Q'` simulating `p` for populations of at
/// least three agents. Inputs map into the unprimed copy; `q'` outputs what
/// `q` outputs. The result is generally nondeterministic.
pub fn symmetrize(p: &Protocol) -> Protocol {
    let k = p.num_states();
    let mut taken: BTreeSet<String> = p.state_names().iter().cloned().collect();
    let mut states = p.state_names().to_vec();
    for name in p.state_names() {
        let primed = primed_name(name, &taken);
        taken.insert(primed.clone());
        states.push(primed);
    }
    let prime = |q: StateId| StateId(q.0 + k as u16);
    let all: Vec<StateId> = (0..2 * k as u16).map(StateId).collect();

    let mut rules = BTreeSet::new();
    for q in p.states() {
        let qp = prime(q);
        for &[a, b] in p.successors_of_pair(q, q) {
            rules.insert(Rule::new(q, qp, a, b));
            rules.insert(Rule::new(qp, q, b, a));
        }
        rules.insert(Rule::new(q, q, qp, qp));
        rules.insert(Rule::new(qp, qp, q, q));
        for &g in all.iter().filter(|&&g| g != q && g != qp) {
            rules.insert(Rule::new(q, g, qp, g));
            rules.insert(Rule::new(qp, g, q, g));
            rules.insert(Rule::new(g, q, g, qp));
            rules.insert(Rule::new(g, qp, g, q));
        }
    }
    for q in p.states() {
        for r in p.states().filter(|&r| r != q) {
            for &[a, b] in p.successors_of_pair(q, r) {
                for &[d, e] in p.successors_of_pair(r, q) {
                    rules.insert(Rule::new(q, prime(r), a, b));
                    rules.insert(Rule::new(prime(r), q, b, a));
                    rules.insert(Rule::new(r, prime(q), d, e));
                    rules.insert(Rule::new(prime(q), r, e, d));
                }
            }
        }
    }

    let mut outputs = p.output_map().to_vec();
    outputs.extend_from_slice(p.output_map());
    Protocol::new(
        states,
        p.symbol_names().to_vec(),
        p.input_map().to_vec(),
        outputs,
        rules,
    )
    .expect("symmetrized protocol is well formed")
}
