//! Deciding whether a protocol is induced by some symmetric game.
//!
//! The successor sets of column `c` (the opponent's state) only constrain the
//! entries of column `c`, so each column is an independent system of
//! difference constraints over the integers. Strict inequalities carry a
//! slack of 1, which loses nothing because the system is invariant under
//! positive scaling. Feasibility is a negative-cycle test on the constraint
//! graph with an extra node pinned at zero.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use serde::Serialize;

use super::matrix::{Dressing, GameMatrix};
use crate::protocol::{Protocol, Rule, StateId};

/// Matrix entry `(row, column)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Var {
    pub row: StateId,
    pub column: StateId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Constraint {
    /// `v >= 0`
    NonNegative(Var),
    /// `v <= -1`
    Negative(Var),
    /// `better - worse >= 1`
    Dominates { better: Var, worse: Var },
    /// `a = b`
    Equal(Var, Var),
}

/// A constraint together with the interaction that produced it: the pair
/// `(state, column)` and the successor set of `state` facing `column`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TaggedConstraint {
    pub constraint: Constraint,
    pub state: StateId,
    pub column: StateId,
    pub successors: Vec<StateId>,
}

/// `x_plus - x_minus >= bound`, where `None` stands for the constant 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub plus: Option<Var>,
    pub minus: Option<Var>,
    pub bound: i64,
}

impl Constraint {
    /// The one or two difference inequalities this constraint stands for.
    pub fn inequalities(&self) -> Vec<Inequality> {
        match *self {
            Constraint::NonNegative(v) => vec![Inequality {
                plus: Some(v),
                minus: None,
                bound: 0,
            }],
            Constraint::Negative(v) => vec![Inequality {
                plus: None,
                minus: Some(v),
                bound: 1,
            }],
            Constraint::Dominates { better, worse } => vec![Inequality {
                plus: Some(better),
                minus: Some(worse),
                bound: 1,
            }],
            Constraint::Equal(a, b) => vec![
                Inequality {
                    plus: Some(a),
                    minus: Some(b),
                    bound: 0,
                },
                Inequality {
                    plus: Some(b),
                    minus: Some(a),
                    bound: 0,
                },
            ],
        }
    }

    pub fn holds(&self, value: impl Fn(Var) -> i64) -> bool {
        self.inequalities().iter().all(|ineq| {
            let plus = ineq.plus.map_or(0, &value);
            let minus = ineq.minus.map_or(0, &value);
            plus - minus >= ineq.bound
        })
    }
}

/// Constraints on one column of the unknown payoff matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSystem {
    pub column: StateId,
    pub num_states: usize,
    pub constraints: Vec<TaggedConstraint>,
}

impl ConstraintSystem {
    /// Builds the system for `column` from the successor set of every row
    /// state facing it.
    ///
    /// An agent that may stay needs a non-negative entry. An agent that may
    /// leave needs a negative entry, equal entries on every state it may move
    /// to, and those entries strictly above every other alternative. An agent
    /// that may do both gets both the first and the second constraint, which
    /// is already contradictory.
    pub fn from_response(column: StateId, response: &[Vec<StateId>]) -> Self {
        let k = response.len();
        let var = |row: StateId| Var { row, column };
        let mut constraints = Vec::new();
        for (q, succ) in response.iter().enumerate() {
            let q = StateId(q as u16);
            let mut push = |constraint| {
                constraints.push(TaggedConstraint {
                    constraint,
                    state: q,
                    column,
                    successors: succ.clone(),
                })
            };
            if succ.contains(&q) {
                push(Constraint::NonNegative(var(q)));
            }
            let moves: Vec<StateId> = succ.iter().copied().filter(|&s| s != q).collect();
            if moves.is_empty() {
                continue;
            }
            push(Constraint::Negative(var(q)));
            for pair in moves.windows(2) {
                push(Constraint::Equal(var(pair[0]), var(pair[1])));
            }
            for z in (0..k as u16).map(StateId) {
                if z != q && !moves.contains(&z) {
                    push(Constraint::Dominates {
                        better: var(moves[0]),
                        worse: var(z),
                    });
                }
            }
        }
        ConstraintSystem {
            column,
            num_states: k,
            constraints,
        }
    }

    /// Integer values for the column entries, or a contradictory cycle.
    pub fn solve(&self) -> Result<Vec<i64>, Certificate> {
        let graph = ConstraintGraph::new(self);
        match graph.shortest_potentials() {
            Some(dist) => {
                let anchor = dist[self.num_states];
                Ok(dist[..self.num_states].iter().map(|d| d - anchor).collect())
            }
            None => {
                let cycle = graph.shortest_negative_cycle();
                Err(Certificate {
                    column: self.column,
                    steps: cycle
                        .into_iter()
                        .map(|edge| {
                            let e = &graph.edges[edge];
                            CertificateStep {
                                constraint: self.constraints[e.constraint].clone(),
                                inequality: e.inequality,
                            }
                        })
                        .collect(),
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    from: usize,
    to: usize,
    weight: i64,
    constraint: usize,
    inequality: Inequality,
}

/// Nodes `0..k` are the column entries, node `k` is the zero anchor.
/// `x_plus - x_minus >= b` becomes the edge `plus -> minus` of weight `-b`,
/// so shortest-path distances are a feasible assignment.
struct ConstraintGraph {
    nodes: usize,
    edges: Vec<Edge>,
}

impl ConstraintGraph {
    fn new(system: &ConstraintSystem) -> Self {
        let anchor = system.num_states;
        let node = |v: Option<Var>| v.map_or(anchor, |v| v.row.index());
        let mut edges = Vec::new();
        for (i, tagged) in system.constraints.iter().enumerate() {
            for ineq in tagged.constraint.inequalities() {
                edges.push(Edge {
                    from: node(ineq.plus),
                    to: node(ineq.minus),
                    weight: -ineq.bound,
                    constraint: i,
                    inequality: ineq,
                });
            }
        }
        ConstraintGraph {
            nodes: anchor + 1,
            edges,
        }
    }

    /// Bellman-Ford from a virtual source joined to every node with weight 0.
    fn shortest_potentials(&self) -> Option<Vec<i64>> {
        let mut dist = vec![0i64; self.nodes];
        for _ in 0..self.nodes {
            let mut changed = false;
            for e in &self.edges {
                if dist[e.from] + e.weight < dist[e.to] {
                    dist[e.to] = dist[e.from] + e.weight;
                    changed = true;
                }
            }
            if !changed {
                return Some(dist);
            }
        }
        None
    }

    /// A negative cycle with as few edges as possible, as edge indices in
    /// traversal order. Only called when one exists.
    fn shortest_negative_cycle(&self) -> Vec<usize> {
        const INF: i64 = i64::MAX / 4;
        let n = self.nodes;
        for len in 1..=n {
            for start in 0..n {
                // best[l][v]: lightest walk start -> v with exactly l edges
                let mut best = vec![vec![INF; n]; len + 1];
                let mut via = vec![vec![usize::MAX; n]; len + 1];
                best[0][start] = 0;
                for l in 0..len {
                    for (i, e) in self.edges.iter().enumerate() {
                        if best[l][e.from] < INF && best[l][e.from] + e.weight < best[l + 1][e.to] {
                            best[l + 1][e.to] = best[l][e.from] + e.weight;
                            via[l + 1][e.to] = i;
                        }
                    }
                }
                if best[len][start] < 0 {
                    let mut cycle = Vec::with_capacity(len);
                    let mut at = start;
                    for l in (1..=len).rev() {
                        let e = via[l][at];
                        cycle.push(e);
                        at = self.edges[e].from;
                    }
                    cycle.reverse();
                    return cycle;
                }
            }
        }
        unreachable!("shortest_negative_cycle called on a feasible system")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateStep {
    pub constraint: TaggedConstraint,
    /// The direction in which the constraint is used along the cycle.
    pub inequality: Inequality,
}

/// Constraints of one column whose sum is `0 >= slack` with `slack > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub column: StateId,
    pub steps: Vec<CertificateStep>,
}

impl Certificate {
    /// Sums the inequalities. Returns the right-hand side when every variable
    /// cancels, which makes the sum read `0 >= slack`.
    pub fn slack(&self) -> Option<i64> {
        let mut net: std::collections::BTreeMap<Var, i64> = Default::default();
        let mut bound = 0;
        for step in &self.steps {
            let ineq = step.inequality;
            if let Some(v) = ineq.plus {
                *net.entry(v).or_default() += 1;
            }
            if let Some(v) = ineq.minus {
                *net.entry(v).or_default() -= 1;
            }
            bound += ineq.bound;
        }
        net.values().all(|&c| c == 0).then_some(bound)
    }

    pub fn is_contradictory(&self) -> bool {
        self.slack().is_some_and(|s| s > 0)
    }

    pub fn display<'a>(&'a self, p: &'a Protocol) -> impl fmt::Display + 'a {
        DisplayCertificate { cert: self, p }
    }
}

struct DisplayCertificate<'a> {
    cert: &'a Certificate,
    p: &'a Protocol,
}

impl fmt::Display for DisplayCertificate<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let var = |v: Option<Var>| match v {
            Some(v) => format!("M[{},{}]", p.state_name(v.row), p.state_name(v.column)),
            None => "0".to_string(),
        };
        write!(
            f,
            "no payoff column for `{}`: the following constraints sum to 0 >= {}",
            p.state_name(self.cert.column),
            self.cert.slack().unwrap_or(0)
        )?;
        for step in &self.cert.steps {
            let ineq = step.inequality;
            let succ: Vec<&str> = step
                .constraint
                .successors
                .iter()
                .map(|&q| p.state_name(q))
                .collect();
            write!(
                f,
                "\n  {} - {} >= {}   (from {} facing {} -> {{{}}})",
                var(ineq.plus),
                var(ineq.minus),
                ineq.bound,
                p.state_name(step.constraint.state),
                p.state_name(step.constraint.column),
                succ.join(", ")
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecognitionVerdict {
    /// The protocol is induced by `witness`.
    Pavlovian(GameMatrix),
    /// `rule` is effective but its mirror image is not.
    NotSymmetric { rule: Rule, missing: Rule },
    /// The successors of `pair` are not every combination of the
    /// successors available to each agent separately.
    NotProduct { pair: [StateId; 2] },
    /// Some column admits no payoff values.
    Infeasible(Certificate),
}

impl RecognitionVerdict {
    pub fn is_pavlovian(&self) -> bool {
        matches!(self, RecognitionVerdict::Pavlovian(_))
    }

    pub fn witness(&self) -> Option<&GameMatrix> {
        match self {
            RecognitionVerdict::Pavlovian(m) => Some(m),
            _ => None,
        }
    }
}

/// Successor set `S(q, c)`: the states an agent in `q` may end in after
/// meeting an agent in `c`.
pub fn successor_set(p: &Protocol, q: StateId, c: StateId) -> Vec<StateId> {
    let set: BTreeSet<StateId> = p.successors_of_pair(q, c).iter().map(|r| r[0]).collect();
    set.into_iter().collect()
}

/// The column constraint systems of `p`, one per opponent state.
pub fn constraint_systems(p: &Protocol) -> Vec<ConstraintSystem> {
    p.states()
        .map(|c| {
            let response: Vec<Vec<StateId>> = p.states().map(|q| successor_set(p, q, c)).collect();
            ConstraintSystem::from_response(c, &response)
        })
        .collect()
}

/// Decides whether `p` is induced by a symmetric game under win-stay,
/// lose-shift play, producing an integer witness matrix when it is.
pub fn recognize(p: &Protocol) -> RecognitionVerdict {
    if let Some(rule) = p.symmetry_violation() {
        return RecognitionVerdict::NotSymmetric {
            rule,
            missing: rule.mirrored(),
        };
    }
    for q1 in p.states() {
        for q2 in p.states() {
            let first = successor_set(p, q1, q2);
            let second = successor_set(p, q2, q1);
            let succ = p.successors_of_pair(q1, q2);
            if succ.len() != first.len() * second.len() {
                return RecognitionVerdict::NotProduct { pair: [q1, q2] };
            }
        }
    }

    let k = p.num_states();
    let mut entries = vec![vec![Rational64::from_integer(0); k]; k];
    for system in constraint_systems(p) {
        match system.solve() {
            Ok(values) => {
                for (row, v) in values.into_iter().enumerate() {
                    entries[row][system.column.index()] = Rational64::from_integer(v);
                }
            }
            Err(cert) => return RecognitionVerdict::Infeasible(cert),
        }
    }
    let witness = GameMatrix::new(p.state_names().to_vec(), entries)
        .expect("witness has the protocol's dimensions");
    let rebuilt = witness
        .derive(&Dressing::of(p))
        .expect("dressing copied from the protocol is valid");
    assert!(
        rebuilt.same_relation(p),
        "witness matrix does not reproduce the protocol"
    );
    RecognitionVerdict::Pavlovian(witness)
}
