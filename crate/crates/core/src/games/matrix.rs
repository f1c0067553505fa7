use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::protocol::{Protocol, Rule, StateId};

/// Square payoff matrix of a symmetric game, rows for the player's strategy
/// and columns for the opponent's. Entries are stored with the stay
/// threshold already subtracted, so an agent stays exactly when its entry
/// is non-negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameMatrix {
    states: Vec<String>,
    entries: Vec<Vec<Rational64>>,
}

impl GameMatrix {
    pub fn new(states: Vec<String>, entries: Vec<Vec<Rational64>>) -> Result<Self> {
        let k = states.len();
        if k == 0 {
            return Err(Error::invalid("matrix needs at least one state"));
        }
        if entries.len() != k || entries.iter().any(|row| row.len() != k) {
            return Err(Error::invalid(format!("matrix must be {k}x{k}")));
        }
        let unique: BTreeSet<_> = states.iter().collect();
        if unique.len() != k {
            return Err(Error::invalid("duplicate state in matrix header"));
        }
        Ok(GameMatrix { states, entries })
    }

    /// Builds a matrix from integer entries.
    pub fn from_integers<S: Into<String>>(
        states: impl IntoIterator<Item = S>,
        rows: &[&[i64]],
    ) -> Result<Self> {
        let entries = rows
            .iter()
            .map(|row| row.iter().map(|&v| Rational64::from_integer(v)).collect())
            .collect();
        GameMatrix::new(states.into_iter().map(Into::into).collect(), entries)
    }

    /// Subtracts `delta` from every entry.
    pub fn normalized(&self, delta: Rational64) -> GameMatrix {
        self.map(|v| v - delta)
    }

    pub fn scaled(&self, factor: Rational64) -> GameMatrix {
        self.map(|v| v * factor)
    }

    fn map(&self, f: impl Fn(Rational64) -> Rational64) -> GameMatrix {
        GameMatrix {
            states: self.states.clone(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn entry(&self, row: StateId, column: StateId) -> Rational64 {
        self.entries[row.index()][column.index()]
    }

    pub fn rows(&self) -> &[Vec<Rational64>] {
        &self.entries
    }

    /// Strategies maximizing the payoff against `opponent`, restricted to
    /// strategies other than `excluded` when given. Ties return every
    /// maximizer.
    pub fn best_response(&self, opponent: StateId, excluded: Option<StateId>) -> BTreeSet<StateId> {
        let candidates = (0..self.dim() as u16)
            .map(StateId)
            .filter(|&z| Some(z) != excluded);
        let best = candidates
            .clone()
            .map(|z| self.entry(z, opponent))
            .max();
        match best {
            Some(best) => candidates
                .filter(|&z| self.entry(z, opponent) == best)
                .collect(),
            None => BTreeSet::new(),
        }
    }

    /// Post-interaction states available to an agent in `me` facing `opponent`.
    fn reaction(&self, me: StateId, opponent: StateId) -> BTreeSet<StateId> {
        if !self.entry(me, opponent).is_negative() {
            return BTreeSet::from([me]);
        }
        let switch = self.best_response(opponent, Some(me));
        if switch.is_empty() {
            // a single-strategy game leaves nowhere to go
            BTreeSet::from([me])
        } else {
            switch
        }
    }

    /// The protocol induced by win-stay, lose-shift play of this game.
    ///
    /// For each ordered pair the initiator keeps its state when its entry is
    /// non-negative and otherwise moves to a best response among the other
    /// strategies; the responder does the same with the transposed entry.
    /// Ties produce every combination of choices.
    pub fn derive(&self, dressing: &Dressing) -> Result<Protocol> {
        let mut rules = Vec::new();
        for q1 in (0..self.dim() as u16).map(StateId) {
            for q2 in (0..self.dim() as u16).map(StateId) {
                let first = self.reaction(q1, q2);
                let second = self.reaction(q2, q1);
                if first.len() == 1 && second.len() == 1 && first.contains(&q1) && second.contains(&q2) {
                    continue;
                }
                for &a in &first {
                    for &b in &second {
                        rules.push(Rule::new(q1, q2, a, b));
                    }
                }
            }
        }
        dressing.apply(&self.states, rules)
    }

    pub fn display(&self) -> impl fmt::Display + '_ {
        DisplayMatrix(self)
    }
}

struct DisplayMatrix<'a>(&'a GameMatrix);

impl fmt::Display for DisplayMatrix<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.0;
        let cells: Vec<Vec<String>> = m
            .entries
            .iter()
            .map(|row| row.iter().map(|v| v.to_string()).collect())
            .collect();
        let width = cells
            .iter()
            .flatten()
            .chain(m.states.iter())
            .map(|s| s.len())
            .max()
            .unwrap_or(1);
        let label = m.states.iter().map(|s| s.len()).max().unwrap_or(1);
        write!(f, "{:label$}", "")?;
        for s in &m.states {
            write!(f, " {s:>width$}")?;
        }
        for (s, row) in m.states.iter().zip(&cells) {
            write!(f, "\n{s:label$}")?;
            for v in row {
                write!(f, " {v:>width$}")?;
            }
        }
        Ok(())
    }
}

/// Input and output data a derived protocol carries besides its rules.
///
/// An empty input list means every state is its own input symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dressing {
    pub inputs: Vec<(String, String)>,
    pub outputs: BTreeMap<String, bool>,
}

impl Dressing {
    pub fn new(inputs: &[(&str, &str)], ones: &[&str]) -> Self {
        Dressing {
            inputs: inputs
                .iter()
                .map(|(s, q)| (s.to_string(), q.to_string()))
                .collect(),
            outputs: ones.iter().map(|q| (q.to_string(), true)).collect(),
        }
    }

    /// Copies the alphabet, input map and output map of `p`.
    pub fn of(p: &Protocol) -> Self {
        Dressing {
            inputs: p
                .symbols()
                .map(|s| (p.symbol_name(s).to_string(), p.state_name(p.input_of(s)).to_string()))
                .collect(),
            outputs: p
                .states()
                .map(|q| (p.state_name(q).to_string(), p.output_of(q)))
                .collect(),
        }
    }

    fn apply(&self, states: &[String], rules: Vec<Rule>) -> Result<Protocol> {
        let lookup = |name: &str| {
            states
                .iter()
                .position(|s| s == name)
                .map(|i| StateId(i as u16))
                .ok_or_else(|| Error::invalid(format!("dressing names unknown state `{name}`")))
        };
        let (symbols, input_map) = if self.inputs.is_empty() {
            (
                states.to_vec(),
                (0..states.len() as u16).map(StateId).collect(),
            )
        } else {
            let mut symbols = Vec::new();
            let mut map = Vec::new();
            for (sym, q) in &self.inputs {
                symbols.push(sym.clone());
                map.push(lookup(q)?);
            }
            (symbols, map)
        };
        for name in self.outputs.keys() {
            lookup(name)?;
        }
        let outputs = states
            .iter()
            .map(|s| self.outputs.get(s).copied().unwrap_or(false))
            .collect();
        Protocol::new(states.to_vec(), symbols, input_map, outputs, rules)
    }
}

/// The ±1 matrix reproducing a symmetric deterministic two-state protocol:
/// `+1` where the initiator keeps its state, `-1` where it changes.
pub fn two_state_matrix(p: &Protocol) -> Result<GameMatrix> {
    if p.num_states() != 2 {
        return Err(Error::invalid("two_state_matrix needs exactly two states"));
    }
    if !p.is_deterministic() || !p.is_symmetric() {
        return Err(Error::invalid(
            "two_state_matrix needs a symmetric deterministic protocol",
        ));
    }
    let entries = p
        .states()
        .map(|q1| {
            p.states()
                .map(|q2| {
                    if p.successors_of_pair(q1, q2)[0][0] == q1 {
                        Rational64::one()
                    } else {
                        -Rational64::one()
                    }
                })
                .collect()
        })
        .collect();
    GameMatrix::new(p.state_names().to_vec(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(p: &GameMatrix, names: &[&str]) -> BTreeSet<StateId> {
        names
            .iter()
            .map(|n| StateId(p.states().iter().position(|s| s == n).unwrap() as u16))
            .collect()
    }

    #[test]
    fn prisoners_dilemma_best_response_is_defect() {
        // R=3, S=0, T=5, P=1
        let m = GameMatrix::from_integers(["C", "D"], &[&[3, 0], &[5, 1]]).unwrap();
        assert_eq!(m.best_response(StateId(0), None), ids(&m, &["D"]));
        assert_eq!(m.best_response(StateId(1), None), ids(&m, &["D"]));
    }

    #[test]
    fn excluded_best_response() {
        let m = GameMatrix::from_integers(
            ["0", "s", "2"],
            &[&[0, 0, -1], &[0, -1, -1], &[1, 1, 1]],
        )
        .unwrap();
        assert_eq!(m.best_response(StateId(1), Some(StateId(1))), ids(&m, &["2"]));
        assert_eq!(m.best_response(StateId(1), Some(StateId(2))), ids(&m, &["0"]));
    }

    #[test]
    fn constant_column_ties_everything_allowed() {
        let m = GameMatrix::from_integers(["a", "b", "c"], &[&[1, 0, 0], &[1, 0, 0], &[1, 0, 0]]).unwrap();
        assert_eq!(m.best_response(StateId(0), Some(StateId(1))), ids(&m, &["a", "c"]));
        assert_eq!(m.best_response(StateId(0), None), ids(&m, &["a", "b", "c"]));
    }

    #[test]
    fn non_negative_matrix_derives_identity() {
        let m = GameMatrix::from_integers(["a", "b", "c"], &[&[0, 2, 0], &[1, 0, 5], &[0, 0, 3]]).unwrap();
        let p = m.derive(&Dressing::default()).unwrap();
        assert!(p.rules().is_empty());
        assert!(p.effective_rules().iter().all(Rule::is_identity));
    }

    #[test]
    fn ties_make_derive_nondeterministic_but_symmetric() {
        let m = GameMatrix::from_integers(["a", "b", "c"], &[&[-1, 0, 0], &[0, 0, 0], &[0, 0, 0]]).unwrap();
        let p = m.derive(&Dressing::default()).unwrap();
        assert!(!p.is_deterministic());
        assert!(p.is_symmetric());
        // a a -> {b, c} x {b, c}
        assert_eq!(p.successors_of_pair(StateId(0), StateId(0)).len(), 4);
    }

    #[test]
    fn two_state_matrix_of_pavlov() {
        let p = Protocol::builder()
            .states(["C", "D"])
            .rule("C", "D", "D", "D")
            .rule("D", "C", "D", "D")
            .rule("D", "D", "C", "C")
            .build()
            .unwrap();
        let m = two_state_matrix(&p).unwrap();
        assert_eq!(m, GameMatrix::from_integers(["C", "D"], &[&[1, -1], &[1, -1]]).unwrap());
        assert!(m.derive(&Dressing::of(&p)).unwrap().same_relation(&p));
    }

    #[test]
    fn two_state_matrix_rejects_bad_input() {
        let asymmetric = Protocol::builder()
            .states(["a", "b"])
            .rule("a", "a", "a", "b")
            .build()
            .unwrap();
        assert!(two_state_matrix(&asymmetric).is_err());
        let three = Protocol::builder().states(["a", "b", "c"]).build().unwrap();
        assert!(two_state_matrix(&three).is_err());
    }

    #[test]
    fn normalization_and_scaling() {
        let m = GameMatrix::from_integers(["a", "b"], &[&[3, 1], &[2, 5]]).unwrap();
        let n = m.normalized(Rational64::from_integer(2));
        assert_eq!(n, GameMatrix::from_integers(["a", "b"], &[&[1, -1], &[0, 3]]).unwrap());
        let s = n.scaled(Rational64::new(1, 3));
        assert_eq!(s.entry(StateId(1), StateId(1)), Rational64::one());
        assert!(n.derive(&Dressing::default()).unwrap().same_relation(&s.derive(&Dressing::default()).unwrap()));
    }
}
