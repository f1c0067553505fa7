//! Built-in protocols and payoff matrices.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::games::{Dressing, GameMatrix};
use crate::predicate::Predicate;
use crate::protocol::{Protocol, StateId};

/// What an artifact is meant to do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intent {
    /// Stably computes `predicate` for every population size in `sizes`.
    Computes {
        predicate: Predicate,
        sizes: RangeInclusive<u32>,
    },
    /// Does not stably compute `predicate`; kept as a documented negative.
    FailsToCompute { predicate: Predicate, note: &'static str },
    /// From any start with at least one agent in `leaders`, ends with exactly
    /// one such agent, for populations of at least `min_size`.
    ElectsLeader {
        leaders: BTreeSet<StateId>,
        min_size: u32,
    },
    /// Graph dynamics absorbed when every vertex is in `state`.
    AbsorbsAt { state: StateId },
    /// Symmetric but induced by no game.
    NotPavlovian,
}

#[derive(Clone, Debug)]
pub struct NamedArtifact {
    pub name: &'static str,
    pub protocol: Protocol,
    pub matrix: Option<GameMatrix>,
    pub intent: Intent,
    pub provenance: &'static str,
}

pub const NAMES: &[&str] = &[
    "or",
    "and",
    "xor-weak",
    "threshold2",
    "leader-pavlovian",
    "leader-classic",
    "majority",
    "pavlov-pd",
    "cycle3-counterexample",
    "threshold3-classic",
];

pub fn names() -> &'static [&'static str] {
    NAMES
}

pub fn catalog() -> Vec<NamedArtifact> {
    NAMES.iter().map(|n| get(n).expect("catalog names resolve")).collect()
}

pub fn get(name: &str) -> Result<NamedArtifact> {
    let artifact = match name {
        "or" => or(),
        "and" => and(),
        "xor-weak" => xor_weak(),
        "threshold2" => threshold2(),
        "leader-pavlovian" => leader_pavlovian(),
        "leader-classic" => leader_classic(),
        "majority" => majority(),
        "pavlov-pd" => pavlov_pd(),
        "cycle3-counterexample" => cycle3(),
        "threshold3-classic" => threshold3_classic(),
        _ => return Err(Error::NotFound(name.to_string())),
    };
    Ok(artifact.expect("built-in artifacts are well formed"))
}

fn bits() -> crate::protocol::ProtocolBuilder {
    Protocol::builder()
        .states(["zero", "one"])
        .input("zero", "zero")
        .input("one", "one")
        .output("one", true)
}

fn predicate(p: &Protocol, text: &str) -> Result<Predicate> {
    Predicate::parse(text, p.symbol_names())
}

fn or() -> Result<NamedArtifact> {
    let protocol = bits()
        .rule("zero", "one", "one", "one")
        .rule("one", "zero", "one", "one")
        .rule("zero", "zero", "zero", "zero")
        .rule("one", "one", "one", "one")
        .build()?;
    Ok(NamedArtifact {
        name: "or",
        intent: Intent::Computes {
            predicate: predicate(&protocol, "count(one) >= 1")?,
            sizes: 2..=8,
        },
        protocol,
        matrix: None,
        provenance: "two-state broadcast of 1 (logical OR of input bits)",
    })
}

fn and() -> Result<NamedArtifact> {
    let protocol = bits()
        .rule("zero", "one", "zero", "zero")
        .rule("one", "zero", "zero", "zero")
        .rule("zero", "zero", "zero", "zero")
        .rule("one", "one", "one", "one")
        .build()?;
    Ok(NamedArtifact {
        name: "and",
        intent: Intent::Computes {
            predicate: predicate(&protocol, "count(zero) == 0")?,
            sizes: 2..=8,
        },
        protocol,
        matrix: None,
        provenance: "two-state broadcast of 0 (logical AND of input bits)",
    })
}

fn xor_weak() -> Result<NamedArtifact> {
    let protocol = bits()
        .rule("zero", "one", "zero", "one")
        .rule("one", "zero", "one", "zero")
        .rule("zero", "zero", "zero", "zero")
        .rule("one", "one", "zero", "zero")
        .build()?;
    Ok(NamedArtifact {
        name: "xor-weak",
        intent: Intent::FailsToCompute {
            predicate: predicate(&protocol, "count(one) mod 2 == 1")?,
            note: "pairs of ones cancel, so at most one agent ends in `one`; \
                   the other agents never learn the parity",
        },
        protocol,
        matrix: None,
        provenance: "pairwise cancellation of ones (parity in a weak, non-broadcast sense)",
    })
}

fn threshold2() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["zero", "sigma", "two"])
        .input("zero", "zero")
        .input("sigma", "sigma")
        .output("two", true)
        .rule("zero", "zero", "zero", "zero")
        .rule("zero", "sigma", "zero", "sigma")
        .rule("sigma", "zero", "sigma", "zero")
        .rule("zero", "two", "two", "two")
        .rule("two", "zero", "two", "two")
        .rule("sigma", "sigma", "two", "two")
        .rule("sigma", "two", "two", "two")
        .rule("two", "sigma", "two", "two")
        .rule("two", "two", "two", "two")
        .build()?;
    let matrix = GameMatrix::from_integers(
        ["zero", "sigma", "two"],
        &[&[0, 0, -1], &[0, -1, -1], &[1, 1, 1]],
    )?;
    Ok(NamedArtifact {
        name: "threshold2",
        intent: Intent::Computes {
            predicate: predicate(&protocol, "count(sigma) >= 2")?,
            sizes: 2..=8,
        },
        protocol,
        matrix: Some(matrix),
        provenance: "game-derived protocol counting two occurrences of sigma",
    })
}

fn leader_pavlovian() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["L1", "L2", "N"])
        .input("L1", "L1")
        .input("L2", "L2")
        .input("N", "N")
        .output("L1", true)
        .output("L2", true)
        .rule("L1", "L2", "L1", "N")
        .rule("L1", "N", "N", "L2")
        .rule("L2", "N", "N", "L1")
        .rule("N", "N", "N", "N")
        .rule("L2", "L1", "N", "L1")
        .rule("N", "L1", "L2", "N")
        .rule("N", "L2", "L1", "N")
        .rule("L1", "L1", "L2", "L2")
        .rule("L2", "L2", "L1", "L1")
        .build()?;
    let matrix = GameMatrix::from_integers(
        ["L1", "L2", "N"],
        &[&[-3, 0, -3], &[-1, -3, -3], &[-2, -3, 0]],
    )?;
    let leaders = ["L1", "L2"]
        .iter()
        .map(|n| protocol.state_id(n).unwrap())
        .collect();
    Ok(NamedArtifact {
        name: "leader-pavlovian",
        protocol,
        matrix: Some(matrix),
        intent: Intent::ElectsLeader {
            leaders,
            min_size: 3,
        },
        provenance: "game-derived leader election with two alternating leader states",
    })
}

fn leader_classic() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["L", "N"])
        .input("L", "L")
        .input("N", "N")
        .output("L", true)
        .rule("L", "L", "L", "N")
        .rule("L", "N", "L", "N")
        .rule("N", "L", "N", "L")
        .rule("N", "N", "N", "N")
        .build()?;
    let leaders = BTreeSet::from([protocol.state_id("L").unwrap()]);
    Ok(NamedArtifact {
        name: "leader-classic",
        protocol,
        matrix: None,
        intent: Intent::ElectsLeader {
            leaders,
            min_size: 2,
        },
        provenance: "classic asymmetric leader election (the initiator survives)",
    })
}

fn majority() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["N", "Y", "sigma", "tau"])
        .input("sigma", "sigma")
        .input("tau", "tau")
        .output("sigma", true)
        .output("Y", true)
        .rule("N", "Y", "Y", "Y")
        .rule("Y", "N", "Y", "Y")
        .rule("N", "sigma", "Y", "sigma")
        .rule("sigma", "N", "sigma", "Y")
        .rule("Y", "tau", "N", "tau")
        .rule("tau", "Y", "tau", "N")
        .rule("sigma", "tau", "N", "Y")
        .rule("tau", "sigma", "Y", "N")
        .build()?;
    let matrix = GameMatrix::from_integers(
        ["N", "Y", "sigma", "tau"],
        &[&[1, -1, -1, 1], &[0, 1, 1, -1], &[0, 0, 0, -1], &[0, 0, -1, 0]],
    )?;
    Ok(NamedArtifact {
        name: "majority",
        intent: Intent::Computes {
            predicate: predicate(&protocol, "count(sigma) >= count(tau)")?,
            sizes: 2..=8,
        },
        protocol,
        matrix: Some(matrix),
        provenance: "game-derived majority: sigma/tau pairs cancel into Y/N, ties answer yes",
    })
}

fn pavlov_pd() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["C", "D"])
        .input("C", "C")
        .input("D", "D")
        .output("C", true)
        .rule("C", "C", "C", "C")
        .rule("C", "D", "D", "D")
        .rule("D", "C", "D", "D")
        .rule("D", "D", "C", "C")
        .build()?;
    // R = 3, S = 0, T = 5, P = 1 played against a stay threshold of 2
    let matrix = GameMatrix::from_integers(["C", "D"], &[&[3, 0], &[5, 1]])?
        .normalized(Rational64::from_integer(2));
    let state = protocol.state_id("C").unwrap();
    Ok(NamedArtifact {
        name: "pavlov-pd",
        protocol,
        matrix: Some(matrix),
        intent: Intent::AbsorbsAt { state },
        provenance: "win-stay, lose-shift play of the prisoner's dilemma",
    })
}

fn cycle3() -> Result<NamedArtifact> {
    let protocol = Protocol::builder()
        .states(["q0", "q1", "q2"])
        .input("q0", "q0")
        .input("q1", "q1")
        .input("q2", "q2")
        .rule("q0", "q0", "q1", "q1")
        .symmetric_rule("q1", "q0", "q2", "q0")
        .symmetric_rule("q2", "q0", "q0", "q0")
        .build()?;
    Ok(NamedArtifact {
        name: "cycle3-counterexample",
        protocol,
        matrix: None,
        intent: Intent::NotPavlovian,
        provenance: "symmetric deterministic protocol whose responses to q0 rotate q0 -> q1 -> q2 -> q0",
    })
}

fn threshold3_classic() -> Result<NamedArtifact> {
    let names = ["c0", "c1", "c2", "c3"];
    let mut b = Protocol::builder()
        .states(names)
        .input("zero", "c0")
        .input("sigma", "c1")
        .output("c3", true);
    for a in 0..4usize {
        for c in 0..4usize {
            let (x, y) = if a == 3 { (3, 3) } else { ((a + c).min(3), 0) };
            if (x, y) != (a, c) {
                b = b.rule(names[a], names[c], names[x], names[y]);
            }
        }
    }
    let protocol = b.build()?;
    Ok(NamedArtifact {
        name: "threshold3-classic",
        intent: Intent::Computes {
            predicate: predicate(&protocol, "count(sigma) >= 3")?,
            sizes: 2..=6,
        },
        protocol,
        matrix: None,
        provenance: "asymmetric counter: the initiator absorbs the responder's count up to 3, \
                     then 3 spreads",
    })
}

/// Every symmetric deterministic protocol on the states `plus`, `minus`:
/// one per choice of the four reactions.
pub fn two_state_symmetric_deterministic() -> Vec<Protocol> {
    let names = ["plus", "minus"];
    let mut out = Vec::with_capacity(16);
    for mask in 0..16u32 {
        // bit i picks the post-state for pair i of ++, +-, -+, --
        let pick = |i: u32| names[((mask >> i) & 1) as usize];
        let (pp, pm, mp, mm) = (pick(0), pick(1), pick(2), pick(3));
        let p = Protocol::builder()
            .states(names)
            .input("plus", "plus")
            .input("minus", "minus")
            .output("plus", true)
            .rule("plus", "plus", pp, pp)
            .rule("plus", "minus", pm, mp)
            .rule("minus", "plus", mp, pm)
            .rule("minus", "minus", mm, mm)
            .build()
            .expect("two-state protocol is well formed");
        out.push(p);
    }
    out
}

/// Dressing of a catalog protocol, for re-deriving it from its matrix.
pub fn dressing(artifact: &NamedArtifact) -> Dressing {
    Dressing::of(&artifact.protocol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::recognize;

    #[test]
    fn every_name_resolves() {
        assert_eq!(catalog().len(), NAMES.len());
        assert!(matches!(get("nope"), Err(Error::NotFound(_))));
    }

    #[test]
    fn matrices_reproduce_their_protocols() {
        for a in catalog() {
            if let Some(m) = &a.matrix {
                let derived = m.derive(&dressing(&a)).unwrap();
                assert!(derived.same_relation(&a.protocol), "{}", a.name);
            }
        }
    }

    #[test]
    fn threshold2_matrix_entries() {
        let m = get("threshold2").unwrap().matrix.unwrap();
        assert_eq!(
            m,
            GameMatrix::from_integers(["zero", "sigma", "two"], &[&[0, 0, -1], &[0, -1, -1], &[1, 1, 1]])
                .unwrap()
        );
    }

    #[test]
    fn leader_pavlovian_lists_nine_rules() {
        assert_eq!(get("leader-pavlovian").unwrap().protocol.rules().len(), 9);
    }

    #[test]
    fn threshold3_classic_is_asymmetric_and_deterministic() {
        let p = get("threshold3-classic").unwrap().protocol;
        assert!(p.is_deterministic());
        assert!(!p.is_symmetric());
    }

    #[test]
    fn sixteen_distinct_two_state_protocols() {
        let all = two_state_symmetric_deterministic();
        assert_eq!(all.len(), 16);
        for (i, p) in all.iter().enumerate() {
            assert!(p.is_symmetric() && p.is_deterministic());
            for q in &all[i + 1..] {
                assert!(!p.same_relation(q));
            }
        }
    }

    #[test]
    fn cycle3_is_symmetric_deterministic_but_not_pavlovian() {
        let p = get("cycle3-counterexample").unwrap().protocol;
        assert!(p.is_symmetric() && p.is_deterministic());
        assert!(!recognize(&p).is_pavlovian());
    }
}
