//! End-to-end acceptance checks. Runs every criterion, prints one line per
//! criterion and exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use popgame::checker::{
    check_eventual_property, check_stable, initial_set_with_leader, random_states,
    simulate_on_graph, ConfigProperty, InteractionGraph, DEFAULT_NODE_BUDGET,
};
use popgame::games::{recognize, Constraint, Dressing, GameMatrix, RecognitionVerdict};
use popgame::library::{self, dressing, two_state_symmetric_deterministic};
use popgame::predicate::Predicate;
use popgame::protocol::{Configuration, Protocol, StateId};
use popgame::search::falsify;
use popgame::text::parse_protocol;
use popgame::transform::symmetrize;

type Outcome = Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pred(p: &Protocol, text: &str) -> Predicate {
    Predicate::parse(text, p.symbol_names()).expect("predicate parses")
}

// Rule sets as published, identity rules included where they were listed.
const THRESHOLD2_RULES: &str = "\
states: zero sigma two
inputs: sigma->sigma zero->zero
outputs: zero=0 sigma=0 two=1
rule: zero zero -> zero zero
rule: zero sigma -> zero sigma
rule: sigma zero -> sigma zero
rule: zero two -> two two
rule: two zero -> two two
rule: sigma sigma -> two two
rule: sigma two -> two two
rule: two sigma -> two two
rule: two two -> two two
";

const LEADER_RULES: &str = "\
states: L1 L2 N
outputs: L1=0 L2=0 N=0
rule: L1 L2 -> L1 N
rule: L1 N -> N L2
rule: L2 N -> N L1
rule: N N -> N N
rule: L2 L1 -> N L1
rule: N L1 -> L2 N
rule: N L2 -> L1 N
rule: L1 L1 -> L2 L2
rule: L2 L2 -> L1 L1
";

const MAJORITY_RULES: &str = "\
states: N Y sigma tau
inputs: sigma->sigma tau->tau
outputs: N=0 Y=1 sigma=1 tau=0
rule: N Y -> Y Y
rule: Y N -> Y Y
rule: N sigma -> Y sigma
rule: sigma N -> sigma Y
rule: Y tau -> N tau
rule: tau Y -> tau N
rule: sigma tau -> N Y
rule: tau sigma -> Y N
";

fn criterion_1() -> Outcome {
    let cases = [
        (["zero", "sigma", "two"].as_slice(), [[0, 0, -1], [0, -1, -1], [1, 1, 1]].map(|r| r.to_vec()).to_vec(), THRESHOLD2_RULES),
        (["L1", "L2", "N"].as_slice(), [[-3, 0, -3], [-1, -3, -3], [-2, -3, 0]].map(|r| r.to_vec()).to_vec(), LEADER_RULES),
    ];
    let majority_matrix: Vec<Vec<i64>> =
        vec![vec![1, -1, -1, 1], vec![0, 1, 1, -1], vec![0, 0, 0, -1], vec![0, 0, -1, 0]];
    let mut all = cases.to_vec();
    all.push((["N", "Y", "sigma", "tau"].as_slice(), majority_matrix, MAJORITY_RULES));
    for (states, rows, expected) in all {
        let rows: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let m = GameMatrix::from_integers(states.iter().copied(), &rows).map_err(|e| e.to_string())?;
        let expected = parse_protocol(expected).map_err(|e| e.to_string())?;
        let derived = m.derive(&Dressing::of(&expected)).map_err(|e| e.to_string())?;
        ensure(derived.non_identity_rules() == expected.non_identity_rules(), || {
            format!("rule sets differ for matrix over {states:?}")
        })?;
        ensure(derived.same_relation(&expected), || format!("relations differ for {states:?}"))?;
    }
    Ok(())
}

fn round_trip(p: &Protocol) -> Outcome {
    match recognize(p) {
        RecognitionVerdict::Pavlovian(m) => {
            let back = m.derive(&Dressing::of(p)).map_err(|e| e.to_string())?;
            ensure(back.same_relation(p), || "witness derives a different protocol".into())
        }
        other => Err(format!("not recognized: {other:?}")),
    }
}

fn criterion_2() -> Outcome {
    for name in ["or", "and", "threshold2", "leader-pavlovian", "majority", "pavlov-pd"] {
        let p = library::get(name).map_err(|e| e.to_string())?.protocol;
        round_trip(&p).map_err(|e| format!("{name}: {e}"))?;
    }
    let two = two_state_symmetric_deterministic();
    ensure(two.len() == 16, || format!("{} two-state protocols", two.len()))?;
    for (i, p) in two.iter().enumerate() {
        round_trip(p).map_err(|e| format!("two-state #{i}: {e}"))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let cycle = library::get("cycle3-counterexample").unwrap().protocol;
    match recognize(&cycle) {
        RecognitionVerdict::Infeasible(cert) => {
            ensure(cert.steps.len() == 3, || format!("{} certificate steps", cert.steps.len()))?;
            ensure(
                cert.steps
                    .iter()
                    .all(|s| matches!(s.constraint.constraint, Constraint::Dominates { .. }) && s.inequality.bound >= 1),
                || "certificate step is not a strict preference".into(),
            )?;
            ensure(cert.is_contradictory(), || "certificate does not sum to a contradiction".into())?;
        }
        other => return Err(format!("cycle3: {other:?}")),
    }
    let classic = library::get("leader-classic").unwrap().protocol;
    ensure(matches!(recognize(&classic), RecognitionVerdict::NotSymmetric { .. }), || {
        "leader-classic not reported as asymmetric".into()
    })
}

fn criterion_4() -> Outcome {
    let suite = [
        ("or", "count(one) >= 1"),
        ("and", "count(zero) == 0"),
        ("threshold2", "count(sigma) >= 2"),
        ("majority", "count(sigma) >= count(tau)"),
    ];
    for (name, text) in suite {
        let p = library::get(name).unwrap().protocol;
        let pr = pred(&p, text);
        for n in 2..=8 {
            let v = check_stable(&p, &pr, n, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            ensure(v.computes(), || format!("{name} fails at n = {n}: {v:?}"))?;
        }
    }
    let xor = library::get("xor-weak").unwrap().protocol;
    let v = check_stable(&xor, &pred(&xor, "count(one) mod 2 == 1"), 2, DEFAULT_NODE_BUDGET)
        .map_err(|e| e.to_string())?;
    let cex = v.counterexample().ok_or("xor-weak computes parity at n = 2")?;
    let zero = xor.state_id("zero").unwrap();
    let one = xor.state_id("one").unwrap();
    let mixed = Configuration::from_pairs(2, &[(zero, 1), (one, 1)]);
    ensure(cex.configuration == mixed && cex.bottom_scc == vec![mixed.clone()], || {
        format!("unexpected witness {cex:?}")
    })
}

fn leaders(p: &Protocol, names: &[&str]) -> BTreeSet<StateId> {
    names.iter().map(|n| p.state_id(n).unwrap()).collect()
}

fn criterion_5() -> Outcome {
    let p = library::get("leader-pavlovian").unwrap().protocol;
    let l = leaders(&p, &["L1", "L2"]);
    let all: BTreeSet<StateId> = p.states().collect();
    let prop = ConfigProperty::ExactlyOneIn(l.clone());
    for n in 3..=5 {
        let set = initial_set_with_leader(&p, &all, &l, n);
        let v = check_eventual_property(&p, &set, &prop, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(v.computes(), || format!("fails at n = {n}: {v:?}"))?;
    }
    let set = initial_set_with_leader(&p, &all, &l, 2);
    let v = check_eventual_property(&p, &set, &prop, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    let cex = v.counterexample().ok_or("passes at n = 2")?;
    let (l1, l2) = (p.state_id("L1").unwrap(), p.state_id("L2").unwrap());
    let mut expected = vec![
        Configuration::from_pairs(3, &[(l1, 2)]),
        Configuration::from_pairs(3, &[(l2, 2)]),
    ];
    expected.sort();
    ensure(cex.bottom_scc == expected, || format!("unexpected bottom component {:?}", cex.bottom_scc))
}

fn criterion_6() -> Outcome {
    let t3 = library::get("threshold3-classic").unwrap().protocol;
    let s = symmetrize(&t3);
    ensure(s.symmetry_violation().is_none(), || "symmetrized threshold3 is asymmetric".into())?;
    let pr = pred(&s, "count(sigma) >= 3");
    for n in 3..=6 {
        let v = check_stable(&s, &pr, n, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(v.computes(), || format!("threshold3 fails at n = {n}: {v:?}"))?;
    }
    let classic = library::get("leader-classic").unwrap().protocol;
    let s = symmetrize(&classic);
    ensure(s.symmetry_violation().is_none(), || "symmetrized leader-classic is asymmetric".into())?;
    let l = leaders(&s, &["L", "L_p"]);
    let all: BTreeSet<StateId> = s.states().collect();
    let prop = ConfigProperty::ExactlyOneIn(l.clone());
    for n in 3..=4 {
        let set = initial_set_with_leader(&s, &all, &l, n);
        let v = check_eventual_property(&s, &set, &prop, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(v.computes(), || format!("leader fails at n = {n}: {v:?}"))?;
    }
    for name in library::names() {
        let p = library::get(name).unwrap().protocol;
        ensure(symmetrize(&p).is_symmetric(), || format!("symmetrize({name}) is asymmetric"))?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let symbols = popgame::search::harness_symbols();
    let parse = |t: &str| Predicate::parse(t, &symbols).unwrap();
    let target = falsify(&parse("count(sigma) >= 3"), 3, 4).map_err(|e| e.to_string())?;
    ensure(target.survivors.is_empty(), || format!("{} survivors for threshold 3", target.survivors.len()))?;
    for control in ["count(sigma) >= 2", "count(sigma) >= 1"] {
        let r = falsify(&parse(control), 3, 4).map_err(|e| e.to_string())?;
        ensure(!r.survivors.is_empty(), || format!("no survivor for control `{control}`"))?;
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let p = library::get("pavlov-pd").unwrap().protocol;
    let c = p.state_id("C").unwrap();
    let choices: Vec<StateId> = p.states().collect();
    for spec in ["complete:6", "complete:12", "ring:8", "ring:12"] {
        let g = InteractionGraph::from_spec(spec).map_err(|e| e.to_string())?;
        let target = vec![c; g.vertices()];
        for trial in 0..100u64 {
            let initial = random_states(g.vertices(), &choices, 1_000 + trial);
            let run = simulate_on_graph(&p, &g, &initial, Some(&target), 1_000_000, trial)
                .map_err(|e| e.to_string())?;
            ensure(run.absorbed(), || format!("{spec} trial {trial} not absorbed"))?;
        }
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let k = rng.gen_range(2..=4usize);
        let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let rows_ref: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let names: Vec<String> = (0..k).map(|q| format!("q{q}")).collect();
        let m = GameMatrix::from_integers(names, &rows_ref).map_err(|e| e.to_string())?;
        let p = m.derive(&Dressing::default()).map_err(|e| e.to_string())?;
        ensure(p.is_symmetric(), || format!("matrix {i} derives an asymmetric protocol"))?;
        round_trip(&p).map_err(|e| format!("matrix {i}: {e}"))?;
        let factor = Rational64::new(rng.gen_range(1..=9), rng.gen_range(1..=9));
        let scaled = m.scaled(factor).derive(&Dressing::default()).map_err(|e| e.to_string())?;
        ensure(scaled.same_relation(&p), || format!("matrix {i} not scale invariant"))?;
    }
    // catalog matrices too
    for a in library::catalog() {
        if let Some(m) = &a.matrix {
            let p = m.derive(&dressing(&a)).map_err(|e| e.to_string())?;
            ensure(p.same_relation(&a.protocol), || format!("{} drifted from its matrix", a.name))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("matrix to protocol fidelity", Duration::from_secs(1), criterion_1),
        ("recognition positives", Duration::from_secs(5), criterion_2),
        ("recognition negatives", Duration::from_secs(1), criterion_3),
        ("stable-computation suite", Duration::from_secs(60), criterion_4),
        ("leader property", Duration::from_secs(30), criterion_5),
        ("symmetrization", Duration::from_secs(120), criterion_6),
        ("impossibility harness", Duration::from_secs(600), criterion_7),
        ("graph dynamics", Duration::from_secs(60), criterion_8),
        ("random matrices", Duration::from_secs(60), criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= *limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
        });
        match outcome {
            Ok(()) => println!("criterion {}: PASS {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
