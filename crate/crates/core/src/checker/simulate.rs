use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::explore::ReachabilityGraph;
use crate::error::{Error, Result};
use crate::protocol::{Configuration, Protocol, Rule, StateId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulationSummary {
    /// Interactions performed.
    pub steps: u64,
    pub final_configuration: Configuration,
    /// The run stopped early because no interaction can change anything.
    pub silent: bool,
    /// Whether the final configuration lies in a bottom component of the
    /// supplied reachability graph; `None` when no graph was given or the
    /// configuration is not in it.
    pub in_bottom_scc: Option<bool>,
}

fn is_silent(p: &Protocol, c: &Configuration) -> bool {
    c.support().all(|q1| {
        c.support().all(|q2| {
            (q1 == q2 && c.count(q1) < 2)
                || p.successors_of_pair(q1, q2).iter().all(|rhs| *rhs == [q1, q2])
        })
    })
}

/// State of the `agent`-th agent when agents are laid out state by state.
fn state_of_agent(c: &Configuration, mut agent: u32) -> StateId {
    for (i, &count) in c.counts().iter().enumerate() {
        if agent < count {
            return StateId(i as u16);
        }
        agent -= count;
    }
    unreachable!("agent index below population size")
}

/// Random scheduler: each step picks an ordered pair of distinct agents
/// uniformly and applies one of the pair's effective rules, chosen uniformly.
/// Stops after `max_steps` interactions or once the configuration is silent.
pub fn simulate(
    p: &Protocol,
    c0: &Configuration,
    max_steps: u64,
    seed: u64,
    certified: Option<&ReachabilityGraph>,
) -> SimulationSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = c0.clone();
    let n = c.size();
    let mut silent = n < 2 || is_silent(p, &c);
    let mut steps = 0;
    while steps < max_steps && !silent {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let q1 = state_of_agent(&c, i);
        let q2 = state_of_agent(&c, j);
        let options = p.successors_of_pair(q1, q2);
        let rhs = options[rng.gen_range(0..options.len())];
        steps += 1;
        if rhs != [q1, q2] {
            c = p
                .fire(&c, &Rule::new(q1, q2, rhs[0], rhs[1]))
                .expect("drawn pair is present");
            silent = is_silent(p, &c);
        }
    }
    SimulationSummary {
        steps,
        in_bottom_scc: certified.and_then(|g| g.in_bottom_scc(&c)),
        final_configuration: c,
        silent,
    }
}

/// Undirected interaction graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl InteractionGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) outside 0..{vertices}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
        }
        Ok(InteractionGraph { vertices, edges })
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph("a ring needs at least 3 vertices".into()));
        }
        InteractionGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        InteractionGraph::new(n, edges)
    }

    /// One `u v` edge per line; blank lines and `#` comments are ignored.
    /// The vertex count is one more than the largest index mentioned.
    pub fn parse(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [u, v] = fields[..] else {
                return Err(Error::parse(no + 1, "expected `u v`"));
            };
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| Error::parse(no + 1, format!("bad vertex `{s}`")))
            };
            edges.push((parse(u)?, parse(v)?));
        }
        let vertices = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        InteractionGraph::new(vertices, edges)
    }

    pub fn load(path: &Path) -> Result<Self> {
        InteractionGraph::parse(&std::fs::read_to_string(path)?)
    }

    /// `ring:N`, `complete:N` or `file:PATH`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::InvalidGraph(format!("bad graph spec `{spec}`")))?;
        let size = || {
            arg.parse::<usize>()
                .map_err(|_| Error::InvalidGraph(format!("bad vertex count `{arg}`")))
        };
        match kind {
            "ring" => InteractionGraph::ring(size()?),
            "complete" => InteractionGraph::complete(size()?),
            "file" => InteractionGraph::load(Path::new(arg)),
            _ => Err(Error::InvalidGraph(format!("unknown graph kind `{kind}`"))),
        }
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_isolated_vertex(&self) -> bool {
        let mut degree = vec![0usize; self.vertices];
        for &(u, v) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        degree.contains(&0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GraphRun {
    Absorbed { steps: u64, states: Vec<StateId> },
    Timeout { steps: u64, states: Vec<StateId> },
}

impl GraphRun {
    pub fn absorbed(&self) -> bool {
        matches!(self, GraphRun::Absorbed { .. })
    }

    pub fn states(&self) -> &[StateId] {
        match self {
            GraphRun::Absorbed { states, .. } | GraphRun::Timeout { states, .. } => states,
        }
    }
}

/// Uniform random vertex states drawn from `choices`.
pub fn random_states(vertices: usize, choices: &[StateId], seed: u64) -> Vec<StateId> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..vertices)
        .map(|_| choices[rng.gen_range(0..choices.len())])
        .collect()
}

/// Dynamics on a graph: each step draws an edge uniformly and lets its two
/// endpoints interact. The run is absorbed as soon as the vertex states
/// equal `target`; with a zero step budget nothing runs and the result is a
/// timeout.
pub fn simulate_on_graph(
    p: &Protocol,
    g: &InteractionGraph,
    initial: &[StateId],
    target: Option<&[StateId]>,
    max_steps: u64,
    seed: u64,
) -> Result<GraphRun> {
    if g.edges.is_empty() {
        return Err(Error::InvalidGraph("graph has no edges".into()));
    }
    if initial.len() != g.vertices {
        return Err(Error::invalid(format!(
            "{} initial states for {} vertices",
            initial.len(),
            g.vertices
        )));
    }
    let mut states = initial.to_vec();
    if max_steps == 0 {
        return Ok(GraphRun::Timeout { steps: 0, states });
    }
    let symmetric = p.is_symmetric();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for step in 0..max_steps {
        if target == Some(&states[..]) {
            return Ok(GraphRun::Absorbed { steps: step, states });
        }
        let (mut u, mut v) = g.edges[rng.gen_range(0..g.edges.len())];
        // roles matter only when the rules do
        if !symmetric && rng.gen_bool(0.5) {
            std::mem::swap(&mut u, &mut v);
        }
        let options = p.successors_of_pair(states[u], states[v]);
        let rhs = options[rng.gen_range(0..options.len())];
        states[u] = rhs[0];
        states[v] = rhs[1];
    }
    if target == Some(&states[..]) {
        return Ok(GraphRun::Absorbed {
            steps: max_steps,
            states,
        });
    }
    Ok(GraphRun::Timeout {
        steps: max_steps,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pavlov() -> Protocol {
        Protocol::builder()
            .states(["C", "D"])
            .rule("C", "D", "D", "D")
            .rule("D", "C", "D", "D")
            .rule("D", "D", "C", "C")
            .build()
            .unwrap()
    }

    #[test]
    fn identity_protocol_never_moves() {
        let p = Protocol::builder().states(["a", "b"]).build().unwrap();
        let c0 = Configuration::new(vec![2, 3]);
        for seed in 0..5 {
            let s = simulate(&p, &c0, 1000, seed, None);
            assert_eq!(s.final_configuration, c0);
            assert!(s.silent);
            assert_eq!(s.steps, 0);
        }
    }

    #[test]
    fn same_seed_same_run() {
        let p = pavlov();
        let c0 = Configuration::new(vec![3, 4]);
        assert_eq!(simulate(&p, &c0, 50, 9, None), simulate(&p, &c0, 50, 9, None));
    }

    #[test]
    fn complete_graph_from_all_defect_absorbs() {
        let p = pavlov();
        let g = InteractionGraph::complete(6).unwrap();
        let d = p.state_id("D").unwrap();
        let c = p.state_id("C").unwrap();
        let run = simulate_on_graph(&p, &g, &[d; 6], Some(&[c; 6]), 1_000_000, 1).unwrap();
        assert!(run.absorbed());
    }

    #[test]
    fn zero_steps_is_a_timeout_with_the_initial_vector() {
        let p = pavlov();
        let g = InteractionGraph::ring(4).unwrap();
        let d = p.state_id("D").unwrap();
        let c = p.state_id("C").unwrap();
        let run = simulate_on_graph(&p, &g, &[d, c, d, c], Some(&[c; 4]), 0, 1).unwrap();
        assert_eq!(run, GraphRun::Timeout { steps: 0, states: vec![d, c, d, c] });
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let p = pavlov();
        let g = InteractionGraph::new(2, vec![]).unwrap();
        let c = p.state_id("C").unwrap();
        assert!(matches!(
            simulate_on_graph(&p, &g, &[c, c], None, 10, 0),
            Err(Error::InvalidGraph(_))
        ));
    }

    #[test]
    fn graph_specs_and_files() {
        assert_eq!(InteractionGraph::from_spec("ring:5").unwrap().edges().len(), 5);
        assert_eq!(InteractionGraph::from_spec("complete:4").unwrap().edges().len(), 6);
        assert!(InteractionGraph::from_spec("torus:3").is_err());
        let g = InteractionGraph::parse("# path\n0 1\n1 2\n").unwrap();
        assert_eq!(g.vertices(), 3);
        assert!(!g.has_isolated_vertex());
        assert!(matches!(InteractionGraph::parse("0 1\n2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(InteractionGraph::parse("1 1\n").is_err());
    }
}
