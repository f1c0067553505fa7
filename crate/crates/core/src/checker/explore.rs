use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::protocol::{Configuration, Protocol};

pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

/// Configurations reachable from an initial one, with their strongly
/// connected components. Node 0 is the initial configuration.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    nodes: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    edges: Vec<Vec<usize>>,
    scc_of: Vec<usize>,
    scc_members: Vec<Vec<usize>>,
    bottom: Vec<bool>,
}

impl ReachabilityGraph {
    pub fn initial(&self) -> &Configuration {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Configuration] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Configuration {
        &self.nodes[i]
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn scc_of(&self, i: usize) -> usize {
        self.scc_of[i]
    }

    pub fn num_sccs(&self) -> usize {
        self.scc_members.len()
    }

    pub fn scc_members(&self, scc: usize) -> &[usize] {
        &self.scc_members[scc]
    }

    pub fn is_bottom(&self, scc: usize) -> bool {
        self.bottom[scc]
    }

    /// Ids of the components no edge leaves.
    pub fn bottom_sccs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.scc_members.len()).filter(|&s| self.bottom[s])
    }

    /// Whether `c` was explored and lies in a bottom component.
    pub fn in_bottom_scc(&self, c: &Configuration) -> Option<bool> {
        self.index_of(c).map(|i| self.bottom[self.scc_of[i]])
    }
}

/// Breadth-first closure of `c0` under single interactions.
pub fn explore(p: &Protocol, c0: &Configuration, node_budget: usize) -> Result<ReachabilityGraph> {
    let mut nodes = vec![c0.clone()];
    let mut index = HashMap::from([(c0.clone(), 0)]);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut out = Vec::new();
        for next in p.successors(&nodes[i]) {
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= node_budget {
                        return Err(Error::BudgetExceeded {
                            explored: nodes.len(),
                            input: None,
                        });
                    }
                    let j = nodes.len();
                    index.insert(next.clone(), j);
                    nodes.push(next);
                    queue.push_back(j);
                    j
                }
            };
            out.push(j);
        }
        // nodes are dequeued in index order
        debug_assert_eq!(edges.len(), i);
        edges.push(out);
    }

    let scc_of = strong_components(&edges);
    let num_sccs = scc_of.iter().max().map_or(0, |m| m + 1);
    let mut scc_members = vec![Vec::new(); num_sccs];
    for (v, &s) in scc_of.iter().enumerate() {
        scc_members[s].push(v);
    }
    let mut bottom = vec![true; num_sccs];
    for (v, out) in edges.iter().enumerate() {
        if out.iter().any(|&w| scc_of[w] != scc_of[v]) {
            bottom[scc_of[v]] = false;
        }
    }

    Ok(ReachabilityGraph {
        nodes,
        index,
        edges,
        scc_of,
        scc_members,
        bottom,
    })
}

/// Tarjan's algorithm without recursion. Returns the component id of every
/// vertex; ids are assigned in the order components are completed.
pub fn strong_components(edges: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = edges.len();
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_order = 0;
    let mut next_comp = 0;
    // (vertex, index of the next edge to look at)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if order[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        order[root] = next_order;
        low[root] = next_order;
        next_order += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if let Some(&w) = edges[v].get(*edge) {
                *edge += 1;
                if order[w] == UNSEEN {
                    order[w] = next_order;
                    low[w] = next_order;
                    next_order += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(order[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == order[v] {
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
