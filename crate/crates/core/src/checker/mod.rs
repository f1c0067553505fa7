//! Stable computation under fairness, decided by exhaustive reachability:
//! on a finite configuration graph the configurations a fair execution
//! visits infinitely often form exactly a bottom strongly connected
//! component. Also hosts the random schedulers.

mod explore;
mod simulate;
mod stable;

pub use explore::{explore, strong_components, ReachabilityGraph, DEFAULT_NODE_BUDGET};
pub use simulate::{
    random_states, simulate, simulate_on_graph, GraphRun, InteractionGraph, SimulationSummary,
};
pub use stable::{
    check_eventual_property, check_input, check_stable, initial_set_with_leader, ConfigProperty,
    Counterexample, StableVerdict,
};
