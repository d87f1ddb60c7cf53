//! Workloads shared by the benchmarks.

use mdpforge::generate::{random_spec, RandomMdpConfig};
use mdpforge::{dsl, MdpSpec};

/// `count` random models with at most `states` states and `actions`
/// actions, seeded `0..count`.
pub fn models(count: u64, states: usize, actions: usize) -> Vec<MdpSpec> {
    let config = RandomMdpConfig {
        max_states: states,
        max_actions: actions,
        ..Default::default()
    };
    (0..count).map(|seed| random_spec(seed, &config)).collect()
}

/// A DSL document with roughly `states * actions` transition lines.
pub fn document(states: usize, actions: usize) -> String {
    let spec = models(1, states, actions).pop().expect("one model");
    dsl::to_text(&spec).expect("generated names are identifiers")
}
