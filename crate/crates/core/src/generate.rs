//! Seeded random models for property tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ActionId, MdpSpec, Outcome, StateId};

#[derive(Debug, Clone)]
pub struct RandomMdpConfig {
    pub max_states: usize,
    pub max_actions: usize,
    /// Inclusive range the discount is drawn from.
    pub gamma: (f64, f64),
    /// Probability that a state after the first is terminal.
    pub terminal_probability: f64,
    pub max_successors: usize,
    pub max_rewards: usize,
    pub reward_range: (f64, f64),
}

impl Default for RandomMdpConfig {
    fn default() -> Self {
        RandomMdpConfig {
            max_states: 8,
            max_actions: 4,
            gamma: (0.5, 0.95),
            terminal_probability: 0.2,
            max_successors: 3,
            max_rewards: 2,
            reward_range: (-5.0, 5.0),
        }
    }
}

/// Draws a spec that passes strict validation: every non-terminal
/// (state, action) pair gets at least one successor.
pub fn random_spec(seed: u64, config: &RandomMdpConfig) -> MdpSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ns = rng.gen_range(1..=config.max_states);
    let na = rng.gen_range(1..=config.max_actions);
    let gamma = if config.gamma.0 < config.gamma.1 {
        rng.gen_range(config.gamma.0..=config.gamma.1)
    } else {
        config.gamma.0
    };
    let mut spec = MdpSpec::new(gamma).expect("gamma range within (0, 1]");
    for s in 0..ns {
        let terminal = s > 0 && rng.gen_bool(config.terminal_probability);
        spec.add_state(None, terminal).unwrap();
    }
    for _ in 0..na {
        spec.add_action(None).unwrap();
    }
    for s in 0..ns {
        if spec.states()[s].terminal {
            continue;
        }
        for a in 0..na {
            let (state, action) = (StateId(s), ActionId(a));
            for _ in 0..rng.gen_range(1..=config.max_successors) {
                let next = StateId(rng.gen_range(0..ns));
                let weight = rng.gen_range(0.1..5.0);
                spec.add_transition(state, action, Outcome::NextState(next), weight).unwrap();
            }
            for _ in 0..rng.gen_range(0..=config.max_rewards) {
                let reward = rng.gen_range(config.reward_range.0..=config.reward_range.1);
                let weight = rng.gen_range(0.1..5.0);
                spec.add_transition(state, action, Outcome::Reward(reward), weight).unwrap();
            }
        }
    }
    spec
}
