//! Episodic simulation behind a `reset`/`step` interface.
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, so trajectories are reproducible across platforms for a
//! given seed. Each step draws the next state first and then, independently,
//! the reward.

use std::sync::Arc;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph;
use crate::model::{ActionId, StateId, ValidatedMdp};
use crate::solver::report::json_number;

/// Safety cap for random-policy episodes.
pub const DEFAULT_STEP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("environment has not been reset")]
    NotReset,
    #[error("episode is done; call reset before stepping again")]
    SteppedWhenDone,
    #[error("invalid action {action} (action space has {num_actions} actions)")]
    InvalidAction { action: usize, num_actions: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// Index into the reward distribution's outcomes.
    pub reward_index: usize,
    pub reward_probability: f64,
    pub next_state_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: StateId,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

struct PairSampler {
    next: WeightedIndex<f64>,
    support: Vec<usize>,
    reward: WeightedIndex<f64>,
}

/// A running episode over a shared model.
pub struct EnvSession {
    mdp: Arc<ValidatedMdp>,
    samplers: Vec<Option<PairSampler>>,
    rng: ChaCha8Rng,
    current: Option<usize>,
    done: bool,
    steps: usize,
    episode_reward: f64,
}

/// Creates a session with the first declared state as the initial state.
pub fn make_env(mdp: impl Into<Arc<ValidatedMdp>>, seed: u64) -> EnvSession {
    let mdp = mdp.into();
    let mut samplers = Vec::with_capacity(mdp.num_states() * mdp.num_actions());
    for s in 0..mdp.num_states() {
        for a in 0..mdp.num_actions() {
            if mdp.is_terminal(s) {
                samplers.push(None);
                continue;
            }
            let row = mdp.transition_row(s, a);
            let support: Vec<usize> = (0..row.len()).filter(|&i| row[i] > 0.0).collect();
            let next = WeightedIndex::new(support.iter().map(|&i| row[i])).expect("validated row has mass");
            let reward = WeightedIndex::new(mdp.reward_distribution(s, a).outcomes().iter().map(|&(_, p)| p))
                .expect("validated reward distribution has mass");
            samplers.push(Some(PairSampler { next, support, reward }));
        }
    }
    EnvSession {
        mdp,
        samplers,
        rng: ChaCha8Rng::seed_from_u64(seed),
        current: None,
        done: false,
        steps: 0,
        episode_reward: 0.0,
    }
}

impl EnvSession {
    pub fn mdp(&self) -> &ValidatedMdp {
        &self.mdp
    }

    pub fn observation_space(&self) -> usize {
        self.mdp.num_states()
    }

    pub fn action_space(&self) -> usize {
        self.mdp.num_actions()
    }

    pub fn current(&self) -> Option<StateId> {
        self.current.map(StateId)
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn episode_reward(&self) -> f64 {
        self.episode_reward
    }

    pub fn reset(&mut self) -> StateId {
        self.current = Some(0);
        self.done = self.mdp.is_terminal(0);
        self.steps = 0;
        self.episode_reward = 0.0;
        StateId(0)
    }

    pub fn step(&mut self, action: ActionId) -> Result<StepResult, EnvError> {
        let state = self.current.ok_or(EnvError::NotReset)?;
        if self.done {
            return Err(EnvError::SteppedWhenDone);
        }
        let na = self.mdp.num_actions();
        if action.0 >= na {
            return Err(EnvError::InvalidAction {
                action: action.0,
                num_actions: na,
            });
        }
        let sampler = self.samplers[state * na + action.0]
            .as_ref()
            .expect("non-terminal state has samplers");
        let next = sampler.support[sampler.next.sample(&mut self.rng)];
        let reward_index = sampler.reward.sample(&mut self.rng);
        let (reward, reward_probability) = self.mdp.reward_distribution(state, action.0).outcomes()[reward_index];

        self.current = Some(next);
        self.done = self.mdp.is_terminal(next);
        self.steps += 1;
        self.episode_reward += reward;
        Ok(StepResult {
            observation: StateId(next),
            reward,
            done: self.done,
            info: StepInfo {
                reward_index,
                reward_probability,
                next_state_probability: self.mdp.probability(state, action.0, next),
            },
        })
    }

    /// One-line summary: `state=<name> steps=<n> return=<r> done=<bool>`.
    pub fn render_text(&self) -> Result<String, EnvError> {
        let state = self.current.ok_or(EnvError::NotReset)?;
        Ok(format!(
            "state={} steps={} return={} done={}",
            self.mdp.states()[state].name,
            self.steps,
            self.episode_reward,
            self.done
        ))
    }

    /// DOT text of the model with the current state filled.
    pub fn render_dot(&self) -> Result<String, EnvError> {
        let state = self.current.ok_or(EnvError::NotReset)?;
        Ok(graph::to_dot_highlighted(&graph::to_graph(&self.mdp), Some(StateId(state))))
    }
}

/// Uniform random action selection on its own ChaCha stream, so it never
/// shares draws with the environment seeded from the same value.
pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        RandomPolicy { rng }
    }

    pub fn sample(&mut self, num_actions: usize) -> ActionId {
        ActionId(self.rng.gen_range(0..num_actions))
    }
}

/// One line of a trajectory log: `{"t":n,"s":i,"a":j,"r":x,"done":b}`, where
/// `s` is the state the action was taken in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: usize,
    pub state: StateId,
    pub action: ActionId,
    pub reward: f64,
    pub done: bool,
}

impl TrajectoryRecord {
    pub fn to_json_line(&self) -> String {
        format!(
            "{{\"t\":{},\"s\":{},\"a\":{},\"r\":{},\"done\":{}}}",
            self.t,
            self.state.0,
            self.action.0,
            json_number(self.reward),
            self.done
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub records: Vec<TrajectoryRecord>,
    pub total_reward: f64,
    /// Hit the step cap before reaching a terminal state.
    pub truncated: bool,
}

impl Episode {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Runs one uniform-random episode; environment and policy are both seeded
/// from `seed`.
pub fn run_random_episode(mdp: impl Into<Arc<ValidatedMdp>>, seed: u64, step_cap: usize) -> Episode {
    let mut env = make_env(mdp, seed);
    let mut policy = RandomPolicy::new(seed);
    let mut state = env.reset();
    let mut records = Vec::new();
    while !env.is_done() && records.len() < step_cap {
        let action = policy.sample(env.action_space());
        let result = env.step(action).expect("episode is live");
        records.push(TrajectoryRecord {
            t: records.len(),
            state,
            action,
            reward: result.reward,
            done: result.done,
        });
        state = result.observation;
    }
    Episode {
        total_reward: env.episode_reward(),
        truncated: !env.is_done(),
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn one_round_steps() {
        let mut env = make_env(examples::one_round_dmdp(), 42);
        assert_eq!(env.reset(), StateId(0));
        let r = env.step(ActionId(1)).unwrap();
        assert_eq!((r.observation, r.reward, r.done), (StateId(1), 1.0, true));
        env.reset();
        let r = env.step(ActionId(0)).unwrap();
        assert_eq!((r.observation, r.reward, r.done), (StateId(1), 0.0, true));
        assert_eq!(r.info.reward_index, 0);
        assert_eq!(r.info.next_state_probability, 1.0);
    }

    #[test]
    fn step_errors() {
        let mut env = make_env(examples::one_round_dmdp(), 0);
        assert_eq!(env.step(ActionId(0)), Err(EnvError::NotReset));
        assert_eq!(env.render_text(), Err(EnvError::NotReset));
        assert_eq!(env.render_dot(), Err(EnvError::NotReset));
        env.reset();
        assert_eq!(
            env.step(ActionId(2)),
            Err(EnvError::InvalidAction { action: 2, num_actions: 2 })
        );
        assert_eq!(env.steps(), 0);
        env.step(ActionId(0)).unwrap();
        assert_eq!(env.step(ActionId(0)), Err(EnvError::SteppedWhenDone));
        assert_eq!(env.steps(), 1);
    }

    #[test]
    fn render_text_format() {
        let mut env = make_env(examples::one_round_dmdp(), 0);
        env.reset();
        assert_eq!(env.render_text().unwrap(), "state=start steps=0 return=0 done=false");
        env.step(ActionId(1)).unwrap();
        assert_eq!(env.render_text().unwrap(), "state=end steps=1 return=1 done=true");
        env.reset();
        assert_eq!(env.render_text().unwrap(), "state=start steps=0 return=0 done=false");
    }

    #[test]
    fn render_dot_tracks_current_state() {
        let mut env = make_env(examples::one_round_dmdp(), 0);
        env.reset();
        let dot = env.render_dot().unwrap();
        assert!(dot.contains("\"start\" [shape=circle, style=filled, fillcolor=\"#ffd54f\"]"));
        env.step(ActionId(0)).unwrap();
        let dot = env.render_dot().unwrap();
        assert!(dot.contains("\"end\" [shape=doublecircle, style=filled, fillcolor=\"#ffd54f\"]"));
        assert!(dot.contains("\"start\" [shape=circle]"));
    }

    #[test]
    fn same_seed_same_trajectory() {
        let m = Arc::new(examples::multi_round_nmdp());
        let a = run_random_episode(m.clone(), 9, DEFAULT_STEP_CAP);
        let b = run_random_episode(m, 9, DEFAULT_STEP_CAP);
        assert_eq!(a, b);
    }

    #[test]
    fn json_line_format() {
        let rec = TrajectoryRecord {
            t: 3,
            state: StateId(1),
            action: ActionId(0),
            reward: -1.5,
            done: false,
        };
        assert_eq!(rec.to_json_line(), r#"{"t":3,"s":1,"a":0,"r":-1.5,"done":false}"#);
    }
}
