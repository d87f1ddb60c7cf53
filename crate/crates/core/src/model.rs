//! The MDP data model: a mutable [`MdpSpec`] built through a small builder
//! API, and the frozen, normalized [`ValidatedMdp`] every other module
//! consumes.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that normalized rows sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDef {
    pub name: String,
    pub index: usize,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDef {
    pub name: String,
    pub index: usize,
}

/// A single consequence of taking an action in a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    NextState(StateId),
    Reward(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub state: StateId,
    pub action: ActionId,
    pub outcome: Outcome,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingTransition {
    pub state: StateId,
    pub action: ActionId,
    pub state_name: String,
    pub action_name: String,
}

impl fmt::Display for MissingTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MissingTransition({}, {})", self.state_name, self.action_name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("discount out of range: {0} (expected 0 < gamma <= 1)")]
    DiscountOutOfRange(f64),
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("duplicate action name `{0}`")]
    DuplicateAction(String),
    #[error("unknown state index {0}")]
    UnknownState(StateId),
    #[error("unknown action index {0}")]
    UnknownAction(ActionId),
    #[error("transition out of terminal state `{0}`")]
    TransitionFromTerminal(String),
    #[error("weight must be positive and finite, got {0}")]
    InvalidWeight(f64),
    #[error("reward must be finite, got {0}")]
    NonFiniteReward(f64),
    #[error("no states declared")]
    NoStates,
    #[error("no actions declared")]
    NoActions,
    #[error("{}", missing_message(.0))]
    MissingTransitions(Vec<MissingTransition>),
}

fn missing_message(gaps: &[MissingTransition]) -> String {
    let listed: Vec<String> = gaps.iter().map(ToString::to_string).collect();
    format!("missing transitions: {}", listed.join(", "))
}

fn check_discount(discount: f64) -> Result<(), ModelError> {
    if discount > 0.0 && discount <= 1.0 {
        Ok(())
    } else {
        Err(ModelError::DiscountOutOfRange(discount))
    }
}

/// Options controlling [`MdpSpec::validate_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Inject a zero-reward self-loop for every non-terminal (state, action)
    /// pair without a next-state outcome instead of failing.
    pub allow_missing: bool,
}

/// An MDP under construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpSpec {
    states: Vec<StateDef>,
    actions: Vec<ActionDef>,
    entries: Vec<TransitionEntry>,
    discount: f64,
}

impl Default for MdpSpec {
    fn default() -> Self {
        MdpSpec {
            states: Vec::new(),
            actions: Vec::new(),
            entries: Vec::new(),
            discount: 1.0,
        }
    }
}

impl MdpSpec {
    pub fn new(discount: f64) -> Result<Self, ModelError> {
        check_discount(discount)?;
        Ok(MdpSpec {
            discount,
            ..Default::default()
        })
    }

    pub fn states(&self) -> &[StateDef] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionDef] {
        &self.actions
    }

    pub fn entries(&self) -> &[TransitionEntry] {
        &self.entries
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn set_discount(&mut self, discount: f64) -> Result<(), ModelError> {
        check_discount(discount)?;
        self.discount = discount;
        Ok(())
    }

    /// Declares a state. Unnamed states are called `s<k>` after their index.
    pub fn add_state(&mut self, name: Option<&str>, terminal: bool) -> Result<StateId, ModelError> {
        let index = self.states.len();
        let name = name.map_or_else(|| format!("s{index}"), str::to_owned);
        if self.states.iter().any(|s| s.name == name) {
            return Err(ModelError::DuplicateState(name));
        }
        self.states.push(StateDef { name, index, terminal });
        Ok(StateId(index))
    }

    pub fn state(&mut self, name: &str) -> Result<StateId, ModelError> {
        self.add_state(Some(name), false)
    }

    pub fn terminal_state(&mut self, name: &str) -> Result<StateId, ModelError> {
        self.add_state(Some(name), true)
    }

    /// Declares an action. Unnamed actions are called `a<k>` after their index.
    pub fn add_action(&mut self, name: Option<&str>) -> Result<ActionId, ModelError> {
        let index = self.actions.len();
        let name = name.map_or_else(|| format!("a{index}"), str::to_owned);
        if self.actions.iter().any(|a| a.name == name) {
            return Err(ModelError::DuplicateAction(name));
        }
        self.actions.push(ActionDef { name, index });
        Ok(ActionId(index))
    }

    pub fn action(&mut self) -> Result<ActionId, ModelError> {
        self.add_action(None)
    }

    /// Records an outcome for `(state, action)` with unit weight.
    pub fn transition(&mut self, state: StateId, action: ActionId, outcome: Outcome) -> Result<(), ModelError> {
        self.add_transition(state, action, outcome, 1.0)
    }

    pub fn add_transition(
        &mut self,
        state: StateId,
        action: ActionId,
        outcome: Outcome,
        weight: f64,
    ) -> Result<(), ModelError> {
        let source = self.states.get(state.0).ok_or(ModelError::UnknownState(state))?;
        if source.terminal {
            return Err(ModelError::TransitionFromTerminal(source.name.clone()));
        }
        if action.0 >= self.actions.len() {
            return Err(ModelError::UnknownAction(action));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(ModelError::InvalidWeight(weight));
        }
        match outcome {
            Outcome::NextState(next) if next.0 >= self.states.len() => {
                return Err(ModelError::UnknownState(next));
            }
            Outcome::Reward(r) if !r.is_finite() => return Err(ModelError::NonFiniteReward(r)),
            _ => {}
        }
        self.entries.push(TransitionEntry {
            state,
            action,
            outcome,
            weight,
        });
        Ok(())
    }

    pub fn validate(&self) -> Result<ValidatedMdp, ModelError> {
        self.validate_with(ValidateOptions::default())
    }

    /// Normalizes weights into probabilities and freezes the model.
    pub fn validate_with(&self, options: ValidateOptions) -> Result<ValidatedMdp, ModelError> {
        if self.states.is_empty() {
            return Err(ModelError::NoStates);
        }
        if self.actions.is_empty() {
            return Err(ModelError::NoActions);
        }
        let ns = self.states.len();
        let na = self.actions.len();

        let mut next_weights = vec![0.0; ns * na * ns];
        let mut reward_weights: Vec<Vec<(f64, f64)>> = vec![Vec::new(); ns * na];
        let mut specified = vec![false; ns * na];
        for entry in &self.entries {
            let pair = entry.state.0 * na + entry.action.0;
            specified[pair] = true;
            match entry.outcome {
                Outcome::NextState(next) => next_weights[pair * ns + next.0] += entry.weight,
                Outcome::Reward(value) => {
                    let bucket = &mut reward_weights[pair];
                    // -0.0 and 0.0 share a bucket.
                    match bucket.iter_mut().find(|(v, _)| *v == value) {
                        Some((_, w)) => *w += entry.weight,
                        None => bucket.push((value + 0.0, entry.weight)),
                    }
                }
            }
        }

        let mut missing = Vec::new();
        for (s, state) in self.states.iter().enumerate() {
            if state.terminal {
                continue;
            }
            for (a, action) in self.actions.iter().enumerate() {
                let pair = s * na + a;
                let row = &mut next_weights[pair * ns..(pair + 1) * ns];
                if row.iter().all(|&w| w == 0.0) {
                    if options.allow_missing {
                        row[s] = 1.0;
                    } else {
                        missing.push(MissingTransition {
                            state: StateId(s),
                            action: ActionId(a),
                            state_name: state.name.clone(),
                            action_name: action.name.clone(),
                        });
                    }
                }
            }
        }
        if !missing.is_empty() {
            return Err(ModelError::MissingTransitions(missing));
        }

        let mut transitions = next_weights;
        for row in transitions.chunks_mut(ns) {
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                row.iter_mut().for_each(|w| *w /= total);
            }
        }

        let mut rewards = Vec::with_capacity(ns * na);
        let mut expected_reward = Vec::with_capacity(ns * na);
        for (pair, mut weights) in reward_weights.into_iter().enumerate() {
            let terminal = self.states[pair / na].terminal;
            let dist = if terminal || weights.is_empty() {
                RewardDistribution::point_mass(0.0)
            } else {
                weights.sort_by(|x, y| x.0.total_cmp(&y.0));
                let total: f64 = weights.iter().map(|(_, w)| w).sum();
                RewardDistribution {
                    outcomes: weights.into_iter().map(|(v, w)| (v, w / total)).collect(),
                }
            };
            expected_reward.push(if terminal { 0.0 } else { dist.mean() });
            rewards.push(dist);
        }

        Ok(ValidatedMdp {
            states: self.states.clone(),
            actions: self.actions.clone(),
            discount: self.discount,
            transitions,
            rewards,
            expected_reward,
            specified,
        })
    }
}

/// A categorical distribution over reward values, sorted by value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardDistribution {
    outcomes: Vec<(f64, f64)>,
}

impl RewardDistribution {
    pub fn point_mass(value: f64) -> Self {
        RewardDistribution {
            outcomes: vec![(value, 1.0)],
        }
    }

    /// `(value, probability)` pairs in ascending value order.
    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|(v, p)| v * p).sum()
    }

    pub fn is_point_mass(&self) -> bool {
        self.outcomes.len() == 1
    }
}

/// A validated, immutable MDP with normalized transition probabilities and
/// per-(state, action) reward distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedMdp {
    states: Vec<StateDef>,
    actions: Vec<ActionDef>,
    discount: f64,
    /// Flattened `(s, a, s')` tensor.
    transitions: Vec<f64>,
    rewards: Vec<RewardDistribution>,
    expected_reward: Vec<f64>,
    /// Pairs with at least one user-supplied entry.
    specified: Vec<bool>,
}

impl ValidatedMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn states(&self) -> &[StateDef] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionDef] {
        &self.actions
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Returns a copy with a different discount.
    pub fn with_discount(&self, discount: f64) -> Result<ValidatedMdp, ModelError> {
        check_discount(discount)?;
        Ok(ValidatedMdp {
            discount,
            ..self.clone()
        })
    }

    pub fn is_terminal(&self, state: usize) -> bool {
        self.states[state].terminal
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name).map(StateId)
    }

    pub fn action_index(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a.name == name).map(ActionId)
    }

    /// `P(next | state, action)`.
    pub fn probability(&self, state: usize, action: usize, next: usize) -> f64 {
        self.transition_row(state, action)[next]
    }

    pub fn transition_row(&self, state: usize, action: usize) -> &[f64] {
        let ns = self.states.len();
        let pair = state * self.actions.len() + action;
        &self.transitions[pair * ns..(pair + 1) * ns]
    }

    pub fn reward_distribution(&self, state: usize, action: usize) -> &RewardDistribution {
        &self.rewards[state * self.actions.len() + action]
    }

    pub fn expected_reward(&self, state: usize, action: usize) -> f64 {
        self.expected_reward[state * self.actions.len() + action]
    }

    /// Whether the source supplied any outcome for the pair (injected
    /// self-loops do not count).
    pub fn has_outcomes(&self, state: usize, action: usize) -> bool {
        self.specified[state * self.actions.len() + action]
    }

    /// `r(s,a) + gamma * sum_s' P(s'|s,a) v(s')`.
    pub fn backup(&self, state: usize, action: usize, values: &[f64]) -> f64 {
        let future: f64 = self
            .transition_row(state, action)
            .iter()
            .zip(values)
            .map(|(p, v)| p * v)
            .sum();
        self.expected_reward(state, action) + self.discount * future
    }

    /// Returns the distinct reward values declared anywhere in the model.
    pub fn reward_support(&self) -> Vec<f64> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for dist in &self.rewards {
            for &(v, _) in dist.outcomes() {
                if seen.insert(v.to_bits()) {
                    out.push(v);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_round() -> MdpSpec {
        let mut spec = MdpSpec::default();
        let start = spec.state("start").unwrap();
        let end = spec.terminal_state("end").unwrap();
        let a0 = spec.action().unwrap();
        let a1 = spec.action().unwrap();
        spec.transition(start, a0, Outcome::NextState(end)).unwrap();
        spec.transition(start, a1, Outcome::NextState(end)).unwrap();
        spec.transition(start, a1, Outcome::Reward(1.0)).unwrap();
        spec
    }

    #[test]
    fn new_spec_checks_discount() {
        let spec = MdpSpec::new(1.0).unwrap();
        assert!(spec.states().is_empty() && spec.actions().is_empty());
        assert_eq!(MdpSpec::new(0.9).unwrap().discount(), 0.9);
        let err = MdpSpec::new(1.5).unwrap_err();
        assert!(err.to_string().contains("discount out of range"));
        assert!(MdpSpec::new(0.0).is_err());
    }

    #[test]
    fn state_and_action_naming() {
        let mut spec = MdpSpec::default();
        assert_eq!(spec.add_state(Some("start"), false), Ok(StateId(0)));
        assert_eq!(
            spec.add_state(Some("start"), false),
            Err(ModelError::DuplicateState("start".into()))
        );
        assert_eq!(spec.add_state(None, false), Ok(StateId(1)));
        assert_eq!(spec.add_state(None, false), Ok(StateId(2)));
        assert_eq!(spec.states()[2].name, "s2");

        assert_eq!(spec.add_action(None), Ok(ActionId(0)));
        assert_eq!(spec.actions()[0].name, "a0");
        assert_eq!(spec.add_action(Some("a")), Ok(ActionId(1)));
        assert_eq!(spec.add_action(Some("a")), Err(ModelError::DuplicateAction("a".into())));
    }

    #[test]
    fn transition_preconditions() {
        let mut spec = MdpSpec::default();
        let s0 = spec.state("s").unwrap();
        let end = spec.terminal_state("end").unwrap();
        let a0 = spec.action().unwrap();
        assert_eq!(
            spec.transition(end, a0, Outcome::NextState(s0)),
            Err(ModelError::TransitionFromTerminal("end".into()))
        );
        assert_eq!(
            spec.add_transition(s0, a0, Outcome::NextState(end), 0.0),
            Err(ModelError::InvalidWeight(0.0))
        );
        assert!(spec.add_transition(s0, a0, Outcome::NextState(end), -2.0).is_err());
        assert!(spec.transition(s0, a0, Outcome::Reward(f64::NAN)).is_err());
        assert!(spec.transition(s0, ActionId(7), Outcome::Reward(1.0)).is_err());
        assert!(spec.entries().is_empty());
    }

    #[test]
    fn one_round_validates() {
        let m = one_round().validate().unwrap();
        assert_eq!(m.probability(0, 0, 1), 1.0);
        assert_eq!(m.probability(0, 1, 1), 1.0);
        assert_eq!(m.expected_reward(0, 1), 1.0);
        assert_eq!(m.expected_reward(0, 0), 0.0);
        assert_eq!(m.reward_distribution(0, 0).outcomes(), &[(0.0, 1.0)]);
        assert!(m.transition_row(1, 0).iter().all(|&p| p == 0.0));
    }

    #[test]
    fn weighted_self_loop_normalizes() {
        let mut spec = MdpSpec::default();
        let s = spec.state("s").unwrap();
        let t = spec.terminal_state("t").unwrap();
        let a = spec.action().unwrap();
        spec.add_transition(s, a, Outcome::NextState(s), 3.0).unwrap();
        spec.add_transition(s, a, Outcome::NextState(t), 1.0).unwrap();
        spec.transition(s, a, Outcome::Reward(-1.0)).unwrap();
        spec.transition(s, a, Outcome::Reward(1.0)).unwrap();
        let m = spec.validate().unwrap();
        assert_eq!(m.transition_row(0, 0), &[0.75, 0.25]);
        assert_eq!(m.expected_reward(0, 0), 0.0);
        assert_eq!(m.reward_distribution(0, 0).outcomes(), &[(-1.0, 0.5), (1.0, 0.5)]);
    }

    #[test]
    fn missing_pairs_are_reported_or_patched() {
        let mut spec = MdpSpec::default();
        let s0 = spec.state("s0").unwrap();
        let end = spec.terminal_state("end").unwrap();
        let a0 = spec.action().unwrap();
        let _a1 = spec.action().unwrap();
        spec.transition(s0, a0, Outcome::NextState(end)).unwrap();
        match spec.validate() {
            Err(ModelError::MissingTransitions(gaps)) => {
                assert_eq!(gaps.len(), 1);
                assert_eq!(gaps[0].to_string(), "MissingTransition(s0, a1)");
            }
            other => panic!("unexpected {other:?}"),
        }
        let m = spec.validate_with(ValidateOptions { allow_missing: true }).unwrap();
        assert_eq!(m.transition_row(0, 1), &[1.0, 0.0]);
        assert_eq!(m.expected_reward(0, 1), 0.0);
        assert!(!m.has_outcomes(0, 1));
        assert!(m.has_outcomes(0, 0));
    }

    #[test]
    fn empty_spec_is_rejected() {
        assert_eq!(MdpSpec::default().validate(), Err(ModelError::NoStates));
        let mut spec = MdpSpec::default();
        spec.state("x").unwrap();
        assert_eq!(spec.validate(), Err(ModelError::NoActions));
    }

    #[test]
    fn with_discount_overrides() {
        let m = one_round().validate().unwrap();
        assert_eq!(m.with_discount(0.5).unwrap().discount(), 0.5);
        assert!(m.with_discount(2.0).is_err());
    }
}
