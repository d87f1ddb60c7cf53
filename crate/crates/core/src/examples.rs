//! The five bundled example models.
//!
//! Four of them mirror the structure of the classic RL debugging
//! environments (one or two rounds, deterministic or nondeterministic
//! rewards); their reward constants are our own and documented in the
//! fixture files. The fifth is a small multi-round model with
//! nondeterministic rewards and transitions, including self-loops.
//!
//! Each constructor uses the builder API; the `.mdp` fixtures under
//! `crates/core/examples/` describe the same models in the DSL.

use crate::model::{MdpSpec, Outcome, ValidatedMdp};

pub const ONE_ROUND_DMDP: &str = include_str!("../examples/one_round_dmdp.mdp");
pub const ONE_ROUND_NDMDP: &str = include_str!("../examples/one_round_ndmdp.mdp");
pub const TWO_ROUND_DMDP: &str = include_str!("../examples/two_round_dmdp.mdp");
pub const TWO_ROUND_NDMDP: &str = include_str!("../examples/two_round_ndmdp.mdp");
pub const MULTI_ROUND_NMDP: &str = include_str!("../examples/multi_round_nmdp.mdp");

/// A bundled example: its file stem, fixture text and constructor.
#[derive(Clone, Copy)]
pub struct Example {
    pub name: &'static str,
    pub source: &'static str,
    pub build: fn() -> ValidatedMdp,
}

pub const ALL: [Example; 5] = [
    Example {
        name: "one_round_dmdp",
        source: ONE_ROUND_DMDP,
        build: one_round_dmdp,
    },
    Example {
        name: "one_round_ndmdp",
        source: ONE_ROUND_NDMDP,
        build: one_round_ndmdp,
    },
    Example {
        name: "two_round_dmdp",
        source: TWO_ROUND_DMDP,
        build: two_round_dmdp,
    },
    Example {
        name: "two_round_ndmdp",
        source: TWO_ROUND_NDMDP,
        build: two_round_ndmdp,
    },
    Example {
        name: "multi_round_nmdp",
        source: MULTI_ROUND_NMDP,
        build: multi_round_nmdp,
    },
];

pub fn find(name: &str) -> Option<&'static Example> {
    ALL.iter().find(|e| e.name == name)
}

use Outcome::{NextState as Next, Reward};

pub fn one_round_dmdp() -> ValidatedMdp {
    let mut spec = MdpSpec::default();
    let start = spec.state("start").unwrap();
    let end = spec.terminal_state("end").unwrap();
    let a0 = spec.action().unwrap();
    let a1 = spec.action().unwrap();
    spec.transition(start, a0, Next(end)).unwrap();
    spec.transition(start, a1, Next(end)).unwrap();
    spec.transition(start, a1, Reward(1.0)).unwrap();
    spec.validate().unwrap()
}

pub fn one_round_ndmdp() -> ValidatedMdp {
    let mut spec = MdpSpec::default();
    let start = spec.state("start").unwrap();
    let end = spec.terminal_state("end").unwrap();
    let a0 = spec.action().unwrap();
    let a1 = spec.action().unwrap();
    for a in [a0, a1] {
        spec.transition(start, a, Next(end)).unwrap();
    }
    spec.transition(start, a0, Reward(-1.0)).unwrap();
    spec.transition(start, a0, Reward(1.0)).unwrap();
    spec.transition(start, a1, Reward(0.0)).unwrap();
    spec.transition(start, a1, Reward(2.0)).unwrap();
    spec.validate().unwrap()
}

pub fn two_round_dmdp() -> ValidatedMdp {
    let mut spec = MdpSpec::default();
    let start = spec.state("start").unwrap();
    let left = spec.state("left").unwrap();
    let right = spec.state("right").unwrap();
    let end = spec.terminal_state("end").unwrap();
    let a0 = spec.action().unwrap();
    let a1 = spec.action().unwrap();
    spec.transition(start, a0, Next(left)).unwrap();
    spec.transition(start, a1, Next(right)).unwrap();
    for s in [left, right] {
        for a in [a0, a1] {
            spec.transition(s, a, Next(end)).unwrap();
        }
    }
    spec.transition(left, a0, Reward(0.0)).unwrap();
    spec.transition(left, a1, Reward(3.0)).unwrap();
    spec.transition(right, a0, Reward(1.0)).unwrap();
    spec.transition(right, a1, Reward(2.0)).unwrap();
    spec.validate().unwrap()
}

pub fn two_round_ndmdp() -> ValidatedMdp {
    let mut spec = MdpSpec::default();
    let start = spec.state("start").unwrap();
    let left = spec.state("left").unwrap();
    let right = spec.state("right").unwrap();
    let end = spec.terminal_state("end").unwrap();
    let a0 = spec.action().unwrap();
    let a1 = spec.action().unwrap();
    spec.transition(start, a0, Next(left)).unwrap();
    spec.transition(start, a1, Next(right)).unwrap();
    for s in [left, right] {
        for a in [a0, a1] {
            spec.transition(s, a, Next(end)).unwrap();
        }
    }
    spec.transition(left, a0, Reward(-1.0)).unwrap();
    spec.transition(left, a0, Reward(1.0)).unwrap();
    spec.transition(left, a1, Reward(0.0)).unwrap();
    spec.add_transition(left, a1, Reward(4.0), 3.0).unwrap();
    spec.transition(right, a0, Reward(1.0)).unwrap();
    spec.transition(right, a1, Reward(0.0)).unwrap();
    spec.transition(right, a1, Reward(4.0)).unwrap();
    spec.validate().unwrap()
}

pub fn multi_round_nmdp() -> ValidatedMdp {
    let mut spec = MdpSpec::default();
    let start = spec.state("start").unwrap();
    let middle = spec.state("middle").unwrap();
    let end = spec.terminal_state("end").unwrap();
    let a0 = spec.action().unwrap();
    let a1 = spec.action().unwrap();

    spec.transition(start, a0, Next(start)).unwrap();
    spec.add_transition(start, a0, Next(middle), 3.0).unwrap();
    spec.transition(start, a0, Reward(0.0)).unwrap();
    spec.transition(start, a0, Reward(1.0)).unwrap();

    spec.transition(start, a1, Next(middle)).unwrap();
    spec.transition(start, a1, Next(end)).unwrap();
    spec.transition(start, a1, Reward(-1.0)).unwrap();
    spec.transition(start, a1, Reward(1.0)).unwrap();

    spec.transition(middle, a0, Next(start)).unwrap();
    spec.add_transition(middle, a0, Next(end), 2.0).unwrap();
    spec.transition(middle, a0, Reward(1.0)).unwrap();
    spec.transition(middle, a0, Reward(2.0)).unwrap();

    spec.add_transition(middle, a1, Next(middle), 2.0).unwrap();
    spec.transition(middle, a1, Next(end)).unwrap();
    spec.transition(middle, a1, Reward(0.0)).unwrap();
    spec.transition(middle, a1, Reward(3.0)).unwrap();
    spec.validate().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::load_spec;

    #[test]
    fn constructors_match_fixtures() {
        for example in &ALL {
            let parsed = load_spec(example.source).unwrap_or_else(|e| panic!("{}: {e}", example.name));
            assert_eq!(parsed, (example.build)(), "{}", example.name);
        }
    }

    #[test]
    fn one_round_shape() {
        let m = one_round_dmdp();
        let names: Vec<_> = m.states().iter().map(|s| (s.name.as_str(), s.terminal)).collect();
        assert_eq!(names, vec![("start", false), ("end", true)]);
        let actions: Vec<_> = m.actions().iter().map(|a| a.name.as_str()).collect();
        assert_eq!(actions, vec!["a0", "a1"]);
    }

    #[test]
    fn nondeterministic_variants_have_spread() {
        for m in [one_round_ndmdp(), two_round_ndmdp(), multi_round_nmdp()] {
            let spread = (0..m.num_states())
                .flat_map(|s| (0..m.num_actions()).map(move |a| (s, a)))
                .any(|(s, a)| m.reward_distribution(s, a).outcomes().len() >= 2);
            assert!(spread);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert!(find("two_round_ndmdp").is_some());
        assert!(find("nope").is_none());
    }
}
