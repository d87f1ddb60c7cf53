//! Small Markov decision processes: define them in a text DSL or through a
//! builder, compute exact optimal values, simulate them as episodic
//! environments and export them as DOT graphs.
//!
//! ```
//! use mdpforge::{dsl, solver};
//!
//! let mdp = dsl::load_spec(
//!     "state start\nterminal end\naction a0 a1\n\
//!      start & (a0 | a1) > end\n\
//!      start & a1 > reward(1.)\n",
//! )
//! .unwrap();
//! let solution = solver::solve(&mdp).unwrap();
//! assert_eq!(solution.v.values, vec![1.0, 0.0]);
//! ```

pub mod dsl;
pub mod env;
pub mod examples;
pub mod generate;
pub mod graph;
pub mod model;
pub mod solver;

pub use dsl::{load_spec, load_spec_with, DslError};
pub use env::{make_env, EnvError, EnvSession, StepResult};
pub use graph::{to_dot, to_graph, MdpGraph};
pub use model::{
    ActionDef, ActionId, MdpSpec, ModelError, Outcome, StateDef, StateId, TransitionEntry, ValidateOptions,
    ValidatedMdp,
};
pub use solver::{compute_q_table, solve_lp, value_iteration, QTable, SolverError, ValueFunction};
