//! The textual MDP language.
//!
//! A document is a sequence of newline-separated statements. Declarations
//! come first (`gamma`, `state`, `terminal`, `action`), followed by
//! transition expressions:
//!
//! ```text
//! # one round, deterministic reward
//! state start
//! terminal end
//! action a0 a1
//!
//! start & (a0 | a1) > end
//! start & a1 > reward(1.)
//! ```
//!
//! Operators bind as `*` > `&` > `|` > `>`. Alternatives distribute over
//! conjunctions and mappings, so `(a | b) & c > d` describes two
//! transitions. A weight suffix `x * w` scales the weight of every outcome
//! produced by `x`.

use std::fmt;

use thiserror::Error;

use crate::model::{ModelError, ValidateOptions, ValidatedMdp};

mod expand;
mod lexer;
mod parser;
mod writer;

pub use expand::expand;
pub use lexer::{tokenize, Keyword, Token, TokenKind};
pub use parser::{parse, Ast, Atom, Declaration, DslDocument};
pub use writer::{to_text, NotAnIdentifier};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErrorKind {
    #[error("{0}")]
    Lex(String),
    #[error("expected {expected}, found {found}")]
    Parse { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error("`{0}` is already declared")]
    DuplicateDeclaration(String),
    #[error("gamma declared more than once")]
    DuplicateGamma,
    #[error("weight must be positive, got {0}")]
    InvalidWeight(f64),
    #[error("incomplete transition: missing {0}")]
    IncompleteTransition(&'static str),
    #[error("{0} given more than once in a transition")]
    DuplicateRole(&'static str),
    #[error("{0}")]
    Misplaced(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Any failure while turning DSL text into a model, with the source
/// position it was detected at.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {}, col {}: {kind}", pos.line, pos.col)]
pub struct DslError {
    pub kind: ErrorKind,
    pub pos: Pos,
}

impl DslError {
    pub fn new(kind: ErrorKind, pos: Pos) -> Self {
        DslError { kind, pos }
    }

    /// True for model-level (validation) failures as opposed to syntax.
    pub fn is_semantic(&self) -> bool {
        matches!(self.kind, ErrorKind::Model(_))
    }
}

/// Loads a document into a validated model in strict mode.
pub fn load_spec(text: &str) -> Result<ValidatedMdp, DslError> {
    load_spec_with(text, ValidateOptions::default())
}

pub fn load_spec_with(text: &str, options: ValidateOptions) -> Result<ValidatedMdp, DslError> {
    let tokens = tokenize(text)?;
    let doc = parse(&tokens)?;
    let spec = doc.to_spec()?;
    spec.validate_with(options).map_err(|err| {
        let pos = match &err {
            ModelError::MissingTransitions(gaps) => doc.states[gaps[0].state.0].pos,
            ModelError::NoActions => doc.states.first().map(|d| d.pos).unwrap_or(Pos { line: 1, col: 1 }),
            _ => Pos { line: 1, col: 1 },
        };
        DslError::new(ErrorKind::Model(err), pos)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_ROUND: &str = "\
state start
terminal end
action a0 a1
start & (a0 | a1) > end
start & a1 > reward(1.)
";

    #[test]
    fn loads_one_round() {
        let m = load_spec(ONE_ROUND).unwrap();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.num_actions(), 2);
        assert_eq!(m.expected_reward(0, 1), 1.0);
    }

    #[test]
    fn empty_file() {
        let err = load_spec("").unwrap_err();
        assert_eq!(err.kind, ErrorKind::Model(ModelError::NoStates));
        assert!(err.to_string().contains("no states declared"));
    }

    #[test]
    fn gamma_twice() {
        let err = load_spec("gamma 0.9\ngamma 0.8\nstate s\n").unwrap_err();
        assert_eq!(err.kind, ErrorKind::DuplicateGamma);
        assert_eq!(err.pos, Pos { line: 2, col: 1 });
    }

    #[test]
    fn gamma_out_of_range() {
        let err = load_spec("gamma 1.5\nstate s\naction a\ns & a > s\n").unwrap_err();
        assert!(err.is_semantic());
    }

    #[test]
    fn missing_pair_points_at_state() {
        let err = load_spec("state s0\nterminal end\naction a0 a1\ns0 & a0 > end\n").unwrap_err();
        assert!(err.is_semantic());
        assert_eq!(err.pos, Pos { line: 1, col: 7 });
        assert!(err.to_string().contains("MissingTransition(s0, a1)"));
    }

    #[test]
    fn terminal_source_is_semantic() {
        let err = load_spec("state s\nterminal t\naction a\ns & a > t\nt & a > s\n").unwrap_err();
        assert!(err.is_semantic());
        assert_eq!(err.pos.line, 5);
    }
}
