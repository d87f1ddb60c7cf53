use super::parser::{Ast, Atom, DslDocument};
use super::{DslError, ErrorKind};
use crate::model::{ActionId, Outcome, StateId, TransitionEntry};

/// A transition fragment: some subset of (state, action, outcome).
#[derive(Debug, Clone, Copy)]
struct Partial {
    state: Option<StateId>,
    action: Option<ActionId>,
    outcome: Option<Outcome>,
    weight: f64,
}

impl Partial {
    fn unit() -> Self {
        Partial {
            state: None,
            action: None,
            outcome: None,
            weight: 1.0,
        }
    }

    fn merge(self, other: Partial) -> Result<Partial, ErrorKind> {
        fn one<T>(a: Option<T>, b: Option<T>, role: &'static str) -> Result<Option<T>, ErrorKind> {
            match (a, b) {
                (Some(_), Some(_)) => Err(ErrorKind::DuplicateRole(role)),
                (a, b) => Ok(a.or(b)),
            }
        }
        Ok(Partial {
            state: one(self.state, other.state, "state")?,
            action: one(self.action, other.action, "action")?,
            outcome: one(self.outcome, other.outcome, "outcome")?,
            weight: self.weight * other.weight,
        })
    }
}

/// Expands every transition statement of `doc` into concrete entries, in
/// statement order.
pub fn expand(doc: &DslDocument) -> Result<Vec<TransitionEntry>, DslError> {
    let mut entries = Vec::new();
    for statement in &doc.statements {
        entries.extend(expand_statement(statement)?);
    }
    Ok(entries)
}

pub(crate) fn expand_statement(statement: &Ast) -> Result<Vec<TransitionEntry>, DslError> {
    source(statement)?
        .into_iter()
        .map(|p| {
            let missing = |role| DslError::new(ErrorKind::IncompleteTransition(role), statement.pos());
            Ok(TransitionEntry {
                state: p.state.ok_or_else(|| missing("state"))?,
                action: p.action.ok_or_else(|| missing("action"))?,
                outcome: p.outcome.ok_or_else(|| missing("outcome"))?,
                weight: p.weight,
            })
        })
        .collect()
}

/// Expands a node left of `>` (or a parenthesized partial transition).
fn source(node: &Ast) -> Result<Vec<Partial>, DslError> {
    match node {
        Ast::Atom(Atom::State { id, .. }, _) => Ok(vec![Partial {
            state: Some(*id),
            ..Partial::unit()
        }]),
        Ast::Atom(Atom::Action { id, .. }, _) => Ok(vec![Partial {
            action: Some(*id),
            ..Partial::unit()
        }]),
        Ast::Atom(Atom::Reward(_), pos) => Err(DslError::new(
            ErrorKind::Misplaced("a reward can only appear after `>`".into()),
            *pos,
        )),
        Ast::Alt(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(source(item)?);
            }
            Ok(out)
        }
        Ast::Conj(l, r) => {
            let left = source(l)?;
            let right = source(r)?;
            product(&left, &right).map_err(|kind| DslError::new(kind, r.pos()))
        }
        Ast::Map(l, r) => {
            let left = source(l)?;
            if left.iter().any(|p| p.outcome.is_some()) {
                return Err(DslError::new(
                    ErrorKind::Misplaced("nested `>` mappings cannot be chained".into()),
                    l.pos(),
                ));
            }
            let right: Vec<Partial> = outcomes(r)?
                .into_iter()
                .map(|(outcome, weight)| Partial {
                    outcome: Some(outcome),
                    weight,
                    ..Partial::unit()
                })
                .collect();
            product(&left, &right).map_err(|kind| DslError::new(kind, r.pos()))
        }
        Ast::Weighted(inner, w) => Ok(source(inner)?
            .into_iter()
            .map(|p| Partial {
                weight: p.weight * w,
                ..p
            })
            .collect()),
    }
}

/// Expands a node right of `>` into weighted outcomes.
fn outcomes(node: &Ast) -> Result<Vec<(Outcome, f64)>, DslError> {
    match node {
        Ast::Atom(Atom::State { id, .. }, _) => Ok(vec![(Outcome::NextState(*id), 1.0)]),
        Ast::Atom(Atom::Reward(v), _) => Ok(vec![(Outcome::Reward(*v), 1.0)]),
        Ast::Atom(Atom::Action { name, .. }, pos) => Err(DslError::new(
            ErrorKind::Misplaced(format!("action `{name}` cannot be an outcome")),
            *pos,
        )),
        Ast::Alt(items) => {
            let mut out = Vec::new();
            for item in items {
                out.extend(outcomes(item)?);
            }
            Ok(out)
        }
        Ast::Weighted(inner, w) => Ok(outcomes(inner)?.into_iter().map(|(o, x)| (o, x * w)).collect()),
        Ast::Conj(_, r) => Err(DslError::new(
            ErrorKind::Misplaced("an outcome is a single state or reward; `&` is not allowed after `>`".into()),
            r.pos(),
        )),
        Ast::Map(_, r) => Err(DslError::new(
            ErrorKind::Misplaced("nested `>` mappings cannot be chained".into()),
            r.pos(),
        )),
    }
}

fn product(left: &[Partial], right: &[Partial]) -> Result<Vec<Partial>, ErrorKind> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in left {
        for r in right {
            out.push(l.merge(*r)?);
        }
    }
    Ok(out)
}
