use std::fmt::Write as _;

use thiserror::Error;

use super::lexer::{tokenize, TokenKind};
use crate::model::{MdpSpec, Outcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` cannot be written as a DSL identifier")]
pub struct NotAnIdentifier(pub String);

fn check_identifier(name: &str) -> Result<(), NotAnIdentifier> {
    match tokenize(name).as_deref() {
        Ok([ident, eof]) if ident.kind == TokenKind::Ident && eof.kind == TokenKind::Eof => Ok(()),
        _ => Err(NotAnIdentifier(name.to_owned())),
    }
}

/// Writes `spec` as a DSL document, one transition per entry.
pub fn to_text(spec: &MdpSpec) -> Result<String, NotAnIdentifier> {
    for name in spec.states().iter().map(|s| &s.name).chain(spec.actions().iter().map(|a| &a.name)) {
        check_identifier(name)?;
    }
    let mut out = String::new();
    let _ = writeln!(out, "gamma {:?}", spec.discount());
    for state in spec.states() {
        let keyword = if state.terminal { "terminal" } else { "state" };
        let _ = writeln!(out, "{keyword} {}", state.name);
    }
    if !spec.actions().is_empty() {
        let names: Vec<&str> = spec.actions().iter().map(|a| a.name.as_str()).collect();
        let _ = writeln!(out, "action {}", names.join(" "));
    }
    for entry in spec.entries() {
        let outcome = match entry.outcome {
            Outcome::NextState(next) => spec.states()[next.0].name.clone(),
            Outcome::Reward(v) => format!("reward({v:?})"),
        };
        let _ = write!(
            out,
            "{} & {} > {}",
            spec.states()[entry.state.0].name,
            spec.actions()[entry.action.0].name,
            outcome
        );
        if entry.weight != 1.0 {
            let _ = write!(out, " * {:?}", entry.weight);
        }
        out.push('\n');
    }
    Ok(out)
}
