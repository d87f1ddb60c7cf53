use std::collections::HashMap;
use std::fmt;

use super::lexer::{Keyword, Token, TokenKind};
use super::{DslError, ErrorKind, Pos};
use crate::model::{ActionId, MdpSpec, StateId};

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    State { id: StateId, name: String },
    Action { id: ActionId, name: String },
    Reward(f64),
}

/// Parse tree of one transition statement.
///
/// Precedence alone never puts a `Map` beneath `Conj` or `Weighted`; only an
/// explicitly parenthesized partial transition such as `s & (a > t)` does.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Atom(Atom, Pos),
    Alt(Vec<Ast>),
    Conj(Box<Ast>, Box<Ast>),
    Map(Box<Ast>, Box<Ast>),
    Weighted(Box<Ast>, f64),
}

impl Ast {
    /// Position of the leftmost atom.
    pub fn pos(&self) -> Pos {
        match self {
            Ast::Atom(_, pos) => *pos,
            Ast::Alt(items) => items[0].pos(),
            Ast::Conj(l, _) | Ast::Map(l, _) | Ast::Weighted(l, _) => l.pos(),
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Atom(Atom::State { name, .. } | Atom::Action { name, .. }, _) => f.write_str(name),
            Ast::Atom(Atom::Reward(v), _) => write!(f, "reward({v})"),
            Ast::Alt(items) => {
                f.write_str("Alt(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            Ast::Conj(l, r) => write!(f, "Conj({l}, {r})"),
            Ast::Map(l, r) => write!(f, "Map({l}, {r})"),
            Ast::Weighted(n, w) => write!(f, "Weighted({n}, {w})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declaration {
    pub name: String,
    pub terminal: bool,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DslDocument {
    /// States in declaration order, `state` and `terminal` lines interleaved.
    pub states: Vec<Declaration>,
    pub actions: Vec<Declaration>,
    pub gamma: Option<(f64, Pos)>,
    pub statements: Vec<Ast>,
}

impl DslDocument {
    /// Builds an [`MdpSpec`] from the declarations and expanded statements.
    pub fn to_spec(&self) -> Result<MdpSpec, DslError> {
        let mut spec = match self.gamma {
            Some((g, pos)) => MdpSpec::new(g).map_err(|e| DslError::new(e.into(), pos))?,
            None => MdpSpec::default(),
        };
        for decl in &self.states {
            spec.add_state(Some(&decl.name), decl.terminal)
                .map_err(|e| DslError::new(e.into(), decl.pos))?;
        }
        for decl in &self.actions {
            spec.add_action(Some(&decl.name))
                .map_err(|e| DslError::new(e.into(), decl.pos))?;
        }
        for statement in &self.statements {
            for entry in super::expand::expand_statement(statement)? {
                spec.add_transition(entry.state, entry.action, entry.outcome, entry.weight)
                    .map_err(|e| DslError::new(e.into(), statement.pos()))?;
            }
        }
        Ok(spec)
    }
}

#[derive(Clone, Copy)]
enum Symbol {
    State(StateId),
    Action(ActionId),
}

struct Parser<'t, 'a> {
    tokens: &'t [Token<'a>],
    cursor: usize,
    depth: usize,
    symbols: HashMap<&'a str, Symbol>,
    doc: DslDocument,
}

/// Parses a token stream produced by [`tokenize`](super::tokenize).
pub fn parse(tokens: &[Token<'_>]) -> Result<DslDocument, DslError> {
    let mut parser = Parser {
        tokens,
        cursor: 0,
        depth: 0,
        symbols: HashMap::new(),
        doc: DslDocument::default(),
    };
    parser.document()?;
    Ok(parser.doc)
}

fn describe(token: &Token<'_>) -> String {
    match token.kind {
        TokenKind::Ident | TokenKind::Number => format!("{} `{}`", token.kind, token.text),
        kind => kind.to_string(),
    }
}

impl<'t, 'a> Parser<'t, 'a> {
    /// Next token; line breaks are insignificant inside parentheses.
    fn peek(&mut self) -> &'t Token<'a> {
        if self.depth > 0 {
            while self.tokens[self.cursor].kind == TokenKind::Newline {
                self.cursor += 1;
            }
        }
        &self.tokens[self.cursor]
    }

    fn bump(&mut self) -> &'t Token<'a> {
        let token = self.peek();
        if token.kind != TokenKind::Eof {
            self.cursor += 1;
        }
        token
    }

    fn error(&self, expected: &str, found: &Token<'_>) -> DslError {
        DslError::new(
            ErrorKind::Parse {
                expected: expected.to_owned(),
                found: describe(found),
            },
            found.pos,
        )
    }

    fn expect(&mut self, kind: TokenKind) -> Result<&'t Token<'a>, DslError> {
        let token = self.peek();
        if token.kind == kind {
            Ok(self.bump())
        } else {
            Err(self.error(&kind.to_string(), token))
        }
    }

    fn end_of_statement(&mut self) -> Result<(), DslError> {
        let token = self.peek();
        match token.kind {
            TokenKind::Newline => {
                self.bump();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            _ => Err(self.error("end of line", token)),
        }
    }

    fn document(&mut self) -> Result<(), DslError> {
        loop {
            let token = self.peek();
            match token.kind {
                TokenKind::Eof => return Ok(()),
                TokenKind::Newline => {
                    self.bump();
                }
                TokenKind::Keyword(Keyword::State) => self.declare_states(false)?,
                TokenKind::Keyword(Keyword::Terminal) => self.declare_states(true)?,
                TokenKind::Keyword(Keyword::Action) => self.declare_actions()?,
                TokenKind::Keyword(Keyword::Gamma) => self.gamma()?,
                _ => {
                    let statement = self.statement()?;
                    self.doc.statements.push(statement);
                    self.end_of_statement()?;
                }
            }
        }
    }

    fn declared_names(&mut self) -> Result<Vec<&'t Token<'a>>, DslError> {
        self.bump();
        let mut names = Vec::new();
        while self.peek().kind == TokenKind::Ident {
            let token = self.bump();
            if self.symbols.contains_key(token.text) || names.iter().any(|t: &&Token<'_>| t.text == token.text) {
                return Err(DslError::new(
                    ErrorKind::DuplicateDeclaration(token.text.to_owned()),
                    token.pos,
                ));
            }
            names.push(token);
        }
        if names.is_empty() {
            let token = self.peek();
            return Err(self.error("identifier", token));
        }
        self.end_of_statement()?;
        Ok(names)
    }

    fn declare_states(&mut self, terminal: bool) -> Result<(), DslError> {
        for token in self.declared_names()? {
            let id = StateId(self.doc.states.len());
            self.symbols.insert(token.text, Symbol::State(id));
            self.doc.states.push(Declaration {
                name: token.text.to_owned(),
                terminal,
                pos: token.pos,
            });
        }
        Ok(())
    }

    fn declare_actions(&mut self) -> Result<(), DslError> {
        for token in self.declared_names()? {
            let id = ActionId(self.doc.actions.len());
            self.symbols.insert(token.text, Symbol::Action(id));
            self.doc.actions.push(Declaration {
                name: token.text.to_owned(),
                terminal: false,
                pos: token.pos,
            });
        }
        Ok(())
    }

    fn gamma(&mut self) -> Result<(), DslError> {
        let keyword = self.bump();
        if self.doc.gamma.is_some() {
            return Err(DslError::new(ErrorKind::DuplicateGamma, keyword.pos));
        }
        let value = self.expect(TokenKind::Number)?;
        self.doc.gamma = Some((value.number(), value.pos));
        self.end_of_statement()
    }

    /// `alternatives ['>' alternatives]`
    fn statement(&mut self) -> Result<Ast, DslError> {
        let lhs = self.alternatives()?;
        if self.peek().kind != TokenKind::Gt {
            return Ok(lhs);
        }
        self.bump();
        let rhs = self.alternatives()?;
        let token = self.peek();
        if token.kind == TokenKind::Gt {
            return Err(self.error("a single `>` per transition", token));
        }
        Ok(Ast::Map(Box::new(lhs), Box::new(rhs)))
    }

    fn alternatives(&mut self) -> Result<Ast, DslError> {
        let mut items = vec![self.conjunction()?];
        while self.peek().kind == TokenKind::Pipe {
            self.bump();
            items.push(self.conjunction()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Ast::Alt(items) })
    }

    fn conjunction(&mut self) -> Result<Ast, DslError> {
        let mut node = self.weighted()?;
        while self.peek().kind == TokenKind::Amp {
            self.bump();
            let rhs = self.weighted()?;
            node = Ast::Conj(Box::new(node), Box::new(rhs));
        }
        Ok(node)
    }

    fn weighted(&mut self) -> Result<Ast, DslError> {
        let mut node = self.primary()?;
        while self.peek().kind == TokenKind::Star {
            self.bump();
            let token = self.expect(TokenKind::Number)?;
            let weight = token.number();
            if weight <= 0.0 {
                return Err(DslError::new(ErrorKind::InvalidWeight(weight), token.pos));
            }
            node = Ast::Weighted(Box::new(node), weight);
        }
        Ok(node)
    }

    fn primary(&mut self) -> Result<Ast, DslError> {
        let token = self.peek();
        match token.kind {
            TokenKind::Ident => {
                self.bump();
                let atom = match self.symbols.get(token.text) {
                    Some(Symbol::State(id)) => Atom::State {
                        id: *id,
                        name: token.text.to_owned(),
                    },
                    Some(Symbol::Action(id)) => Atom::Action {
                        id: *id,
                        name: token.text.to_owned(),
                    },
                    None => {
                        return Err(DslError::new(
                            ErrorKind::UndeclaredIdentifier(token.text.to_owned()),
                            token.pos,
                        ))
                    }
                };
                Ok(Ast::Atom(atom, token.pos))
            }
            TokenKind::Keyword(Keyword::Reward) => {
                self.bump();
                self.depth += 1;
                self.expect(TokenKind::LParen)?;
                let value = self.expect(TokenKind::Number)?.number();
                self.expect(TokenKind::RParen)?;
                self.depth -= 1;
                Ok(Ast::Atom(Atom::Reward(value), token.pos))
            }
            TokenKind::LParen => {
                self.bump();
                self.depth += 1;
                let inner = self.statement()?;
                self.expect(TokenKind::RParen)?;
                self.depth -= 1;
                Ok(inner)
            }
            _ => Err(self.error("state, action, `reward(...)` or `(`", token)),
        }
    }
}

/// Convenience wrapper used by tests and tooling: the single transition
/// expression on the last line of `text`.
#[cfg(test)]
pub(crate) fn parse_expression(decls: &str, expr: &str) -> Result<Ast, DslError> {
    let text = format!("{decls}\n{expr}\n");
    let tokens = super::tokenize(&text)?;
    let doc = parse(&tokens)?;
    Ok(doc.statements.last().cloned().expect("one statement"))
}
