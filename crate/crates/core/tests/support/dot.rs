//! A small, independent checker for the DOT language subset: graph header,
//! node/edge/attribute statements, attribute lists and `ID = ID` statements.
//! Returns the parsed statements so tests can compare structure.

#![allow(dead_code)]

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Eq,
    Semi,
    Comma,
    Arrow,
    UndirectedEdge,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' => {
                out.push(Tok::LBrace);
                i += 1
            }
            '}' => {
                out.push(Tok::RBrace);
                i += 1
            }
            '[' => {
                out.push(Tok::LBracket);
                i += 1
            }
            ']' => {
                out.push(Tok::RBracket);
                i += 1
            }
            '=' => {
                out.push(Tok::Eq);
                i += 1
            }
            ';' => {
                out.push(Tok::Semi);
                i += 1
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Arrow);
                i += 2
            }
            '-' if chars.get(i + 1) == Some(&'-') => {
                out.push(Tok::UndirectedEdge);
                i += 2
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some('"') => s.push('"'),
                                Some(&c) => {
                                    s.push('\\');
                                    s.push(c)
                                }
                                None => return Err("dangling escape".into()),
                            }
                            i += 2;
                        }
                        Some(&c) => {
                            s.push(c);
                            i += 1
                        }
                    }
                }
                out.push(Tok::Id(s));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                out.push(Tok::Id(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct DotGraph {
    pub directed: bool,
    pub name: Option<String>,
    pub nodes: Vec<(String, BTreeMap<String, String>)>,
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
    pub graph_attrs: Vec<(String, String)>,
}

impl DotGraph {
    pub fn node_attrs(&self, id: &str) -> Option<&BTreeMap<String, String>> {
        self.nodes.iter().find(|(n, _)| n == id).map(|(_, a)| a)
    }
}

struct P {
    toks: Vec<Tok>,
    i: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i)
    }
    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).cloned();
        self.i += 1;
        t
    }
    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected ID, got {other:?}")),
        }
    }
    fn expect(&mut self, t: Tok) -> Result<(), String> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            other => Err(format!("expected {t:?}, got {other:?}")),
        }
    }
    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, String> {
        let mut attrs = BTreeMap::new();
        while self.peek() == Some(&Tok::LBracket) {
            self.next();
            while self.peek() != Some(&Tok::RBracket) {
                let k = self.id()?;
                self.expect(Tok::Eq)?;
                let v = self.id()?;
                if attrs.insert(k.clone(), v).is_some() {
                    return Err(format!("duplicate attribute {k}"));
                }
                if matches!(self.peek(), Some(Tok::Comma | Tok::Semi)) {
                    self.next();
                }
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(attrs)
    }
}

pub fn check(text: &str) -> Result<DotGraph, String> {
    let mut p = P { toks: lex(text)?, i: 0 };
    let mut g = DotGraph::default();
    let mut head = p.id()?;
    if head.eq_ignore_ascii_case("strict") {
        head = p.id()?;
    }
    g.directed = match head.to_ascii_lowercase().as_str() {
        "digraph" => true,
        "graph" => false,
        other => return Err(format!("expected graph or digraph, got {other}")),
    };
    if let Some(Tok::Id(_)) = p.peek() {
        g.name = Some(p.id()?);
    }
    p.expect(Tok::LBrace)?;
    loop {
        match p.peek() {
            Some(Tok::RBrace) => {
                p.next();
                break;
            }
            Some(Tok::Semi) => {
                p.next();
            }
            Some(Tok::Id(_)) => {
                let first = p.id()?;
                match p.peek() {
                    Some(Tok::Eq) => {
                        p.next();
                        let v = p.id()?;
                        g.graph_attrs.push((first, v));
                    }
                    Some(Tok::Arrow | Tok::UndirectedEdge) => {
                        let mut chain = vec![first];
                        while let Some(op @ (Tok::Arrow | Tok::UndirectedEdge)) = p.peek().cloned() {
                            if (op == Tok::Arrow) != g.directed {
                                return Err("edge operator does not match graph kind".into());
                            }
                            p.next();
                            chain.push(p.id()?);
                        }
                        let attrs = p.attr_list()?;
                        for w in chain.windows(2) {
                            g.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
                        }
                    }
                    _ => {
                        let attrs = p.attr_list()?;
                        if matches!(first.as_str(), "node" | "edge" | "graph") {
                            continue;
                        }
                        g.nodes.push((first, attrs));
                    }
                }
            }
            other => return Err(format!("unexpected token {other:?}")),
        }
    }
    if p.peek().is_some() {
        return Err("trailing tokens after graph".into());
    }
    Ok(g)
}
