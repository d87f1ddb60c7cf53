//! Graph view of a model and DOT export.
//!
//! The graph is bipartite: every state is a node, and every (state, action)
//! pair with declared outcomes gets a small choice node. A state links to
//! its choice nodes with the action name; a choice node links to each
//! successor with the transition probability.

use std::fmt::Write as _;

use crate::model::{ActionId, StateId, ValidatedMdp};

const HIGHLIGHT: &str = "#ffd54f";

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    State { state: StateId, terminal: bool },
    Choice { state: StateId, action: ActionId, reward: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    /// DOT node identifier.
    pub id: String,
    pub label: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeKind {
    Action(ActionId),
    Probability(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: String,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MdpGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl MdpGraph {
    pub fn state_node(&self, state: StateId) -> Option<usize> {
        self.nodes
            .iter()
            .position(|n| matches!(n.kind, NodeKind::State { state: s, .. } if s == state))
    }

    pub fn choice_nodes(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Choice { .. }))
    }

    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == node)
    }
}

/// Formats a probability with at most three decimals, trailing zeros trimmed.
pub fn format_probability(p: f64) -> String {
    let text = format!("{p:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    if text == "0" {
        "<0.001".to_owned()
    } else {
        text.to_owned()
    }
}

fn reward_label(m: &ValidatedMdp, state: usize, action: usize) -> String {
    let dist = m.reward_distribution(state, action);
    if dist.is_point_mass() {
        format!("r={}", dist.outcomes()[0].0)
    } else {
        let parts: Vec<String> = dist
            .outcomes()
            .iter()
            .map(|&(v, p)| format!("{v}:{}", format_probability(p)))
            .collect();
        format!("r∈{{{}}}", parts.join(","))
    }
}

pub fn to_graph(m: &ValidatedMdp) -> MdpGraph {
    let mut g = MdpGraph::default();
    for state in m.states() {
        g.nodes.push(Node {
            id: state.name.clone(),
            label: state.name.clone(),
            kind: NodeKind::State {
                state: StateId(state.index),
                terminal: state.terminal,
            },
        });
    }
    for state in m.states() {
        let s = state.index;
        for action in m.actions() {
            let a = action.index;
            if state.terminal || !m.has_outcomes(s, a) {
                continue;
            }
            let choice = g.nodes.len();
            let reward = reward_label(m, s, a);
            g.nodes.push(Node {
                id: format!("{}:{}", state.name, action.name),
                label: reward.clone(),
                kind: NodeKind::Choice {
                    state: StateId(s),
                    action: ActionId(a),
                    reward,
                },
            });
            g.edges.push(Edge {
                from: s,
                to: choice,
                label: action.name.clone(),
                kind: EdgeKind::Action(ActionId(a)),
            });
            for (next, &p) in m.transition_row(s, a).iter().enumerate() {
                if p > 0.0 {
                    g.edges.push(Edge {
                        from: choice,
                        to: next,
                        label: format_probability(p),
                        kind: EdgeKind::Probability(p),
                    });
                }
            }
        }
    }
    g
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn to_dot(g: &MdpGraph) -> String {
    to_dot_highlighted(g, None)
}

/// Like [`to_dot`], with the node of `current` filled.
pub fn to_dot_highlighted(g: &MdpGraph, current: Option<StateId>) -> String {
    let mut out = String::new();
    out.push_str("digraph mdp {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    out.push_str("  edge [fontname=\"Helvetica\"];\n");

    // States first, then each choice node followed by its edges.
    for node in &g.nodes {
        if let NodeKind::State { state, terminal } = node.kind {
            let shape = if terminal { "doublecircle" } else { "circle" };
            let fill = if current == Some(state) {
                format!(", style=filled, fillcolor=\"{HIGHLIGHT}\"")
            } else {
                String::new()
            };
            let _ = writeln!(out, "  {} [shape={shape}{fill}];", quote(&node.id));
        }
    }
    for (index, node) in g.choice_nodes() {
        let _ = writeln!(
            out,
            "  {} [shape=point, xlabel={}];",
            quote(&node.id),
            quote(&node.label)
        );
        for edge in g.edges.iter().filter(|e| e.to == index) {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&g.nodes[edge.from].id),
                quote(&node.id),
                quote(&edge.label)
            );
        }
        for edge in g.outgoing(index) {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&node.id),
                quote(&g.nodes[edge.to].id),
                quote(&edge.label)
            );
        }
    }
    out.push_str("}\n");
    out
}
