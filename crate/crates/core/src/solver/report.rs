use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{QTable, ValueFunction};
use crate::model::ValidatedMdp;

pub const REPORT_VERSION: u32 = 1;

/// Rounds to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    let text = format!("{:.*e}", digits.saturating_sub(1), x);
    text.parse::<f64>().map_or(x, |v| v + 0.0)
}

/// JSON number for `x` at 12 significant digits; integral values print
/// without a fractional part.
pub fn json_number(x: f64) -> Value {
    let r = round_significant(x, 12);
    if r.fract() == 0.0 && r.abs() < 1e15 {
        Value::from(r as i64)
    } else {
        Value::from(r)
    }
}

/// Optimal values of one model, in state/action index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub gamma: f64,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub v: ValueFunction,
    pub q: QTable,
}

impl SolveReport {
    pub fn new(m: &ValidatedMdp, v: ValueFunction, q: QTable) -> Self {
        SolveReport {
            gamma: m.discount(),
            states: m.states().iter().map(|s| s.name.clone()).collect(),
            actions: m.actions().iter().map(|a| a.name.clone()).collect(),
            v,
            q,
        }
    }

    pub fn to_json(&self) -> Value {
        let v: Vec<Value> = self.v.values.iter().map(|&x| json_number(x)).collect();
        let q: Vec<Value> = self
            .q
            .rows()
            .map(|row| Value::Array(row.iter().map(|&x| json_number(x)).collect()))
            .collect();
        json!({
            "version": REPORT_VERSION,
            "gamma": json_number(self.gamma),
            "states": self.states,
            "actions": self.actions,
            "v": v,
            "q": q,
        })
    }

    pub fn to_text(&self) -> String {
        let num = |x: f64| json_number(x).to_string();
        let mut out = String::new();
        let _ = writeln!(out, "gamma = {}", num(self.gamma));
        let width = self.states.iter().map(String::len).max().unwrap_or(0).max(5);
        let col = 14;
        let _ = write!(out, "{:<width$} {:>col$}", "state", "v");
        for a in &self.actions {
            let _ = write!(out, " {:>col$}", format!("q[{a}]"));
        }
        out.push('\n');
        for (s, name) in self.states.iter().enumerate() {
            let _ = write!(out, "{:<width$} {:>col$}", name, num(self.v.values[s]));
            for &q in self.q.row(s) {
                let _ = write!(out, " {:>col$}", num(q));
            }
            out.push('\n');
        }
        out
    }
}
