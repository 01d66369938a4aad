//! Verification reports and their table, JSON and CSV renderings.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept for every float in JSON output.
const SIG_DIGITS: usize = 12;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    /// `value < tolerance`.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            pass: value < tolerance,
            value: Some(value),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    /// `value > tolerance`.
    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            pass: value > tolerance,
            ..Self::below(name, value, tolerance)
        }
    }

    /// An exact (integer or structural) comparison.
    pub fn exact(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            value: None,
            tolerance: Some(0.0),
            detail: Some(detail.into()),
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), json!(self.name));
        m.insert("pass".into(), json!(self.pass));
        m.insert("value".into(), json!(self.value));
        m.insert("tolerance".into(), json!(self.tolerance));
        m.insert("detail".into(), json!(self.detail));
        Value::Object(m)
    }
}

/// A dimension table, the only content emitted as CSV.
#[derive(Clone, Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub meta: Map<String, Value>,
    pub checks: Vec<Check>,
    pub results: Map<String, Value>,
    pub table: Option<Table>,
    /// Omit `results` from the table rendering.
    pub terse: bool,
}

impl Report {
    pub fn new(command: &str, meta: Map<String, Value>) -> Self {
        Self {
            command: command.into(),
            meta,
            checks: Vec::new(),
            results: Map::new(),
            table: None,
            terse: false,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        m.insert("meta".into(), Value::Object(self.meta.clone()));
        m.insert("pass".into(), json!(self.passed()));
        m.insert(
            "checks".into(),
            Value::Array(self.checks.iter().map(Check::to_json).collect()),
        );
        m.insert("results".into(), Value::Object(self.results.clone()));
        round_floats(Value::Object(m))
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    }

    pub fn render_csv(&self) -> Option<String> {
        let t = self.table.as_ref()?;
        let mut s = t.header.join(",");
        s.push('\n');
        for row in &t.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        Some(s)
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let meta: Vec<String> = self
            .meta
            .iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| format!("{k}={}", compact(v)))
            .collect();
        let _ = writeln!(s, "qsymx {}  {}", self.command, meta.join(" "));
        if let Some(t) = &self.table {
            s.push('\n');
            s.push_str(&aligned(&t.header, &t.rows));
        }
        if !self.checks.is_empty() {
            s.push('\n');
            let header: Vec<String> = ["check", "result", "value", "tolerance", "detail"]
                .iter()
                .map(|x| x.to_string())
                .collect();
            let rows: Vec<Vec<String>> = self
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        if c.pass { "pass" } else { "FAIL" }.into(),
                        c.value.map_or("-".into(), |v| format!("{v:.3e}")),
                        c.tolerance.map_or("-".into(), |v| format!("{v:.0e}")),
                        c.detail.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            s.push_str(&aligned(&header, &rows));
        }
        if self.table.is_none() && !self.terse && !self.results.is_empty() {
            s.push('\n');
            for (k, v) in &self.results {
                let _ = writeln!(s, "{k}: {}", compact(&round_floats(v.clone())));
            }
        }
        let _ = writeln!(
            s,
            "\n{}",
            if self.passed() {
                "all checks pass"
            } else {
                "some checks FAILED"
            }
        );
        s
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn aligned(header: &[String], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut out = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut s = line(header);
    s.push_str(&line(
        &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>(),
    ));
    for row in rows {
        s.push_str(&line(row));
    }
    s
}

/// Rounds every float to [`SIG_DIGITS`] significant digits so that output is
/// stable across runs; integers are left untouched.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{x:.*e}", SIG_DIGITS - 1).parse().expect("float");
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(m) => {
            Value::Object(m.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}
