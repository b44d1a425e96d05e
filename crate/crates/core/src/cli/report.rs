//! Report assembly. Objects are key-sorted and scalars are exact strings, so equal inputs give
//! equal bytes.

use crate::error::Error;
use crate::graded_core::{Coeff, LinComb, Rational};
use crate::graded_lie::odd;
use crate::graded_lie::{BbKey, CoderKey, VfKey};
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "linf-deform/1";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_MATH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

pub fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::CutoffOverflow { .. }
        | Error::WindowExceeded { .. }
        | Error::SeriesNotTerminating { .. }
        | Error::UnverifiableTruncation(_)
        | Error::SingularJacobian { .. } => EXIT_TRUNCATION,
        Error::NotMaurerCartan => EXIT_MATH,
        _ => EXIT_INPUT,
    }
}

pub trait Label {
    fn label(&self) -> String;
}

impl Label for usize {
    fn label(&self) -> String {
        format!("e{self}")
    }
}

impl Label for VfKey {
    fn label(&self) -> String {
        let mut s: String = odd::indices(self.mono).iter().map(|i| format!("x{i}*")).collect();
        s.push_str(&format!("d{}", self.target));
        s
    }
}

impl Label for CoderKey {
    fn label(&self) -> String {
        let ins: Vec<String> = self.inputs.iter().map(|i| i.to_string()).collect();
        format!("({})->{}", ins.join(","), self.output)
    }
}

impl Label for BbKey {
    fn label(&self) -> String {
        let bits = odd::indices(self.0);
        if bits.is_empty() {
            return "1".into();
        }
        bits.iter().map(|i| format!("g{i}")).collect::<Vec<_>>().join("*")
    }
}

impl Label for (bool, VfKey) {
    fn label(&self) -> String {
        format!("{}:{}", if self.0 { "a" } else { "L" }, self.1.label())
    }
}

pub fn scalar(c: &Rational) -> Value {
    Value::String(c.to_string())
}

/// Sparse `[[label, "p/q"], ...]` in key order.
pub fn sparse<K: Ord + Clone + std::fmt::Debug + Label>(x: &LinComb<K>) -> Value {
    Value::Array(x.iter().map(|(k, c)| json!([k.label(), scalar(c)])).collect())
}

pub fn vector(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(scalar).collect())
}

pub fn matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|r| vector(r)).collect())
}

/// Nonzero defects `((i, j), value)` as `[[i, j], [...]]`.
pub fn defects(d: &[((usize, usize), Vec<Rational>)]) -> Value {
    Value::Array(
        d.iter()
            .filter(|(_, v)| v.iter().any(|c| !Coeff::is_zero(c)))
            .map(|((i, j), v)| json!([[i, j], vector(v)]))
            .collect(),
    )
}

#[derive(Debug)]
pub struct Report {
    command: &'static str,
    kind: String,
    checks: Vec<Value>,
    fields: Map<String, Value>,
    code: Option<i32>,
}

impl Report {
    pub fn new(command: &'static str, kind: &str) -> Self {
        Report { command, kind: kind.into(), checks: Vec::new(), fields: Map::new(), code: None }
    }

    pub fn check(&mut self, name: &str, pass: bool, witness: Option<Value>) -> &mut Self {
        let mut c = Map::new();
        c.insert("name".into(), name.into());
        c.insert("pass".into(), pass.into());
        if let (false, Some(w)) = (pass, witness) {
            c.insert("witness".into(), w);
        }
        self.checks.push(Value::Object(c));
        self
    }

    pub fn info(&mut self, key: &str, v: Value) -> &mut Self {
        self.fields.insert(key.into(), v);
        self
    }

    /// Overrides the exit code derived from the checks.
    pub fn exit_with(&mut self, code: i32) -> &mut Self {
        self.code = Some(code);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c["pass"] == Value::Bool(true))
    }

    pub fn code(&self) -> i32 {
        self.code.unwrap_or(if self.passed() { EXIT_PASS } else { EXIT_MATH })
    }

    pub fn into_value(self) -> Value {
        let pass = self.passed() && self.code.is_none_or(|c| c == EXIT_PASS);
        let mut m = self.fields;
        m.insert("schema".into(), SCHEMA.into());
        m.insert("command".into(), self.command.into());
        m.insert("kind".into(), self.kind.into());
        m.insert("checks".into(), Value::Array(self.checks));
        m.insert("pass".into(), pass.into());
        Value::Object(m)
    }
}

pub fn error_value(command: &str, kind: Option<&str>, e: &Error) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "kind": kind,
        "pass": false,
        "error": e.to_string(),
    })
}

/// Human-readable rendering of a report value.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    let verdict = if v["pass"] == Value::Bool(true) { "PASS" } else { "FAIL" };
    let kind = v["kind"].as_str().unwrap_or("-");
    out.push_str(&format!("{} {}: {}\n", v["command"].as_str().unwrap_or(""), kind, verdict));
    if let Some(e) = v.get("error") {
        out.push_str(&format!("  error: {}\n", e.as_str().unwrap_or("")));
    }
    if let Some(Value::Array(cs)) = v.get("checks") {
        for c in cs {
            let tag = if c["pass"] == Value::Bool(true) { "ok  " } else { "FAIL" };
            out.push_str(&format!("  [{tag}] {}", c["name"].as_str().unwrap_or("")));
            if let Some(w) = c.get("witness") {
                out.push_str(&format!("  witness: {w}"));
            }
            out.push('\n');
        }
    }
    if let Value::Object(m) = v {
        for (k, val) in m {
            if matches!(k.as_str(), "schema" | "command" | "kind" | "pass" | "checks" | "error") {
                continue;
            }
            out.push_str(&format!("  {k}: {val}\n"));
        }
    }
    out
}
