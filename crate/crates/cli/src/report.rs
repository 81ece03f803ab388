//! Reports: one document per run, rendered as indented text or JSON.
//!
//! Field order is fixed by construction, so identical inputs give
//! identical bytes.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub arguments: Vec<(String, String)>,
    pub input_digest: String,
    pub outcome: String,
    pub payload: Map<String, Value>,
}

/// SHA-256 over the command, its effective arguments and the spec text.
pub fn input_digest(command: &str, arguments: &[(String, String)], spec_text: &str) -> String {
    let mut h = Sha256::new();
    h.update(b"crconst-report-v1\n");
    h.update(command.as_bytes());
    h.update(b"\n");
    for (k, v) in arguments {
        h.update(format!("{k}={v}\n").as_bytes());
    }
    h.update(b"--\n");
    h.update(spec_text.as_bytes());
    let digest = h.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

impl Report {
    pub fn new(command: &str, arguments: Vec<(String, String)>, spec_text: &str) -> Self {
        let input_digest = input_digest(command, &arguments, spec_text);
        Self {
            command: command.to_string(),
            arguments,
            input_digest,
            outcome: String::new(),
            payload: Map::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.payload.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> Value {
        let mut args = Map::new();
        for (k, v) in &self.arguments {
            args.insert(k.clone(), Value::String(v.clone()));
        }
        let mut root = Map::new();
        root.insert("command".into(), self.command.clone().into());
        root.insert("arguments".into(), Value::Object(args));
        root.insert("input_digest".into(), self.input_digest.clone().into());
        root.insert("outcome".into(), self.outcome.clone().into());
        root.insert("payload".into(), Value::Object(self.payload.clone()));
        Value::Object(root)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = Vec::new();
                let Value::Object(root) = self.to_json() else {
                    unreachable!()
                };
                for (k, v) in &root {
                    if k == "payload" {
                        if let Value::Object(p) = v {
                            for (pk, pv) in p {
                                text_entry(&mut out, 0, pk, pv);
                            }
                        }
                    } else {
                        text_entry(&mut out, 0, k, v);
                    }
                }
                let mut s = out.join("\n");
                s.push('\n');
                s
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn text_entry(out: &mut Vec<String>, indent: usize, key: &str, v: &Value) {
    let pad = " ".repeat(indent);
    if let Some(s) = scalar(v) {
        out.push(format!("{pad}{key}: {s}"));
        return;
    }
    match v {
        Value::Array(items)
            if items
                .iter()
                .all(|x| scalar(x).is_some() || is_scalar_array(x)) =>
        {
            let parts: Vec<String> = items.iter().map(inline).collect();
            out.push(format!("{pad}{key}: [{}]", parts.join(", ")));
        }
        Value::Array(items) => {
            out.push(format!("{pad}{key}:"));
            for item in items {
                let start = out.len();
                match item {
                    Value::Object(obj) => {
                        for (k, x) in obj {
                            text_entry(out, indent + 4, k, x);
                        }
                    }
                    other => out.push(format!("{pad}    {}", inline(other))),
                }
                if let Some(first) = out.get_mut(start) {
                    first.replace_range(indent..indent + 4, "  - ");
                }
            }
        }
        Value::Object(obj) => {
            out.push(format!("{pad}{key}:"));
            for (k, x) in obj {
                text_entry(out, indent + 2, k, x);
            }
        }
        _ => unreachable!(),
    }
}

fn is_scalar_array(v: &Value) -> bool {
    matches!(v, Value::Array(xs) if xs.iter().all(|x| scalar(x).is_some()))
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar(other).unwrap_or_else(|| other.to_string()),
    }
}
