//! Canonical JSON rendering: sorted keys, compact separators, and floats
//! written with 17 significant digits in scientific notation. Rendering
//! the same data twice yields the same bytes, and reparsing a rendered
//! float recovers the exact `f64`, so canonical files survive a
//! read-write cycle bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<Value>),
    Object(BTreeMap<String, Value>),
}

impl Value {
    pub fn object<I>(entries: I) -> Value
    where
        I: IntoIterator<Item = (&'static str, Value)>,
    {
        Value::Object(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    pub fn floats<I>(xs: I) -> Value
    where
        I: IntoIterator<Item = f64>,
    {
        Value::Array(xs.into_iter().map(Value::Float).collect())
    }

    pub fn string(s: impl Into<String>) -> Value {
        Value::Str(s.into())
    }
}

/// Renders a complete output document: canonical body plus one trailing
/// newline.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, &mut out);
    out.push('\n');
    out
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Float(x) => {
            assert!(x.is_finite(), "canonical JSON cannot hold {x}");
            let _ = write!(out, "{x:.16e}");
        }
        Value::Str(s) => write_string(s, out),
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            // BTreeMap iteration is the sort order.
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write_string(key, out);
                out.push(':');
                write_value(item, out);
            }
            out.push('}');
        }
    }
}

fn write_string(s: &str, out: &mut String) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
