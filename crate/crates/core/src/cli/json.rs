//! Canonical JSON: sorted keys, two-space indentation, and every float
//! written with 17 significant digits in exponent form, which round-trips
//! `f64` exactly. Parsing a canonical file and writing it again reproduces
//! it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use super::CliError;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // Short numeric arrays (vectors) stay on one line.
            if items.len() <= 3 && items.iter().all(Value::is_number) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = to_canonical_string(value).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })?;
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(format_float(0.2), "2.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-3.5e-12), "-3.5000000000000000e-12");
    }

    #[test]
    fn keys_are_sorted_and_ints_kept() {
        let v = json!({"b": 1, "a": [0.5, 2], "c": {"z": true, "y": null}});
        let s = to_canonical_string(&v).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [5.0000000000000000e-1, 2],\n  \"b\": 1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  }\n}\n"
        );
    }

    #[test]
    fn reparse_is_byte_identical() {
        let v = json!({"x": [0.1, 0.7000000000000001, -1e-300], "s": "q\"uote"});
        let once = to_canonical_string(&v).unwrap();
        let back: Value = serde_json::from_str(&once).unwrap();
        assert_eq!(once, to_canonical_string(&back).unwrap());
    }
}
