//! Run reports and their JSON and table renderings.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub results: Value,
    pub passed: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command.join(" "),
            "inputs_digest": self.inputs_digest,
            "results": self.results,
            "status": if self.passed { "pass" } else { "fail" },
            "exit_status": self.exit_code(),
        })
    }

    pub fn to_table(&self) -> String {
        render_table(&self.to_json())
    }
}

/// SHA-256 over the length-prefixed input texts, in reading order.
pub fn digest(inputs: &[String]) -> String {
    let mut h = Sha256::new();
    for text in inputs {
        h.update((text.len() as u64).to_le_bytes());
        h.update(text.as_bytes());
    }
    format!("sha256:{:x}", h.finalize())
}

/// Two aligned columns: the dotted path of every leaf and its value. Arrays
/// of scalars stay on one row.
pub fn render_table(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten(String::new(), v, &mut rows);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn flatten(prefix: String, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if m.is_empty() => rows.push((prefix, "{}".into())),
        Value::Object(m) => {
            for (k, x) in m {
                flatten(join(k), x, rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            rows.push((prefix, format!("[{}]", items.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(format!("{prefix}[{i}]"), x, rows);
            }
        }
        _ => rows.push((prefix, scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows_are_aligned() {
        let t = render_table(&json!({"a": {"bb": 1, "c": [1, "x"]}, "d": [{"e": null}], "f": {}}));
        assert_eq!(t, "a.bb    1\na.c     [1, x]\nd[0].e  -\nf       {}\n");
    }

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&["ab".into(), "c".into()]), digest(&["a".into(), "bc".into()]));
        assert_eq!(digest(&[]), digest(&[]));
    }
}
