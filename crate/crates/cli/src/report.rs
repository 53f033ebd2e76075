use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "bbs-codes/report/v1";

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub seed: u64,
    /// Every flag of the run, enough to reproduce it.
    pub config: Value,
    /// False when a verification inside the command failed.
    pub ok: bool,
    pub result: Value,
}

/// `key: value` lines for the top level of the result.
pub fn render_text(r: &Report) -> String {
    let mut out = format!("{} (seed {}) {}\n", r.command, r.seed, if r.ok { "ok" } else { "FAILED" });
    if let Value::Object(map) = &r.result {
        for (k, v) in map {
            match v {
                Value::String(s) if s.contains('\n') => {
                    out.push_str(&format!("{k}:\n"));
                    for line in s.lines() {
                        out.push_str(&format!("  {line}\n"));
                    }
                }
                Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                _ => out.push_str(&format!("{k}: {v}\n")),
            }
        }
    } else {
        out.push_str(&format!("{}\n", r.result));
    }
    out
}
