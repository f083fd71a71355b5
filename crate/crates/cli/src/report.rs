use serde_json::{json, Value};

use crate::args::Format;

/// What a command produced: the JSON document plus flat renderings.
pub struct Report {
    pub command: String,
    pub config: Value,
    pub result: Value,
    /// False when an identity or universality check failed.
    pub ok: bool,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: Vec<String>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let doc = json!({
                    "command": self.command,
                    "config": self.config,
                    "result": self.result,
                    "status": if self.ok { "ok" } else { "check-failed" },
                });
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            }
            Format::Csv => {
                let mut out = String::new();
                for row in std::iter::once(self.header.iter().map(|h| h.to_string()).collect()).chain(self.rows.clone()) {
                    let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Text => {
                let mut out = format!("{}\n", self.command);
                if let Value::Object(m) = &self.config {
                    let cfg: Vec<String> = m.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    out.push_str(&format!("config: {}\n", cfg.join(" ")));
                }
                for line in &self.text {
                    out.push_str(line);
                    out.push('\n');
                }
                out.push_str(if self.ok { "status: ok\n" } else { "status: check-failed\n" });
                out
            }
        }
    }
}
