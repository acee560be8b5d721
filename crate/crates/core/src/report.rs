//! Line-oriented key=value run reports; diffable and stable under a fixed
//! seed (timing keys carry the only run-to-run variation).

use std::fmt::Display;

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    lines: Vec<(String, String)>,
}

impl RunReport {
    pub fn new() -> Self {
        RunReport::default()
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn extend_from(&mut self, prefix: &str, other: &RunReport) {
        for (k, v) in &other.lines {
            self.lines.push((format!("{prefix}{k}"), v.clone()));
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    /// The report without timing keys, the part that must be byte-identical
    /// across runs with a fixed seed.
    pub fn stable_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.lines {
            if k.ends_with("time_ms") {
                continue;
            }
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}
