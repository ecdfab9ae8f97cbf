//! Reports: ordered sections of key/value rows, printed for people or as
//! canonical JSON.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub rows: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            sections: Vec::new(),
        }
    }

    pub fn section(&mut self, title: &str) -> &mut Section {
        self.sections.push(Section {
            title: title.to_string(),
            rows: Vec::new(),
        });
        self.sections.last_mut().unwrap()
    }

    pub fn fail(&mut self, kind: &str, message: &str) {
        self.status = Status::Error;
        self.section("error").row("kind", kind).row("message", message);
    }

    /// Canonical machine form: compact JSON, a trailing newline, no floats.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let status = match self.status {
            Status::Ok => "ok",
            Status::Error => "error",
        };
        let mut out = format!("hodgekit {}: {status}\n", self.command);
        for s in &self.sections {
            out.push_str(&format!("\n[{}]\n", s.title));
            let w = s.rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (k, v) in &s.rows {
                out.push_str(&format!("  {k:<w$}  {v}\n"));
            }
        }
        out
    }
}

impl Section {
    pub fn row(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.rows.push((key.to_string(), value.to_string()));
        self
    }
}
