//! Report schema and persistence.

use std::path::Path;

use anyhow::Context;
use qcdual::identities::Verdict;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
    /// Everything needed to replay this entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Value>,
}

impl Entry {
    pub fn new(name: impl Into<String>, verdict: Verdict, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict,
            detail: detail.into(),
            inputs: None,
            data: None,
        }
    }

    pub fn with_inputs(mut self, v: Value) -> Self {
        self.inputs = Some(v);
        self
    }

    pub fn with_data(mut self, v: Value) -> Self {
        self.data = Some(v);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub verdicts: Vec<Entry>,
    pub timing: Timing,
}

/// Command output before it is wrapped into a report.
pub struct Outcome {
    pub entries: Vec<Entry>,
    pub csv: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, entries: Vec<Entry>, elapsed_s: f64) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            passed: entries.iter().all(|e| e.verdict != Verdict::Fail),
            verdicts: entries,
            timing: Timing { elapsed_s },
        }
    }

    pub fn write(&self, out: Option<&Path>, csv: Option<&str>) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        match out {
            None => print!("{text}"),
            Some(p) => {
                std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
                if let Some(csv) = csv {
                    let cp = p.with_extension("csv");
                    std::fs::write(&cp, csv)
                        .with_context(|| format!("writing {}", cp.display()))?;
                }
            }
        }
        Ok(())
    }
}
