//! Line-delimited JSON records. Every record carries `schema`; wall-clock
//! measurements live only under `timing` so the rest can be diffed.

use std::collections::BTreeMap;

use serde::Serialize;

use mids_core::{SearchStats, Solution};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Record<T: Serialize> {
    pub schema: u32,
    pub command: &'static str,
    #[serde(flatten)]
    pub body: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Serialize)]
pub struct Timing {
    pub wall_ms: f64,
}

impl<T: Serialize> Record<T> {
    pub fn new(command: &'static str, body: T) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command,
            body,
            timing: None,
        }
    }

    pub fn timed(mut self, wall: std::time::Duration) -> Self {
        self.timing = Some(Timing {
            wall_ms: wall.as_secs_f64() * 1e3,
        });
        self
    }

    pub fn emit(&self) {
        println!(
            "{}",
            serde_json::to_string(self).expect("records serialize")
        );
    }
}

#[derive(Serialize)]
pub struct Outcome {
    pub status: &'static str,
    pub size: Option<usize>,
    /// 1-based, as in instance files.
    pub witness: Option<Vec<usize>>,
}

impl From<&Solution> for Outcome {
    fn from(s: &Solution) -> Self {
        Outcome {
            status: if s.is_found() { "found" } else { "infeasible" },
            size: s.size(),
            witness: s.witness().map(|w| w.iter().map(|v| v + 1).collect()),
        }
    }
}

#[derive(Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub leaves: u64,
    pub max_depth: usize,
    pub cases: BTreeMap<String, u64>,
}

impl From<&SearchStats> for Stats {
    fn from(s: &SearchStats) -> Self {
        Stats {
            nodes: s.nodes,
            leaves: s.leaves,
            max_depth: s.max_depth,
            cases: s
                .case_counts
                .iter()
                .map(|(c, n)| (c.label().to_string(), *n))
                .collect(),
        }
    }
}

/// `case9:12 case5:3 ...` in rule order.
pub fn cases_text(s: &SearchStats) -> String {
    s.case_counts
        .iter()
        .map(|(c, n)| format!("{}:{n}", c.label()))
        .collect::<Vec<_>>()
        .join(" ")
}
