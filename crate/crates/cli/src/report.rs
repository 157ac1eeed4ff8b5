use std::collections::BTreeMap;
use std::fmt::Write;

use modelgate_core::encoder::PfsMode;
use modelgate_core::oracle::Plan;
use modelgate_core::solver::Outcome;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportOutcome {
    Sat,
    Unsat,
    Unknown,
    Error,
}

impl From<Outcome> for ReportOutcome {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Sat => ReportOutcome::Sat,
            Outcome::Unsat => ReportOutcome::Unsat,
            Outcome::Unknown => ReportOutcome::Unknown,
        }
    }
}

impl ReportOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportOutcome::Sat => "sat",
            ReportOutcome::Unsat => "unsat",
            ReportOutcome::Unknown => "unknown",
            ReportOutcome::Error => "error",
        }
    }
}

/// One query's result. Records output writes one of these per line as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    /// `vfs`, `pfs` or `oracle`.
    pub property: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<PfsMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// Pinned instance symbols and state fields.
    pub instance: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    pub outcome: ReportOutcome,
    pub wall_time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, f64>,
    /// Decoded state for sat VFS answers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_state: Option<BTreeMap<String, i64>>,
    /// Instance values chosen by the solver when they were left free.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_instance: Option<BTreeMap<String, i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<Vec<BTreeMap<String, i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<String>,
}

impl RunReport {
    pub fn new(model: impl Into<String>, property: impl Into<String>) -> Self {
        RunReport {
            model: model.into(),
            source: None,
            property: property.into(),
            mode: None,
            depth: None,
            instance: BTreeMap::new(),
            constraints: Vec::new(),
            outcome: ReportOutcome::Unknown,
            wall_time_ms: 0.0,
            solver: None,
            stats: BTreeMap::new(),
            witness_state: None,
            witness_instance: None,
            plan: None,
            oracle: None,
            note: None,
            error: None,
            script: None,
        }
    }

    pub fn set_plan(&mut self, plan: &Plan) {
        self.plan = Some(plan.steps.iter().map(|b| b.0.clone()).collect());
    }

    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    fn heading(&self) -> String {
        let mut h = format!("{} {}", self.model, self.property);
        match (self.mode, self.depth) {
            (Some(m), Some(d)) => {
                let _ = write!(h, " ({m}, depth {d})");
            }
            (None, Some(d)) => {
                let _ = write!(h, " (depth {d})");
            }
            _ => {}
        }
        h
    }

    pub fn to_text(&self) -> String {
        let mut out = self.heading();
        out.push('\n');
        if !self.instance.is_empty() {
            let _ = writeln!(out, "  instance: {}", pairs(&self.instance));
        }
        for c in &self.constraints {
            let _ = writeln!(out, "  constraint: {c}");
        }
        let _ = write!(out, "  verdict: {} ({:.0} ms", self.outcome.as_str(), self.wall_time_ms);
        if let Some(s) = &self.solver {
            let _ = write!(out, ", {s}");
        }
        out.push_str(")\n");
        if let Some(e) = &self.error {
            let _ = writeln!(out, "  error: {e}");
        }
        if let Some(i) = &self.witness_instance {
            let _ = writeln!(out, "  witness instance: {}", pairs(i));
        }
        if let Some(s) = &self.witness_state {
            let _ = writeln!(out, "  witness state: {}", pairs(s));
        }
        if let Some(plan) = &self.plan {
            let _ = writeln!(out, "  plan ({} steps):", plan.len());
            for (i, step) in plan.iter().enumerate() {
                let _ = writeln!(out, "    {:>3}. {}", i + 1, pairs(step));
            }
        }
        if let Some(o) = &self.oracle {
            let _ = writeln!(out, "  oracle: {o}");
        }
        if let Some(n) = &self.note {
            let _ = writeln!(out, "  note: {n}");
        }
        if let Some(s) = &self.script {
            let _ = writeln!(out, "  script: {s}");
        }
        out
    }
}

fn pairs(m: &BTreeMap<String, i64>) -> String {
    m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
}

/// Fixed-width table with one row per report, in the given order.
pub fn bench_table(reports: &[RunReport]) -> String {
    let header = ["model", "property", "mode", "depth", "verdict", "time (ms)", "memory (MB)", "rlimit", "note"];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.model.clone(),
                r.property.clone(),
                r.mode.map_or("-".into(), |m| m.to_string()),
                r.depth.map_or("-".into(), |d| d.to_string()),
                r.outcome.as_str().to_string(),
                format!("{:.0}", r.wall_time_ms),
                r.stats.get("memory").map_or("-".into(), |m| format!("{m:.2}")),
                r.stats.get("rlimit-count").map_or("-".into(), |v| format!("{v:.0}")),
                r.error.clone().or_else(|| r.note.clone()).unwrap_or_default(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    for row in rows {
        out.push_str(&line(row));
    }
    out
}
