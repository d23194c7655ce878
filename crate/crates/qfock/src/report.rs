//! Check reports and serialization helpers shared by the library, the
//! verification suite, and the command-line tool.

use serde::{Deserialize, Serialize};
use std::io::Write;

/// Result of a single numerical check: the worst residual observed and the
/// tolerance it was held against.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub max_residual: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(check: &str, max_residual: f64, bound: f64) -> Self {
        CheckReport { check: check.to_string(), max_residual, bound, pass: max_residual <= bound }
    }

    /// Fold another residual into this report.
    pub fn absorb(&mut self, residual: f64) {
        if residual > self.max_residual {
            self.max_residual = residual;
        }
        self.pass = self.max_residual <= self.bound;
    }

    pub fn merge(mut reports: Vec<CheckReport>, name: &str) -> CheckReport {
        let bound = reports.iter().map(|r| r.bound).fold(f64::INFINITY, f64::min);
        let mut merged = CheckReport::new(name, 0.0, bound);
        for r in reports.drain(..) {
            merged.absorb(r.max_residual);
        }
        merged
    }
}

/// Serializes a list of reports as a JSON array, sorted by check name so
/// output is reproducible across runs.
pub fn reports_to_json(reports: &[CheckReport]) -> String {
    let mut sorted: Vec<&CheckReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.check.cmp(&b.check));
    serde_json::to_string_pretty(&sorted).expect("report serialization cannot fail")
}

/// Writes reports as CSV with a fixed header.
pub fn reports_to_csv<W: Write>(reports: &[CheckReport], mut out: W) -> std::io::Result<()> {
    let mut sorted: Vec<&CheckReport> = reports.iter().collect();
    sorted.sort_by(|a, b| a.check.cmp(&b.check));
    writeln!(out, "check,max_residual,bound,pass")?;
    for r in sorted {
        writeln!(out, "{},{:.3e},{:.3e},{}", r.check, r.max_residual, r.bound, r.pass)?;
    }
    Ok(())
}
