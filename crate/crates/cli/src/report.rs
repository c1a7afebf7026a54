//! Verification reports: one record per check, printable as a table and
//! serializable to JSON or CSV.
//!
//! For machine output the runtime field is zeroed so that identical
//! invocations produce byte-identical files; wall-clock time appears only
//! in the human-readable table.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check_name: String,
    pub inputs: BTreeMap<String, String>,
    pub values: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub runtime_ms: u64,
}

impl Report {
    pub fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Report {
            check_name: name.to_string(),
            inputs: BTreeMap::new(),
            values: Vec::new(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            runtime_ms: 0,
        }
    }

    pub fn with_input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_values(mut self, values: &[f64]) -> Self {
        self.values = values.to_vec();
        self
    }

    pub fn with_runtime(mut self, ms: u64) -> Self {
        self.runtime_ms = ms;
        self
    }

    fn machine_clone(&self) -> Report {
        let mut r = self.clone();
        r.runtime_ms = 0;
        r
    }
}

pub fn to_json(reports: &[Report]) -> String {
    let machine: Vec<Report> = reports.iter().map(Report::machine_clone).collect();
    serde_json::to_string_pretty(&machine).expect("reports serialize")
}

pub fn to_csv(reports: &[Report]) -> String {
    let mut out = String::from("check_name,residual,tolerance,passed\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.check_name, r.residual, r.tolerance, r.passed
        ));
    }
    out
}

pub fn print_table(reports: &[Report]) {
    let width = reports.iter().map(|r| r.check_name.len()).max().unwrap_or(10).max(10);
    println!(
        "{:<width$}  {:>12}  {:>10}  {:>6}  {:>8}",
        "check", "residual", "tolerance", "status", "ms",
        width = width
    );
    for r in reports {
        println!(
            "{:<width$}  {:>12.4e}  {:>10.1e}  {:>6}  {:>8}",
            r.check_name,
            r.residual,
            r.tolerance,
            if r.passed { "ok" } else { "FAIL" },
            r.runtime_ms,
            width = width
        );
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "{} checks, {} passed, {} failed",
        reports.len(),
        reports.len() - failed,
        failed
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_iff_residual_within_tolerance() {
        assert!(Report::new("a", 1e-10, 1e-9).passed);
        assert!(!Report::new("b", 1e-8, 1e-9).passed);
    }

    #[test]
    fn json_is_runtime_independent() {
        let a = Report::new("a", 0.0, 1.0).with_runtime(12);
        let b = Report::new("a", 0.0, 1.0).with_runtime(99);
        assert_eq!(to_json(&[a]), to_json(&[b]));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = Report::new("x", 0.5, 1.0);
        let csv = to_csv(&[r]);
        assert!(csv.starts_with("check_name,"));
        assert!(csv.contains("x,0.5,1,true"));
    }
}
