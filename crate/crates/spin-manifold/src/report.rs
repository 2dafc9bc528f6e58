//! Verification report as JSON and as a text table.

use serde::Serialize;
use spin_manifold_core::verify::{CheckRecord, VerificationReport};

#[derive(Debug, Serialize)]
struct CheckJson<'a> {
    name: &'a str,
    category: &'static str,
    grid: &'a str,
    max_abs: f64,
    max_rel: f64,
    tol: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    pass: bool,
    checks: Vec<CheckJson<'a>>,
    disabled: Vec<&'static str>,
}

pub fn report_json(report: &VerificationReport) -> String {
    let doc = ReportJson {
        pass: report.pass(),
        checks: report
            .records
            .iter()
            .map(|r: &CheckRecord| CheckJson {
                name: &r.name,
                category: r.category.name(),
                grid: &r.grid,
                max_abs: r.max_abs,
                max_rel: r.max_rel,
                tol: r.tol,
                pass: r.pass,
                error: r.error.as_deref(),
            })
            .collect(),
        disabled: report.disabled.iter().map(|c| c.name()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialises");
    text.push('\n');
    text
}

pub fn report_table(report: &VerificationReport) -> String {
    let width = report.records.iter().map(|r| r.name.len()).max().unwrap_or(4).max(5);
    let mut out = format!(
        "{:<width$}  {:>10}  {:>10}  {:>8}  result\n",
        "check", "max_abs", "max_rel", "tol"
    );
    for r in &report.records {
        out.push_str(&format!(
            "{:<width$}  {:>10.3e}  {:>10.3e}  {:>8.0e}  {}\n",
            r.name,
            r.max_abs,
            r.max_rel,
            r.tol,
            if r.pass { "pass" } else { "FAIL" }
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("    error: {e}\n"));
        }
    }
    if !report.disabled.is_empty() {
        let names: Vec<_> = report.disabled.iter().map(|c| c.name()).collect();
        out.push_str(&format!("disabled: {}\n", names.join(", ")));
    }
    let failed = report.records.iter().filter(|r| !r.pass).count();
    out.push_str(&format!(
        "{} checks, {} failed: {}\n",
        report.records.len(),
        failed,
        if report.pass() { "PASS" } else { "FAIL" }
    ));
    out
}
