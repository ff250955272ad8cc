//! Structured estimate reports and their CSV / JSON serializations.
//!
//! CSV columns, in order:
//!
//! | column               | meaning                                             |
//! |----------------------|-----------------------------------------------------|
//! | `check`              | check name                                          |
//! | `status`             | `ok`, `rejected` (precondition failed) or `error`   |
//! | `pass`               | `true` / `false`                                    |
//! | `params`             | `key=value` pairs joined by `;`, sorted by key      |
//! | `sample_grid`        | description of the sample set                       |
//! | `fitted_constant`    | fitted constant or max ratio (empty if none)        |
//! | `fitted_exponent`    | fitted exponent (empty if none)                     |
//! | `predicted_exponent` | predicted exponent (empty if none)                  |
//! | `tolerance`          | tolerance used for the pass decision                |
//! | `note`               | free text (failed inequality, band, ...)            |

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::DOMAIN_NOTE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    Rejected,
    Error,
}

impl ReportStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportStatus::Ok => "ok",
            ReportStatus::Rejected => "rejected",
            ReportStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub check: String,
    pub status: ReportStatus,
    pub pass: bool,
    pub params: BTreeMap<String, String>,
    pub sample_grid: String,
    pub fitted_constant: Option<f64>,
    pub fitted_exponent: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub tolerance: f64,
    pub note: String,
    pub domain: String,
}

/// Format a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl EstimateReport {
    pub fn new(check: &str) -> Self {
        Self {
            check: check.to_string(),
            status: ReportStatus::Ok,
            pass: false,
            params: BTreeMap::new(),
            sample_grid: String::new(),
            fitted_constant: None,
            fitted_exponent: None,
            predicted_exponent: None,
            tolerance: 0.0,
            note: String::new(),
            domain: DOMAIN_NOTE.to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn samples(mut self, desc: impl Into<String>) -> Self {
        self.sample_grid = desc.into();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Decide pass from a fitted exponent lying in `[lo - tol, hi + tol]`.
    pub fn decide_exponent_band(mut self, fitted: f64, predicted: f64, lo: f64, hi: f64, tol: f64) -> Self {
        self.fitted_exponent = Some(fitted);
        self.predicted_exponent = Some(predicted);
        self.tolerance = tol;
        self.pass = fitted.is_finite() && fitted >= lo - tol && fitted <= hi + tol;
        self
    }

    /// Decide pass from a fitted constant being finite and `≤ c_max`.
    pub fn decide_constant(mut self, constant: f64, c_max: f64) -> Self {
        self.fitted_constant = Some(constant);
        self.tolerance = c_max;
        self.pass = constant.is_finite() && constant <= c_max;
        self
    }

    pub fn rejected(mut self, reason: impl Into<String>) -> Self {
        self.status = ReportStatus::Rejected;
        self.pass = false;
        self.note = reason.into();
        self
    }

    pub fn errored(mut self, reason: impl Into<String>) -> Self {
        self.status = ReportStatus::Error;
        self.pass = false;
        self.note = reason.into();
        self
    }

    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let verdict = match (self.status, self.pass) {
            (ReportStatus::Rejected, _) => "REJECTED",
            (ReportStatus::Error, _) => "ERROR",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        let mut s = format!("[{verdict}] {} {{{}}}", self.check, self.params_string());
        if let Some(e) = self.fitted_exponent {
            s += &format!(" slope={e:.4}");
        }
        if let Some(p) = self.predicted_exponent {
            s += &format!(" predicted={p:.4}");
        }
        if let Some(c) = self.fitted_constant {
            s += &format!(" C={c:.4e}");
        }
        if !self.note.is_empty() {
            s += &format!(" ({})", self.note);
        }
        s
    }
}

pub const CSV_HEADER: [&str; 10] = [
    "check",
    "status",
    "pass",
    "params",
    "sample_grid",
    "fitted_constant",
    "fitted_exponent",
    "predicted_exponent",
    "tolerance",
    "note",
];

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn write_reports_csv<W: Write>(w: W, reports: &[EstimateReport]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for r in reports {
        wtr.write_record([
            r.check.clone(),
            r.status.as_str().to_string(),
            r.pass.to_string(),
            r.params_string(),
            r.sample_grid.clone(),
            opt(r.fitted_constant),
            opt(r.fitted_exponent),
            opt(r.predicted_exponent),
            fmt_f64(r.tolerance),
            r.note.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_reports_json<W: Write>(w: W, reports: &[EstimateReport]) -> Result<()> {
    serde_json::to_writer_pretty(w, reports)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_is_function_of_fit_and_tolerance() {
        let r = EstimateReport::new("x").decide_exponent_band(-0.52, -0.5, -0.5, -0.5, 0.1);
        assert!(r.pass);
        let r = EstimateReport::new("x").decide_exponent_band(-0.72, -0.5, -0.5, -0.5, 0.1);
        assert!(!r.pass);
        let r = EstimateReport::new("x").decide_constant(f64::INFINITY, 1e3);
        assert!(!r.pass);
    }

    #[test]
    fn csv_has_fixed_columns() {
        let reports = vec![
            EstimateReport::new("a").param("p", 2).decide_constant(1.5, 10.0),
            EstimateReport::new("b").rejected("s1+s2>0"),
        ];
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for line in text.lines() {
            let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(line.as_bytes());
            let rec = rdr.records().next().unwrap().unwrap();
            assert_eq!(rec.len(), CSV_HEADER.len());
        }
        assert!(text.contains("1.5000000000000000e0"));
    }
}
