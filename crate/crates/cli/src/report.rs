//! Run reports and their byte-deterministic JSON / CSV emission.
//!
//! JSON objects are written with keys in sorted order and every float as
//! `{:.16e}` (17 significant digits), which round-trips any `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use spd_median::{ContinuationConfig, EstimateResult, StageRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub grad_tol: f64,
    pub cont_tol: f64,
    pub p_start: f64,
    pub p_ratio: f64,
    pub max_iter: usize,
    pub max_stages: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl ConfigEcho {
    pub fn new(cfg: &ContinuationConfig, seed: u64) -> Self {
        Self {
            grad_tol: cfg.inner.grad_tol,
            cont_tol: cfg.cont_tol,
            p_start: cfg.p_start,
            p_ratio: cfg.p_ratio,
            max_iter: cfg.inner.max_iter,
            max_stages: cfg.max_stages,
            seed,
            p: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageEcho {
    pub p: f64,
    pub iterations: usize,
    pub step: f64,
    pub converged: bool,
}

impl From<&StageRecord> for StageEcho {
    fn from(s: &StageRecord) -> Self {
        Self { p: s.p, iterations: s.iterations, step: s.step, converged: s.converged }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

/// One property check. It passes when `value ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEcho {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl CheckEcho {
    pub fn measured(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        let status = if value <= tolerance { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, value: Some(value), tolerance: Some(tolerance) }
    }

    pub fn skipped(name: impl Into<String>) -> Self {
        Self { name: name.into(), status: CheckStatus::Skip, value: None, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub t: f64,
    pub median_displacement: f64,
    pub karcher_displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    pub config: ConfigEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Row-major entries of the estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<StageEcho>,
    /// Scalar result of `distance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckEcho>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub study: Vec<StudyRow>,
    /// Only filled in on request, since it breaks byte-for-byte reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &str, dataset: Option<String>, config: ConfigEcho) -> Self {
        Self {
            command: command.to_owned(),
            dataset,
            estimator: None,
            config,
            d: None,
            estimate: None,
            objective: None,
            grad_norm: None,
            iterations: None,
            converged: None,
            trace: Vec::new(),
            value: None,
            checks: Vec::new(),
            study: Vec::new(),
            wall_clock_ms: None,
        }
    }

    pub fn with_estimate(mut self, estimator: &str, r: &EstimateResult) -> Self {
        self.estimator = Some(estimator.to_owned());
        self.d = Some(r.estimate.dim());
        self.estimate = Some(r.estimate.to_row_major());
        self.objective = Some(r.objective);
        self.grad_norm = Some(r.grad_norm);
        self.iterations = Some(r.iterations);
        self.converged = Some(r.converged);
        self.trace = r.trace.iter().map(StageEcho::from).collect();
        self
    }

    pub fn checks_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report fields are plain data");
        let mut out = String::new();
        write_json(&mut out, &value, 0);
        out.push('\n');
        out
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// The outlier table when present, then the check table when present,
    /// otherwise a `key,value` listing of the scalar fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if !self.study.is_empty() {
            out.push_str("t,median_displacement,karcher_displacement\n");
            for r in &self.study {
                let _ = writeln!(out, "{},{},{}", fmt_f64(r.t), fmt_f64(r.median_displacement), fmt_f64(r.karcher_displacement));
            }
            return out;
        }
        if !self.checks.is_empty() {
            out.push_str("name,status,value,tolerance\n");
            for c in &self.checks {
                let status = match c.status {
                    CheckStatus::Pass => "pass",
                    CheckStatus::Fail => "fail",
                    CheckStatus::Skip => "skip",
                };
                let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
                let _ = writeln!(out, "{},{status},{},{}", c.name, opt(c.value), opt(c.tolerance));
            }
            return out;
        }
        out.push_str("key,value\n");
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k},{v}");
        };
        row("command", self.command.clone());
        if let Some(name) = &self.dataset {
            row("dataset", name.clone());
        }
        if let Some(e) = &self.estimator {
            row("estimator", e.clone());
        }
        if let Some(v) = self.value {
            row("value", fmt_f64(v));
        }
        if let Some(v) = self.objective {
            row("objective", fmt_f64(v));
        }
        if let Some(v) = self.grad_norm {
            row("grad_norm", fmt_f64(v));
        }
        if let Some(v) = self.iterations {
            row("iterations", v.to_string());
        }
        if let Some(v) = self.converged {
            row("converged", v.to_string());
        }
        if let (Some(d), Some(est)) = (self.d, &self.estimate) {
            for (idx, v) in est.iter().enumerate() {
                row(&format!("estimate[{}][{}]", idx / d, idx % d), fmt_f64(*v));
            }
        }
        if let Some(v) = self.wall_clock_ms {
            row("wall_clock_ms", fmt_f64(v));
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Writes the rendered report to `path`, or to standard output.
pub fn emit_report(report: &RunReport, format: Format, path: Option<&Path>) -> io::Result<()> {
    let text = report.render(format);
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i), _) if !n.is_f64() => out.push_str(&i.to_string()),
            (_, _, Some(f)) => out.push_str(&fmt_f64(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_json(out, x, indent);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                push_indent(out, indent + 1);
                write_json(out, x, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push(']');
        }
        // serde_json's default map is a BTreeMap, so iteration is key-sorted.
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                push_indent(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(out, x, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            push_indent(out, indent);
            out.push('}');
        }
    }
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport::new("median", Some("demo".into()), ConfigEcho::new(&ContinuationConfig::default(), 7));
        r.estimator = Some("riemannian_median".into());
        r.d = Some(2);
        r.estimate = Some(vec![0.1, 1.0 / 3.0, 1.0 / 3.0, 2.5e300]);
        r.objective = Some(std::f64::consts::PI);
        r.grad_norm = Some(5e-324);
        r.iterations = Some(12);
        r.converged = Some(true);
        r.trace = vec![StageEcho { p: 2.0, iterations: 3, step: 0.25, converged: true }];
        r.checks = vec![CheckEcho::measured("x", 1e-9, 1e-6), CheckEcho::skipped("y")];
        r
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let text = r.to_json();
        assert_eq!(RunReport::from_json(&text).unwrap(), r);
        assert_eq!(RunReport::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn keys_are_sorted() {
        let text = sample().to_json();
        let top: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        let mut sorted = top.clone();
        sorted.sort_unstable();
        assert_eq!(top, sorted);
        assert!(top.contains(&"command") && !top.contains(&"wall_clock_ms"));
    }

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(2.0), "2.0000000000000000e0");
        assert!(sample().to_json().contains("\"objective\": 3.1415926535897931e0"));
    }

    #[test]
    fn study_csv_has_one_line_per_row() {
        let mut r = RunReport::new("outlier-study", None, ConfigEcho::new(&ContinuationConfig::default(), 0));
        r.study = (0..4)
            .map(|i| StudyRow { t: i as f64, median_displacement: 0.0, karcher_displacement: i as f64 / 4.0 })
            .collect();
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(csv.lines().next().unwrap(), "t,median_displacement,karcher_displacement");
    }

    #[test]
    fn check_status() {
        assert_eq!(CheckEcho::measured("a", 1.0, 1.0).status, CheckStatus::Pass);
        assert_eq!(CheckEcho::measured("a", 1.5, 1.0).status, CheckStatus::Fail);
        assert_eq!(CheckEcho::measured("a", f64::NAN, 1.0).status, CheckStatus::Fail);
    }
}
