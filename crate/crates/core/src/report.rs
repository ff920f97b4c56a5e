//! Line-oriented certificate records.
//!
//! ```text
//! tacert-report 1
//! kind lemma
//! pass true
//! seeds 42
//! grid 0.0000000000000000e0 5.0000000000000000e-1 1.0000000000000000e0
//! summary min_value -2.2204460492503131e-16
//! point x0 5.0000000000000000e-1 1.0000000000000000e-1 ok
//! end
//! ```
//!
//! `point` lines are `label param value status`, where `status` is `ok` or
//! `FAIL`. Floats carry 17 significant digits, so parsing a report recovers
//! every value bit-for-bit.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::fmt_f64;

pub const REPORT_VERSION: u32 = 1;
const MAGIC: &str = "tacert-report";

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    /// Whitespace-free identifier of the sample (e.g. `x17`, `n=5`).
    pub label: String,
    /// Scan parameter, usually lambda.
    pub param: f64,
    /// Measured quantity, usually a minimum eigenvalue.
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateReport {
    pub kind: String,
    pub pass: bool,
    pub seeds: Vec<u64>,
    pub grid: Vec<f64>,
    pub points: Vec<ScanPoint>,
    /// Ordered free-form statistics; keys are whitespace-free.
    pub summary: Vec<(String, String)>,
}

impl CertificateReport {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            pass: true,
            ..Default::default()
        }
    }

    pub fn push_point(&mut self, label: impl Into<String>, param: f64, value: f64, pass: bool) {
        self.pass &= pass;
        self.points.push(ScanPoint {
            label: sanitize(label.into()),
            param,
            value,
            pass,
        });
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string().replace('\n', " ");
        self.summary.push((sanitize(key.to_string()), value));
    }

    pub fn note_f64(&mut self, key: &str, value: f64) {
        self.note(key, fmt_f64(value));
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Failing points, in report order.
    pub fn witnesses(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| !p.pass)
    }

    /// Smallest `value` over all points.
    pub fn min_value(&self) -> Option<f64> {
        self.points.iter().map(|p| p.value).min_by(f64::total_cmp)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC} {REPORT_VERSION}");
        let _ = writeln!(out, "kind {}", self.kind);
        let _ = writeln!(out, "pass {}", self.pass);
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        write_list(&mut out, "seeds", &seeds);
        let grid: Vec<String> = self.grid.iter().map(|v| fmt_f64(*v)).collect();
        write_list(&mut out, "grid", &grid);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "summary {k} {v}");
        }
        for p in &self.points {
            let status = if p.pass { "ok" } else { "FAIL" };
            let _ = writeln!(
                out,
                "point {} {} {} {status}",
                p.label,
                fmt_f64(p.param),
                fmt_f64(p.value)
            );
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut report = CertificateReport::default();
        let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
        let perr = |line: usize, message: String| Error::Parse {
            line,
            column: 1,
            message,
        };

        match lines.next() {
            Some((_, l)) if l == format!("{MAGIC} {REPORT_VERSION}") => {}
            Some((k, l)) => return Err(perr(k, format!("bad header {l:?}"))),
            None => return Err(perr(1, "empty report".into())),
        }
        let mut ended = false;
        for (k, line) in lines.by_ref() {
            let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
            match tag {
                "kind" => report.kind = rest.to_string(),
                "pass" => report.pass = rest.parse().map_err(|_| perr(k, format!("bad pass flag {rest:?}")))?,
                "seeds" => {
                    report.seeds = rest
                        .split_whitespace()
                        .map(|s| s.parse().map_err(|_| perr(k, format!("bad seed {s:?}"))))
                        .collect::<Result<_>>()?
                }
                "grid" => {
                    report.grid = rest
                        .split_whitespace()
                        .map(|s| s.parse().map_err(|_| perr(k, format!("bad grid value {s:?}"))))
                        .collect::<Result<_>>()?
                }
                "summary" => {
                    let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
                    report.summary.push((key.to_string(), value.to_string()));
                }
                "point" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    if f.len() != 4 {
                        return Err(perr(k, "point needs label, param, value, status".into()));
                    }
                    let num = |s: &str| s.parse::<f64>().map_err(|_| perr(k, format!("bad number {s:?}")));
                    let pass = match f[3] {
                        "ok" => true,
                        "FAIL" => false,
                        s => return Err(perr(k, format!("bad status {s:?}"))),
                    };
                    report.points.push(ScanPoint {
                        label: f[0].to_string(),
                        param: num(f[1])?,
                        value: num(f[2])?,
                        pass,
                    });
                }
                "end" => {
                    ended = true;
                    break;
                }
                _ => return Err(perr(k, format!("unknown record {tag:?}"))),
            }
        }
        if !ended {
            return Err(perr(text.lines().count(), "missing end marker".into()));
        }
        Ok(report)
    }
}

fn write_list(out: &mut String, tag: &str, items: &[String]) {
    out.push_str(tag);
    for item in items {
        out.push(' ');
        out.push_str(item);
    }
    out.push('\n');
}

fn sanitize(s: String) -> String {
    if s.is_empty() {
        return "-".into();
    }
    s.split_whitespace().collect::<Vec<_>>().join("_")
}
