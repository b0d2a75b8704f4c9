//! Report model and writers. Field order is fixed and floats go through
//! serde_json's shortest round-trip formatting, so equal inputs give equal bytes.

use serde::Serialize;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// Exact or numerical identity; failure makes the run exit nonzero.
    Hard,
    /// Statistical comparison; failure only warns.
    Soft,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub name: String,
    pub computed: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip)]
    pub severity: Severity,
}

impl Row {
    pub fn exact(name: impl Into<String>, computed: f64, expected: f64, pass: bool) -> Self {
        Self { name: name.into(), computed: finite(computed), expected: finite(expected), tolerance: Some(0.0), pass, severity: Severity::Hard }
    }

    pub fn within(name: impl Into<String>, computed: f64, expected: f64, tolerance: f64, severity: Severity) -> Self {
        let pass = (computed - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            computed: finite(computed),
            expected: finite(expected),
            tolerance: finite(tolerance),
            pass,
            severity,
        }
    }

    /// A reported quantity with nothing to compare against.
    pub fn info(name: impl Into<String>, computed: f64) -> Self {
        Self { name: name.into(), computed: finite(computed), expected: None, tolerance: None, pass: true, severity: Severity::Soft }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub header: Vec<(String, String)>,
    pub results: Vec<Row>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    header: serde_json::Map<String, serde_json::Value>,
    results: &'a [Row],
}

impl Report {
    pub fn hard_failures(&self) -> usize {
        self.results.iter().filter(|r| !r.pass && r.severity == Severity::Hard).count()
    }

    pub fn soft_failures(&self) -> impl Iterator<Item = &Row> {
        self.results.iter().filter(|r| !r.pass && r.severity == Severity::Soft)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        let header = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = JsonReport { header, results: &self.results };
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)
    }

    /// Two record kinds share one table: `header` rows carry the config
    /// echo in (name, value); `result` rows carry the comparison.
    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["section", "name", "computed", "expected", "tolerance", "pass"])?;
        for (k, v) in &self.header {
            out.write_record(["header", k, v, "", "", ""])?;
        }
        let num = |x: Option<f64>| x.map(|v| serde_json::to_string(&v).expect("finite float")).unwrap_or_default();
        for r in &self.results {
            out.write_record([
                "result".to_string(),
                r.name.clone(),
                num(r.computed),
                num(r.expected),
                num(r.tolerance),
                r.pass.to_string(),
            ])?;
        }
        out.flush()
    }
}
