//! Report rows and the CSV stream.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::comparison_suite::{BoundReport, CheckInputs, Verdict};

pub const COLUMNS: &str = "suite,case,profile,n,p,q,K,r,lhs,rhs,slack,measured_norm,verdict,details";

/// One line of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub suite: String,
    pub case: String,
    pub profile: String,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub measured_norm: f64,
    pub verdict: String,
    pub details: Vec<(String, String)>,
}

impl Row {
    pub fn from_report(case: &str, rep: &BoundReport) -> Self {
        let mut row = Row::blank(&rep.check, case, &rep.inputs);
        row.lhs = rep.lhs;
        row.rhs = rep.rhs;
        row.slack = rep.slack;
        row.measured_norm = rep.measured_norm;
        row.verdict = rep.verdict.to_string();
        row.details = rep.details.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
        row
    }

    /// A row recording a computation that failed.
    pub fn failed(suite: &str, case: &str, inputs: &CheckInputs, message: &str) -> Self {
        let mut row = Row::blank(suite, case, inputs);
        row.verdict = "error".into();
        row.details.push(("error".into(), message.to_string()));
        row
    }

    pub fn blank(suite: &str, case: &str, inputs: &CheckInputs) -> Self {
        Row {
            suite: suite.to_string(),
            case: case.to_string(),
            profile: inputs.profile.clone(),
            n: inputs.n,
            p: inputs.p,
            q: inputs.q,
            k: inputs.k,
            r: inputs.r,
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            measured_norm: f64::NAN,
            verdict: Verdict::Inconclusive.to_string(),
            details: Vec::new(),
        }
    }

    pub fn detail(mut self, name: &str, value: f64) -> Self {
        self.details.push((name.to_string(), num(value)));
        self
    }

    pub fn note(mut self, name: &str, text: &str) -> Self {
        self.details.push((name.to_string(), text.to_string()));
        self
    }

    /// Rows other than holds and report-only count against the exit status.
    pub fn is_failure(&self) -> bool {
        self.verdict == "violated" || self.verdict == "error"
    }

    pub fn detail_value(&self, name: &str) -> Option<&str> {
        self.details.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn to_csv(&self) -> String {
        let details: Vec<String> = self.details.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let fields = [
            field(&self.suite),
            field(&self.case),
            field(&self.profile),
            self.n.to_string(),
            num(self.p),
            num(self.q),
            num(self.k),
            num(self.r),
            num(self.lhs),
            num(self.rhs),
            num(self.slack),
            num(self.measured_norm),
            self.verdict.clone(),
            field(&details.join(";")),
        ];
        fields.join(",")
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// SHA-256 of the canonical configuration text.
pub fn config_hash(canonical: &str) -> String {
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Full report text: comment block, column header, rows.
pub fn render(canonical: &str, tolerances: &str, rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# plap {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# config: {canonical}");
    let _ = writeln!(out, "# config-sha256: {}", config_hash(canonical));
    let _ = writeln!(out, "# tolerances: {tolerances}");
    out.push_str(COLUMNS);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

/// Writes the report through a temporary sibling so readers never see a partial file.
pub fn write_report(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("partial");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_only_when_needed() {
        assert_eq!(field("plain"), "plain");
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("say \"x\""), "\"say \"\"x\"\"\"");
    }

    #[test]
    fn render_is_stable() {
        let inputs = CheckInputs::new("sphere:1", 2).p(2.0);
        let rows = vec![Row::blank("model-eigen", "r=1", &inputs).detail("lambda", 2.0)];
        assert_eq!(num(1e-8), "1e-8");
        assert_eq!(num(2.0), "2.0");
        let a = render("command=x", "tol=1e-8", &rows);
        assert_eq!(a, render("command=x", "tol=1e-8", &rows));
        assert!(a.lines().nth(4).unwrap() == COLUMNS);
        assert_eq!(a.lines().count(), 6);
        assert_eq!(config_hash("abc").len(), 64);
        assert_ne!(config_hash("abc"), config_hash("abd"));
    }
}
