use std::fmt;

/// Outcome of a single inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    /// Report-only rows and rows without a decidable comparison.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Parameters echoed into every report row; `NaN` marks "not applicable".
#[derive(Debug, Clone, PartialEq)]
pub struct CheckInputs {
    pub profile: String,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub r: f64,
}

impl CheckInputs {
    pub fn new(profile: &str, n: usize) -> Self {
        CheckInputs { profile: profile.to_string(), n, p: f64::NAN, q: f64::NAN, k: f64::NAN, r: f64::NAN }
    }

    pub fn p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }
}

/// Result of a check: both sides, the signed slack and the verdict.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub check: String,
    pub inputs: CheckInputs,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive when the inequality holds with room to spare.
    pub slack: f64,
    /// Measured curvature quantity relevant to the check (`NaN` if none).
    pub measured_norm: f64,
    pub tol_band: f64,
    pub verdict: Verdict,
    /// Intermediate quantities, in a fixed order.
    pub details: Vec<(String, f64)>,
}

/// `max(1e-8, 100 · bracket)`.
pub fn tol_band(bracket: f64) -> f64 {
    (100.0 * bracket).max(1e-8)
}

impl BoundReport {
    /// Verdict from the slack against `band`.
    pub fn decided(check: &str, inputs: CheckInputs, lhs: f64, rhs: f64, slack: f64, band: f64) -> Self {
        let verdict = if slack.is_nan() {
            Verdict::Inconclusive
        } else if slack >= -band {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        BoundReport {
            check: check.to_string(),
            inputs,
            lhs,
            rhs,
            slack,
            measured_norm: f64::NAN,
            tol_band: band,
            verdict,
            details: Vec::new(),
        }
    }

    /// A row that only reports numbers.
    pub fn report_only(check: &str, inputs: CheckInputs, lhs: f64, rhs: f64) -> Self {
        BoundReport {
            check: check.to_string(),
            inputs,
            lhs,
            rhs,
            slack: f64::NAN,
            measured_norm: f64::NAN,
            tol_band: f64::NAN,
            verdict: Verdict::Inconclusive,
            details: Vec::new(),
        }
    }

    pub fn with_norm(mut self, norm: f64) -> Self {
        self.measured_norm = norm;
        self
    }

    pub fn with_detail(mut self, name: &str, value: f64) -> Self {
        self.details.push((name.to_string(), value));
        self
    }

    /// Downgrades the verdict to violated when a secondary step fails.
    pub fn require(mut self, ok: bool) -> Self {
        if !ok {
            self.verdict = Verdict::Violated;
        }
        self
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}
