//! Loading tabulated profiles from two-column `t,phi` text files.

use std::path::Path;

use super::WarpedProfile;
use crate::error::{Error, Result};
use crate::spline::ClampedSpline;

/// Relative size below which the last `phi` value counts as a closing pole.
const CLOSE_TOL: f64 = 1e-12;

impl WarpedProfile {
    /// Reads a `t,phi` table (header line required).
    pub fn from_table_file(n: usize, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_table_str(n, &text, &path.display().to_string())
    }

    /// Parses table text; `origin` only labels error messages.
    pub fn from_table_str(n: usize, text: &str, origin: &str) -> Result<Self> {
        let bad = |reason: String| Error::Input { path: origin.to_string(), reason };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad("empty file".into()))?;
        let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
        if cols != ["t", "phi"] {
            return Err(bad(format!("header must be `t,phi`, found `{}`", header.trim())));
        }
        let mut ts = Vec::new();
        let mut phis = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(bad(format!("line {}: expected 2 columns, found {}", lineno + 1, fields.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad(format!("line {}: `{s}` is not a finite number", lineno + 1)))
            };
            ts.push(parse(fields[0])?);
            phis.push(parse(fields[1])?);
        }
        if ts.len() < 4 {
            return Err(bad(format!("need at least 4 rows, found {}", ts.len())));
        }
        if ts[0] != 0.0 {
            return Err(bad(format!("t must start at 0, found {}", ts[0])));
        }
        if let Some(i) = ts.windows(2).position(|w| w[1] <= w[0]) {
            return Err(bad(format!("t must be strictly increasing (rows {} and {})", i + 1, i + 2)));
        }
        if phis[0].abs() > 1e-12 {
            return Err(bad(format!("phi(0) must be 0, found {}", phis[0])));
        }
        let scale = phis.iter().cloned().fold(0.0, f64::max);
        let last = *phis.last().unwrap();
        let closed = last.abs() <= CLOSE_TOL * scale.max(1.0);
        if let Some(i) = phis[1..phis.len() - 1].iter().position(|&v| v <= 0.0) {
            return Err(bad(format!("phi must be positive inside (0, D); row {} has phi = {}", i + 2, phis[i + 1])));
        }
        if !closed && last < 0.0 {
            return Err(bad(format!("phi(D) must be positive or zero, found {last}")));
        }
        phis[0] = 0.0;
        let k = ts.len() - 1;
        let slope_end = if closed {
            *phis.last_mut().unwrap() = 0.0;
            -1.0
        } else {
            // second-order one-sided difference
            let (h1, h2) = (ts[k] - ts[k - 1], ts[k - 1] - ts[k - 2]);
            let d1 = (phis[k] - phis[k - 1]) / h1;
            let d2 = (phis[k - 1] - phis[k - 2]) / h2;
            d1 + h1 * (d1 - d2) / (h1 + h2)
        };
        let spline = ClampedSpline::new(ts, phis, 1.0, slope_end)?;
        WarpedProfile::from_spline(n, spline, closed, format!("table:{origin}"))
            .map_err(|e| bad(e.to_string()))
    }
}
