//! Profile specs, curvature specs and validated run parameters.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::Result;
use crate::warped_manifold::WarpedProfile;

/// Radius of `flat` and `hyperbolic` profiles given without one.
pub const DEFAULT_OPEN_END: f64 = 4.0;

/// One-token description of a warped profile.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Sphere { k: f64 },
    Flat { end: f64 },
    Hyperbolic { end: f64 },
    PerturbedSphere { a: f64, m: u32 },
    Table(PathBuf),
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let number = |a: &str, what: &str| {
            a.trim().parse::<f64>().map_err(|_| format!("profile `{s}`: {what} `{a}` is not a number"))
        };
        match (name, arg) {
            ("sphere", None) => Ok(ProfileSpec::Sphere { k: 1.0 }),
            ("sphere", Some(a)) => Ok(ProfileSpec::Sphere { k: number(a, "curvature")? }),
            ("flat", None) => Ok(ProfileSpec::Flat { end: DEFAULT_OPEN_END }),
            ("flat", Some(a)) => Ok(ProfileSpec::Flat { end: number(a, "radius")? }),
            ("hyperbolic", None) => Ok(ProfileSpec::Hyperbolic { end: DEFAULT_OPEN_END }),
            ("hyperbolic", Some(a)) => Ok(ProfileSpec::Hyperbolic { end: number(a, "radius")? }),
            ("perturbed-sphere", Some(args)) => {
                let (a, m) = args
                    .split_once(',')
                    .ok_or_else(|| format!("profile `{s}`: expected perturbed-sphere:a,m"))?;
                let m = m.trim().parse::<u32>().map_err(|_| format!("profile `{s}`: m `{m}` is not an integer"))?;
                Ok(ProfileSpec::PerturbedSphere { a: number(a, "amplitude")?, m })
            }
            ("perturbed-sphere", None) => Err(format!("profile `{s}`: expected perturbed-sphere:a,m")),
            ("table", Some(path)) if !path.is_empty() => Ok(ProfileSpec::Table(PathBuf::from(path))),
            ("table", _) => Err(format!("profile `{s}`: expected table:<path>")),
            _ => Err(format!(
                "unknown profile `{s}` (expected sphere[:k], flat[:R], hyperbolic[:R], perturbed-sphere:a,m, table:<path>)"
            )),
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::Sphere { k } => write!(f, "sphere:{k}"),
            ProfileSpec::Flat { end } => write!(f, "flat:{end}"),
            ProfileSpec::Hyperbolic { end } => write!(f, "hyperbolic:{end}"),
            ProfileSpec::PerturbedSphere { a, m } => write!(f, "perturbed-sphere:{a},{m}"),
            ProfileSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl ProfileSpec {
    pub fn build(&self, n: usize) -> Result<WarpedProfile> {
        match self {
            ProfileSpec::Sphere { k } => WarpedProfile::sphere(n, *k),
            ProfileSpec::Flat { end } => WarpedProfile::flat(n, *end),
            ProfileSpec::Hyperbolic { end } => WarpedProfile::hyperbolic(n, *end),
            ProfileSpec::PerturbedSphere { a, m } => WarpedProfile::perturbed_sphere(n, *a, *m),
            ProfileSpec::Table(path) => WarpedProfile::from_table_file(n, path),
        }
    }

    /// Same family with perturbation amplitude `a` (perturbed spheres only).
    pub fn with_amplitude(&self, a: f64) -> Option<Self> {
        match self {
            ProfileSpec::PerturbedSphere { m, .. } => Some(ProfileSpec::PerturbedSphere { a, m: *m }),
            _ => None,
        }
    }
}

/// Curvature parameter: a number, or the largest `K` with `Ric ≥ (n-1)K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureSpec {
    Value(f64),
    AutoMin,
}

impl FromStr for CurvatureSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto-min" {
            return Ok(CurvatureSpec::AutoMin);
        }
        s.parse::<f64>()
            .map(CurvatureSpec::Value)
            .map_err(|_| format!("K must be a number or `auto-min`, got `{s}`"))
    }
}

impl fmt::Display for CurvatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvatureSpec::Value(k) => write!(f, "{k}"),
            CurvatureSpec::AutoMin => f.write_str("auto-min"),
        }
    }
}

impl CurvatureSpec {
    pub fn resolve(&self, profile: &WarpedProfile) -> Result<f64> {
        match self {
            CurvatureSpec::Value(k) => Ok(*k),
            CurvatureSpec::AutoMin => Ok(profile.min_ricci()? / (profile.dim() as f64 - 1.0)),
        }
    }
}

/// Collects every violated precondition before anything runs.
#[derive(Debug, Default)]
pub struct Violations(Vec<String>);

impl Violations {
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    pub fn push(&mut self, msg: String) {
        self.0.push(msg);
    }

    pub fn into_result(self) -> std::result::Result<(), Vec<String>> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self.0)
        }
    }
}
