use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model_geometry::{sn_k_prime, sn_k_second, sn_unchecked, unit_sphere_area};
use crate::spline::ClampedSpline;

/// Default number of uniform cells used for radial integrals.
pub const DEFAULT_GRID: usize = 4096;
/// Grid used for refinement diagnostics.
pub const REFINED_GRID: usize = 8192;

/// Tolerance for the pole conditions checked at construction.
const POLE_TOL: f64 = 1e-9;

type JetFn = dyn Fn(f64) -> [f64; 3] + Send + Sync;

/// The warping function `φ` together with its first two derivatives.
#[derive(Clone)]
pub enum Warp {
    /// `sn_K`: round sphere, flat space or hyperbolic space.
    SpaceForm { k: f64 },
    /// `sin t + a sin(m t) sin²t` on `[0, π]`.
    PerturbedSphere { a: f64, m: u32 },
    /// Clamped cubic spline through tabulated values.
    Table(Arc<ClampedSpline>),
    /// User-supplied analytic jet `t ↦ (φ, φ', φ'')`.
    Custom(Arc<JetFn>),
    /// `c φ(t / c)`.
    Rescaled { inner: Box<Warp>, c: f64 },
}

impl fmt::Debug for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warp::SpaceForm { k } => write!(f, "SpaceForm {{ k: {k} }}"),
            Warp::PerturbedSphere { a, m } => write!(f, "PerturbedSphere {{ a: {a}, m: {m} }}"),
            Warp::Table(s) => write!(f, "Table([{}, {}])", s.start(), s.end()),
            Warp::Custom(_) => write!(f, "Custom"),
            Warp::Rescaled { inner, c } => write!(f, "Rescaled {{ c: {c}, inner: {inner:?} }}"),
        }
    }
}

impl Warp {
    pub fn jet(&self, t: f64) -> [f64; 3] {
        match self {
            Warp::SpaceForm { k } => [sn_unchecked(*k, t), sn_k_prime(*k, t), sn_k_second(*k, t)],
            Warp::PerturbedSphere { a, m } => {
                let m = *m as f64;
                let (s, c) = t.sin_cos();
                let (sm, cm) = (m * t).sin_cos();
                // g = sin(mt) sin²t
                let g = sm * s * s;
                let g1 = m * cm * s * s + 2.0 * sm * s * c;
                let g2 = -m * m * sm * s * s + 4.0 * m * cm * s * c + 2.0 * sm * (c * c - s * s);
                [s + a * g, c + a * g1, -s + a * g2]
            }
            Warp::Table(spline) => spline.eval(t),
            Warp::Custom(f) => f(t),
            Warp::Rescaled { inner, c } => {
                let [v, d1, d2] = inner.jet(t / c);
                [c * v, d1, d2 / c]
            }
        }
    }
}

/// A rotationally symmetric metric `dr² + φ(r)² g_{S^{n-1}}` on `[0, D]`.
///
/// Open profiles describe the pole-centred ball `B(x₀, D)`; closed profiles
/// (`φ(D) = 0`) describe a closed manifold with a second pole at `D`.
#[derive(Debug, Clone)]
pub struct WarpedProfile {
    n: usize,
    end: f64,
    closed: bool,
    warp: Warp,
    label: String,
    grid: usize,
}

impl WarpedProfile {
    fn build(n: usize, end: f64, closed: bool, warp: Warp, label: String) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {n}")));
        }
        if !(end > 0.0) || !end.is_finite() {
            return Err(Error::Domain(format!("domain end must be positive and finite, got {end}")));
        }
        let profile = WarpedProfile { n, end, closed, warp, label, grid: DEFAULT_GRID };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let [v0, d0, _] = self.warp.jet(0.0);
        if v0.abs() > POLE_TOL || (d0 - 1.0).abs() > POLE_TOL {
            return Err(Error::Evaluation(format!(
                "{}: pole at t=0 needs phi(0)=0, phi'(0)=1; got phi(0)={v0:e}, phi'(0)={d0}",
                self.label
            )));
        }
        let [ve, de, _] = self.warp.jet(self.end);
        if self.closed {
            if ve.abs() > POLE_TOL || (de + 1.0).abs() > POLE_TOL {
                return Err(Error::Evaluation(format!(
                    "{}: closing pole at t=D needs phi(D)=0, phi'(D)=-1; got phi(D)={ve:e}, phi'(D)={de}",
                    self.label
                )));
            }
        } else if !(ve > 0.0) {
            return Err(Error::Evaluation(format!(
                "{}: open profile needs phi(D) > 0, got {ve:e}",
                self.label
            )));
        }
        let samples = 2048;
        for i in 1..samples {
            let t = self.end * i as f64 / samples as f64;
            let v = self.warp.jet(t)[0];
            if !(v > 0.0) {
                return Err(Error::Evaluation(format!(
                    "{}: phi must be positive on (0, D); phi({t}) = {v:e}",
                    self.label
                )));
            }
        }
        Ok(())
    }

    /// Round sphere of curvature `k > 0` (closed, `D = π/√k`).
    pub fn sphere(n: usize, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::Domain(format!("sphere profile needs K > 0, got {k}")));
        }
        Self::build(n, PI / k.sqrt(), true, Warp::SpaceForm { k }, format!("sphere:{k}"))
    }

    /// Euclidean ball of radius `end`.
    pub fn flat(n: usize, end: f64) -> Result<Self> {
        Self::build(n, end, false, Warp::SpaceForm { k: 0.0 }, "flat".into())
    }

    /// Ball of radius `end` in hyperbolic space of curvature `-1`.
    pub fn hyperbolic(n: usize, end: f64) -> Result<Self> {
        Self::build(n, end, false, Warp::SpaceForm { k: -1.0 }, "hyperbolic".into())
    }

    /// Ball of radius `end` in the space form of curvature `k` (open).
    pub fn space_form_ball(n: usize, k: f64, end: f64) -> Result<Self> {
        if k > 0.0 && end >= PI / k.sqrt() {
            return Err(Error::Domain(format!("ball radius {end} reaches the antipode for K = {k}")));
        }
        Self::build(n, end, false, Warp::SpaceForm { k }, format!("space-form:{k}"))
    }

    /// `φ(t) = sin t + a sin(m t) sin²t` on `[0, π]`, closed.
    pub fn perturbed_sphere(n: usize, a: f64, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("perturbed-sphere needs integer m >= 2, got {m}")));
        }
        if !(a.abs() < 1.0) {
            return Err(Error::Domain(format!("perturbed-sphere needs |a| < 1 for positivity, got {a}")));
        }
        Self::build(n, PI, true, Warp::PerturbedSphere { a, m }, format!("perturbed-sphere:{a},{m}"))
    }

    /// Profile from an analytic jet `t ↦ (φ, φ', φ'')`.
    pub fn custom<F>(n: usize, end: f64, closed: bool, label: &str, jet: F) -> Result<Self>
    where
        F: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        Self::build(n, end, closed, Warp::Custom(Arc::new(jet)), label.to_string())
    }

    pub(crate) fn from_spline(n: usize, spline: ClampedSpline, closed: bool, label: String) -> Result<Self> {
        let end = spline.end();
        Self::build(n, end, closed, Warp::Table(Arc::new(spline)), label)
    }

    /// The profile `c φ(t/c)` on `[0, c D]`; curvatures scale by `1/c²`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("scale factor must be positive, got {c}")));
        }
        let mut out = Self::build(
            self.n,
            c * self.end,
            self.closed,
            Warp::Rescaled { inner: Box::new(self.warp.clone()), c },
            format!("{}*{c}", self.label),
        )?;
        out.grid = self.grid;
        Ok(out)
    }

    /// Same manifold seen from the opposite pole, `t ↦ φ(D - t)` (closed only).
    pub fn reversed(&self) -> Result<Self> {
        if !self.closed {
            return Err(Error::Precondition("only closed profiles have a second pole".into()));
        }
        let inner = self.warp.clone();
        let end = self.end;
        let mut out = Self::build(
            self.n,
            end,
            true,
            Warp::Custom(Arc::new(move |t: f64| {
                let [v, d1, d2] = inner.jet(end - t);
                [v, -d1, d2]
            })),
            format!("{}@antipode", self.label),
        )?;
        out.grid = self.grid;
        Ok(out)
    }

    /// Copy using `cells` uniform cells for radial integrals.
    pub fn with_grid(mut self, cells: usize) -> Self {
        self.grid = cells.max(16);
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn warp(&self) -> &Warp {
        &self.warp
    }

    /// `(φ, φ', φ'')` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        self.warp.jet(t)
    }

    /// Area density `C_n φ(t)^{n-1}`.
    pub fn area_density(&self, t: f64) -> f64 {
        unit_sphere_area(self.n) * self.warp.jet(t)[0].powi(self.n as i32 - 1)
    }
}
