use std::fmt;
use std::sync::Arc;

use crate::error::{precondition, Error, Result};
use crate::model_geometry::ModelSpace;
use crate::warped_manifold::WarpedProfile;

type Density = dyn Fn(f64) -> f64 + Send + Sync;

/// Behaviour of the radial problem at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Origin {
    /// Smooth pole of an `n`-manifold: `A(t) ~ C t^{n-1}`, flux vanishes at 0.
    Pole { dim: usize },
    /// Regular end of an interval with `f'(0) = 0` (`A(0) > 0`).
    Neumann,
    /// Regular end of an interval with `f(0) = 0`.
    Dirichlet,
}

impl Origin {
    /// Exponent `m + 1` of the local model `∫₀^δ A ≈ A(δ) δ / (m + 1)`.
    pub(crate) fn flux_order(&self) -> f64 {
        match self {
            Origin::Pole { dim } => *dim as f64,
            Origin::Neumann | Origin::Dirichlet => 1.0,
        }
    }
}

/// Boundary condition at the outer end `t = T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    /// Vanishing flux; when `A(T) = 0` this is the second pole of a closed manifold.
    Neumann,
}

/// One-dimensional weighted eigenvalue problem
/// `(A |f'|^{p-2} f')' = -λ A |f|^{p-2} f` on `(0, T)`.
#[derive(Clone)]
pub struct RadialProblem {
    density: Arc<Density>,
    length: f64,
    p: f64,
    origin: Origin,
    boundary: Boundary,
    label: String,
}

impl fmt::Debug for RadialProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("label", &self.label)
            .field("length", &self.length)
            .field("p", &self.p)
            .field("origin", &self.origin)
            .field("boundary", &self.boundary)
            .finish()
    }
}

impl RadialProblem {
    pub fn new<F>(density: F, length: f64, p: f64, origin: Origin, boundary: Boundary, label: &str) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(p > 1.0) || !p.is_finite() {
            return precondition(format!("exponent p must exceed 1, got {p}"));
        }
        if !(length > 0.0) || !length.is_finite() {
            return precondition(format!("interval length must be positive, got {length}"));
        }
        if let Origin::Pole { dim } = origin {
            if dim < 2 {
                return precondition(format!("pole dimension must be at least 2, got {dim}"));
            }
        }
        for i in 1..64 {
            let t = length * i as f64 / 64.0;
            let a = density(t);
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Evaluation(format!("density must be positive on (0, T); A({t}) = {a:e}")));
            }
        }
        Ok(RadialProblem { density: Arc::new(density), length, p, origin, boundary, label: label.into() })
    }

    /// Unit weight on `[0, T]`.
    pub fn interval(length: f64, p: f64, origin: Origin, boundary: Boundary) -> Result<Self> {
        Self::new(|_| 1.0, length, p, origin, boundary, "interval")
    }

    /// Dirichlet problem on the pole-centred ball of radius `radius` in a warped profile.
    pub fn profile_ball(profile: &WarpedProfile, radius: f64, p: f64) -> Result<Self> {
        if !(radius > 0.0) || radius >= profile.end() * (1.0 - 1e-12) && profile.is_closed() {
            return precondition(format!(
                "Dirichlet ball radius {radius} must lie in (0, {}) so that the boundary sphere is nonempty",
                profile.end()
            ));
        }
        if radius > profile.end() * (1.0 + 1e-12) {
            return precondition(format!("ball radius {radius} exceeds the profile end {}", profile.end()));
        }
        let prof = profile.clone();
        Self::new(
            move |t| prof.area_density(t),
            radius.min(profile.end()),
            p,
            Origin::Pole { dim: profile.dim() },
            Boundary::Dirichlet,
            &format!("{}|ball:{radius}", profile.label()),
        )
    }

    /// Dirichlet problem on the geodesic ball `B_K(r)` of the model space.
    pub fn model_ball(model: &ModelSpace, r: f64, p: f64) -> Result<Self> {
        if !(r > 0.0) || r >= model.diameter() * (1.0 - 1e-12) {
            return precondition(format!(
                "model ball radius {r} must lie in (0, {}) so that the boundary sphere is nonempty",
                model.diameter()
            ));
        }
        let m = *model;
        Self::new(
            move |t| m.area_density(t),
            r,
            p,
            Origin::Pole { dim: model.dim() },
            Boundary::Dirichlet,
            &format!("model:n={},K={}|ball:{r}", model.dim(), model.curvature()),
        )
    }

    /// Radial Neumann problem on a closed profile (poles at both ends).
    pub fn closed_neumann(profile: &WarpedProfile, p: f64) -> Result<Self> {
        if !profile.is_closed() {
            return precondition("radial Neumann problem needs a closed profile");
        }
        let prof = profile.clone();
        Self::new(
            move |t| prof.area_density(t),
            profile.end(),
            p,
            Origin::Pole { dim: profile.dim() },
            Boundary::Neumann,
            &format!("{}|closed", profile.label()),
        )
    }

    pub fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Whether the outer end is a degenerate point (`A(T) = 0`).
    pub(crate) fn closes_at_end(&self) -> bool {
        let a_end = self.density(self.length);
        let a_mid = self.density(0.5 * self.length);
        a_end <= 1e-12 * a_mid
    }

    /// Same problem on `[0, T']`.
    pub fn truncated(&self, length: f64, boundary: Boundary) -> Result<Self> {
        if !(length > 0.0 && length <= self.length) {
            return precondition(format!("truncation length {length} outside (0, {}]", self.length));
        }
        Ok(RadialProblem {
            density: self.density.clone(),
            length,
            p: self.p,
            origin: self.origin,
            boundary,
            label: format!("{}|trunc:{length}", self.label),
        })
    }
}
