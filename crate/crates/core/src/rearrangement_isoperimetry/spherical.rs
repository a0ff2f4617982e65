//! Volume-matched model balls and the spherical rearrangement onto them.

use crate::error::{precondition, Result};
use crate::model_geometry::ModelSpace;
use crate::quadrature::{gauss_legendre_5, CompensatedSum};

use super::distribution::RearrangedFunction;

const TABLE_CELLS: usize = 4096;

fn require_closed_model(model: &ModelSpace) -> Result<f64> {
    match model.total_volume() {
        Some(v) => Ok(v),
        None => precondition(format!(
            "volume normalization needs a closed model (K > 0), got K = {}",
            model.curvature()
        )),
    }
}

/// Radius `r` with `vol B_K(r) / vol(M^n_K) = fraction`, by bisection.
pub fn volume_matching_radius(model: &ModelSpace, fraction: f64) -> Result<f64> {
    let total = require_closed_model(model)?;
    if !(fraction > 0.0 && fraction < 1.0) {
        return precondition(format!("volume fraction must lie in (0, 1), got {fraction}"));
    }
    let (mut lo, mut hi) = (0.0, model.diameter());
    while hi - lo > 1e-12 * model.diameter() {
        let mid = 0.5 * (lo + hi);
        if model.ball_volume_unchecked(mid) / total < fraction {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Cumulative model volumes on a uniform radius grid, for fast inversion.
#[derive(Debug, Clone)]
pub(crate) struct ModelVolumeTable {
    model: ModelSpace,
    step: f64,
    volumes: Vec<f64>,
}

impl ModelVolumeTable {
    pub(crate) fn new(model: ModelSpace, radius: f64) -> Self {
        let step = radius / TABLE_CELLS as f64;
        let mut volumes = Vec::with_capacity(TABLE_CELLS + 1);
        let mut acc = CompensatedSum::default();
        volumes.push(0.0);
        for i in 0..TABLE_CELLS {
            acc.add(cell_volume(&model, i as f64 * step, (i + 1) as f64 * step));
            volumes.push(acc.value());
        }
        ModelVolumeTable { model, step, volumes }
    }

    pub(crate) fn max_volume(&self) -> f64 {
        *self.volumes.last().unwrap()
    }

    /// `vol B_K(r)` for `r` inside the table.
    pub(crate) fn volume(&self, r: f64) -> f64 {
        let i = ((r / self.step) as usize).min(TABLE_CELLS - 1);
        self.volumes[i] + cell_volume(&self.model, i as f64 * self.step, r)
    }

    /// Radius of the model ball of volume `v`, by Newton inside the bracketing cell.
    pub(crate) fn radius(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        let v = v.min(self.max_volume());
        let i = self.volumes.partition_point(|&x| x < v).clamp(1, TABLE_CELLS) - 1;
        let (lo, hi) = (i as f64 * self.step, (i + 1) as f64 * self.step);
        let (v_lo, v_hi) = (self.volumes[i], self.volumes[i + 1]);
        let mut r = lo + (v - v_lo) / (v_hi - v_lo) * self.step;
        for _ in 0..8 {
            let a = self.model.area_density(r);
            if a <= 0.0 {
                break;
            }
            let next = (r - (self.volumes[i] + cell_volume(&self.model, lo, r) - v) / a).clamp(lo, hi);
            let done = (next - r).abs() <= 1e-15 * hi;
            r = next;
            if done {
                break;
            }
        }
        r
    }
}

fn cell_volume(model: &ModelSpace, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    gauss_legendre_5(a, b).iter().map(|&(x, w)| w * model.area_density(x)).sum()
}

/// Radial function on the model ball `B̄` with `β vol(B̄) = vol(Ω)`, given by
/// `ρ ↦ f̄(β vol B_K(ρ))`.
#[derive(Debug, Clone)]
pub struct SphericalRearrangement {
    pub model: ModelSpace,
    pub beta: f64,
    /// Radius of `B̄`.
    pub radius: f64,
    pub fbar: RearrangedFunction,
    table: ModelVolumeTable,
}

/// Transplants `fbar` onto the model ball whose `β`-scaled volume is `vol(Ω)`.
pub fn spherical_rearrangement(fbar: &RearrangedFunction, model: &ModelSpace, beta: f64) -> Result<SphericalRearrangement> {
    let total = require_closed_model(model)?;
    if !(beta > 0.0) || !beta.is_finite() {
        return precondition(format!("beta must be positive, got {beta}"));
    }
    let fraction = fbar.volume() / (beta * total);
    if !(fraction > 0.0 && fraction < 1.0 + 1e-12) {
        return precondition(format!("rearranged domain does not fit in the model: vol(Ω)/(β vol M_K) = {fraction}"));
    }
    let radius = if fraction >= 1.0 { model.diameter() } else { volume_matching_radius(model, fraction)? };
    Ok(SphericalRearrangement {
        model: *model,
        beta,
        radius,
        fbar: fbar.clone(),
        table: ModelVolumeTable::new(*model, model.diameter()),
    })
}

impl SphericalRearrangement {
    /// Radius `ρ(s)` of the model ball with `β vol B_K(ρ) = s`.
    pub fn radius_of(&self, s: f64) -> f64 {
        self.table.radius(s / self.beta)
    }

    /// The rearranged function at model radius `rho`.
    pub fn value(&self, rho: f64) -> f64 {
        self.fbar.value(self.beta * self.table.volume(rho.clamp(0.0, self.radius)))
    }

    /// `β ∫_{B̄} f̄^p`, equal to `∫_Ω f^p`.
    pub fn lp_mass(&self, p: f64) -> f64 {
        self.fbar.lp_mass(p)
    }

    /// `β ∫_{B̄} |∇f̄|^p = ∫₀^{vol Ω} |f̄'(s)|^p (β A_K(ρ(s)))^p ds` and the
    /// largest ratio `β A_K(ρ(s)) / area{f = f̄(s)}` over the quadrature nodes.
    pub fn gradient_mass_and_isoperimetric_ratio(&self, p: f64) -> (f64, f64) {
        let mut sum = CompensatedSum::default();
        let mut ratio: f64 = 0.0;
        self.fbar.for_each_gauss_point(|pt| {
            let boundary = self.beta * self.model.area_density(self.radius_of(pt.s));
            sum.add(pt.weight * (boundary / pt.coarea).powf(p));
            if pt.area > 0.0 {
                ratio = ratio.max(boundary / pt.area);
            }
        });
        (sum.value(), ratio)
    }
}
