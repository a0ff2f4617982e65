//! Rotationally symmetric manifolds: pointwise Ricci curvature, the Laplacian
//! excess of the distance function from the pole, volumes, and normalized
//! integral curvature norms over pole-centred balls.
//!
//! Balls are always centred at the pole `t = 0`; the supremum over centres in
//! the integral curvature norm is not taken.

mod profile;
mod table;

pub use profile::{Warp, WarpedProfile, DEFAULT_GRID, REFINED_GRID};

use crate::error::{domain, precondition, Error, Result};
use crate::model_geometry::ModelSpace;
use crate::quadrature::gauss_composite;

/// Pointwise curvature samples plus normalized norms of `Ric₋ᴷ`.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub curvature_bound: f64,
    pub radius: f64,
    /// Interior sample points `t_i = i R / N`, `0 < i < N`.
    pub grid: Vec<f64>,
    pub rho_min: Vec<f64>,
    pub ric_minus_k: Vec<f64>,
    /// Laplacian excess; `NaN` where the model Laplacian is undefined.
    pub psi: Vec<f64>,
    /// `(q, ‖Ric₋ᴷ‖*_q)` in the order requested.
    pub norms: Vec<(f64, f64)>,
}

impl WarpedProfile {
    fn check_interior(&self, t: f64, what: &str) -> Result<()> {
        if !(t > 0.0 && t < self.end()) {
            return domain(format!("{what}: t = {t} must lie strictly inside (0, {})", self.end()));
        }
        Ok(())
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || r > self.end() * (1.0 + 1e-12) {
            return domain(format!("radius {r} must lie in (0, {}]", self.end()));
        }
        Ok(())
    }

    /// Ricci eigenvalues `(radial, tangential)` at distance `t` from the pole.
    pub fn ricci_eigenvalues(&self, t: f64) -> Result<(f64, f64)> {
        self.check_interior(t, "ricci_eigenvalues")?;
        let [v, d1, d2] = self.jet(t);
        if !(v > 0.0) {
            return Err(Error::Evaluation(format!("phi({t}) = {v:e} is not positive")));
        }
        let n = self.dim() as f64;
        let radial = -(n - 1.0) * d2 / v;
        let tangential = -d2 / v + (n - 2.0) * (1.0 - d1 * d1) / (v * v);
        Ok((radial, tangential))
    }

    /// Smallest Ricci eigenvalue `ρ(t)`.
    pub fn rho_min(&self, t: f64) -> Result<f64> {
        let (a, b) = self.ricci_eigenvalues(t)?;
        Ok(a.min(b))
    }

    /// `((n-1)K - ρ)₊`.
    pub fn ric_minus(&self, k: f64, t: f64) -> Result<f64> {
        Ok(((self.dim() as f64 - 1.0) * k - self.rho_min(t)?).max(0.0))
    }

    /// `Δr = (n-1) φ'/φ`.
    pub fn laplacian_of_r(&self, t: f64) -> Result<f64> {
        self.check_interior(t, "laplacian_of_r")?;
        let [v, d1, _] = self.jet(t);
        Ok((self.dim() as f64 - 1.0) * d1 / v)
    }

    /// Signed excess `Δr - Δ̄ᴷr`, before taking the positive part.
    pub fn laplacian_excess_raw(&self, k: f64, t: f64) -> Result<f64> {
        let model = ModelSpace::new(self.dim(), k)?;
        self.check_interior(t, "laplacian_excess")?;
        let lap_model = model.laplacian_of_r(t)?;
        Ok(self.laplacian_of_r(t)? - lap_model)
    }

    /// `ψ = (Δr - Δ̄ᴷr)₊`.
    pub fn laplacian_excess_psi(&self, k: f64, t: f64) -> Result<f64> {
        Ok(self.laplacian_excess_raw(k, t)?.max(0.0))
    }

    /// `C_n ∫₀^R φ^{n-1} dt`.
    pub fn ball_volume(&self, radius: f64) -> Result<f64> {
        self.check_radius(radius)?;
        Ok(self.volume_unchecked(radius))
    }

    pub(crate) fn volume_unchecked(&self, radius: f64) -> f64 {
        let radius = radius.min(self.end());
        gauss_composite(|t| self.area_density(t), 0.0, radius, self.cells_for(radius))
    }

    /// Volume of the whole profile, `B(x₀, D)` (the manifold when closed).
    pub fn total_volume(&self) -> f64 {
        self.volume_unchecked(self.end())
    }

    pub(crate) fn cells_for(&self, radius: f64) -> usize {
        ((self.grid() as f64 * radius / self.end()).ceil() as usize).max(16)
    }

    /// Normalized `L^q` norm over the pole ball of a pointwise quantity.
    fn normalized_norm<F>(&self, radius: f64, q: f64, mut value: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let cells = self.cells_for(radius);
        let mut failure = None;
        let num = gauss_composite(
            |t| match value(t) {
                Ok(v) => v.abs().powf(q) * self.area_density(t),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            0.0,
            radius,
            cells,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let vol = self.volume_unchecked(radius);
        Ok((num / vol).powf(1.0 / q))
    }

    /// `‖Ric₋ᴷ‖*_{q,B}` over the pole ball of radius `radius`, or over the
    /// whole profile when `radius` is `None`.
    pub fn integral_curvature_norm(&self, k: f64, q: f64, radius: Option<f64>) -> Result<f64> {
        let n = self.dim() as f64;
        if !(q > n / 2.0) {
            return precondition(format!("curvature norm needs q > n/2 = {}, got {q}", n / 2.0));
        }
        let radius = radius.unwrap_or(self.end());
        self.check_radius(radius)?;
        self.normalized_norm(radius.min(self.end()), q, |t| self.ric_minus(k, t))
    }

    /// `‖ψ‖*_{s,B}` over the pole ball of radius `radius`.
    pub fn psi_norm(&self, k: f64, s: f64, radius: f64) -> Result<f64> {
        if !(s >= 1.0) {
            return precondition(format!("psi norm needs s >= 1, got {s}"));
        }
        self.check_radius(radius)?;
        let model = ModelSpace::new(self.dim(), k)?;
        if radius >= model.diameter() {
            return domain(format!(
                "psi norm radius {radius} must stay below the model diameter {}",
                model.diameter()
            ));
        }
        self.normalized_norm(radius.min(self.end()), s, |t| self.laplacian_excess_psi(k, t))
    }

    /// Samples `ρ`, `Ric₋ᴷ` and `ψ` on the interior grid and evaluates the
    /// requested norms.
    pub fn curvature_report(&self, k: f64, qs: &[f64], radius: Option<f64>) -> Result<CurvatureReport> {
        let radius = radius.unwrap_or(self.end());
        self.check_radius(radius)?;
        let radius = radius.min(self.end());
        let cells = self.cells_for(radius);
        let model = ModelSpace::new(self.dim(), k)?;
        let mut grid = Vec::with_capacity(cells - 1);
        let mut rho_min = Vec::with_capacity(cells - 1);
        let mut ric = Vec::with_capacity(cells - 1);
        let mut psi = Vec::with_capacity(cells - 1);
        for i in 1..cells {
            let t = radius * i as f64 / cells as f64;
            if t >= self.end() {
                break;
            }
            let rho = self.rho_min(t)?;
            grid.push(t);
            rho_min.push(rho);
            ric.push(((self.dim() as f64 - 1.0) * k - rho).max(0.0));
            psi.push(if t < model.diameter() {
                self.laplacian_excess_psi(k, t)?
            } else {
                f64::NAN
            });
        }
        let norms = qs
            .iter()
            .map(|&q| Ok((q, self.integral_curvature_norm(k, q, Some(radius))?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CurvatureReport { curvature_bound: k, radius, grid, rho_min, ric_minus_k: ric, psi, norms })
    }

    /// Minimum of `ρ` on the interior grid.
    pub fn min_ricci(&self) -> Result<f64> {
        let cells = self.grid();
        let mut min = f64::INFINITY;
        for i in 1..cells {
            min = min.min(self.rho_min(self.end() * i as f64 / cells as f64)?);
        }
        Ok(min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::trapezoid_samples;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sin_bump() -> WarpedProfile {
        // sin t (1 + 0.05 sin² t)
        WarpedProfile::custom(2, PI, true, "sin-bump", |t| {
            let (s, c) = t.sin_cos();
            let v = s + 0.05 * s * s * s;
            let d1 = c + 0.15 * s * s * c;
            let d2 = -s + 0.15 * (2.0 * s * c * c - s * s * s);
            [v, d1, d2]
        })
        .unwrap()
    }

    #[test]
    fn ricci_examples() {
        let s2 = WarpedProfile::sphere(2, 1.0).unwrap();
        let (a, b) = s2.ricci_eigenvalues(1.0).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14);
        let e3 = WarpedProfile::flat(3, 2.0).unwrap();
        assert_eq!(e3.ricci_eigenvalues(1.0).unwrap(), (0.0, 0.0));
        let h2 = WarpedProfile::hyperbolic(2, 2.0).unwrap();
        let (a, b) = h2.ricci_eigenvalues(1.0).unwrap();
        assert!((a + 1.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
        let h4 = WarpedProfile::hyperbolic(4, 2.0).unwrap();
        let (a, b) = h4.ricci_eigenvalues(0.7).unwrap();
        assert!((a + 3.0).abs() < 1e-12 && (b + 3.0).abs() < 1e-12);
        assert!(s2.ricci_eigenvalues(0.0).is_err());
        assert!(s2.ricci_eigenvalues(PI).is_err());
    }

    #[test]
    fn psi_examples() {
        let s2 = WarpedProfile::sphere(2, 1.0).unwrap();
        for t in [0.2, 1.0, 2.9] {
            assert_eq!(s2.laplacian_excess_psi(1.0, t).unwrap(), 0.0);
            assert_eq!(s2.laplacian_excess_psi(0.0, 1.0).unwrap(), 0.0);
        }
        let e2 = WarpedProfile::flat(2, 2.0).unwrap();
        let v = e2.laplacian_excess_psi(1.0, 1.0).unwrap();
        assert!((v - (1.0 - 1f64.cos() / 1f64.sin())).abs() < 1e-14);
        assert!((v - 0.357_907_4).abs() < 1e-7);
        assert!(e2.laplacian_excess_psi(1.0, 2.5).is_err());
    }

    #[test]
    fn norm_examples() {
        let s2 = WarpedProfile::sphere(2, 1.0).unwrap();
        assert!(s2.integral_curvature_norm(1.0, 2.0, None).unwrap() < 1e-12);
        let v = s2.integral_curvature_norm(1.1, 2.0, None).unwrap();
        assert!((v - 0.1).abs() < 1e-12, "{v}");
        assert!(matches!(s2.integral_curvature_norm(1.0, 1.0, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn norm_matches_trapezoid_oracle() {
        let p = sin_bump();
        let got = p.integral_curvature_norm(1.0, 2.0, None).unwrap();
        // fine trapezoid on the closed-form Gaussian curvature
        let m = 400_000;
        let h = PI / m as f64;
        let mut num = Vec::with_capacity(m + 1);
        let mut den = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let t = i as f64 * h;
            let (s, c) = t.sin_cos();
            let phi = s + 0.05 * s * s * s;
            // -phi''/phi = (1 - 0.15 (2 c² - s²)) / (1 + 0.05 s²)
            let kappa = (1.0 - 0.15 * (2.0 * c * c - s * s)) / (1.0 + 0.05 * s * s);
            num.push((1.0 - kappa).max(0.0).powi(2) * phi);
            den.push(phi);
        }
        let oracle = (trapezoid_samples(&num, h) / trapezoid_samples(&den, h)).sqrt();
        assert!(oracle > 0.01);
        assert!((got - oracle).abs() < 1e-6 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn psi_norm_examples() {
        let s2 = WarpedProfile::sphere(2, 1.0).unwrap();
        assert_eq!(s2.psi_norm(1.0, 3.0, 2.0).unwrap(), 0.0);
        let e2 = WarpedProfile::flat(2, 1.0).unwrap();
        assert_eq!(e2.psi_norm(0.0, 2.0, 1.0).unwrap(), 0.0);
        let got = e2.psi_norm(1.0, 2.0, 1.0).unwrap();
        let m = 200_000;
        let h = 1.0 / m as f64;
        let (mut num, mut den) = (vec![0.0], vec![0.0]);
        for i in 1..=m {
            let t = i as f64 * h;
            num.push((1.0 / t - 1.0 / t.tan()).max(0.0).powi(2) * t);
            den.push(t);
        }
        let oracle = (trapezoid_samples(&num, h) / trapezoid_samples(&den, h)).sqrt();
        assert!((got - oracle).abs() < 1e-7 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn volume_examples() {
        let e2 = WarpedProfile::flat(2, 1.0).unwrap();
        assert!((e2.ball_volume(1.0).unwrap() - PI).abs() < 1e-13);
        let s2 = WarpedProfile::sphere(2, 1.0).unwrap();
        assert!((s2.ball_volume(PI).unwrap() - 4.0 * PI).abs() < 1e-12);
        let p = WarpedProfile::perturbed_sphere(2, 0.05, 2).unwrap();
        let got = p.ball_volume(1.0).unwrap();
        let m = 200_000;
        let h = 1.0 / m as f64;
        let vals: Vec<f64> = (0..=m).map(|i| 2.0 * PI * p.jet(i as f64 * h)[0]).collect();
        let oracle = crate::quadrature::simpson_samples(&vals, h);
        assert!((got - oracle).abs() < 1e-10 * oracle);
        assert!(p.ball_volume(4.0).is_err());
    }

    #[test]
    fn report_for_round_sphere_vanishes() {
        let s3 = WarpedProfile::sphere(3, 2.0).unwrap();
        let rep = s3.curvature_report(2.0, &[2.0, 3.0], None).unwrap();
        assert!(rep.ric_minus_k.iter().all(|&v| v < 1e-9));
        assert!(rep.psi.iter().filter(|v| v.is_finite()).all(|&v| v < 1e-9));
        assert!(rep.norms.iter().all(|&(_, v)| v < 1e-9));
    }

    #[test]
    fn pointwise_lower_bound_forces_zero_excess() {
        for a in [0.02, 0.05, -0.04] {
            let p = WarpedProfile::perturbed_sphere(3, a, 2).unwrap();
            let k = p.min_ricci().unwrap() / 2.0;
            let rep = p.curvature_report(k, &[2.0], Some(FRAC_PI_2)).unwrap();
            let max_ric = rep.ric_minus_k.iter().cloned().fold(0.0, f64::max);
            assert!(max_ric <= 1e-9);
            let max_psi = rep.psi.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max);
            assert!(max_psi <= 1e-9, "a={a}: {max_psi}");
        }
    }

    #[test]
    fn scaling_consistency() {
        let p = WarpedProfile::perturbed_sphere(3, 0.05, 3).unwrap();
        for c in [0.5, 2.0] {
            let q = p.rescaled(c).unwrap();
            let v = p.ball_volume(1.2).unwrap();
            let vq = q.ball_volume(1.2 * c).unwrap();
            assert!((vq - c.powi(3) * v).abs() < 1e-8 * vq);
            let rho = p.rho_min(0.9).unwrap();
            let rhoq = q.rho_min(0.9 * c).unwrap();
            assert!((rhoq - rho / (c * c)).abs() < 1e-8 * rho.abs().max(1.0));
            let n1 = p.integral_curvature_norm(1.0, 2.0, None).unwrap();
            let n2 = q.integral_curvature_norm(1.0 / (c * c), 2.0, None).unwrap();
            assert!((n2 - n1 / (c * c)).abs() < 1e-8 * n1.max(1e-12));
        }
    }

    #[test]
    fn reversed_profile_sees_antipode() {
        let p = WarpedProfile::perturbed_sphere(2, 0.05, 2).unwrap();
        let r = p.reversed().unwrap();
        assert!((r.jet(0.3)[0] - p.jet(PI - 0.3)[0]).abs() < 1e-15);
        let total = p.total_volume();
        let split = p.ball_volume(1.0).unwrap() + r.ball_volume(PI - 1.0).unwrap();
        assert!((split - total).abs() < 1e-11 * total);
        assert!(WarpedProfile::flat(2, 1.0).unwrap().reversed().is_err());
    }

    #[test]
    fn perturbed_sphere_construction_checks() {
        assert!(WarpedProfile::perturbed_sphere(2, 0.1, 1).is_err());
        assert!(WarpedProfile::perturbed_sphere(2, 1.5, 2).is_err());
        assert!(WarpedProfile::perturbed_sphere(2, 0.1, 2).unwrap().is_closed());
        let bad = WarpedProfile::custom(2, 1.0, false, "bad", |t| [2.0 * t, 2.0, 0.0]);
        assert!(bad.is_err());
    }
}
