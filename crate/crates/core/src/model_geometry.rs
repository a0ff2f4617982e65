//! Closed-form geometry of the simply connected space form of dimension `n`
//! and constant sectional curvature `K`.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::adaptive_simpson;

/// Below this value of `|K| t²` the warping function uses its Taylor series.
const TAYLOR_SWITCH: f64 = 1e-6;
/// Slack allowed when a radius is compared against the diameter of a sphere.
const DIAMETER_SLACK: f64 = 1e-12;

/// Warping function of the space form: `sin(√K t)/√K`, `t` or `sinh(√-K t)/√-K`.
pub fn sn_k(k: f64, t: f64) -> Result<f64> {
    if t < 0.0 || !t.is_finite() {
        return domain(format!("sn_K needs t >= 0, got {t}"));
    }
    if k > 0.0 && t > PI / k.sqrt() * (1.0 + DIAMETER_SLACK) + DIAMETER_SLACK {
        return domain(format!("t = {t} exceeds the diameter pi/sqrt(K) = {}", PI / k.sqrt()));
    }
    Ok(sn_unchecked(k, t))
}

/// Derivative of [`sn_k`] in `t`.
pub fn sn_k_prime(k: f64, t: f64) -> f64 {
    let x = k * t * t;
    if x.abs() < TAYLOR_SWITCH {
        // cos / cosh series in K t²
        1.0 - x / 2.0 + x * x / 24.0
    } else if k > 0.0 {
        (k.sqrt() * t).cos()
    } else {
        ((-k).sqrt() * t).cosh()
    }
}

pub(crate) fn sn_unchecked(k: f64, t: f64) -> f64 {
    let x = k * t * t;
    if x.abs() < TAYLOR_SWITCH {
        t * (1.0 - x / 6.0 + x * x / 120.0)
    } else if k > 0.0 {
        let s = k.sqrt();
        (s * t).sin() / s
    } else {
        let s = (-k).sqrt();
        (s * t).sinh() / s
    }
}

/// Second derivative: `sn'' = -K sn`.
pub fn sn_k_second(k: f64, t: f64) -> f64 {
    -k * sn_unchecked(k, t)
}

/// Area of the unit `(n-1)`-sphere, `2 π^{n/2} / Γ(n/2)`.
pub fn unit_sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// `Γ(n/2)` for a positive integer `n`, by the recurrence from `Γ(1) = 1`, `Γ(1/2) = √π`.
fn gamma_half_integer(n: usize) -> f64 {
    let (mut value, mut arg) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n as f64 / 2.0;
    while arg < target - 0.25 {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// The model space `M^n_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    n: usize,
    k: f64,
}

impl ModelSpace {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 2 {
            return domain(format!("dimension must be at least 2, got {n}"));
        }
        if !k.is_finite() {
            return domain("curvature must be finite");
        }
        Ok(ModelSpace { n, k })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// `π/√K` for `K > 0`, infinite otherwise.
    pub fn diameter(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    /// Area density `C_n sn_K(t)^{n-1}` of geodesic polar coordinates.
    pub fn area_density(&self, t: f64) -> f64 {
        unit_sphere_area(self.n) * sn_unchecked(self.k, t).powi(self.n as i32 - 1)
    }

    fn check_interior(&self, t: f64, what: &str) -> Result<()> {
        if !(t > 0.0) {
            return domain(format!("{what} needs t > 0, got {t}"));
        }
        if t >= self.diameter() * (1.0 - DIAMETER_SLACK) {
            return domain(format!("{what} needs t < diameter {}, got {t}", self.diameter()));
        }
        Ok(())
    }

    fn check_radius(&self, r: f64, what: &str) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return domain(format!("{what} needs r > 0, got {r}"));
        }
        if r > self.diameter() * (1.0 + DIAMETER_SLACK) {
            return domain(format!("{what} needs r <= diameter {}, got {r}", self.diameter()));
        }
        Ok(())
    }

    /// Laplacian of the distance function, `(n-1) sn'_K / sn_K`.
    pub fn laplacian_of_r(&self, t: f64) -> Result<f64> {
        self.check_interior(t, "model Laplacian of r")?;
        Ok(self.laplacian_of_r_unchecked(t))
    }

    pub(crate) fn laplacian_of_r_unchecked(&self, t: f64) -> f64 {
        (self.n as f64 - 1.0) * sn_k_prime(self.k, t) / sn_unchecked(self.k, t)
    }

    /// Mean curvature of the geodesic sphere of radius `r` (same formula as
    /// [`Self::laplacian_of_r`]).
    pub fn mean_curvature_geodesic_sphere(&self, r: f64) -> Result<f64> {
        self.check_interior(r, "mean curvature of geodesic sphere")?;
        Ok(self.laplacian_of_r_unchecked(r))
    }

    /// Area of the geodesic sphere of radius `r`.
    pub fn sphere_area(&self, r: f64) -> Result<f64> {
        self.check_radius(r, "sphere area")?;
        Ok(self.area_density(r.min(self.diameter())).max(0.0))
    }

    /// Volume of the geodesic ball of radius `r` by adaptive Simpson quadrature.
    pub fn ball_volume(&self, r: f64) -> Result<f64> {
        self.check_radius(r, "ball volume")?;
        Ok(self.ball_volume_unchecked(r.min(self.diameter())))
    }

    pub(crate) fn ball_volume_unchecked(&self, r: f64) -> f64 {
        // absolute tolerance 1e-12 on volumes of order one, relative beyond
        let scale = unit_sphere_area(self.n) * sn_unchecked(self.k, r).abs().max(r).powi(self.n as i32 - 1) * r;
        let tol = 1e-12 * scale.max(1.0);
        adaptive_simpson(|t| self.area_density(t), 0.0, r, tol)
    }

    /// Total volume of the sphere `M^n_K`; `None` unless `K > 0`.
    pub fn total_volume(&self) -> Option<f64> {
        (self.k > 0.0).then(|| self.ball_volume_unchecked(self.diameter()))
    }
}

/// Convenience wrappers with the operation names used by the CLI.
pub fn model_laplacian_of_r(model: &ModelSpace, t: f64) -> Result<f64> {
    model.laplacian_of_r(t)
}

pub fn model_sphere_area(model: &ModelSpace, r: f64) -> Result<f64> {
    model.sphere_area(r)
}

pub fn model_ball_volume(model: &ModelSpace, r: f64) -> Result<f64> {
    model.ball_volume(r)
}

pub fn mean_curvature_geodesic_sphere(model: &ModelSpace, r: f64) -> Result<f64> {
    model.mean_curvature_geodesic_sphere(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn sn_k_examples() {
        assert!((sn_k(1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(sn_k(0.0, 2.0).unwrap(), 2.0);
        // sinh(1) against its power series
        let series: f64 = (0..12).map(|j| 1.0 / (1..=2 * j + 1).map(|i| i as f64).product::<f64>()).sum();
        let v = sn_k(-1.0, 1.0).unwrap();
        assert!((v - series).abs() < 1e-14);
        assert!((v - 1.175_201_2).abs() < 1e-7);
    }

    #[test]
    fn sn_k_rejects_beyond_diameter() {
        assert!(matches!(sn_k(1.0, 3.2), Err(crate::Error::Domain(_))));
        assert!(sn_k(1.0, PI).is_ok());
        assert!(sn_k(1.0, -0.1).is_err());
    }

    #[test]
    fn sn_k_continuous_through_flat_limit() {
        for t in [0.1, 1.0, 3.0] {
            let flat = sn_k(0.0, t).unwrap();
            for k in [1e-9, -1e-9, 1e-8, -1e-8] {
                assert!((sn_k(k, t).unwrap() - flat).abs() < 1e-7 * t.powi(3).max(1e-12) + 1e-15);
            }
        }
    }

    #[test]
    fn sn_k_solves_jacobi_equation() {
        // u'' + K u = 0 by central differences, error O(h^2)
        for k in [1.0, -1.0, 0.3] {
            let t = 0.9;
            let mut prev = f64::NAN;
            for h in [1e-2, 5e-3, 2.5e-3] {
                let u = |s: f64| sn_unchecked(k, s);
                let d2 = (u(t + h) - 2.0 * u(t) + u(t - h)) / (h * h);
                let defect = (d2 + k * u(t)).abs();
                if prev.is_finite() {
                    assert!(defect < prev / 3.0, "k={k} h={h}: {defect} vs {prev}");
                }
                prev = defect;
            }
        }
        assert_eq!(sn_k_prime(0.0, 1.0), 1.0);
    }

    #[test]
    fn laplacian_examples() {
        let m3 = ModelSpace::new(3, 0.0).unwrap();
        assert!((m3.laplacian_of_r(1.0).unwrap() - 2.0).abs() < 1e-15);
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        assert!(s2.laplacian_of_r(FRAC_PI_2).unwrap().abs() < 1e-15);
        assert!((s2.laplacian_of_r(1.0).unwrap() - 0.642_092_6).abs() < 1e-7);
        assert!(s2.laplacian_of_r(0.0).is_err());
        assert!(s2.laplacian_of_r(PI).is_err());
        assert!((s2.mean_curvature_geodesic_sphere(PI / 4.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(m3.mean_curvature_geodesic_sphere(1.0).unwrap() == m3.laplacian_of_r(1.0).unwrap());
    }

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((unit_sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_area_examples() {
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        assert!((s2.sphere_area(FRAC_PI_2).unwrap() - 2.0 * PI).abs() < 1e-14);
        let e3 = ModelSpace::new(3, 0.0).unwrap();
        assert!(rel(e3.sphere_area(2.0).unwrap(), 16.0 * PI) < 1e-14);
        let h2 = ModelSpace::new(2, -1.0).unwrap();
        assert!(rel(h2.sphere_area(1.0).unwrap(), 2.0 * PI * 1f64.sinh()) < 1e-14);
        assert!(s2.sphere_area(PI).unwrap() < 1e-14);
        assert!(s2.sphere_area(4.0).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let e2 = ModelSpace::new(2, 0.0).unwrap();
        assert!((e2.ball_volume(1.0).unwrap() - PI).abs() < 1e-12);
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        assert!((s2.ball_volume(PI).unwrap() - 4.0 * PI).abs() < 1e-11);
        let s3 = ModelSpace::new(3, 1.0).unwrap();
        let half = s3.ball_volume(FRAC_PI_2).unwrap();
        assert!((half - PI * PI).abs() < 1e-11);
        assert!((2.0 * half - s3.total_volume().unwrap()).abs() < 1e-10);
        assert!(e2.total_volume().is_none());
    }

    #[test]
    fn ball_volume_derivative_is_sphere_area() {
        for (n, k) in [(2, 1.0), (3, -1.0), (4, 0.5)] {
            let m = ModelSpace::new(n, k).unwrap();
            let r = 1.1;
            let mut errs = vec![];
            for h in [2e-3, 1e-3] {
                let d = (m.ball_volume(r + h).unwrap() - m.ball_volume(r - h).unwrap()) / (2.0 * h);
                errs.push((d - m.sphere_area(r).unwrap()).abs());
            }
            assert!(errs[1] < errs[0] / 3.0 && errs[1] < 2e-5, "{n} {k}: {errs:?}");
        }
    }

    #[test]
    fn ball_volume_continuous_in_curvature() {
        for n in [2, 3, 5] {
            let flat = ModelSpace::new(n, 0.0).unwrap().ball_volume(1.3).unwrap();
            let mut last = f64::INFINITY;
            for k in [1e-2, 1e-4, 1e-6] {
                let gap = (ModelSpace::new(n, k).unwrap().ball_volume(1.3).unwrap() - flat).abs()
                    .max((ModelSpace::new(n, -k).unwrap().ball_volume(1.3).unwrap() - flat).abs());
                assert!(gap < last);
                last = gap;
            }
            assert!(last < 1e-5 * flat);
        }
    }

    #[test]
    fn ball_volumes_complement_on_spheres() {
        for (n, k) in [(2, 1.0), (3, 2.0), (4, 0.7)] {
            let m = ModelSpace::new(n, k).unwrap();
            let total = m.total_volume().unwrap();
            for frac in [0.1, 0.37, 0.8] {
                let r = frac * m.diameter();
                let s = m.ball_volume(r).unwrap() + m.ball_volume(m.diameter() - r).unwrap();
                assert!(rel(s, total) < 1e-11);
            }
        }
    }

    #[test]
    fn dimension_validated() {
        assert!(ModelSpace::new(1, 0.0).is_err());
    }
}
