//! First eigenvalues of the radial p-Laplacian by shooting on the flux system
//! `f' = sgn(w) |w/A|^{1/(p-1)}`, `w' = -λ A |f|^{p-2} f`.

mod grid;
mod problem;
mod shooting;

pub use grid::{p_rayleigh_quotient, rayleigh_minimize_grid, GridMinimum};
pub use problem::{Boundary, Origin, RadialProblem};
pub use shooting::{DEFAULT_TOL, GRID_CELLS, POLE_OFFSET};

use crate::error::{Error, Result};
use crate::model_geometry::ModelSpace;
use crate::warped_manifold::WarpedProfile;

/// Eigenvalue, bracket and sampled eigenfunction.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda: f64,
    /// Width of the final bisection bracket.
    pub bracket_width: f64,
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub fprime: Vec<f64>,
    /// `A |f'|^{p-2} f'` at the sample points.
    pub flux: Vec<f64>,
    /// Interior sign changes of `f`.
    pub zero_count: usize,
    /// Relative defect of the integrated flux identity on the sample grid.
    pub residual: f64,
    /// First zero of `f` (Neumann problems only).
    pub nodal_radius: Option<f64>,
    /// Number of shooting integrations performed.
    pub shots: usize,
}

impl EigenResult {
    pub fn grid_step(&self) -> f64 {
        self.t[1] - self.t[0]
    }
}

/// Ground state of the problem (first Dirichlet or mixed eigenvalue, or the
/// first nonzero Neumann eigenvalue when both ends are natural).
pub fn solve_radial(problem: &RadialProblem, tol: f64) -> Result<EigenResult> {
    shooting::solve(problem, tol, GRID_CELLS)
}

/// Same as [`solve_radial`] with a custom sample count.
pub fn solve_radial_on(problem: &RadialProblem, tol: f64, cells: usize) -> Result<EigenResult> {
    shooting::solve(problem, tol, cells)
}

/// First Dirichlet (or mixed) eigenvalue of a problem with a Dirichlet outer end.
pub fn solve_first_dirichlet(problem: &RadialProblem, tol: f64) -> Result<EigenResult> {
    if problem.boundary() != Boundary::Dirichlet {
        return Err(Error::Precondition(format!("{} has no Dirichlet outer end", problem.label())));
    }
    let res = solve_radial(problem, tol)?;
    if res.zero_count != 0 {
        return Err(Error::Nodal { expected: 0, found: res.zero_count });
    }
    Ok(res)
}

/// First Dirichlet eigenvalue of the pole ball `B(x₀, radius)` of a profile.
pub fn solve_first_dirichlet_ball(profile: &WarpedProfile, radius: f64, p: f64, tol: f64) -> Result<EigenResult> {
    solve_first_dirichlet(&RadialProblem::profile_ball(profile, radius, p)?, tol)
}

/// First Dirichlet eigenvalue `λ_{p}(B_K(r))` of a model-space ball.
pub fn solve_first_dirichlet_model(model: &ModelSpace, r: f64, p: f64, tol: f64) -> Result<EigenResult> {
    solve_first_dirichlet(&RadialProblem::model_ball(model, r, p)?, tol)
}

/// First nonzero eigenvalue among radial functions on a closed profile.
///
/// Radial functions are admissible Neumann test functions, so this is an upper
/// bound for the full first nonzero eigenvalue of the manifold.
pub fn solve_first_neumann_radial(profile: &WarpedProfile, p: f64, tol: f64) -> Result<EigenResult> {
    let problem = RadialProblem::closed_neumann(profile, p)?;
    let res = solve_radial(&problem, tol)?;
    if res.zero_count != 1 || res.nodal_radius.is_none() {
        return Err(Error::Nodal { expected: 1, found: res.zero_count });
    }
    Ok(res)
}

/// Dirichlet eigenvalues of the two nodal domains of a radial Neumann eigenfunction.
#[derive(Debug, Clone, Copy)]
pub struct NodalSplit {
    pub mu: f64,
    pub nodal_radius: f64,
    /// First Dirichlet eigenvalue of `B(x₀, t*)`.
    pub inner: f64,
    /// First Dirichlet eigenvalue of the complementary ball about the antipode.
    pub outer: f64,
}

/// Solves the radial Neumann problem and both nodal Dirichlet problems.
pub fn nodal_split(profile: &WarpedProfile, p: f64, tol: f64) -> Result<NodalSplit> {
    let neumann = solve_first_neumann_radial(profile, p, tol)?;
    let t_star = neumann.nodal_radius.expect("checked by solve_first_neumann_radial");
    let inner = solve_first_dirichlet_ball(profile, t_star, p, tol)?.lambda;
    let outer = solve_first_dirichlet_ball(&profile.reversed()?, profile.end() - t_star, p, tol)?.lambda;
    Ok(NodalSplit { mu: neumann.lambda, nodal_radius: t_star, inner, outer })
}

/// `π_p = 2π / (p sin(π/p))`.
pub fn pi_p(p: f64) -> f64 {
    2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const J01: f64 = 2.404_825_557_695_773;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn flat_disk_is_bessel_zero_squared() {
        let m = ModelSpace::new(2, 0.0).unwrap();
        let r = solve_first_dirichlet_model(&m, 1.0, 2.0, 1e-10).unwrap();
        assert!(rel(r.lambda, J01 * J01) < 1e-7, "{}", r.lambda);
        assert!(r.residual < 1e-7, "{}", r.residual);
    }

    #[test]
    fn hemisphere_and_three_ball() {
        // first Dirichlet eigenvalue of the hemisphere of S^2 is 2
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        let r = solve_first_dirichlet_model(&s2, PI / 2.0, 2.0, 1e-10).unwrap();
        assert!(rel(r.lambda, 2.0) < 1e-7, "{}", r.lambda);
        // unit ball in R^3: π²
        let e3 = ModelSpace::new(3, 0.0).unwrap();
        let r = solve_first_dirichlet_model(&e3, 1.0, 2.0, 1e-10).unwrap();
        assert!(rel(r.lambda, PI * PI) < 1e-7, "{}", r.lambda);
    }

    #[test]
    fn one_dimensional_p_laplacian() {
        for p in [1.5, 2.0, 3.0, 4.0] {
            let exact = (p - 1.0) * (pi_p(p) / 2.0).powf(p);
            let prob = RadialProblem::interval(1.0, p, Origin::Neumann, Boundary::Dirichlet).unwrap();
            let r = solve_radial(&prob, 1e-10).unwrap();
            assert!(rel(r.lambda, exact) < 1e-7, "p={p}: {} vs {exact}", r.lambda);
            let dd = RadialProblem::interval(1.0, p, Origin::Dirichlet, Boundary::Dirichlet).unwrap();
            let r = solve_radial(&dd, 1e-10).unwrap();
            let exact = (p - 1.0) * pi_p(p).powf(p);
            assert!(rel(r.lambda, exact) < 1e-7, "p={p} DD: {} vs {exact}", r.lambda);
        }
    }

    #[test]
    fn eigenfunction_is_monotone_and_normalized() {
        let m = ModelSpace::new(3, -1.0).unwrap();
        for p in [1.6, 2.0, 3.5] {
            let r = solve_first_dirichlet_model(&m, 1.2, p, 1e-9).unwrap();
            assert_eq!(r.f[0], 1.0);
            assert!(r.fprime.iter().all(|&d| d <= 1e-8));
            assert!(r.f.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            assert!(r.f.last().unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn round_sphere_neumann_is_n() {
        let s = WarpedProfile::sphere(3, 1.0).unwrap();
        let r = solve_first_neumann_radial(&s, 2.0, 1e-10).unwrap();
        assert!(rel(r.lambda, 3.0) < 1e-7, "{}", r.lambda);
        assert!((r.nodal_radius.unwrap() - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn nodal_domains_share_the_eigenvalue() {
        let prof = WarpedProfile::perturbed_sphere(2, 0.1, 3).unwrap();
        for p in [2.0, 3.0] {
            let s = nodal_split(&prof, p, 1e-10).unwrap();
            assert!(rel(s.inner, s.mu) < 1e-6, "p={p} {s:?}");
            assert!(rel(s.outer, s.mu) < 1e-6, "p={p} {s:?}");
        }
    }

    #[test]
    fn grid_minimum_bounds_shooting_from_above() {
        let m = ModelSpace::new(2, 1.0).unwrap();
        for p in [1.7, 2.0, 3.0] {
            let prob = RadialProblem::model_ball(&m, 1.0, p).unwrap();
            let shot = solve_radial(&prob, 1e-10).unwrap().lambda;
            let g = rayleigh_minimize_grid(&prob, 400).unwrap();
            assert!(g.lambda_upper >= shot * (1.0 - 1e-9), "p={p}");
            assert!(rel(g.lambda_upper, shot) < 1e-3, "p={p}: {} vs {shot}", g.lambda_upper);
        }
    }

    #[test]
    fn rayleigh_quotient_of_shooting_samples() {
        let m = ModelSpace::new(3, 0.0).unwrap();
        let prob = RadialProblem::model_ball(&m, 1.0, 2.5).unwrap();
        let r = solve_radial(&prob, 1e-10).unwrap();
        let q = p_rayleigh_quotient(&r.f, &prob).unwrap();
        assert!(q >= r.lambda * (1.0 - 1e-9));
        assert!(rel(q, r.lambda) < 1e-5, "{q} vs {}", r.lambda);
    }

    #[test]
    fn neumann_eigenfunction_is_orthogonal_to_constants() {
        let prof = WarpedProfile::perturbed_sphere(3, 0.2, 2).unwrap();
        for p in [2.0, 3.0] {
            let r = solve_first_neumann_radial(&prof, p, 1e-10).unwrap();
            let h = r.grid_step();
            let vals: Vec<f64> =
                r.t.iter().zip(&r.f).map(|(&t, &f)| prof.area_density(t) * f.signum() * f.abs().powf(p - 1.0)).collect();
            let scale: f64 = r.t.iter().zip(&r.f).map(|(&t, &f)| prof.area_density(t) * f.abs().powf(p - 1.0)).sum::<f64>() * h;
            let m = crate::quadrature::simpson_samples(&vals, h);
            assert!(m.abs() < 1e-6 * scale, "p={p}: {m} vs {scale}");
        }
    }

    #[test]
    fn grid_minimizer_examples() {
        let string = RadialProblem::interval(1.0, 2.0, Origin::Dirichlet, Boundary::Dirichlet).unwrap();
        let g = rayleigh_minimize_grid(&string, 1024).unwrap();
        assert!(g.lambda_upper >= PI * PI && rel(g.lambda_upper, PI * PI) < 1e-3);
        let disk = RadialProblem::model_ball(&ModelSpace::new(2, 0.0).unwrap(), 1.0, 2.0).unwrap();
        let g = rayleigh_minimize_grid(&disk, 2048).unwrap();
        assert!(rel(g.lambda_upper, J01 * J01) < 1e-3, "{}", g.lambda_upper);
        let mixed = RadialProblem::interval(1.0, 3.0, Origin::Neumann, Boundary::Dirichlet).unwrap();
        let g = rayleigh_minimize_grid(&mixed, 2048).unwrap();
        let exact = 2.0 * (pi_p(3.0) / 2.0).powi(3);
        assert!(rel(g.lambda_upper, exact) < 5e-3, "{} vs {exact}", g.lambda_upper);
        assert!(rayleigh_minimize_grid(&mixed, 32).is_err());
    }

    #[test]
    fn quotient_examples() {
        let prob = RadialProblem::interval(1.0, 2.0, Origin::Neumann, Boundary::Dirichlet).unwrap();
        let ramp: Vec<f64> = (0..=100).map(|i| 1.0 - i as f64 / 100.0).collect();
        assert!((p_rayleigh_quotient(&ramp, &prob).unwrap() - 3.0).abs() < 1e-12);
        let scaled: Vec<f64> = ramp.iter().map(|v| 7.0 * v).collect();
        assert!((p_rayleigh_quotient(&scaled, &prob).unwrap() - 3.0).abs() < 1e-12);
        assert!(p_rayleigh_quotient(&[0.0; 10], &prob).is_err());
    }

    #[test]
    fn mixed_interval_quarter_wave() {
        let prob = RadialProblem::interval(1.0, 2.0, Origin::Neumann, Boundary::Dirichlet).unwrap();
        let r = solve_first_dirichlet(&prob, 1e-10).unwrap();
        assert!(rel(r.lambda, PI * PI / 4.0) < 1e-8);
        let p3 = RadialProblem::interval(1.0, 3.0, Origin::Neumann, Boundary::Dirichlet).unwrap();
        let r = solve_first_dirichlet(&p3, 1e-10).unwrap();
        assert!((r.lambda - 3.536).abs() < 1e-3, "{}", r.lambda);
    }

    #[test]
    fn dirichlet_eigenvalue_decreases_with_radius() {
        let m = ModelSpace::new(3, 1.0).unwrap();
        let mut last = f64::INFINITY;
        for r in [0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.8] {
            let l = solve_first_dirichlet_model(&m, r, 2.5, 1e-9).unwrap().lambda;
            assert!(l < last);
            last = l;
        }
    }

    #[test]
    fn rejects_degenerate_balls() {
        let s2 = ModelSpace::new(2, 1.0).unwrap();
        assert!(matches!(solve_first_dirichlet_model(&s2, PI, 2.0, 1e-8), Err(Error::Precondition(_))));
        assert!(matches!(solve_first_dirichlet_model(&s2, 0.0, 2.0, 1e-8), Err(Error::Precondition(_))));
        let e2 = ModelSpace::new(2, 0.0).unwrap();
        assert!(solve_first_dirichlet_model(&e2, 1.0, 1.0, 1e-8).is_err());
    }
}
