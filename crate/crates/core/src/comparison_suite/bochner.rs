//! Pointwise identities and inequalities for radial functions on warped products.

use super::report::{BoundReport, CheckInputs};
use super::RadialFunction;
use crate::error::{precondition, Result};
use crate::model_geometry::ModelSpace;
use crate::warped_manifold::WarpedProfile;

/// Smallest `|f'|` accepted where the p-power of the gradient is differentiated.
const GRADIENT_FLOOR: f64 = 1e-8;
/// Base step of the Richardson-extrapolated second difference.
const FD_STEP: f64 = 2e-3;

fn gradient_guard(f: &RadialFunction, t: f64) -> Result<[f64; 4]> {
    let jet = f.jet(t);
    if jet[1].abs() < GRADIENT_FLOOR {
        return precondition(format!("degenerate gradient: |f'({t})| = {:e}", jet[1].abs()));
    }
    Ok(jet)
}

/// Right-hand side of the p-Bochner formula along a radial `f`:
/// `(p-2)|∇f|^{p-2}|∇|∇f||² + |∇f|^{p-2}{|Hess f|² + ⟨∇f, ∇Δf⟩ + Ric(∇f, ∇f)}`.
fn bochner_rhs(profile: &WarpedProfile, p: f64, jet: [f64; 4], t: f64) -> Result<f64> {
    let n1 = profile.dim() as f64 - 1.0;
    let [v, d1, d2] = profile.jet(t);
    let h = d1 / v;
    let h_prime = d2 / v - h * h;
    let [_, g, g1, g2] = jet;
    let hess_sq = g1 * g1 + n1 * (g * h).powi(2);
    let lap_prime = g2 + n1 * (h_prime * g + h * g1);
    let (ric_radial, _) = profile.ricci_eigenvalues(t)?;
    let w = g.abs().powf(p - 2.0);
    Ok((p - 2.0) * w * g1 * g1 + w * (hess_sq + g * lap_prime + ric_radial * g * g))
}

fn mean_curvature_of_spheres(profile: &WarpedProfile, t: f64) -> Result<f64> {
    profile.laplacian_of_r(t)
}

/// `(1/p) Δ(|f'|^p) - RHS` at `t`.
///
/// For `p = 2` both sides are evaluated from exact derivatives. Otherwise the
/// outer second derivative of `|f'|^p` uses Richardson-extrapolated central
/// differences.
pub fn p_bochner_residual(profile: &WarpedProfile, p: f64, f: &RadialFunction, t: f64) -> Result<f64> {
    check_p(p)?;
    let jet = gradient_guard(f, t)?;
    let lap_r = mean_curvature_of_spheres(profile, t)?;
    let lhs = if p == 2.0 {
        let [_, g, g1, g2] = jet;
        // u = g², u' = 2 g g1, u'' = 2 g1² + 2 g g2
        0.5 * (2.0 * g1 * g1 + 2.0 * g * g2 + lap_r * 2.0 * g * g1)
    } else {
        let u = |s: f64| f.jet(s)[1].abs().powf(p);
        let (second_h, first_h) = central_differences(&u, t, FD_STEP);
        let (second_h2, first_h2) = central_differences(&u, t, 0.5 * FD_STEP);
        let second = (4.0 * second_h2 - second_h) / 3.0;
        let first = (4.0 * first_h2 - first_h) / 3.0;
        (second + lap_r * first) / p
    };
    Ok(lhs - bochner_rhs(profile, p, jet, t)?)
}

/// Same residual with plain central differences of step `h` for every `p`;
/// its size measures the `O(h²)` discretization error.
pub fn p_bochner_residual_fd(profile: &WarpedProfile, p: f64, f: &RadialFunction, t: f64, h: f64) -> Result<f64> {
    check_p(p)?;
    if !(h > 0.0) {
        return precondition(format!("difference step must be positive, got {h}"));
    }
    let jet = gradient_guard(f, t)?;
    let lap_r = mean_curvature_of_spheres(profile, t)?;
    let u = |s: f64| f.jet(s)[1].abs().powf(p);
    let (second, first) = central_differences(&u, t, h);
    Ok((second + lap_r * first) / p - bochner_rhs(profile, p, jet, t)?)
}

fn central_differences<F: Fn(f64) -> f64>(u: &F, t: f64, h: f64) -> (f64, f64) {
    let (um, u0, up) = (u(t - h), u(t), u(t + h));
    ((up - 2.0 * u0 + um) / (h * h), (up - um) / (2.0 * h))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return precondition(format!("exponent p must exceed 1, got {p}"));
    }
    Ok(())
}

fn radial_p_laplacian(p: f64, lap_r: f64, jet: [f64; 4]) -> f64 {
    let [_, g, g1, _] = jet;
    let w = g.abs().powf(p - 2.0);
    (p - 1.0) * w * g1 + lap_r * g * w
}

/// `Δ_p f = (p-1)|f'|^{p-2} f'' + Δr f'|f'|^{p-2}` for radial `f`.
pub fn p_laplacian_radial(profile: &WarpedProfile, p: f64, f: &RadialFunction, t: f64) -> Result<f64> {
    check_p(p)?;
    let jet = f.jet(t);
    if p < 2.0 && jet[1] == 0.0 {
        return precondition(format!("p-Laplacian is singular at a critical point for p = {p} < 2"));
    }
    Ok(radial_p_laplacian(p, profile.laplacian_of_r(t)?, jet))
}

/// `Δ_p f = (p-2)|∇f|^{p-4} Hess f(∇f, ∇f) + |∇f|^{p-2} Δf`, from the
/// Hessian and Laplacian of `f`.
pub fn p_laplacian_expanded(profile: &WarpedProfile, p: f64, f: &RadialFunction, t: f64) -> Result<f64> {
    check_p(p)?;
    let jet = gradient_guard(f, t)?;
    let [_, g, g1, _] = jet;
    let hess_grad_grad = g * g * g1;
    let laplacian = g1 + profile.laplacian_of_r(t)? * g;
    Ok((p - 2.0) * g.abs().powf(p - 4.0) * hess_grad_grad + g.abs().powf(p - 2.0) * laplacian)
}

/// `Δ_p f ≥ Δ̄ᴷ_p f + f'|f'|^{p-2} ψ` for radial nonincreasing `f`.
pub fn p_laplace_comparison_check(
    profile: &WarpedProfile,
    k: f64,
    p: f64,
    f: &RadialFunction,
    t: f64,
) -> Result<BoundReport> {
    check_p(p)?;
    let jet = f.jet(t);
    let g = jet[1];
    if g > 0.0 {
        return precondition(format!("comparison needs f'(t) <= 0, got f'({t}) = {g:e}"));
    }
    if p < 2.0 && g == 0.0 {
        return precondition(format!("p-Laplacian is singular at a critical point for p = {p} < 2"));
    }
    let model = ModelSpace::new(profile.dim(), k)?;
    let lhs = radial_p_laplacian(p, profile.laplacian_of_r(t)?, jet);
    let model_side = radial_p_laplacian(p, model.laplacian_of_r(t)?, jet);
    let psi = profile.laplacian_excess_psi(k, t)?;
    let rhs = model_side + g * g.abs().powf(p - 2.0) * psi;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).p(p).k(k).r(t);
    Ok(BoundReport::decided("p-comparison", inputs, lhs, rhs, lhs - rhs, 1e-9)
        .with_detail("psi", psi)
        .with_detail("model_p_laplacian", model_side))
}
