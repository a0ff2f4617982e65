use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use crate::comparison_suite::{tol_band, BoundReport, CheckInputs};
use crate::error::{precondition, Result};
use crate::model_geometry::ModelSpace;
use crate::radial_eigensolver::{nodal_split, solve_first_dirichlet_ball, solve_first_dirichlet_model, EigenResult};
use crate::warped_manifold::WarpedProfile;

use super::coarea::{quantile_thresholds, DEFAULT_THRESHOLDS};
use super::distribution::{
    decreasing_rearrangement, interpolant_gradient_mass, interpolant_lp_mass, DensityFn, RadialSamples,
};
use super::spherical::{spherical_rearrangement, volume_matching_radius};

/// Tolerance on equimeasurability and `L^p` conservation.
pub const CONSERVATION_TOL: f64 = 1e-8;
/// Exponents at which `L^p` conservation is checked.
pub const CONSERVATION_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 4.0];
/// Tolerance of the nodal identity `μ = λ(A₊) = λ(A₋)`.
pub const NODAL_TOL: f64 = 1e-6;

/// Pole ball `B(x₀, radius)` of a closed profile compared with the
/// volume-fraction-matched model ball.
#[derive(Debug, Clone, Copy)]
struct MatchedBall {
    model: ModelSpace,
    volume: f64,
    fraction: f64,
    beta: f64,
    model_radius: f64,
}

fn matched_ball(profile: &WarpedProfile, k: f64, radius: f64) -> Result<MatchedBall> {
    if !profile.is_closed() {
        return precondition(format!("{} is not closed; the volume normalization needs vol(M)", profile.label()));
    }
    if !(radius > 0.0 && radius < profile.end()) {
        return precondition(format!("domain radius must lie in (0, {}), got {radius}", profile.end()));
    }
    let model = ModelSpace::new(profile.dim(), k)?;
    let model_total = match model.total_volume() {
        Some(v) => v,
        None => return precondition(format!("volume normalization needs K > 0, got {k}")),
    };
    let volume = profile.ball_volume(radius)?;
    let fraction = volume / profile.total_volume();
    let model_radius = volume_matching_radius(&model, fraction)?;
    Ok(MatchedBall { model, volume, fraction, beta: profile.total_volume() / model_total, model_radius })
}

/// Compares `area ∂B_K(r₀)` with `α area(∂Ω) vol B_K(r₀) / vol Ω` for the pole
/// ball `Ω = B(x₀, radius)`. Only pole balls are tested; they need not be the
/// extremal domains of the profile.
pub fn isoperimetric_check(profile: &WarpedProfile, k: f64, q: f64, radius: f64, alpha: f64) -> Result<BoundReport> {
    let ball = matched_ball(profile, k, radius)?;
    let model_area = ball.model.sphere_area(ball.model_radius)?;
    let model_volume = ball.model.ball_volume(ball.model_radius)?;
    let boundary = profile.area_density(radius);
    let scaled = boundary * model_volume / ball.volume;
    let alpha_min = model_area / scaled;
    let rhs = alpha * scaled;
    let norm = profile.integral_curvature_norm(k, q, None)?;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).q(q).k(k).r(radius);
    Ok(BoundReport::decided("isoperimetric", inputs, model_area, rhs, rhs - model_area, tol_band(0.0) * model_area)
        .with_norm(norm)
        .with_detail("alpha", alpha)
        .with_detail("alpha_min", alpha_min)
        .with_detail("model_radius", ball.model_radius)
        .with_detail("volume_fraction", ball.fraction)
        .with_detail("beta", ball.beta))
}

/// Result of pushing an eigenfunction through the rearrangement argument.
#[derive(Debug, Clone, Copy)]
pub struct RearrangementReplay {
    /// `∫_Ω f^p`.
    pub lp_mass: f64,
    /// `∫_Ω |∇f|^p` of the interpolant.
    pub gradient_mass: f64,
    /// `β ∫_{B̄} |∇f̄|^p`.
    pub rearranged_gradient_mass: f64,
    /// Largest `β area ∂B̄_s / area{f = f̄(s)}` over the levels.
    pub isoperimetric_ratio: f64,
    /// Largest `|vol{f > τ} - vol{f̄ > τ}| / vol(Ω)` over the thresholds.
    pub equimeasurability_error: f64,
    /// Largest relative `L^p` conservation defect over [`CONSERVATION_EXPONENTS`].
    pub conservation_error: f64,
    /// Radius of the model ball `B̄`.
    pub model_radius: f64,
}

impl RearrangementReplay {
    /// `λ_K ∫ f^p ≤ β∫|∇f̄|^p ≤ α_iso^p ∫|∇f|^p` and conservation within tolerance.
    pub fn consistent(&self, lambda_model: f64, p: f64, band: f64) -> bool {
        let rayleigh = lambda_model * self.lp_mass <= self.rearranged_gradient_mass * (1.0 + band);
        let polya_szego = self.rearranged_gradient_mass
            <= self.isoperimetric_ratio.powf(p) * self.gradient_mass * (1.0 + CONSERVATION_TOL);
        rayleigh
            && polya_szego
            && self.equimeasurability_error <= CONSERVATION_TOL
            && self.conservation_error <= CONSERVATION_TOL
    }
}

/// Rearranges `|f|` from the sampled eigenfunction of `B(x₀, radius)` onto the
/// model ball and evaluates every quantity of the argument.
pub fn replay_rearrangement(
    profile: &WarpedProfile,
    eigen: &EigenResult,
    model: &ModelSpace,
    beta: f64,
    p: f64,
) -> Result<RearrangementReplay> {
    let prof = profile.clone();
    let density: Arc<DensityFn> = Arc::new(move |t| prof.area_density(t));
    let f: Vec<f64> = eigen.f.iter().map(|v| v.abs()).collect();
    let samples = RadialSamples::new(eigen.t.clone(), f, None)?;
    let fbar = decreasing_rearrangement(&samples, density.clone())?;
    let dist = fbar.distribution();

    let mut equi: f64 = 0.0;
    for tau in quantile_thresholds(&samples, density.clone(), DEFAULT_THRESHOLDS)? {
        let err = (dist.superlevel_volume(tau) - fbar.superlevel_volume(tau)).abs() / fbar.volume();
        equi = equi.max(err);
    }
    let mut conservation: f64 = 0.0;
    for q in CONSERVATION_EXPONENTS {
        let direct = interpolant_lp_mass(&samples, density.as_ref(), q);
        conservation = conservation.max((fbar.lp_mass(q) - direct).abs() / direct);
    }

    let sph = spherical_rearrangement(&fbar, model, beta)?;
    let (rearranged_gradient_mass, isoperimetric_ratio) = sph.gradient_mass_and_isoperimetric_ratio(p);
    Ok(RearrangementReplay {
        lp_mass: interpolant_lp_mass(&samples, density.as_ref(), p),
        gradient_mass: interpolant_gradient_mass(&samples, density.as_ref(), p),
        rearranged_gradient_mass,
        isoperimetric_ratio,
        equimeasurability_error: equi,
        conservation_error: conservation,
        model_radius: sph.radius,
    })
}

/// Compares `α^p λ_{1,p}(Ω)` with `λ_{1,p}(B_K)` for the pole ball `Ω` and the
/// volume-fraction-matched model ball, and replays the rearrangement argument
/// on the computed eigenfunction.
pub fn faber_krahn_check(
    profile: &WarpedProfile,
    k: f64,
    p: f64,
    q: f64,
    radius: f64,
    alpha: f64,
    tol: f64,
) -> Result<BoundReport> {
    let ball = matched_ball(profile, k, radius)?;
    let omega = solve_first_dirichlet_ball(profile, radius, p, tol)?;
    let model_res = solve_first_dirichlet_model(&ball.model, ball.model_radius, p, tol)?;
    let (lambda, lambda_k) = (omega.lambda, model_res.lambda);
    let alpha_req = (lambda_k / lambda).powf(1.0 / p);
    let band = tol_band(omega.bracket_width.max(model_res.bracket_width));

    let replay = replay_rearrangement(profile, &omega, &ball.model, ball.beta, p)?;
    let norm = profile.integral_curvature_norm(k, q, None)?;
    let lhs = alpha.powf(p) * lambda;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).p(p).q(q).k(k).r(radius);
    Ok(BoundReport::decided("faber-krahn", inputs, lhs, lambda_k, lhs - lambda_k, band * lambda_k)
        .require(replay.consistent(lambda_k, p, band))
        .with_norm(norm)
        .with_detail("alpha", alpha)
        .with_detail("alpha_required", alpha_req)
        .with_detail("lambda_domain", lambda)
        .with_detail("lambda_model", lambda_k)
        .with_detail("model_radius", ball.model_radius)
        .with_detail("beta", ball.beta)
        .with_detail("lp_mass", replay.lp_mass)
        .with_detail("gradient_mass", replay.gradient_mass)
        .with_detail("rearranged_gradient_mass", replay.rearranged_gradient_mass)
        .with_detail("isoperimetric_ratio", replay.isoperimetric_ratio)
        .with_detail("equimeasurability_error", replay.equimeasurability_error)
        .with_detail("conservation_error", replay.conservation_error))
}

/// Compares `α μ_{1,p}(M)` with `μ_{1,p}(M^n_K)`, the latter computed as the
/// Dirichlet eigenvalue of the model hemisphere, and checks that both nodal
/// pole balls of the radial Neumann eigenfunction carry the eigenvalue `μ`.
pub fn obata_check(profile: &WarpedProfile, k: f64, p: f64, q: f64, alpha: f64, tol: f64) -> Result<BoundReport> {
    if !profile.is_closed() {
        return precondition(format!("{} is not closed", profile.label()));
    }
    if !(k > 0.0) {
        return precondition(format!("model comparison needs K > 0, got {k}"));
    }
    let model = ModelSpace::new(profile.dim(), k)?;
    let split = nodal_split(profile, p, tol)?;
    let hemisphere = solve_first_dirichlet_model(&model, FRAC_PI_2 / k.sqrt(), p, tol)?;
    let (mu, mu_k) = (split.mu, hemisphere.lambda);
    let nodal_error = ((split.inner - mu).abs()).max((split.outer - mu).abs()) / mu;
    let band = tol_band(hemisphere.bracket_width.max(tol * mu));
    let norm = profile.integral_curvature_norm(k, q, None)?;
    let lhs = alpha * mu;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).p(p).q(q).k(k);
    Ok(BoundReport::decided("obata", inputs, lhs, mu_k, lhs - mu_k, band * mu_k)
        .require(nodal_error <= NODAL_TOL)
        .with_norm(norm)
        .with_detail("alpha", alpha)
        .with_detail("alpha_required", mu_k / mu)
        .with_detail("mu", mu)
        .with_detail("mu_model", mu_k)
        .with_detail("nodal_radius", split.nodal_radius)
        .with_detail("lambda_inner", split.inner)
        .with_detail("lambda_outer", split.outer)
        .with_detail("nodal_error", nodal_error))
}
