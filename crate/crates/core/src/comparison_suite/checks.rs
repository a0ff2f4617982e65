use super::report::{tol_band, BoundReport, CheckInputs};
use super::{lichnerowicz_lower_bound, matei_baseline_bound, RadialFunction};
use crate::error::{domain, precondition, Error, Result};
use crate::model_geometry::ModelSpace;
use crate::quadrature::{gauss_composite, simpson_samples};
use crate::radial_eigensolver::{solve_first_dirichlet_ball, solve_first_dirichlet_model, solve_first_neumann_radial};
use crate::warped_manifold::WarpedProfile;

/// Norms below this are treated as exact zeros in ratios.
const ZERO_NORM: f64 = 1e-12;

/// Compares `vol B(r) / vol B(r₀)` with twice the model ratio.
pub fn volume_doubling_check(profile: &WarpedProfile, k: f64, q: f64, r: f64, r0: f64) -> Result<BoundReport> {
    if !(r0 > 0.0 && r0 < r) {
        return precondition(format!("doubling needs 0 < r0 < r, got r0 = {r0}, r = {r}"));
    }
    if r > profile.end() * (1.0 + 1e-12) {
        return domain(format!("radius {r} exceeds the profile end {}", profile.end()));
    }
    let model = ModelSpace::new(profile.dim(), k)?;
    let ratio = profile.ball_volume(r)? / profile.ball_volume(r0)?;
    let model_ratio = model.ball_volume(r)? / model.ball_volume(r0)?;
    let quotient = ratio / model_ratio;
    let norm = profile.integral_curvature_norm(k, q, Some(r))?;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).q(q).k(k).r(r);
    Ok(BoundReport::decided("doubling", inputs, quotient, 2.0, 2.0 - quotient, tol_band(0.0))
        .with_norm(norm)
        .with_detail("r0", r0)
        .with_detail("volume_ratio", ratio)
        .with_detail("model_volume_ratio", model_ratio))
}

/// Reports `‖ψ‖*_{2q} / (‖Ric₋ᴷ‖*_q)^{1/2}` over `B(r)`, the empirical constant
/// of the integral Laplace comparison for this instance.
pub fn laplace_comparison_norm_check(profile: &WarpedProfile, k: f64, q: f64, r: f64) -> Result<BoundReport> {
    let psi = profile.psi_norm(k, 2.0 * q, r)?;
    let eps = profile.integral_curvature_norm(k, q, Some(r))?;
    let ratio = match (psi < ZERO_NORM, eps < ZERO_NORM) {
        (true, _) => 0.0,
        (false, true) => f64::INFINITY,
        (false, false) => psi / eps.sqrt(),
    };
    let inputs = CheckInputs::new(profile.label(), profile.dim()).q(q).k(k).r(r);
    Ok(BoundReport::report_only("laplace-norm", inputs, psi, eps.sqrt()).with_norm(eps).with_detail("ratio", ratio))
}

/// Compares `λ_{1,p}(B(x₀, r))` with the model eigenvalue and replays the
/// estimates linking them, using the model eigenfunction as test function:
///
/// `λ ≤ Q ≤ λ̄ + T₁ ≤ λ̄ + E`, where `Q` is its Rayleigh quotient on `B(x₀, r)`,
/// `T₁ = ∫ψ|f̄'|^{p-1} / ∫|f̄|^p` and `E = 2 Q^{1-1/p} ‖ψ‖*_{2q̄} (vol B(r) / vol B(r₀))^{1/p}`
/// with `f̄(r₀) = 1/2` and `q̄ = max(q, p/2)`.
pub fn cheng_gap_check(profile: &WarpedProfile, k: f64, p: f64, q: f64, r: f64, tol: f64) -> Result<BoundReport> {
    let q_bar = q.max(p / 2.0);
    let model = ModelSpace::new(profile.dim(), k)?;
    let ball = solve_first_dirichlet_ball(profile, r, p, tol)?;
    let model_res = solve_first_dirichlet_model(&model, r, p, tol)?;
    let (lambda, lambda_bar) = (ball.lambda, model_res.lambda);
    let eps = profile.integral_curvature_norm(k, q_bar, Some(r))?;

    let h = model_res.grid_step();
    let mut grad = Vec::with_capacity(model_res.t.len());
    let mut mass = Vec::with_capacity(model_res.t.len());
    let mut error_term = Vec::with_capacity(model_res.t.len());
    for (i, &t) in model_res.t.iter().enumerate() {
        let a = profile.area_density(t);
        let d = model_res.fprime[i].abs();
        grad.push(d.powf(p) * a);
        mass.push(model_res.f[i].abs().powf(p) * a);
        let psi = if t > 0.0 && t < r { profile.laplacian_excess_psi(k, t)? } else { 0.0 };
        error_term.push(psi * d.powf(p - 1.0) * a);
    }
    let denom = simpson_samples(&mass, h);
    let quotient = simpson_samples(&grad, h) / denom;
    let t1 = simpson_samples(&error_term, h) / denom;

    let r0 = half_level_radius(&model_res.t, &model_res.f)
        .ok_or_else(|| Error::Evaluation("model eigenfunction never drops to 1/2".into()))?;
    let psi_norm = profile.psi_norm(k, 2.0 * q_bar, r)?;
    let vol_ratio = profile.ball_volume(r)? / profile.ball_volume(r0)?;
    let e = 2.0 * quotient.powf(1.0 - 1.0 / p) * psi_norm * vol_ratio.powf(1.0 / p);

    let band = tol_band(ball.bracket_width.max(model_res.bracket_width));
    let gap = lambda - lambda_bar;
    let empirical = if eps < ZERO_NORM {
        if gap.max(0.0) <= band { 0.0 } else { f64::INFINITY }
    } else {
        gap.max(0.0) / eps.sqrt()
    };
    let rayleigh_slack = quotient - lambda;
    let comparison_slack = lambda_bar + t1 - quotient;
    let holder_slack = e - t1;
    let rhs = lambda_bar + e;
    let inputs = CheckInputs::new(profile.label(), profile.dim()).p(p).q(q_bar).k(k).r(r);
    Ok(BoundReport::decided("cheng", inputs, lambda, rhs, rhs - lambda, band)
        .require(rayleigh_slack >= -band && comparison_slack >= -band && holder_slack >= -band)
        .with_norm(eps)
        .with_detail("lambda_model", lambda_bar)
        .with_detail("gap", gap)
        .with_detail("gap_plus_over_sqrt_norm", empirical)
        .with_detail("rayleigh_quotient", quotient)
        .with_detail("error_term", t1)
        .with_detail("error_bound", e)
        .with_detail("r0", r0)
        .with_detail("psi_norm", psi_norm)
        .with_detail("rayleigh_slack", rayleigh_slack)
        .with_detail("comparison_slack", comparison_slack)
        .with_detail("holder_slack", holder_slack))
}

/// First point where the sampled, decreasing `f` reaches `1/2`.
fn half_level_radius(t: &[f64], f: &[f64]) -> Option<f64> {
    let i = f.iter().position(|&v| v <= 0.5)?;
    if i == 0 {
        return Some(t[0]);
    }
    let (f0, f1) = (f[i - 1], f[i]);
    Some(t[i - 1] + (f0 - 0.5) / (f0 - f1) * (t[i] - t[i - 1]))
}

/// `μ_{1,p}` within the radial class against the lower bound with the
/// measured `‖Ric₋ᴷ‖*_q` in place of the smallness threshold.
pub fn lichnerowicz_empirical_check(profile: &WarpedProfile, k: f64, p: f64, q: f64, tol: f64) -> Result<BoundReport> {
    if !profile.is_closed() {
        return precondition("Lichnerowicz check needs a closed profile");
    }
    let eps = profile.integral_curvature_norm(k, q, None)?;
    let bound = lichnerowicz_lower_bound(profile.dim(), p, k, eps)?;
    let res = solve_first_neumann_radial(profile, p, tol)?;
    let band = tol_band(res.bracket_width);
    let inputs = CheckInputs::new(profile.label(), profile.dim()).p(p).q(q).k(k);
    Ok(BoundReport::decided("lichnerowicz", inputs, res.lambda, bound, res.lambda - bound, band)
        .with_norm(eps)
        .with_detail("baseline", matei_baseline_bound(profile.dim(), p, k)?)
        .with_detail("nodal_radius", res.nodal_radius.unwrap_or(f64::NAN)))
}

/// Largest curvature excess for which `(p-2) - C_s ε p²/4 ≥ 0`; infinite at `p = 2`.
pub fn sobolev_threshold(p: f64, c_s: f64) -> Result<f64> {
    if !(c_s > 0.0) {
        return precondition(format!("Sobolev constant must be positive, got {c_s}"));
    }
    if !(p >= 2.0) {
        return precondition(format!("threshold requires p >= 2, got {p}"));
    }
    if p == 2.0 {
        return Ok(f64::INFINITY);
    }
    Ok(4.0 * (p - 2.0) / (c_s * p * p))
}

/// Smallest `C_s` with `(⨍ f^{2q/(q-1)})^{(q-1)/q} ≤ C_s ⨍|∇f|² + 2 ⨍ f²` for this `f`.
///
/// Functions with zero gradient satisfy the inequality for every `C_s` as long as
/// the left side does not exceed `2 ⨍ f²`; they yield `-∞`.
pub fn sobolev_ratio(profile: &WarpedProfile, q: f64, f: &RadialFunction) -> Result<f64> {
    if !profile.is_closed() {
        return precondition("Sobolev ratio needs a closed profile");
    }
    if !(q > 1.0) {
        return precondition(format!("Sobolev ratio needs q > 1, got {q}"));
    }
    let end = profile.end();
    let cells = profile.grid();
    let vol = profile.total_volume();
    let mean = |g: &dyn Fn(f64) -> f64| gauss_composite(|t| g(t) * profile.area_density(t), 0.0, end, cells) / vol;
    let s = 2.0 * q / (q - 1.0);
    let high = mean(&|t| f.value(t).abs().powf(s)).powf((q - 1.0) / q);
    let l2 = mean(&|t| f.value(t).powi(2));
    let grad = mean(&|t| f.jet(t)[1].powi(2));
    let num = high - 2.0 * l2;
    if grad <= 1e-300 {
        if num <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        return precondition("constant function with left side above 2 mean(f^2)");
    }
    Ok(num / grad)
}
