//! Closed-form eigenvalue bounds and numerical checks of the comparison
//! inequalities they rest on.

mod bochner;
mod checks;
mod report;

pub use bochner::{
    p_bochner_residual, p_bochner_residual_fd, p_laplace_comparison_check, p_laplacian_expanded,
    p_laplacian_radial,
};
pub use checks::{
    cheng_gap_check, laplace_comparison_norm_check, lichnerowicz_empirical_check, sobolev_ratio,
    sobolev_threshold, volume_doubling_check,
};
pub use report::{tol_band, BoundReport, CheckInputs, Verdict};

use crate::error::{precondition, Result};

/// Radial test function of the distance to the pole, with three derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    /// `cos(ω t)`.
    Cosine { omega: f64 },
    /// `Σ c_k t^k`.
    Polynomial(Vec<f64>),
    /// `exp(-rate t)`.
    Exponential { rate: f64 },
}

impl RadialFunction {
    /// `(f, f', f'', f''')` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 4] {
        match self {
            RadialFunction::Cosine { omega } => {
                let (s, c) = (omega * t).sin_cos();
                let w2 = omega * omega;
                [c, -omega * s, -w2 * c, w2 * omega * s]
            }
            RadialFunction::Polynomial(coeffs) => {
                let mut out = [0.0; 4];
                for (k, &c) in coeffs.iter().enumerate() {
                    for (d, slot) in out.iter_mut().enumerate() {
                        if k >= d {
                            let falling: f64 = (0..d).map(|j| (k - j) as f64).product();
                            *slot += c * falling * t.powi((k - d) as i32);
                        }
                    }
                }
                out
            }
            RadialFunction::Exponential { rate } => {
                let e = (-rate * t).exp();
                [e, -rate * e, rate * rate * e, -rate * rate * rate * e]
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.jet(t)[0]
    }

    pub fn label(&self) -> String {
        match self {
            RadialFunction::Cosine { omega } => format!("cos({omega}t)"),
            RadialFunction::Polynomial(c) => {
                let terms: Vec<String> = c.iter().enumerate().map(|(k, v)| format!("{v}t^{k}")).collect();
                terms.join("+")
            }
            RadialFunction::Exponential { rate } => format!("exp(-{rate}t)"),
        }
    }
}

fn lichnerowicz_factor(n: usize, p: f64) -> f64 {
    let s = (n as f64).sqrt() * (p - 2.0);
    let n = n as f64;
    (s + n) / ((p - 1.0) * (s + n - 1.0))
}

/// Lower bound for `μ_{1,p}` under `‖Ric₋ᴷ‖*_q ≤ eps`:
/// `X^{p/2}` with `X = (√n(p-2)+n) / ((p-1)(√n(p-2)+n-1)) · ((n-1)K - 2 eps)`.
pub fn lichnerowicz_lower_bound(n: usize, p: f64, k: f64, eps: f64) -> Result<f64> {
    if n < 2 {
        return precondition(format!("dimension must be at least 2, got {n}"));
    }
    if !(p >= 2.0) || !p.is_finite() {
        return precondition(format!("bound requires p >= 2, got {p}"));
    }
    if !(k > 0.0) {
        return precondition(format!("bound requires K > 0, got {k}"));
    }
    if !(eps >= 0.0) {
        return precondition(format!("curvature excess must be nonnegative, got {eps}"));
    }
    let base = (n as f64 - 1.0) * k - 2.0 * eps;
    if !(base > 0.0) {
        return precondition(format!("bound is vacuous: (n-1)K - 2 eps = {base} is not positive"));
    }
    Ok((lichnerowicz_factor(n, p) * base).powf(p / 2.0))
}

/// `((n-1)K/(p-1))^{p/2}`.
pub fn matei_baseline_bound(n: usize, p: f64, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return precondition(format!("baseline requires K > 0, got {k}"));
    }
    if !(p > 1.0) {
        return precondition(format!("baseline requires p > 1, got {p}"));
    }
    Ok(((n as f64 - 1.0) * k / (p - 1.0)).powf(p / 2.0))
}

/// The pointwise-curvature case of [`lichnerowicz_lower_bound`].
pub fn explicit_pointwise_bound(n: usize, p: f64, k: f64) -> Result<f64> {
    lichnerowicz_lower_bound(n, p, k, 0.0)
}
