//! Level-set bookkeeping for radial functions: superlevel volumes, level areas
//! and the co-area integrals, with the Hölder bound checked on every level.

use std::sync::Arc;

use crate::error::{precondition, Result};

use super::distribution::{decreasing_rearrangement, DensityFn, Distribution, RadialSamples};

/// Default number of value-quantile thresholds.
pub const DEFAULT_THRESHOLDS: usize = 64;

/// `|f'|` below this fraction of the mean slope marks a critical level.
const CRITICAL_SLOPE: f64 = 1e-8;

/// Per-threshold level-set data of a radial function.
#[derive(Debug, Clone, Default)]
pub struct LevelSetProfile {
    /// Decreasing thresholds `t_j`.
    pub thresholds: Vec<f64>,
    /// `vol{f > t_j}`.
    pub superlevel_volumes: Vec<f64>,
    /// `area{f = t_j}`.
    pub boundary_areas: Vec<f64>,
    /// `∫_{f=t_j} 1/|∇f|`.
    pub gradient_coarea: Vec<f64>,
    /// `∫_{f=t_j} |∇f|^{p-1}`.
    pub gradient_flux: Vec<f64>,
    /// `(∫ 1/|∇f|)^{(p-1)/p} (∫ |∇f|^{p-1})^{1/p} - area`, per level.
    pub holder_slack: Vec<f64>,
    /// Levels touching a critical point of `f`; their other columns are not asserted.
    pub critical: Vec<bool>,
}

impl LevelSetProfile {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// True when every non-critical level satisfies the Hölder bound up to `rel_tol`.
    pub fn holder_holds(&self, rel_tol: f64) -> bool {
        (0..self.len()).all(|j| self.critical[j] || self.holder_slack[j] >= -rel_tol * self.boundary_areas[j])
    }

    pub fn critical_rows(&self) -> usize {
        self.critical.iter().filter(|&&c| c).count()
    }
}

/// Thresholds `f̄((j + 1/2) vol(Ω) / count)`, the value quantiles of `f`.
pub fn quantile_thresholds(samples: &RadialSamples, density: Arc<DensityFn>, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return precondition("need at least one threshold");
    }
    let fbar = decreasing_rearrangement(samples, density)?;
    let total = fbar.volume();
    Ok((0..count).map(|j| fbar.value((j as f64 + 0.5) * total / count as f64)).collect())
}

/// Points of `{f = tau}` on the interpolant, with `|f'|` there. Sample nodes
/// lying exactly on the level use the supplied derivative when present.
fn level_points(samples: &RadialSamples, tau: f64) -> Vec<(f64, f64)> {
    let (t, f) = (&samples.t, &samples.f);
    let node_slope = |i: usize| match &samples.fprime {
        Some(d) => d[i].abs(),
        None => {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(t.len() - 1));
            ((f[b] - f[a]) / (t[b] - t[a])).abs()
        }
    };
    let mut out = Vec::new();
    for i in 0..t.len() {
        if f[i] == tau {
            out.push((t[i], node_slope(i)));
        }
        if i + 1 < t.len() && (f[i] - tau) * (f[i + 1] - tau) < 0.0 {
            let u = (f[i] - tau) / (f[i] - f[i + 1]);
            let x = t[i] + u * (t[i + 1] - t[i]);
            let slope = match &samples.fprime {
                Some(d) => (d[i] + u * (d[i + 1] - d[i])).abs(),
                None => ((f[i + 1] - f[i]) / (t[i + 1] - t[i])).abs(),
            };
            out.push((x, slope));
        }
    }
    out
}

/// Level-set profile of nonnegative radial samples; `thresholds` defaults to
/// [`DEFAULT_THRESHOLDS`] value quantiles.
pub fn coarea_audit(
    samples: &RadialSamples,
    density: Arc<DensityFn>,
    p: f64,
    thresholds: Option<&[f64]>,
) -> Result<LevelSetProfile> {
    if !(p > 1.0) || !p.is_finite() {
        return precondition(format!("exponent p must exceed 1, got {p}"));
    }
    let dist = Distribution::new(samples, density.clone())?;
    let thresholds = match thresholds {
        Some(th) => th.to_vec(),
        None => quantile_thresholds(samples, density.clone(), DEFAULT_THRESHOLDS)?,
    };
    let range = samples.f.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - samples.f.iter().cloned().fold(f64::INFINITY, f64::min);
    let floor = CRITICAL_SLOPE * (range / (samples.end() - samples.t[0])).max(f64::MIN_POSITIVE);

    let mut out = LevelSetProfile::default();
    for &tau in &thresholds {
        let points = level_points(samples, tau);
        let critical = points.iter().any(|&(_, g)| g <= floor);
        let (mut area, mut coarea, mut flux) = (0.0, 0.0, 0.0);
        for &(x, g) in &points {
            let a = density(x);
            area += a;
            coarea += a / g;
            flux += a * g.powf(p - 1.0);
        }
        let bound = coarea.powf((p - 1.0) / p) * flux.powf(1.0 / p);
        out.thresholds.push(tau);
        out.superlevel_volumes.push(dist.superlevel_volume(tau));
        out.boundary_areas.push(area);
        out.gradient_coarea.push(if critical { f64::INFINITY } else { coarea });
        out.gradient_flux.push(flux);
        out.holder_slack.push(if critical { f64::NAN } else { bound - area });
        out.critical.push(critical);
    }
    Ok(out)
}

/// `|(vol{f > τ - dτ} - vol{f > τ}) / dτ - ∫_{f=τ} 1/|∇f||`, the one-sided
/// finite-difference defect of the co-area identity at `tau`.
pub fn coarea_derivative_defect(samples: &RadialSamples, density: Arc<DensityFn>, tau: f64, dtau: f64) -> Result<f64> {
    if !(dtau > 0.0) {
        return precondition(format!("difference step must be positive, got {dtau}"));
    }
    let dist = Distribution::new(samples, density.clone())?;
    let points = level_points(samples, tau);
    if points.is_empty() {
        return precondition(format!("level {tau} is not attained"));
    }
    let coarea: f64 = points.iter().map(|&(x, g)| density(x) / g).sum();
    let fd = (dist.superlevel_volume(tau - dtau) - dist.superlevel_volume(tau)) / dtau;
    Ok((fd - coarea).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit() -> Arc<DensityFn> {
        Arc::new(|_| 1.0)
    }

    #[test]
    fn linear_on_interval_is_exact() {
        let s = RadialSamples::from_fn(1.0, 20, |t| 1.0 - t, |_| -1.0).unwrap();
        let prof = coarea_audit(&s, unit(), 2.0, Some(&[0.9, 0.5, 0.13])).unwrap();
        for j in 0..3 {
            assert!((prof.superlevel_volumes[j] - (1.0 - prof.thresholds[j])).abs() < 1e-14);
            assert!((prof.gradient_coarea[j] - 1.0).abs() < 1e-12);
            assert!((prof.boundary_areas[j] - 1.0).abs() < 1e-15);
            assert!(prof.holder_slack[j].abs() < 1e-12);
        }
        assert!(coarea_derivative_defect(&s, unit(), 0.5, 0.1).unwrap() < 1e-13);
    }

    #[test]
    fn default_thresholds_are_value_quantiles() {
        let s = RadialSamples::from_fn(1.0, 64, |t| 1.0 - t, |_| -1.0).unwrap();
        let prof = coarea_audit(&s, unit(), 3.0, None).unwrap();
        assert_eq!(prof.len(), DEFAULT_THRESHOLDS);
        assert!(prof.thresholds.windows(2).all(|w| w[1] < w[0]));
        assert!(prof.superlevel_volumes.windows(2).all(|w| w[1] >= w[0]));
        assert!(prof.holder_holds(1e-12));
        assert_eq!(prof.critical_rows(), 0);
    }

    #[test]
    fn hemisphere_ground_state_has_first_order_coarea_defect() {
        // on S³ the ground state is cos t and vol{f > τ} is nonlinear in τ
        let density: Arc<DensityFn> = Arc::new(|t: f64| 4.0 * PI * t.sin().powi(2));
        let s = RadialSamples::from_fn(FRAC_PI_2, 4096, f64::cos, |t| -t.sin()).unwrap();
        let errs: Vec<f64> = [0.04, 0.02, 0.01]
            .iter()
            .map(|&d| coarea_derivative_defect(&s, density.clone(), 0.5, d).unwrap())
            .collect();
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() >= 0.9, "{errs:?}");
        }
    }

    #[test]
    fn flags_the_critical_level_only() {
        // f' vanishes at t = 1/2, where f = 1/2
        let f = |t: f64| 0.5 - 4.0 * (t - 0.5).powi(3);
        let df = |t: f64| -12.0 * (t - 0.5).powi(2);
        let s = RadialSamples::from_fn(1.0, 200, f, df).unwrap();
        let prof = coarea_audit(&s, unit(), 2.0, Some(&[0.9, 0.7, 0.5, 0.3, 0.1])).unwrap();
        assert_eq!(prof.critical, vec![false, false, true, false, false]);
        assert!(prof.holder_holds(1e-12));
    }
}
