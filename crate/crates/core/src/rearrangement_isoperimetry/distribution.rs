//! Distribution function and decreasing rearrangement of piecewise-linear
//! radial functions with respect to the measure `A(t) dt`.

use std::fmt;
use std::sync::Arc;

use crate::error::{precondition, Error, Result};
use crate::quadrature::{gauss_legendre_5, CompensatedSum};

pub type DensityFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Radial samples `f(t_i)` on a strictly increasing grid, optionally with `f'`.
#[derive(Debug, Clone)]
pub struct RadialSamples {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub fprime: Option<Vec<f64>>,
}

impl RadialSamples {
    pub fn new(t: Vec<f64>, f: Vec<f64>, fprime: Option<Vec<f64>>) -> Result<Self> {
        if t.len() < 3 || t.len() != f.len() || fprime.as_ref().is_some_and(|d| d.len() != t.len()) {
            return precondition("radial samples need at least 3 points and matching lengths");
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return precondition("sample abscissae must be strictly increasing");
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation("non-finite sample value".into()));
        }
        Ok(RadialSamples { t, f, fprime })
    }

    /// Samples `f` and `f'` on `cells + 1` uniform points of `[0, end]`.
    pub fn from_fn<F, D>(end: f64, cells: usize, f: F, df: D) -> Result<Self>
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let t: Vec<f64> = (0..=cells).map(|i| end * i as f64 / cells as f64).collect();
        let v = t.iter().map(|&x| f(x)).collect();
        let d = t.iter().map(|&x| df(x)).collect();
        Self::new(t, v, Some(d))
    }

    pub fn end(&self) -> f64 {
        *self.t.last().unwrap()
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    mass: f64,
}

impl Cell {
    fn min(&self) -> f64 {
        self.f_lo.min(self.f_hi)
    }

    fn max(&self) -> f64 {
        self.f_lo.max(self.f_hi)
    }

    /// Point where the linear interpolant equals `tau` (requires a strict crossing).
    fn crossing(&self, tau: f64) -> f64 {
        self.lo + (self.f_lo - tau) / (self.f_lo - self.f_hi) * (self.hi - self.lo)
    }

    /// `|df/dt|` of the interpolant.
    fn slope(&self) -> f64 {
        ((self.f_hi - self.f_lo) / (self.hi - self.lo)).abs()
    }
}

/// A maximal interval of levels `(tau_lo, tau_hi)` containing no node value.
#[derive(Debug, Clone)]
struct Piece {
    tau_hi: f64,
    tau_lo: f64,
    s_lo: f64,
    s_hi: f64,
    /// Measure of the cells lying entirely above the piece.
    base: f64,
    straddlers: Vec<usize>,
}

/// Pushforward of `A(t) dt` under a piecewise-linear `f`.
#[derive(Clone)]
pub struct Distribution {
    cells: Vec<Cell>,
    density: Arc<DensityFn>,
    total: f64,
    /// Node values, strictly decreasing.
    levels: Vec<f64>,
    /// `vol{f > levels[j]}`, nondecreasing.
    level_volumes: Vec<f64>,
}

impl fmt::Debug for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distribution")
            .field("cells", &self.cells.len())
            .field("total", &self.total)
            .field("max", &self.levels.first())
            .field("min", &self.levels.last())
            .finish()
    }
}

fn integrate_density(density: &DensityFn, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    gauss_legendre_5(a, b).iter().map(|&(x, w)| w * density(x)).sum()
}

impl Distribution {
    /// Distribution of `f ≥ 0` with respect to `density(t) dt`.
    pub fn new(samples: &RadialSamples, density: Arc<DensityFn>) -> Result<Self> {
        if let Some(v) = samples.f.iter().find(|&&v| v < 0.0) {
            return precondition(format!("rearrangement needs f >= 0, found {v:e}"));
        }
        let mut cells = Vec::with_capacity(samples.t.len() - 1);
        let mut total = CompensatedSum::default();
        for i in 0..samples.t.len() - 1 {
            let (lo, hi) = (samples.t[i], samples.t[i + 1]);
            let mass = integrate_density(density.as_ref(), lo, hi);
            total.add(mass);
            cells.push(Cell { lo, hi, f_lo: samples.f[i], f_hi: samples.f[i + 1], mass });
        }
        let mut levels = samples.f.clone();
        levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
        levels.dedup();
        let mut dist = Distribution { cells, density, total: total.value(), levels, level_volumes: Vec::new() };
        dist.level_volumes = dist.levels.iter().map(|&l| dist.superlevel_volume(l)).collect();
        Ok(dist)
    }

    /// `vol(Ω)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn max_value(&self) -> f64 {
        self.levels[0]
    }

    pub fn density(&self, t: f64) -> f64 {
        (self.density)(t)
    }

    fn cell_part(&self, c: &Cell, tau: f64) -> f64 {
        if c.min() > tau {
            return c.mass;
        }
        if c.max() <= tau {
            return 0.0;
        }
        let x = c.crossing(tau);
        if c.f_lo > c.f_hi {
            integrate_density(self.density.as_ref(), c.lo, x)
        } else {
            integrate_density(self.density.as_ref(), x, c.hi)
        }
    }

    /// `vol{f > tau}`, exact for the interpolant up to the density quadrature.
    pub fn superlevel_volume(&self, tau: f64) -> f64 {
        let mut sum = CompensatedSum::default();
        for c in &self.cells {
            sum.add(self.cell_part(c, tau));
        }
        sum.value()
    }

    /// Radii where the interpolant crosses `tau`, with `|f'|` there.
    pub fn level_set(&self, tau: f64) -> Vec<(f64, f64)> {
        self.cells
            .iter()
            .filter(|c| c.min() < tau && c.max() > tau)
            .map(|c| (c.crossing(tau), c.slope()))
            .collect()
    }

    fn piece(&self, j: usize) -> Piece {
        let tau_hi = self.levels[j];
        let tau_lo = self.levels.get(j + 1).copied().unwrap_or(f64::NEG_INFINITY);
        let mut base = CompensatedSum::default();
        let mut straddlers = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            if c.min() >= tau_hi {
                base.add(c.mass);
            } else if c.max() >= tau_hi && c.min() <= tau_lo {
                straddlers.push(i);
            }
        }
        Piece {
            tau_hi,
            tau_lo,
            s_lo: self.level_volumes[j],
            s_hi: self.level_volumes.get(j + 1).copied().unwrap_or(self.total),
            base: base.value(),
            straddlers,
        }
    }

    fn piece_volume(&self, piece: &Piece, tau: f64) -> f64 {
        piece.base + piece.straddlers.iter().map(|&i| self.cell_part(&self.cells[i], tau)).sum::<f64>()
    }

    /// `Σ A(t*)` over the crossings of the piece: the area of `{f = τ}`.
    fn piece_area(&self, piece: &Piece, tau: f64) -> f64 {
        piece.straddlers.iter().map(|&i| self.density(self.cells[i].crossing(tau))).sum()
    }

    /// `-d vol{f > τ}/dτ = Σ A(t*) / |f'(t*)|` over the crossings of the piece.
    fn piece_coarea(&self, piece: &Piece, tau: f64) -> f64 {
        piece
            .straddlers
            .iter()
            .map(|&i| {
                let c = &self.cells[i];
                self.density(c.crossing(tau)) / c.slope()
            })
            .sum()
    }

    /// Level `τ` in the piece with `vol{f > τ} = s`.
    fn piece_level(&self, piece: &Piece, s: f64) -> f64 {
        if piece.tau_lo == f64::NEG_INFINITY {
            return piece.tau_hi;
        }
        let (mut lo, mut hi) = (piece.tau_lo, piece.tau_hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.piece_volume(piece, mid) >= s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn piece_index(&self, s: f64) -> usize {
        // first j with level_volumes[j+1] >= s
        let k = self.level_volumes.partition_point(|&v| v < s);
        k.saturating_sub(1).min(self.levels.len() - 1)
    }
}

/// Quadrature node on the rearranged axis with the level data there.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LevelPoint {
    pub s: f64,
    pub weight: f64,
    /// `f̄(s)`.
    pub tau: f64,
    /// `∫_{f=τ} 1/|∇f| = -1/f̄'(s)`.
    pub coarea: f64,
    /// `area{f = τ}`.
    pub area: f64,
}

/// Nonincreasing function `f̄` on `[0, vol(Ω)]` equimeasurable with `f`.
#[derive(Debug, Clone)]
pub struct RearrangedFunction {
    dist: Arc<Distribution>,
    /// Uniform grid on `[0, vol(Ω)]` and `f̄` there, for tabulation.
    pub s: Vec<f64>,
    pub values: Vec<f64>,
}

impl RearrangedFunction {
    pub fn volume(&self) -> f64 {
        self.dist.total()
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    /// `f̄(s) = inf{τ : vol{f > τ} < s}`.
    pub fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return self.dist.max_value();
        }
        let s = s.min(self.dist.total());
        let j = self.dist.piece_index(s);
        let piece = self.dist.piece(j);
        self.dist.piece_level(&piece, s)
    }

    /// `f̄'(s)`, from the coarea density of the level set.
    pub fn derivative(&self, s: f64) -> f64 {
        let j = self.dist.piece_index(s.clamp(0.0, self.dist.total()));
        let piece = self.dist.piece(j);
        let tau = self.dist.piece_level(&piece, s);
        -1.0 / self.dist.piece_coarea(&piece, tau)
    }

    /// `vol{f̄ > τ}` computed by inverting `f̄`.
    pub fn superlevel_volume(&self, tau: f64) -> f64 {
        if tau >= self.dist.max_value() {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, self.dist.total());
        if self.value(hi) > tau {
            return hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) > tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Runs `visit` at the Gauss points of every piece of `[0, vol(Ω)]`.
    pub(crate) fn for_each_gauss_point<F: FnMut(LevelPoint)>(&self, mut visit: F) {
        for j in 0..self.dist.levels.len() {
            let piece = self.dist.piece(j);
            if piece.s_hi <= piece.s_lo || piece.straddlers.is_empty() {
                continue;
            }
            for (s, w) in gauss_legendre_5(piece.s_lo, piece.s_hi) {
                let tau = self.dist.piece_level(&piece, s);
                visit(LevelPoint {
                    s,
                    weight: w,
                    tau,
                    coarea: self.dist.piece_coarea(&piece, tau),
                    area: self.dist.piece_area(&piece, tau),
                });
            }
        }
    }

    /// `∫₀^{vol Ω} f̄(s)^p ds`.
    pub fn lp_mass(&self, p: f64) -> f64 {
        let mut sum = CompensatedSum::default();
        self.for_each_gauss_point(|pt| sum.add(pt.weight * pt.tau.abs().powf(p)));
        sum.value()
    }
}

/// Decreasing rearrangement of nonnegative radial samples with respect to `density(t) dt`.
pub fn decreasing_rearrangement(samples: &RadialSamples, density: Arc<DensityFn>) -> Result<RearrangedFunction> {
    let dist = Arc::new(Distribution::new(samples, density)?);
    let cells = samples.t.len() - 1;
    let total = dist.total();
    let s: Vec<f64> = (0..=cells).map(|i| total * i as f64 / cells as f64).collect();
    let mut out = RearrangedFunction { dist, s, values: Vec::new() };
    out.values = out.s.iter().map(|&si| out.value(si)).collect();
    Ok(out)
}

/// `∫ A |f|^p` of the piecewise-linear interpolant, the quantity preserved by rearrangement.
pub fn interpolant_lp_mass(samples: &RadialSamples, density: &DensityFn, p: f64) -> f64 {
    let mut sum = CompensatedSum::default();
    for i in 0..samples.t.len() - 1 {
        let (lo, hi) = (samples.t[i], samples.t[i + 1]);
        let (a, b) = (samples.f[i], samples.f[i + 1]);
        for (x, w) in gauss_legendre_5(lo, hi) {
            let s = (x - lo) / (hi - lo);
            sum.add(w * density(x) * (a * (1.0 - s) + b * s).abs().powf(p));
        }
    }
    sum.value()
}

/// `∫ A |f'|^p` of the piecewise-linear interpolant.
pub fn interpolant_gradient_mass(samples: &RadialSamples, density: &DensityFn, p: f64) -> f64 {
    let mut sum = CompensatedSum::default();
    for i in 0..samples.t.len() - 1 {
        let (lo, hi) = (samples.t[i], samples.t[i + 1]);
        let slope = ((samples.f[i + 1] - samples.f[i]) / (hi - lo)).abs();
        sum.add(integrate_density(density, lo, hi) * slope.powf(p));
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Arc<DensityFn> {
        Arc::new(|_| 1.0)
    }

    fn disk() -> Arc<DensityFn> {
        Arc::new(|t| 2.0 * PI * t)
    }

    #[test]
    fn constant_is_its_own_rearrangement() {
        let s = RadialSamples::from_fn(1.0, 50, |_| 0.7, |_| 0.0).unwrap();
        let r = decreasing_rearrangement(&s, disk()).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.7));
        assert!((r.volume() - PI).abs() < 1e-13);
    }

    #[test]
    fn monotone_radial_reproduces_itself() {
        let s = RadialSamples::from_fn(1.0, 200, |t| 1.0 - t * t, |t| -2.0 * t).unwrap();
        let r = decreasing_rearrangement(&s, disk()).unwrap();
        for &t in &[0.1, 0.35, 0.8] {
            // vol B(t) = π t², and f̄(π t²) = f(t) exactly on the interpolant's nodes
            let node = (t * 200.0_f64).round() / 200.0;
            let v = r.value(PI * node * node);
            assert!((v - (1.0 - node * node)).abs() < 1e-12, "{t}: {v}");
        }
    }

    #[test]
    fn linear_on_interval_has_exact_distribution() {
        let s = RadialSamples::from_fn(1.0, 10, |t| 1.0 - t, |_| -1.0).unwrap();
        let d = Distribution::new(&s, unit()).unwrap();
        for c in [0.05, 0.33, 0.9] {
            assert!((d.superlevel_volume(c) - (1.0 - c)).abs() < 1e-14);
        }
        let r = decreasing_rearrangement(&s, unit()).unwrap();
        assert!((r.derivative(0.4) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_sort_oracle() {
        let f = |t: f64| 1.2 + (7.0 * t).sin() * (-t).exp();
        let s = RadialSamples::from_fn(2.0, 400, f, |_| 0.0).unwrap();
        let density = disk();
        let r = decreasing_rearrangement(&s, density.clone()).unwrap();
        // oracle: fine midpoint samples of the interpolant sorted by value
        let m = 400_000;
        let h = 2.0 / m as f64;
        let mut pairs: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let x = (i as f64 + 0.5) * h;
                let k = ((x / 2.0 * 400.0) as usize).min(399);
                let u = (x - s.t[k]) / (s.t[k + 1] - s.t[k]);
                (s.f[k] * (1.0 - u) + s.f[k + 1] * u, density(x) * h)
            })
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for p in [1.5, 2.0, 3.0, 4.0] {
            let oracle: f64 = pairs.iter().map(|(v, w)| v.powf(p) * w).sum();
            let exact = r.lp_mass(p);
            assert!((oracle - exact).abs() < 1e-8 * exact, "p={p}: {oracle} vs {exact}");
        }
        let mut acc = 0.0;
        let mut worst: f64 = 0.0;
        for (k, (v, w)) in pairs.iter().enumerate() {
            acc += w;
            if k % 997 == 0 {
                worst = worst.max((r.value(acc - 0.5 * w) - v).abs());
            }
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn rejects_negative_values() {
        let s = RadialSamples::from_fn(1.0, 10, |t| 0.5 - t, |_| -1.0).unwrap();
        assert!(decreasing_rearrangement(&s, unit()).is_err());
    }
}
