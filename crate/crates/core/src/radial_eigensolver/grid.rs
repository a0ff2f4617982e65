//! Direct minimization of the discrete Rayleigh quotient over piecewise-linear
//! functions on a uniform grid. Gives an upper bound for the shooting result.

use super::problem::{Boundary, Origin, RadialProblem};
use super::shooting::signed_pow;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_5;
use crate::spline::solve_tridiagonal;

const MAX_ITERATIONS: usize = 20_000;
const STOP_REL_CHANGE: f64 = 1e-10;

/// Minimizer found on the grid.
#[derive(Debug, Clone)]
pub struct GridMinimum {
    /// `R(f)` at the minimizer; an upper bound for the continuous eigenvalue.
    pub lambda_upper: f64,
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub iterations: usize,
}

/// Per-cell quadrature data for `∫ A |f'|^p` and `∫ A |f|^p`.
struct Discretization {
    h: f64,
    cells: usize,
    p: f64,
    /// `∫_cell A`.
    stiffness: Vec<f64>,
    /// Gauss nodes (local coordinate in [0,1]) and `w A(x)` per cell.
    mass: Vec<[(f64, f64); 5]>,
    free: Vec<bool>,
    /// Constant functions are admissible and must be projected out.
    neumann: bool,
}

impl Discretization {
    fn new(problem: &RadialProblem, cells: usize) -> Self {
        let len = problem.length();
        let h = len / cells as f64;
        let mut stiffness = Vec::with_capacity(cells);
        let mut mass = Vec::with_capacity(cells);
        for c in 0..cells {
            let lo = c as f64 * h;
            let hi = if c + 1 == cells { len } else { lo + h };
            let mut a_sum = 0.0;
            let mut nodes = [(0.0, 0.0); 5];
            for (k, (x, w)) in gauss_legendre_5(lo, hi).into_iter().enumerate() {
                let a = problem.density(x);
                a_sum += w * a;
                nodes[k] = ((x - lo) / (hi - lo), w * a);
            }
            stiffness.push(a_sum);
            mass.push(nodes);
        }
        let mut free = vec![true; cells + 1];
        if problem.origin() == Origin::Dirichlet {
            free[0] = false;
        }
        if problem.boundary() == Boundary::Dirichlet {
            free[cells] = false;
        }
        let neumann = free.iter().all(|&b| b);
        Discretization { h, cells, p: problem.p(), stiffness, mass, free, neumann }
    }

    fn numerator(&self, f: &[f64]) -> f64 {
        (0..self.cells)
            .map(|c| self.stiffness[c] * ((f[c + 1] - f[c]) / self.h).abs().powf(self.p))
            .sum()
    }

    fn denominator(&self, f: &[f64]) -> f64 {
        let mut sum = 0.0;
        for c in 0..self.cells {
            for &(s, wa) in &self.mass[c] {
                sum += wa * (f[c] * (1.0 - s) + f[c + 1] * s).abs().powf(self.p);
            }
        }
        sum
    }

    /// `∫ A |f - c|^{p-2} (f - c)` for the recentring constant.
    fn moment(&self, f: &[f64], shift: f64) -> f64 {
        let mut sum = 0.0;
        for c in 0..self.cells {
            for &(s, wa) in &self.mass[c] {
                sum += wa * signed_pow(f[c] * (1.0 - s) + f[c + 1] * s - shift, self.p - 1.0);
            }
        }
        sum
    }

    /// Shift `f` by the constant minimizing `∫ A |f - c|^p`.
    fn recentre(&self, f: &mut [f64]) {
        let (mut lo, mut hi) = f.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.moment(f, mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = 0.5 * (lo + hi);
        f.iter_mut().for_each(|v| *v -= c);
    }

    fn quotient(&self, f: &[f64]) -> f64 {
        self.numerator(f) / self.denominator(f)
    }

    /// Gradients of numerator and denominator, each divided by `p`.
    fn gradients(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.cells + 1;
        let mut gn = vec![0.0; n];
        let mut gd = vec![0.0; n];
        for c in 0..self.cells {
            let d = (f[c + 1] - f[c]) / self.h;
            let flux = self.stiffness[c] * signed_pow(d, self.p - 1.0) / self.h;
            gn[c] -= flux;
            gn[c + 1] += flux;
            for &(s, wa) in &self.mass[c] {
                let u = signed_pow(f[c] * (1.0 - s) + f[c + 1] * s, self.p - 1.0) * wa;
                gd[c] += u * (1.0 - s);
                gd[c + 1] += u * s;
            }
        }
        (gn, gd)
    }

    /// Regularized weighted Laplacian with frozen coefficients `A |f'|^{p-2}`.
    fn preconditioner(&self, f: &[f64], shift: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.cells + 1;
        let slopes: Vec<f64> = (0..self.cells).map(|c| ((f[c + 1] - f[c]) / self.h).abs()).collect();
        let typical = slopes.iter().cloned().fold(0.0, f64::max).max(1e-300);
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for c in 0..self.cells {
            let eta = 1e-3 * typical;
            let kappa = self.stiffness[c] * (slopes[c] * slopes[c] + eta * eta).powf(0.5 * (self.p - 2.0)) / (self.h * self.h);
            diag[c] += kappa;
            diag[c + 1] += kappa;
            upper[c] -= kappa;
            lower[c + 1] -= kappa;
        }
        if shift > 0.0 {
            for c in 0..self.cells {
                let m: f64 = self.mass[c].iter().map(|&(_, wa)| wa).sum();
                diag[c] += 0.5 * shift * m;
                diag[c + 1] += 0.5 * shift * m;
            }
        }
        for i in 0..n {
            if !self.free[i] {
                diag[i] = 1.0;
                lower[i] = 0.0;
                upper[i] = 0.0;
                if i > 0 {
                    upper[i - 1] = 0.0;
                }
                if i + 1 < n {
                    lower[i + 1] = 0.0;
                }
            }
        }
        (lower, diag, upper)
    }

    fn normalize(&self, f: &mut [f64]) {
        let m = f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m > 0.0 {
            f.iter_mut().for_each(|v| *v /= m);
        }
    }
}

/// Minimizes the discrete p-Rayleigh quotient with a preconditioned gradient method.
pub fn rayleigh_minimize_grid(problem: &RadialProblem, cells: usize) -> Result<GridMinimum> {
    if cells < 64 {
        return Err(Error::Precondition(format!("grid minimizer needs at least 64 cells, got {cells}")));
    }
    let disc = Discretization::new(problem, cells);
    let len = problem.length();
    let t: Vec<f64> = (0..=cells).map(|i| len * i as f64 / cells as f64).collect();
    let mut f: Vec<f64> = t
        .iter()
        .map(|&x| {
            let s = x / len;
            match (problem.origin(), problem.boundary()) {
                (Origin::Dirichlet, Boundary::Dirichlet) => (std::f64::consts::PI * s).sin(),
                (Origin::Dirichlet, Boundary::Neumann) => (0.5 * std::f64::consts::PI * s).sin(),
                (_, Boundary::Dirichlet) => (0.5 * std::f64::consts::PI * s).cos(),
                (_, Boundary::Neumann) => (std::f64::consts::PI * s).cos(),
            }
        })
        .collect();
    for (i, v) in f.iter_mut().enumerate() {
        if !disc.free[i] {
            *v = 0.0;
        }
    }
    if disc.neumann {
        disc.recentre(&mut f);
    }
    disc.normalize(&mut f);
    let mut r = disc.quotient(&f);
    for it in 1..=MAX_ITERATIONS {
        let (gn, gd) = disc.gradients(&f);
        let mut resid: Vec<f64> = gn.iter().zip(&gd).map(|(a, b)| a - r * b).collect();
        for (i, v) in resid.iter_mut().enumerate() {
            if !disc.free[i] {
                *v = 0.0;
            }
        }
        let shift = if disc.neumann { 1e-8 * r } else { 0.0 };
        let (lower, diag, upper) = disc.preconditioner(&f, shift);
        let dir = solve_tridiagonal(&lower, &diag, &upper, &resid);
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-12 {
            let mut trial: Vec<f64> = f.iter().zip(&dir).map(|(a, d)| a - alpha * d).collect();
            if disc.neumann {
                disc.recentre(&mut trial);
            }
            disc.normalize(&mut trial);
            let rt = disc.quotient(&trial);
            if rt.is_finite() && rt < r {
                accepted = Some((trial, rt));
                break;
            }
            alpha *= 0.5;
        }
        let Some((trial, rt)) = accepted else {
            return Ok(GridMinimum { lambda_upper: r, t, f, iterations: it });
        };
        let change = (r - rt) / r;
        f = trial;
        r = rt;
        if change < STOP_REL_CHANGE {
            return Ok(GridMinimum { lambda_upper: r, t, f, iterations: it });
        }
    }
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, last: r })
}

/// p-Rayleigh quotient of the piecewise-linear interpolant of uniform samples.
pub fn p_rayleigh_quotient(f: &[f64], problem: &RadialProblem) -> Result<f64> {
    if f.len() < 3 {
        return Err(Error::Precondition("need at least three samples".into()));
    }
    let disc = Discretization::new(problem, f.len() - 1);
    let den = disc.denominator(f);
    if !(den > 0.0) {
        return Err(Error::Precondition("Rayleigh quotient of the zero function".into()));
    }
    Ok(disc.numerator(f) / den)
}
