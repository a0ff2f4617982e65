use super::problem::{Boundary, Origin, RadialProblem};
use super::EigenResult;
use crate::error::{Error, Result};
use crate::ode::{integrate, Control, OdeOptions, Step};

/// Offset of the first integration point from a degenerate end, relative to `T`.
pub const POLE_OFFSET: f64 = 1e-6;
/// Samples in the returned eigenfunction (`GRID_CELLS + 1` points).
pub const GRID_CELLS: usize = 4096;
/// Bisection stops when the bracket width relative to `λ` drops below this.
pub const DEFAULT_TOL: f64 = 1e-8;

const GROWTH_CAP: f64 = 1.152_921_504_606_847e18; // 2^60

/// Which eigenvalue the shooting predicate isolates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Ground state with a Dirichlet end: too high once `f` reaches 0.
    FirstZero,
    /// Ground state with Dirichlet origin and Neumann outer end: too high once the flux turns.
    FluxTurn,
    /// First nontrivial Neumann eigenvalue: too high once the flux turns after the first zero.
    AfterZeroFluxTurn,
}

pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(e)
    }
}

struct Shooter<'a> {
    problem: &'a RadialProblem,
    mode: Mode,
    p: f64,
    t_start: f64,
    t_stop: f64,
    opts: OdeOptions,
}

impl<'a> Shooter<'a> {
    fn new(problem: &'a RadialProblem) -> Self {
        let mode = match (problem.origin(), problem.boundary()) {
            (_, Boundary::Dirichlet) => Mode::FirstZero,
            (Origin::Dirichlet, Boundary::Neumann) => Mode::FluxTurn,
            (_, Boundary::Neumann) => Mode::AfterZeroFluxTurn,
        };
        let t_len = problem.length();
        let delta = t_len * POLE_OFFSET;
        let t_start = match problem.origin() {
            Origin::Pole { .. } => delta,
            Origin::Neumann | Origin::Dirichlet => 0.0,
        };
        let t_stop = if problem.boundary() == Boundary::Neumann && problem.closes_at_end() {
            t_len - delta
        } else {
            t_len
        };
        Shooter { problem, mode, p: problem.p(), t_start, t_stop, opts: OdeOptions::default() }
    }

    fn initial_state(&self, lambda: f64) -> [f64; 2] {
        let p = self.p;
        match self.problem.origin() {
            Origin::Dirichlet => [0.0, self.problem.density(0.0)],
            origin => {
                let order = origin.flux_order();
                let d = self.t_start;
                if d == 0.0 {
                    return [1.0, 0.0];
                }
                let a = self.problem.density(d);
                let w = -lambda * a * d / order;
                let f = 1.0 - (p - 1.0) / p * (lambda / order).powf(1.0 / (p - 1.0)) * d.powf(p / (p - 1.0));
                [f, w]
            }
        }
    }

    fn rhs(&self, lambda: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        let q = 1.0 / (self.p - 1.0);
        let pm1 = self.p - 1.0;
        move |t, y| {
            let a = self.problem.density(t);
            [signed_pow(y[1] / a, q), -lambda * a * signed_pow(y[0], pm1)]
        }
    }

    /// `true` when `lambda` lies above the target eigenvalue.
    fn too_high(&self, lambda: f64) -> Result<bool> {
        let mode = self.mode;
        let mut crossed = false;
        let mut verdict = false;
        integrate(
            self.rhs(lambda),
            self.t_start,
            self.initial_state(lambda),
            self.t_stop,
            &self.opts,
            lambda,
            |s: &Step<2>| {
                match mode {
                    Mode::FirstZero => {
                        if s.y1[0] <= 0.0 {
                            verdict = true;
                        }
                    }
                    Mode::FluxTurn => {
                        if s.y1[1] <= 0.0 {
                            verdict = true;
                        }
                    }
                    Mode::AfterZeroFluxTurn => {
                        if s.y1[0] <= 0.0 {
                            crossed = true;
                        }
                        if crossed && s.y1[1] >= 0.0 {
                            verdict = true;
                        }
                    }
                }
                if verdict {
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )?;
        Ok(verdict)
    }

    fn initial_guess(&self) -> f64 {
        let p = self.p;
        let pi_p = 2.0 * std::f64::consts::PI / (p * (std::f64::consts::PI / p).sin());
        let span = match self.mode {
            Mode::AfterZeroFluxTurn => pi_p / self.problem.length(),
            _ => pi_p / (2.0 * self.problem.length()),
        };
        (p - 1.0) * span.powf(p)
    }

    fn bracket(&self, tol: f64) -> Result<(f64, f64, usize)> {
        let start = self.initial_guess();
        let mut lo = 0.0;
        let mut hi = start;
        let mut shots = 0;
        loop {
            shots += 1;
            if self.too_high(hi)? {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if hi > start * GROWTH_CAP {
                return Err(Error::Bracket {
                    lambda_hi: hi,
                    detail: format!("{}: shooting never overshot", self.problem.label()),
                });
            }
        }
        while (hi - lo) > tol * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            shots += 1;
            if self.too_high(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi, shots))
    }

    /// Integrates at `lambda` and samples on the uniform grid.
    fn sample(&self, lambda: f64, cells: usize) -> Result<Samples> {
        let t_len = self.problem.length();
        let h = t_len / cells as f64;
        let q = 1.0 / (self.p - 1.0);
        let mut t = Vec::with_capacity(cells + 1);
        let mut f = vec![f64::NAN; cells + 1];
        let mut w = vec![f64::NAN; cells + 1];
        for i in 0..=cells {
            t.push(if i == cells { t_len } else { i as f64 * h });
        }
        let y0 = self.initial_state(lambda);
        match self.problem.origin() {
            Origin::Dirichlet => {
                f[0] = 0.0;
                w[0] = self.problem.density(0.0);
            }
            _ => {
                f[0] = 1.0;
                w[0] = 0.0;
            }
        }
        let mut next = 1;
        let mut first_zero = None;
        let mut last_step: Option<Step<2>> = None;
        integrate(self.rhs(lambda), self.t_start, y0, self.t_stop, &self.opts, lambda, |s: &Step<2>| {
            while next <= cells && t[next] <= s.t1 {
                f[next] = s.hermite(0, t[next]);
                w[next] = s.hermite(1, t[next]);
                next += 1;
            }
            if first_zero.is_none() && s.y0[0] > 0.0 && s.y1[0] <= 0.0 && s.t1 < self.t_stop {
                first_zero = Some(s.root(0));
            }
            last_step = Some(*s);
            Control::Continue
        })?;
        // points beyond the last integration point (degenerate outer end)
        if let Some(s) = last_step {
            let a = self.problem.density(s.t1);
            let slope = signed_pow(s.y1[1] / a, q);
            while next <= cells {
                let gap = t[next] - s.t1;
                f[next] = s.y1[0] + (self.p - 1.0) / self.p * gap * slope;
                w[next] = if t[next] >= t_len { 0.0 } else { s.y1[1] };
                next += 1;
            }
        }
        let fprime: Vec<f64> = t
            .iter()
            .zip(&w)
            .map(|(&ti, &wi)| {
                let a = self.problem.density(ti);
                if wi == 0.0 || a <= 0.0 {
                    0.0
                } else {
                    signed_pow(wi / a, q)
                }
            })
            .collect();
        Ok(Samples { t, f, fprime, flux: w, first_zero })
    }
}

struct Samples {
    t: Vec<f64>,
    f: Vec<f64>,
    fprime: Vec<f64>,
    flux: Vec<f64>,
    first_zero: Option<f64>,
}

/// Interior sign changes of sampled values (end samples excluded).
pub(crate) fn count_sign_changes(f: &[f64]) -> usize {
    if f.len() < 3 {
        return 0;
    }
    let inner = &f[1..f.len() - 1];
    let mut count = 0;
    let mut prev: f64 = 0.0;
    for &v in inner {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && v.signum() != prev.signum() {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Integral of uniformly sampled values from `t_0` to every `t_i`, fourth order.
pub(crate) fn cumulative_simpson(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            out[1] = 0.5 * h * (values[0] + values[1]);
        }
        return out;
    }
    for i in 1..n {
        if i % 2 == 0 {
            out[i] = out[i - 2] + h / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
        } else if i + 1 < n {
            out[i] = out[i - 1] + h / 12.0 * (5.0 * values[i - 1] + 8.0 * values[i] - values[i + 1]);
        } else {
            out[i] = out[i - 1] + h / 12.0 * (-values[i - 2] + 8.0 * values[i - 1] + 5.0 * values[i]);
        }
    }
    out
}

/// Maximum defect of `w(t) = w(0) - λ ∫₀ᵗ A |f|^{p-2} f`, relative to `max |w|`.
pub(crate) fn flux_identity_defect(problem: &RadialProblem, lambda: f64, t: &[f64], f: &[f64], w: &[f64]) -> f64 {
    let h = t[1] - t[0];
    let pm1 = problem.p() - 1.0;
    let integrand: Vec<f64> = t.iter().zip(f).map(|(&ti, &fi)| problem.density(ti) * signed_pow(fi, pm1)).collect();
    let cum = cumulative_simpson(&integrand, h);
    let scale = w.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..t.len() {
        let d = (w[i] - w[0] + lambda * cum[i]).abs() / scale;
        worst = worst.max(d);
    }
    worst
}

pub(crate) fn solve(problem: &RadialProblem, tol: f64, cells: usize) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("bisection tolerance must be positive, got {tol}")));
    }
    let shooter = Shooter::new(problem);
    let (lo, hi, shots) = shooter.bracket(tol)?;
    let lambda = 0.5 * (lo + hi);
    let s = shooter.sample(lambda, cells.max(8))?;
    if s.f.iter().chain(&s.flux).any(|v| !v.is_finite()) {
        return Err(Error::Evaluation(format!("{}: non-finite eigenfunction samples", problem.label())));
    }
    let residual = flux_identity_defect(problem, lambda, &s.t, &s.f, &s.flux);
    let zero_count = count_sign_changes(&s.f);
    let nodal_radius = match shooter.mode {
        Mode::AfterZeroFluxTurn => s.first_zero,
        _ => None,
    };
    Ok(EigenResult {
        lambda,
        bracket_width: hi - lo,
        t: s.t,
        f: s.f,
        fprime: s.fprime,
        flux: s.flux,
        zero_count,
        residual,
        nodal_radius,
        shots,
    })
}
