//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with step observers.
//!
//! Only what the shooting solver needs: fixed-size state, mixed
//! relative/absolute error control, and an observer that sees every accepted
//! step (for zero detection and sampling) and may stop the integration.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator tolerances and step limits.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 0.0,
            h_min: 1e-15,
            max_steps: 2_000_000,
        }
    }
}

/// One accepted step, handed to the observer.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub dy0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub dy1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant of component `k` at `t`.
    pub fn hermite(&self, k: usize, t: f64) -> f64 {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y0[k] + h10 * h * self.dy0[k] + h01 * self.y1[k] + h11 * h * self.dy1[k]
    }

    /// Locates a root of component `k` inside the step by bisection on the
    /// Hermite interpolant. Requires a sign change between the endpoints.
    pub fn root(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = (self.t0, self.t1);
        let sign_lo = self.y0[k].signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.hermite(k, mid).signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Observer verdict after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Outcome of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub stopped: bool,
    pub steps: usize,
    /// Step size suggested for a continuation.
    pub h_next: f64,
}

/// Integrates `rhs` from `t0` to `t_end`.
///
/// `label` is reported in stiffness diagnostics (the shooting solver passes the
/// eigenvalue parameter).
pub fn integrate<const N: usize, F, O>(
    mut rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    label: f64,
    mut observer: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(&Step<N>) -> Control,
{
    let span = t_end - t0;
    if span <= 0.0 {
        return Ok(Outcome { t: t0, y: y0, stopped: false, steps: 0, h_next: opts.h_init });
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = if opts.h_init > 0.0 {
        opts.h_init.min(span)
    } else {
        initial_step(&mut rhs, t, &y, &k1, span, opts)
    };
    let mut steps = 0;
    let mut err_prev: f64 = 1e-4;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Stiffness { t, step: h, lambda: label });
        }
        let last = t + h >= t_end || (t_end - (t + h)) < 1e-14 * span;
        let h_try = if last { t_end - t } else { h };

        let (y_new, k7, err) = dopri_step(&mut rhs, t, &y, &k1, h_try, opts);
        if !err.is_finite() {
            h *= 0.25;
            if h < opts.h_min * t.abs().max(1.0) {
                return Err(Error::Stiffness { t, step: h, lambda: label });
            }
            continue;
        }
        if err <= 1.0 {
            let t_new = if last { t_end } else { t + h_try };
            let step = Step { t0: t, y0: y, dy0: k1, t1: t_new, y1: y_new, dy1: k7 };
            steps += 1;
            t = t_new;
            y = y_new;
            k1 = k7;
            // PI controller (Hairer's beta = 0.04)
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.04);
            err_prev = err.max(1e-4);
            let grow = fac.clamp(0.2, 10.0);
            if !last {
                h = h_try * grow;
            } else {
                h = h.max(h_try);
            }
            if observer(&step) == Control::Stop {
                return Ok(Outcome { t, y, stopped: true, steps, h_next: h });
            }
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h = h_try * fac;
            if h < opts.h_min * t.abs().max(1.0) {
                return Err(Error::Stiffness { t, step: h, lambda: label });
            }
        }
    }
    Ok(Outcome { t, y, stopped: false, steps, h_next: h })
}

fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    span: f64,
    opts: &OdeOptions,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut d0: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    d0 = (d0 / N as f64).sqrt();
    d1 = (d1 / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * k1[i];
    }
    let k2 = rhs(t + h0, &y1);
    let mut d2: f64 = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs();
        d2 += ((k2[i] - k1[i]) / sc).powi(2);
    }
    d2 = (d2 / N as f64).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

fn dopri_step<const N: usize, F>(
    rhs: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
    opts: &OdeOptions,
) -> ([f64; N], [f64; N], f64)
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut tmp = [0.0; N];
    for i in 0..N {
        tmp[i] = y[i] + h * A21 * k1[i];
    }
    let k2 = rhs(t + C2 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
    }
    let k3 = rhs(t + C3 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
    }
    let k4 = rhs(t + C4 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
    }
    let k5 = rhs(t + C5 * h, &tmp);
    for i in 0..N {
        tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
    }
    let k6 = rhs(t + h, &tmp);
    let mut y_new = [0.0; N];
    for i in 0..N {
        y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
    }
    let k7 = rhs(t + h, &y_new);
    let mut err: f64 = 0.0;
    for i in 0..N {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        err += (e / sc).powi(2);
    }
    (y_new, k7, (err / N as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_to_tolerance() {
        let opts = OdeOptions::default();
        let out = integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &opts,
            0.0,
            |_| Control::Continue,
        )
        .unwrap();
        assert!((out.y[0] - 10f64.sin()).abs() < 1e-8);
        assert!((out.y[1] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn observer_root_location() {
        let opts = OdeOptions::default();
        let mut root = None;
        integrate(
            |_t, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            3.0,
            &opts,
            0.0,
            |s| {
                if s.y1[0] <= 0.0 {
                    root = Some(s.root(0));
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        )
        .unwrap();
        assert!((root.unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-7);
    }
}
