//! Clamped cubic spline with prescribed end slopes.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ClampedSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl ClampedSpline {
    /// Builds the spline through `(x, y)` with `s'(x_0) = slope_start` and
    /// `s'(x_n) = slope_end`. Knots must be strictly increasing.
    pub fn new(x: Vec<f64>, y: Vec<f64>, slope_start: f64, slope_end: f64) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Evaluation("spline needs at least two matching knots".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Evaluation("spline knots must be strictly increasing".into()));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];

        diag[0] = 2.0 * h[0];
        upper[0] = h[0];
        rhs[0] = 6.0 * ((y[1] - y[0]) / h[0] - slope_start);
        for i in 1..n - 1 {
            lower[i] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            upper[i] = h[i];
            rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        lower[n - 1] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (slope_end - (y[n - 1] - y[n - 2]) / h[n - 2]);

        let m = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        Ok(ClampedSpline { x, y, m })
    }

    pub fn start(&self) -> f64 {
        self.x[0]
    }

    pub fn end(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Value, first and second derivative at `t` (clamped to the knot range).
    pub fn eval(&self, t: f64) -> [f64; 3] {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(n - 2),
            Err(k) => k.saturating_sub(1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (mi, mj) = (self.m[i], self.m[i + 1]);
        let value = a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * mi + (b * b * b - b) * mj) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) * h * mi / 6.0
            + (3.0 * b * b - 1.0) * h * mj / 6.0;
        let d2 = a * mi + b * mj;
        [value, d1, d2]
    }
}

/// Thomas algorithm. `lower[0]` and `upper[n-1]` are ignored.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let x: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let s = ClampedSpline::new(x, y, df(0.0), df(3.0)).unwrap();
        for t in [0.05, 0.77, 1.5, 2.99] {
            let [v, d1, d2] = s.eval(t);
            assert!((v - f(t)).abs() < 1e-12);
            assert!((d1 - df(t)).abs() < 1e-11);
            assert!((d2 - 6.0 * t).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_unsorted_knots() {
        assert!(ClampedSpline::new(vec![0.0, 1.0, 1.0], vec![0.0; 3], 1.0, 1.0).is_err());
    }
}
