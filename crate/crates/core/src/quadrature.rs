//! Quadrature rules shared by the geometry and spectral modules.

/// Five-point Gauss–Legendre nodes on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];

const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Gauss–Legendre nodes and weights mapped onto `[a, b]`.
pub fn gauss_legendre_5(a: f64, b: f64) -> [(f64, f64); 5] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 5];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = (mid + half * GL5_NODES[k], half * GL5_WEIGHTS[k]);
    }
    out
}

/// Composite five-point Gauss–Legendre rule on `cells` equal panels.
///
/// The integrand is never evaluated at `a` or `b`, which lets callers integrate
/// quantities with removable singularities at the poles of a warped product.
pub fn gauss_composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cells: usize) -> f64 {
    let cells = cells.max(1);
    let h = (b - a) / cells as f64;
    let mut sum = CompensatedSum::default();
    for i in 0..cells {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == cells { b } else { lo + h };
        let mut cell = 0.0;
        for (x, w) in gauss_legendre_5(lo, hi) {
            cell += w * f(x);
        }
        sum.add(cell);
    }
    sum.value()
}

/// Neumaier compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral of uniformly spaced samples with spacing `h`.
///
/// Composite Simpson when the number of panels is even, otherwise Simpson on
/// all but the last three panels plus the 3/8 rule on those.
pub fn simpson_samples(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let panels = n - 1;
            if panels.is_multiple_of(2) {
                simpson_even(values, h)
            } else {
                let split = n - 4;
                let tail = &values[split..];
                simpson_even(&values[..=split], h)
                    + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3])
            }
        }
    }
}

fn simpson_even(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 3 {
        return if n == 2 { 0.5 * h * (values[0] + values[1]) } else { 0.0 };
    }
    let mut sum = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    sum * h / 3.0
}

/// Running trapezoid integral of uniformly spaced samples; `out[0] = 0`.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in values.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid_samples(values: &[f64], h: f64) -> f64 {
    cumulative_trapezoid(values, h).last().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_is_exact_for_degree_nine() {
        let v = gauss_composite(|x| x.powi(9) + 3.0 * x.powi(4), 0.0, 2.0, 1);
        let exact = 2f64.powi(10) / 10.0 + 3.0 * 2f64.powi(5) / 5.0;
        assert!((v - exact).abs() < 1e-11 * exact);
    }

    #[test]
    fn adaptive_simpson_hits_tolerance() {
        let v = adaptive_simpson(|t| 4.0 * PI * t.sin().powi(2), 0.0, PI / 2.0, 1e-12);
        assert!((v - PI * PI).abs() < 1e-11);
    }

    #[test]
    fn simpson_samples_odd_and_even_panel_counts() {
        for n in [5usize, 6, 101, 102] {
            let h = 1.0 / (n - 1) as f64;
            let vals: Vec<f64> = (0..n).map(|i| (i as f64 * h).powi(3)).collect();
            assert!((simpson_samples(&vals, h) - 0.25).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn cumulative_trapezoid_starts_at_zero() {
        let c = cumulative_trapezoid(&[1.0, 1.0, 1.0], 0.5);
        assert_eq!(c, vec![0.0, 0.5, 1.0]);
    }
}
