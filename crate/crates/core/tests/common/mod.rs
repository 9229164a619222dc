//! Independent numerical oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

/// Tanh-sinh quadrature of `f` over `[a, b]`, refining the step until two
/// levels agree. Integrable endpoint singularities are fine; interior ones
/// must be split off by the caller.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let t_max = 4.0;
    let node = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let c = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (c * c);
        // distance to the nearer endpoint without cancellation
        let d = 2.0 * half / (1.0 + (2.0 * u.abs()).exp());
        let x = if u >= 0.0 { b - d } else { a + d };
        let v = f(x);
        if v.is_finite() {
            v * w
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1.0;
    while k * h <= t_max {
        sum += node(k * h) + node(-k * h);
        k += 1.0;
    }
    let mut est = sum * h * half;
    for _ in 0..10 {
        h *= 0.5;
        let mut t = h;
        while t <= t_max {
            sum += node(t) + node(-t);
            t += 2.0 * h;
        }
        let next = sum * h * half;
        let done = (next - est).abs() <= 1e-14 * next.abs().max(1.0);
        est = next;
        if done {
            break;
        }
    }
    est
}

/// `int_{-1}^{1} f(x) sqrt(1 - x^2) log|x - y| dx`, split at `y`.
pub fn log_weighted<F: Fn(f64) -> f64>(f: F, y: f64) -> f64 {
    let g = |x: f64| f(x) * (1.0 - x * x).max(0.0).sqrt() * (x - y).abs().ln();
    tanh_sinh(g, -1.0, y) + tanh_sinh(g, y, 1.0)
}

/// `K f(y) = -(1/pi) int log|x - y| f(x) phi(x) dx` by quadrature.
pub fn k_oracle<F: Fn(f64) -> f64>(f: F, y: f64) -> f64 {
    -log_weighted(f, y) / PI
}

/// `(1/pi) int h(x, y) f(x) phi(x) dx` by quadrature, split at 0 for kinks.
pub fn h_oracle<H: Fn(f64, f64) -> f64, F: Fn(f64) -> f64>(h: H, f: F, y: f64) -> f64 {
    let g = |x: f64| h(x, y) * f(x) * (1.0 - x * x).max(0.0).sqrt();
    (tanh_sinh(g, -1.0, 0.0) + tanh_sinh(g, 0.0, 1.0)) / PI
}

/// Small deterministic generator for test data.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
