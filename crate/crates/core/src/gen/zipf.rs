//! Zipf ranks in `[1, n]` by rejection-inversion (Hörmann & Derflinger).
//! O(1) expected draws per sample for every exponent `s > 0`.

use rand::Rng;

#[derive(Clone, Copy, Debug)]
pub struct Zipf {
    n: f64,
    s: f64,
    h_x1: f64,
    h_n: f64,
    cut: f64,
}

impl Zipf {
    pub fn new(n: u64, s: f64) -> Option<Self> {
        if n == 0 || !(s > 0.0) || !s.is_finite() {
            return None;
        }
        Some(Zipf {
            n: n as f64,
            s,
            h_x1: h_integral(1.5, s) - 1.0,
            h_n: h_integral(n as f64 + 0.5, s),
            cut: 2.0 - h_integral_inv(h_integral(2.5, s) - h(2.0, s), s),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        loop {
            let u = self.h_n + rng.gen::<f64>() * (self.h_x1 - self.h_n);
            let x = h_integral_inv(u, self.s);
            let k = x.clamp(1.0, self.n).round();
            // accept k with probability h(k) / (H(k + 1/2) - H(k - 1/2))
            if k - x <= self.cut || u >= h_integral(k + 0.5, self.s) - h(k, self.s) {
                return k as u64;
            }
        }
    }

    /// Probability of rank `k`, `k^-s / H_{n,s}`, by direct summation.
    pub fn pmf(n: u64, s: f64, k: u64) -> f64 {
        let norm: f64 = (1..=n).map(|i| (i as f64).powf(-s)).sum();
        (k as f64).powf(-s) / norm
    }
}

fn h(x: f64, s: f64) -> f64 {
    (-s * x.ln()).exp()
}

/// `H(x) = (x^(1-s) - 1) / (1 - s)`, continuous through `s = 1` where it is `ln x`.
fn h_integral(x: f64, s: f64) -> f64 {
    let lx = x.ln();
    helper2((1.0 - s) * lx) * lx
}

fn h_integral_inv(x: f64, s: f64) -> f64 {
    let mut t = x * (1.0 - s);
    if t < -1.0 {
        t = -1.0;
    }
    (helper1(t) * x).exp()
}

/// `ln(1 + x) / x`, accurate near zero.
fn helper1(x: f64) -> f64 {
    if x.abs() > 1e-8 {
        x.ln_1p() / x
    } else {
        1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x))
    }
}

/// `(e^x - 1) / x`, accurate near zero.
fn helper2(x: f64) -> f64 {
    if x.abs() > 1e-8 {
        x.exp_m1() / x
    } else {
        1.0 + x * 0.5 * (1.0 + x / 3.0 * (1.0 + 0.25 * x))
    }
}
