#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wamcyl::Point3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform points in the cylinder by rejection.
pub fn random_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<Point3> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if x * x + y * y <= 1.0 {
            out.push(Point3::new(x, y, rng.gen_range(-1.0..1.0)));
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on [-1, 1] by bisection on `P_q`.
///
/// Deliberately different from the library's Newton iteration.
pub fn legendre_rule(q: usize) -> (Vec<f64>, Vec<f64>) {
    let p = |x: f64| -> (f64, f64) {
        // (P_q(x), P_{q-1}(x))
        let (mut a, mut b) = (1.0, x);
        if q == 0 {
            return (1.0, 0.0);
        }
        for k in 1..q {
            let c = ((2 * k + 1) as f64 * x * b - k as f64 * a) / (k + 1) as f64;
            a = b;
            b = c;
        }
        (b, a)
    };
    let mut nodes = Vec::with_capacity(q);
    let mut weights = Vec::with_capacity(q);
    // Roots of P_q are separated by the Chebyshev-like brackets below.
    let samples = 200 * q;
    let grid: Vec<f64> = (0..=samples)
        .map(|i| -1.0 + 2.0 * i as f64 / samples as f64)
        .collect();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (p(lo).0, p(hi).0);
        if flo == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if p(mid).0.signum() == p(lo).0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        let (_, pm1) = p(x);
        // w = 2 (1 - x^2) / (q P_{q-1}(x))^2
        nodes.push(x);
        weights.push(2.0 * (1.0 - x * x) / (q as f64 * pm1).powi(2));
    }
    assert_eq!(nodes.len(), q, "bracketing missed a root");
    (nodes, weights)
}

/// Bessel `J_1` by its power series (adequate for |x| < 20).
pub fn bessel_j1(x: f64) -> f64 {
    let mut term = x / 2.0;
    let mut sum = term;
    for k in 1..80 {
        term *= -(x * x / 4.0) / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}
