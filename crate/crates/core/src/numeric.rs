//! Small numerical helpers: Gauss–Legendre rules and adaptive integration.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|p| p.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_rule(n)))
        .clone()
}

fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// P_n(z) and P_n'(z) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Fixed `n`-point Gauss–Legendre quadrature of `f` over [a, b].
pub fn gl_integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (x, w) = (&rule.0, &rule.1);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(m + h * xi);
    }
    s * h
}

/// Adaptive Gauss–Legendre integration: compares the `n`-point rule on an
/// interval with the sum over its halves and bisects until they agree to `tol`.
pub fn adaptive_gl<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize, tol: f64) -> f64 {
    fn rec<F: FnMut(f64) -> f64>(
        f: &mut F,
        a: f64,
        b: f64,
        whole: f64,
        n: usize,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = gl_integrate(&mut *f, a, m, n);
        let right = gl_integrate(&mut *f, m, b, n);
        let both = left + right;
        if (both - whole).abs() <= tol || depth >= 40 {
            return both;
        }
        rec(f, a, m, left, n, 0.5 * tol, depth + 1) + rec(f, m, b, right, n, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    let whole = gl_integrate(&mut f, a, b, n);
    rec(&mut f, a, b, whole, n, tol, 0)
}
