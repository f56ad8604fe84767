use std::f64::consts::PI;
use std::sync::OnceLock;

/// Number of series terms; the ratio of successive terms is at most 1/4.
const TERMS: usize = 40;

/// `ζ(2k) / (2π)^{2k} / (k (2k+1))` for k = 1..=TERMS.
fn coefficients() -> &'static [f64; TERMS] {
    static C: OnceLock<[f64; TERMS]> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = [0.0; TERMS];
        for (i, ci) in c.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            let s = 2.0 * k;
            *ci = zeta(s) / (2.0 * PI).powf(s) / (k * (2.0 * k + 1.0));
        }
        c
    })
}

/// Riemann zeta for real `s >= 2`: partial sum plus an Euler–Maclaurin tail.
fn zeta(s: f64) -> f64 {
    const M: f64 = 20.0;
    let mut sum = 0.0;
    for m in 1..20 {
        sum += (m as f64).powf(-s);
    }
    sum + M.powf(1.0 - s) / (s - 1.0) + 0.5 * M.powf(-s) + s / 12.0 * M.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * M.powf(-s - 3.0)
}

/// Clausen function `Cl₂(θ) = −∫₀^θ ln|2 sin(t/2)| dt`.
pub fn clausen2(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    // Reduce to [-π, π], then use oddness.
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    let (sign, t) = if t < 0.0 { (-1.0, -t) } else { (1.0, t) };
    if t == 0.0 || t == PI {
        return 0.0;
    }
    let t2 = t * t;
    let mut p = t;
    let mut s = 0.0;
    for c in coefficients() {
        p *= t2;
        s += c * p;
    }
    sign * (t - t * t.ln() + s)
}

/// Milnor's Lobachevsky function `Л(x) = −∫₀ˣ ln|2 sin t| dt`; odd and π-periodic.
pub fn lobachevsky(x: f64) -> f64 {
    0.5 * clausen2(2.0 * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_gl;
    use proptest::prelude::*;

    /// `−∫₀ˣ ln(2 sin t) dt` for x in (0, π), integrating the log singularity
    /// at 0 analytically.
    fn oracle(x: f64) -> f64 {
        // ln(2 sin t) = ln(2t) + ln(sin t / t)
        let singular = x * (2.0 * x).ln() - x;
        let smooth = adaptive_gl(
            |t| if t == 0.0 { 0.0 } else { (t.sin() / t).ln() },
            0.0,
            x,
            16,
            1e-14,
        );
        -(singular + smooth)
    }

    #[test]
    fn special_values() {
        assert!(lobachevsky(0.0).abs() < 1e-10);
        assert!(lobachevsky(PI / 2.0).abs() < 1e-10);
        assert!(lobachevsky(PI).abs() < 1e-10);
        assert!((lobachevsky(PI / 6.0) - 0.5074708032).abs() < 1e-10);
        assert!((lobachevsky(PI / 6.0) - oracle(PI / 6.0)).abs() < 1e-10);
    }

    #[test]
    fn maximum_at_pi_over_six() {
        let m = lobachevsky(PI / 6.0);
        for d in [-1e-3, 1e-3] {
            assert!(lobachevsky(PI / 6.0 + d) < m);
        }
    }

    proptest! {
        #[test]
        fn matches_quadrature(x in 0.001f64..3.1) {
            prop_assert!((lobachevsky(x) - oracle(x)).abs() < 1e-10);
        }

        #[test]
        fn odd_and_periodic(x in -10.0f64..10.0) {
            prop_assert!((lobachevsky(-x) + lobachevsky(x)).abs() < 1e-12);
            prop_assert!((lobachevsky(x + PI) - lobachevsky(x)).abs() < 1e-10);
        }
    }
}
