//! Gamma-function helpers and sphere surface areas.

use crate::scalar::{lit, Scalar};

// Bernoulli coefficients B_{2j} / (2j (2j - 1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Arguments below 16 are shifted upward by the recurrence `Γ(x+1) = xΓ(x)`
/// and the Stirling series is summed at the shifted point.
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    assert!(x > T::zero(), "ln_gamma needs a positive argument");
    let shift_to = lit::<T>(16.0);
    let mut z = x;
    let mut prod = T::one();
    let mut log_acc = T::zero();
    while z < shift_to {
        prod = prod * z;
        // keep the running product away from overflow for tiny x
        if prod > lit(1e100) {
            log_acc = log_acc + prod.ln();
            prod = T::one();
        }
        z = z + T::one();
    }
    log_acc = log_acc + prod.ln();
    let half_ln_2pi = lit::<T>(0.918_938_533_204_672_8);
    let inv = z.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for c in STIRLING {
        series = series + lit::<T>(c) * pow;
        pow = pow * inv2;
    }
    (z - lit(0.5)) * z.ln() - z + half_ln_2pi + series - log_acc
}

/// `ln(Γ(a) / Γ(b))` for positive `a`, `b`.
pub fn ln_gamma_ratio<T: Scalar>(a: T, b: T) -> T {
    ln_gamma(a) - ln_gamma(b)
}

/// Surface area `ω_d` of the unit sphere `S^d ⊂ R^{d+1}`.
pub fn sphere_area<T: Scalar>(d: usize) -> T {
    let half = lit::<T>((d as f64 + 1.0) / 2.0);
    let ln = lit::<T>(2.0).ln() + half * T::PI().ln() - ln_gamma(half);
    ln.exp()
}

/// Ratio `ω_{d-1} / ω_d`.
pub fn area_ratio<T: Scalar>(d: usize) -> T {
    // ω_{d-1}/ω_d = Γ((d+1)/2) / (√π Γ(d/2))
    let a = lit::<T>((d as f64 + 1.0) / 2.0);
    let b = lit::<T>(d as f64 / 2.0);
    (ln_gamma_ratio(a, b)).exp() / T::PI().sqrt()
}

/// Pochhammer symbol `(a)_n = a (a+1) ... (a+n-1)`.
pub fn pochhammer<T: Scalar>(a: T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (a + lit(i as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        let mut fact = 1.0f64;
        for n in 1..30usize {
            let lg: f64 = ln_gamma(n as f64 + 1.0);
            fact *= n as f64;
            assert!((lg - fact.ln()).abs() <= 1e-13 * fact.ln().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn ln_gamma_half_integers() {
        // Γ(1/2) = √π, Γ(5/2) = 3√π/4
        let g: f64 = ln_gamma(0.5);
        assert!((g - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        let g: f64 = ln_gamma(2.5);
        assert!((g - (0.75 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-14);
    }

    #[test]
    fn large_argument_against_duplication() {
        // Legendre duplication: Γ(2z) = 2^{2z-1} Γ(z) Γ(z+1/2) / √π
        for &z in &[3.3f64, 40.25, 777.5, 4096.0] {
            let lhs: f64 = ln_gamma(2.0 * z);
            let rhs = (2.0 * z - 1.0) * 2f64.ln() + ln_gamma(z) + ln_gamma(z + 0.5)
                - 0.5 * std::f64::consts::PI.ln();
            assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs().max(1.0) * 8.0, "z = {z}");
        }
    }

    #[test]
    fn areas() {
        let pi = std::f64::consts::PI;
        assert!((sphere_area::<f64>(1) - 2.0 * pi).abs() < 1e-13);
        assert!((sphere_area::<f64>(2) - 4.0 * pi).abs() < 1e-13);
        assert!((sphere_area::<f64>(3) - 2.0 * pi * pi).abs() < 1e-12);
        for d in 2..8 {
            let r = sphere_area::<f64>(d - 1) / sphere_area::<f64>(d);
            assert!((area_ratio::<f64>(d) - r).abs() < 1e-14);
        }
    }
}
