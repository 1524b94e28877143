//! Closed-form ReLU^k kernel and direct surface quadrature on `S^2`.

use crate::activation::ActivationOrder;
use crate::error::{Error, Result};
use crate::polynomials::{gauss_legendre, SphereDim};
use crate::scalar::{from_usize, lit, Scalar};
use crate::special::pochhammer;

/// `∫_{-a}^{a} cos^j u du` for `j = 0..=k`.
fn cos_power_integrals<T: Scalar>(a: T, k: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(k + 1);
    let (s, c) = a.sin_cos();
    let two = lit::<T>(2.0);
    for j in 0..=k {
        let v = match j {
            0 => two * a,
            1 => two * s,
            _ => {
                let jf = from_usize::<T>(j);
                two * c.powi(j as i32 - 1) * s / jf + (jf - T::one()) / jf * out[j - 2]
            }
        };
        out.push(v);
    }
    out
}

/// `⨍_{S^d} σ_k(x·η) σ_k(y·η) dη` for unit vectors at angle `ρ`.
///
/// Reduces to the two-dimensional arc-cosine integral
/// `J_k(ρ) = ∫_{ρ-π/2}^{π/2} cos^k φ cos^k(φ - ρ) dφ · k!`, expanded in powers of
/// `cos ρ`, times the sphere moment `1 / (2^k ((d+1)/2)_k)`.
pub fn exact_kernel<T: Scalar>(d: SphereDim, k: ActivationOrder, rho: T) -> T {
    let kk = k.get();
    let a = T::PI() - rho;
    if !(a > T::zero()) {
        return T::zero();
    }
    // substitute φ = u + ρ/2: cos φ cos(φ-ρ) = (cos 2u + cos ρ)/2, u ∈ ±(π-ρ)/2;
    // then v = 2u and binomial expansion of (cos v + cos ρ)^k
    let ints = cos_power_integrals(a, kk);
    let cr = rho.cos();
    let mut binom = T::one();
    let mut sum = T::zero();
    for j in 0..=kk {
        if j > 0 {
            binom = binom * from_usize::<T>(kk + 1 - j) / from_usize::<T>(j);
        }
        sum = sum + binom * cr.powi((kk - j) as i32) * ints[j] / lit(2.0);
    }
    let fact = pochhammer(T::one(), kk);
    let moment = pochhammer(lit::<T>((d.get() as f64 + 1.0) / 2.0), kk);
    fact / moment / (lit::<T>(2.0) * T::PI()) / lit::<T>(2f64.powi(kk as i32)) * sum
}

/// Angle between unit vectors from their chord length.
pub fn angle_between<T: Scalar>(x: &[T], y: &[T]) -> T {
    let c: T = x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum();
    lit::<T>(2.0) * (c.sqrt() / lit(2.0)).min(T::one()).asin()
}

/// [`exact_kernel`] evaluated on a pair of unit vectors.
pub fn exact_kernel_pair<T: Scalar>(d: SphereDim, k: ActivationOrder, x: &[T], y: &[T]) -> T {
    exact_kernel(d, k, angle_between(x, y))
}

/// `⨍_{S^2} σ_k(x·η) σ_k(y·η) dη` by tensor Gauss–Legendre quadrature in a
/// frame whose pole is `x × y`.
///
/// In that frame the region where both factors are positive is a lune
/// bounded by two meridians, so the integrand is smooth on the integration
/// domain `ψ ∈ [0, π]`, `φ ∈ [ρ - π/2, π/2]` and the rule converges
/// spectrally.
pub fn lune_pair_quadrature<T: Scalar>(k: ActivationOrder, x: &[T], y: &[T], nodes: usize) -> Result<T> {
    if x.len() != 3 || y.len() != 3 {
        return Err(Error::InvalidParameter("lune quadrature is defined on S^2".into()));
    }
    let rho = angle_between(x, y);
    let half_pi = T::FRAC_PI_2();
    if !(rho < T::PI()) {
        return Ok(T::zero());
    }
    // after rotating to the frame, the integrand depends on (x, y) only through ρ
    let rule = gauss_legendre::<T>(nodes);
    let kk = k.get() as i32;
    let psi = rule.mapped(T::zero(), T::PI());
    let phi = rule.mapped(rho - half_pi, half_pi);
    let polar: T = psi.iter().map(|&(p, w)| w * p.sin().powi(2 * kk + 1)).sum();
    let azimuth: T = phi.iter().map(|&(f, w)| w * f.cos().powi(kk) * (f - rho).cos().powi(kk)).sum();
    Ok(polar * azimuth / (lit::<T>(4.0) * T::PI()))
}

/// Tensor rule on `S^2`: Gauss–Legendre in `cos ψ` times the trapezoid rule in
/// azimuth. Weights are normalized to total mass 1.
pub fn sphere_product_rule<T: Scalar>(n_polar: usize, n_azimuth: usize) -> Vec<([T; 3], T)> {
    let rule = gauss_legendre::<T>(n_polar);
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    let two_pi = lit::<T>(2.0) * T::PI();
    let norm = lit::<T>(2.0) * from_usize::<T>(n_azimuth);
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r = (T::one() - z * z).max(T::zero()).sqrt();
        for j in 0..n_azimuth {
            let phi = two_pi * from_usize::<T>(j) / from_usize::<T>(n_azimuth);
            let (s, c) = phi.sin_cos();
            out.push(([r * c, r * s, z], w / norm));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::build_table;
    use crate::polynomials::Recurrence;
    use std::f64::consts::PI;

    fn dim(d: usize) -> SphereDim {
        SphereDim::new(d).unwrap()
    }

    #[test]
    fn known_closed_forms() {
        for &rho in &[0.0f64, 0.3, 1.2, 2.9, PI] {
            let k0 = exact_kernel(dim(2), ActivationOrder::new(0), rho);
            assert!((k0 - (PI - rho) / (2.0 * PI)).abs() < 1e-15);
            let k1 = exact_kernel(dim(2), ActivationOrder::new(1), rho);
            let want = (rho.sin() + (PI - rho) * rho.cos()) / (6.0 * PI);
            assert!((k1 - want).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_is_half_moment() {
        // ⨍ (x·η)_+^{2k} = (1/2) E[t^{2k}]; on S^2, E[t^{2k}] = 1/(2k+1)
        for k in 0..4 {
            let v = exact_kernel(dim(2), ActivationOrder::new(k), 0.0f64);
            assert!((v - 0.5 / (2.0 * k as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_spectral_series() {
        for d in 2..=4 {
            for k in 1..=2 {
                let k = ActivationOrder::new(k);
                let table = build_table::<f64>(dim(d), k, 1024).unwrap();
                let rec = Recurrence::<f64>::new(dim(d), 1024);
                let series = table.kernel_series(1024);
                for &rho in &[0.2f64, 1.0, 2.0, 3.0] {
                    let s = rec.sum(&series, rho.cos());
                    let e = exact_kernel(dim(d), k, rho);
                    assert!((s - e).abs() < 1e-6 * table.trace(), "d={d} k={} rho={rho}", k.get());
                }
            }
        }
    }

    #[test]
    fn lune_quadrature_agrees() {
        let x = [1.0f64, 0.0, 0.0];
        for k in 0..3 {
            let k = ActivationOrder::new(k);
            for &rho in &[0.0f64, 0.7, 2.0, 3.1] {
                let y = [rho.cos(), rho.sin(), 0.0];
                let q = lune_pair_quadrature(k, &x, &y, 64).unwrap();
                let e = exact_kernel(dim(2), k, rho);
                assert!((q - e).abs() < 1e-14, "k={} rho={rho}", k.get());
            }
        }
        let y = [-1.0f64, 0.0, 0.0];
        assert_eq!(lune_pair_quadrature(ActivationOrder::new(1), &x, &y, 16).unwrap(), 0.0);
    }

    #[test]
    fn product_rule_integrates_polynomials() {
        let rule = sphere_product_rule::<f64>(12, 24);
        let mass: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((mass - 1.0).abs() < 1e-14);
        let z2: f64 = rule.iter().map(|(p, w)| w * p[2] * p[2]).sum();
        assert!((z2 - 1.0 / 3.0).abs() < 1e-14);
        let x2y2: f64 = rule.iter().map(|(p, w)| w * p[0] * p[0] * p[1] * p[1]).sum();
        assert!((x2y2 - 1.0 / 15.0).abs() < 1e-14);
    }
}
