//! Legendre spectrum of the ReLU^k activation `σ_k(t) = max(t, 0)^k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomials::{gauss_legendre, harmonic_dim_real, Recurrence, SphereDim};
use crate::scalar::{from_usize, lit, Scalar};
use crate::special::{area_ratio, ln_gamma};

/// Power `k` of the activation together with its parity offset `I_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ActivationOrder(usize);

impl ActivationOrder {
    pub fn new(k: usize) -> Self {
        ActivationOrder(k)
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `I_k = (k + 1) mod 2`: degrees above `k` in the spectrum have parity `I_k`.
    #[inline]
    pub fn parity_offset(self) -> usize {
        (self.0 + 1) % 2
    }
}

/// Whether `σ̂_k(m) != 0`.
pub fn index_set_member(k: ActivationOrder, m: usize) -> bool {
    m <= k.get() || (m - k.get()) % 2 == 1
}

fn ln_prefactor<T: Scalar>(d: SphereDim, k: ActivationOrder) -> T {
    area_ratio::<T>(d.get()).ln()
        + ln_gamma(from_usize::<T>(k.get() + 1))
        + ln_gamma(lit::<T>(d.get() as f64 / 2.0))
}

/// `σ̂_k(m)` from the Gamma-ratio formula, valid for `m > k`.
///
/// Returns exactly zero off the index set and [`Error::QuadratureBranch`]
/// for `m <= k`, where only [`coeff_quadrature`] applies.
pub fn coeff_closed_form<T: Scalar>(d: SphereDim, k: ActivationOrder, m: usize) -> Result<T> {
    let kk = k.get();
    if m <= kk {
        return Err(Error::QuadratureBranch { m, k: kk });
    }
    if !index_set_member(k, m) {
        return Ok(T::zero());
    }
    let half = lit::<T>(0.5);
    let ln_abs = ln_prefactor::<T>(d, k) + ln_gamma(from_usize::<T>(m - kk))
        - from_usize::<T>(m) * lit::<T>(2.0).ln()
        - ln_gamma(from_usize::<T>(m - kk + 1) * half)
        - ln_gamma(from_usize::<T>(m + d.get() + kk + 1) * half);
    let sign = if ((m - kk - 1) / 2) % 2 == 0 { T::one() } else { -T::one() };
    Ok(sign * ln_abs.exp())
}

/// `σ̂_k(m) = <p_m, σ_k>_w / ||p_m||_w^2` by quadrature on `[0, 1]` only,
/// since `σ_k` vanishes on `[-1, 0)`.
///
/// The substitution `t = sin φ` turns the weight into `cos^{d-1} φ`, so the
/// integrand is smooth for every `d` and Gauss–Legendre in `φ` converges
/// geometrically.
pub fn coeff_quadrature<T: Scalar>(d: SphereDim, k: ActivationOrder, m: usize) -> T {
    let nodes = 2 * (m + k.get() + d.get()) + 48;
    let rule = gauss_legendre::<T>(nodes);
    let rec = Recurrence::<T>::new(d, m.max(1));
    let mut coeffs = vec![T::zero(); m + 1];
    coeffs[m] = T::one();
    let kk = k.get() as i32;
    let dm1 = d.get() as i32 - 1;
    let integral: T = rule
        .mapped(T::zero(), T::FRAC_PI_2())
        .into_iter()
        .map(|(phi, w)| {
            let (s, c) = phi.sin_cos();
            w * s.powi(kk) * c.powi(dm1) * rec.sum(&coeffs, s)
        })
        .sum();
    // ||p_m||^2 = N(m) * mass and p_m = N(m) r_m
    integral / d.weight_mass::<T>()
}

/// `σ̂_k(m)` by whichever branch applies.
pub fn coeff<T: Scalar>(d: SphereDim, k: ActivationOrder, m: usize) -> T {
    match coeff_closed_form(d, k, m) {
        Ok(v) => v,
        Err(_) => coeff_quadrature(d, k, m),
    }
}

/// The smooth interpolant `ξ(t)` of `σ̂_k(m)^2`, defined for `t > k`.
pub fn xi_eval<T: Scalar>(d: SphereDim, k: ActivationOrder, t: T) -> Result<T> {
    let kk = from_usize::<T>(k.get());
    if !(t > kk) {
        return Err(Error::XiDomain { t: t.to_f64().unwrap_or(f64::NAN), k: k.get() });
    }
    let half = lit::<T>(0.5);
    let ln_c = ln_prefactor::<T>(d, k)
        - from_usize::<T>(k.get() + 1) * lit::<T>(2.0).ln()
        - half * T::PI().ln();
    let ln_ratio = ln_gamma((t - kk) * half) - ln_gamma((t + from_usize::<T>(d.get() + k.get() + 1)) * half);
    Ok((lit::<T>(2.0) * (ln_c + ln_ratio)).exp())
}

/// Tabulated spectrum `σ̂_k(0..=M)` with the squared-coefficient tail
/// `Σ_{m > M, m ∈ E} ξ(m) N(m)` beyond the table.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTable<T> {
    pub d: SphereDim,
    pub k: ActivationOrder,
    pub max_degree: usize,
    pub coeffs: Vec<T>,
    /// Upper estimate of the kernel trace beyond `max_degree`.
    pub tail: T,
}

impl<T: Scalar> CoefficientTable<T> {
    #[inline]
    pub fn sigma_hat(&self, m: usize) -> T {
        self.coeffs[m]
    }

    /// `σ̂_k(m)^2 N(m)`: the kernel weight of degree `m`.
    pub fn energy_weight(&self, m: usize) -> T {
        let s = self.coeffs[m];
        s * s * harmonic_dim_real::<T>(self.d, m)
    }

    /// Coefficients of `Σ_m σ̂_k(m)^2 p_m` on the normalized basis `r_m`.
    pub fn kernel_series(&self, upto: usize) -> Vec<T> {
        (0..=upto.min(self.max_degree)).map(|m| self.energy_weight(m)).collect()
    }

    /// `Σ_{m ≤ M} σ̂_k(m)^2 N(m)`.
    pub fn trace(&self) -> T {
        (0..=self.max_degree).map(|m| self.energy_weight(m)).sum()
    }

    pub fn index_set(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.max_degree).filter(move |&m| index_set_member(self.k, m))
    }
}

/// `Σ_{m > from, m ∈ E} ξ(m) N(m)` for `from >= k`.
///
/// Summed term by term through the ratio `ξ(m+2)/ξ(m) = ((m-k)/(m+d+k+1))^2`
/// up to `max(64 from, 2^16)`, then closed by the integral of the asymptotic
/// power law `ξ N ~ C m^{-2k-2}`.
pub fn tail_sum<T: Scalar>(d: SphereDim, k: ActivationOrder, from: usize) -> T {
    let kk = k.get();
    let dd = d.get() as f64;
    let mut m = from + 1;
    if m <= kk {
        m = kk + 1;
    }
    if !index_set_member(k, m) {
        m += 1;
    }
    let stop = (64 * from).max(1 << 16);
    let mut xi = to_f64_xi(d, k, m);
    let mut acc = 0.0f64;
    let mut last = 0.0f64;
    while m <= stop {
        let n: f64 = harmonic_dim_real(d, m);
        last = xi * n;
        acc += last;
        let mf = m as f64;
        let r = (mf - kk as f64) / (mf + dd + kk as f64 + 1.0);
        xi *= r * r;
        m += 2;
    }
    let m_last = (m - 2) as f64;
    let p = 2.0 * kk as f64 + 1.0;
    let c = last * m_last.powf(p + 1.0);
    acc += c * (m_last + 1.0).powf(-p) / (2.0 * p);
    lit(acc)
}

fn to_f64_xi(d: SphereDim, k: ActivationOrder, m: usize) -> f64 {
    xi_eval::<f64>(d, k, m as f64).expect("m > k")
}

/// Builds `σ̂_k(0..=M)`: closed form above `k`, quadrature at and below.
pub fn build_table<T: Scalar>(d: SphereDim, k: ActivationOrder, max_degree: usize) -> Result<CoefficientTable<T>> {
    if max_degree < k.get() + 2 {
        return Err(Error::InvalidParameter(format!(
            "coefficient table needs max_degree >= k + 2 = {}",
            k.get() + 2
        )));
    }
    let coeffs = (0..=max_degree).map(|m| coeff::<T>(d, k, m)).collect();
    Ok(CoefficientTable { d, k, max_degree, coeffs, tail: tail_sum(d, k, max_degree) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::even_moment;

    fn dim(d: usize) -> SphereDim {
        SphereDim::new(d).unwrap()
    }
    const K0: ActivationOrder = ActivationOrder(0);
    const K1: ActivationOrder = ActivationOrder(1);
    const K2: ActivationOrder = ActivationOrder(2);

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn parity_offset() {
        assert_eq!(K0.parity_offset(), 1);
        assert_eq!(K1.parity_offset(), 0);
        assert_eq!(K2.parity_offset(), 1);
    }

    #[test]
    fn membership() {
        assert!(!index_set_member(K1, 3));
        assert!(index_set_member(K1, 0));
        assert!(!index_set_member(K0, 4));
        assert!(index_set_member(K0, 7));
        assert!(index_set_member(K2, 1));
    }

    #[test]
    fn hand_values() {
        let d = dim(2);
        assert_eq!(coeff_closed_form::<f64>(d, K1, 3).unwrap(), 0.0);
        assert!(rel(coeff_closed_form::<f64>(d, K1, 2).unwrap(), 1.0 / 16.0) < 1e-13);
        assert!(rel(coeff_closed_form::<f64>(d, K0, 1).unwrap(), 0.25) < 1e-13);
        assert!(rel(coeff_quadrature::<f64>(d, K0, 0), 0.5) < 1e-14);
        assert!(rel(coeff_quadrature::<f64>(d, K1, 1), 1.0 / 6.0) < 1e-14);
        assert!(coeff_quadrature::<f64>(dim(3), K2, 4).abs() < 1e-14);
        assert!(matches!(
            coeff_closed_form::<f64>(d, K1, 1),
            Err(Error::QuadratureBranch { m: 1, k: 1 })
        ));
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for d in 2..=4 {
            for k in 0..=2 {
                let k = ActivationOrder(k);
                for m in (k.get() + 1..=60).filter(|&m| index_set_member(k, m)) {
                    let c: f64 = coeff_closed_form(dim(d), k, m).unwrap();
                    let q: f64 = coeff_quadrature(dim(d), k, m);
                    assert!(rel(c, q) <= 1e-8, "d={d} k={} m={m}: {c} vs {q}", k.get());
                }
            }
        }
    }

    #[test]
    fn xi_identity_and_domain() {
        for d in 2..=4 {
            for k in 0..=2 {
                let k = ActivationOrder(k);
                for m in (k.get() + 1..=200).filter(|&m| index_set_member(k, m)) {
                    let s: f64 = coeff_closed_form(dim(d), k, m).unwrap();
                    let x: f64 = xi_eval(dim(d), k, m as f64).unwrap();
                    assert!(rel(x, s * s) <= 1e-10);
                }
            }
        }
        assert!(xi_eval::<f64>(dim(2), K1, 1.0).is_err());
    }

    #[test]
    fn xi_power_law() {
        let d = dim(2);
        let p = 2.0 + 2.0 + 1.0;
        let f = |t: f64| xi_eval::<f64>(d, K1, t).unwrap() * t.powf(p);
        let (a, b) = (f(64.0), f(4096.0));
        assert!(rel(a, b) <= 0.05);
    }

    #[test]
    fn signs_alternate() {
        for k in 0..=2 {
            let k = ActivationOrder(k);
            for m in (k.get() + 1..=80).filter(|&m| index_set_member(k, m)) {
                let s: f64 = coeff_closed_form(dim(3), k, m).unwrap();
                let expect = if ((m - k.get() - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(s.signum(), expect);
            }
        }
    }

    #[test]
    fn table_zero_pattern() {
        let t = build_table::<f64>(dim(2), K1, 100).unwrap();
        for m in 0..=100 {
            assert_eq!(t.sigma_hat(m) == 0.0, m >= 3 && m % 2 == 1, "m={m}");
        }
        let t = build_table::<f64>(dim(2), K0, 50).unwrap();
        for m in 0..=50 {
            assert_eq!(t.sigma_hat(m) != 0.0, m == 0 || m % 2 == 1, "m={m}");
        }
        assert!(build_table::<f64>(dim(2), K1, 2).is_err());
    }

    #[test]
    fn table_tail_is_small() {
        let t = build_table::<f64>(dim(2), K1, 512).unwrap();
        assert!(t.tail < 1e-6 * t.trace());
    }

    #[test]
    fn trace_plus_tail_is_kernel_diagonal() {
        // Σ_m σ̂² N(m) = ⨍ σ_k(x·η)^2 dη = (1/2) ∫ t^{2k} w / mass
        for d in 2..=4 {
            for k in 0..=2 {
                let k = ActivationOrder(k);
                let t = build_table::<f64>(dim(d), k, 256).unwrap();
                let exact = 0.5 * even_moment::<f64>(dim(d), k.get()) / dim(d).weight_mass::<f64>();
                assert!(rel(t.trace() + t.tail, exact) < 1e-9, "d={d} k={}", k.get());
            }
        }
    }

    #[test]
    fn decreasing_magnitudes() {
        let t = build_table::<f64>(dim(3), K2, 300).unwrap();
        let mags: Vec<f64> = t.index_set().filter(|&m| m > 3).map(|m| t.sigma_hat(m).abs()).collect();
        assert!(mags.windows(2).all(|w| w[1] < w[0]));
    }
}
