//! Zonal (Gegenbauer) polynomials on `S^d` in the addition-theorem
//! normalization `p_m(1) = N(m)`, dimension counts, and Gauss rules for the
//! weight `(1 - t^2)^{(d-2)/2}` on `[-1, 1]`.
//!
//! Everything is evaluated through the normalized recurrence
//!
//! ```text
//! r_0 = 1,  r_1 = t,
//! r_{m+1} = ((2m + d - 1) t r_m - m r_{m-1}) / (m + d - 1)
//! ```
//!
//! for `r_m = p_m / N(m)`, so `|r_m| <= 1` on `[-1, 1]` and the sweep is
//! stable for any degree.

use num_traits::{FromPrimitive, Num};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Scalar};
use crate::special::{area_ratio, ln_gamma};

/// Default cap on polynomial degrees used by the experiments.
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// Dimension `d` of the sphere `S^d ⊂ R^{d+1}`; always `d >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SphereDim(usize);

impl SphereDim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(SphereDim(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Ambient dimension `d + 1`.
    #[inline]
    pub fn ambient(self) -> usize {
        self.0 + 1
    }

    /// Exponent `(d - 2) / 2` of the weight `(1 - t^2)^{(d-2)/2}`.
    pub fn weight_exponent<T: Scalar>(self) -> T {
        lit((self.0 as f64 - 2.0) / 2.0)
    }

    /// Mass `∫_{-1}^{1} (1 - t^2)^{(d-2)/2} dt = ω_d / ω_{d-1}`.
    pub fn weight_mass<T: Scalar>(self) -> T {
        area_ratio::<T>(self.0).recip()
    }
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn binomial(n: i128, k: i128) -> Option<u128> {
    if k < 0 || n < 0 || k > n {
        return Some(0);
    }
    binomial_u128(n as u128, k as u128)
}

/// Dimension `N(m)` of the degree-`m` spherical harmonics on `S^d`.
pub fn harmonic_dim(d: SphereDim, m: usize) -> Result<u64> {
    if m == 0 {
        return Ok(1);
    }
    let dd = d.get() as i128;
    let mm = m as i128;
    let overflow = Error::DegreeOverflow { d: d.get(), m };
    let c = binomial(mm + dd - 2, dd - 1).ok_or(overflow.clone())?;
    let num = c.checked_mul((2 * mm + dd - 1) as u128).ok_or(overflow.clone())?;
    u64::try_from(num / m as u128).map_err(|_| overflow)
}

/// Dimension of `P_m(S^d)`, the restrictions of polynomials of degree `<= m`.
pub fn poly_space_dim(d: SphereDim, m: usize) -> Result<u64> {
    let dd = d.get() as i128;
    let mm = m as i128;
    let overflow = Error::DegreeOverflow { d: d.get(), m };
    let full = binomial(dd + 1 + mm, mm).ok_or(overflow.clone())?;
    let dim = if m <= 1 {
        full
    } else {
        full - binomial(dd - 1 + mm, mm - 2).ok_or(overflow.clone())?
    };
    u64::try_from(dim).map_err(|_| overflow)
}

/// `N(m)` as a float; valid far beyond the exact integer range.
pub fn harmonic_dim_real<T: Scalar>(d: SphereDim, m: usize) -> T {
    if m == 0 {
        return T::one();
    }
    let dd = d.get();
    let mf = m as f64;
    let mut c = 1.0f64;
    for i in 1..dd {
        c *= (mf - 1.0 + i as f64) / i as f64;
    }
    lit(c * (2.0 * mf + dd as f64 - 1.0) / mf)
}

/// Coefficients of the normalized three-term recurrence for `r_m = p_m / N(m)`.
#[derive(Debug, Clone)]
pub struct Recurrence<T> {
    d: SphereDim,
    // r_{m+1} = a[m] t r_m - b[m] r_{m-1}
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> Recurrence<T> {
    pub fn new(d: SphereDim, max_degree: usize) -> Self {
        let dd = d.get() as f64;
        let (a, b) = (0..max_degree.max(1))
            .map(|m| {
                let mf = m as f64;
                let den = mf + dd - 1.0;
                (lit::<T>((2.0 * mf + dd - 1.0) / den), lit::<T>(mf / den))
            })
            .unzip();
        Recurrence { d, a, b }
    }

    pub fn dim(&self) -> SphereDim {
        self.d
    }

    /// Highest degree this recurrence can reach.
    pub fn max_degree(&self) -> usize {
        self.a.len()
    }

    /// `r_0(t), ..., r_M(t)` into `out` (length `M + 1`).
    pub fn fill(&self, t: T, out: &mut [T]) {
        assert!(out.len() <= self.a.len() + 1, "recurrence too short");
        if out.is_empty() {
            return;
        }
        out[0] = T::one();
        if out.len() > 1 {
            out[1] = t;
        }
        for m in 1..out.len().saturating_sub(1) {
            out[m + 1] = self.a[m] * t * out[m] - self.b[m] * out[m - 1];
        }
    }

    /// `Σ_m c_m r_m(t)` for the supplied coefficients.
    pub fn sum(&self, coeffs: &[T], t: T) -> T {
        assert!(coeffs.len() <= self.a.len() + 1, "recurrence too short");
        let mut acc = T::zero();
        let (mut prev, mut cur) = (T::one(), t);
        for (m, &c) in coeffs.iter().enumerate() {
            if m == 0 {
                acc = acc + c;
                continue;
            }
            if m > 1 {
                let next = self.a[m - 1] * t * cur - self.b[m - 1] * prev;
                prev = cur;
                cur = next;
            }
            acc = acc + c * cur;
        }
        acc
    }

    /// Batched version of [`Recurrence::sum`]: `out[i] = Σ_m c_m r_m(ts[i])`.
    pub fn sum_many(&self, coeffs: &[T], ts: &[T], out: &mut [T]) {
        assert_eq!(ts.len(), out.len());
        assert!(coeffs.len() <= self.a.len() + 1, "recurrence too short");
        let n = ts.len();
        if coeffs.is_empty() {
            out.iter_mut().for_each(|o| *o = T::zero());
            return;
        }
        let mut prev = vec![T::one(); n];
        let mut cur: Vec<T> = ts.to_vec();
        for o in out.iter_mut() {
            *o = coeffs[0];
        }
        if coeffs.len() > 1 {
            let c = coeffs[1];
            for (o, &x) in out.iter_mut().zip(&cur) {
                *o = *o + c * x;
            }
        }
        for m in 1..coeffs.len() - 1 {
            let (am, bm, c) = (self.a[m], self.b[m], coeffs[m + 1]);
            for i in 0..n {
                let next = am * ts[i] * cur[i] - bm * prev[i];
                prev[i] = cur[i];
                cur[i] = next;
            }
            if c != T::zero() {
                for (o, &x) in out.iter_mut().zip(&cur) {
                    *o = *o + c * x;
                }
            }
        }
    }
}

/// Exact evaluation of `p_m(t)` in any numeric field (rationals included).
///
/// Uses the same recurrence as [`legendre_eval`] with exactly representable
/// integer coefficients, then scales by `N(m)`.
pub fn legendre_eval_exact<F>(d: SphereDim, m: usize, t: F) -> Result<F>
where
    F: Num + Clone + FromPrimitive,
{
    let n = F::from_u64(harmonic_dim(d, m)?).ok_or(Error::DegreeOverflow { d: d.get(), m })?;
    let int = |x: usize| F::from_usize(x).expect("small integer");
    let dd = d.get();
    let (mut prev, mut cur) = (F::one(), t.clone());
    if m == 0 {
        return Ok(n);
    }
    for j in 1..m {
        let next = (int(2 * j + dd - 1) * t.clone() * cur.clone() - int(j) * prev) / int(j + dd - 1);
        prev = cur;
        cur = next;
    }
    Ok(n * cur)
}

/// `p_m(t)` with `p_m(1) = N(m)`.
pub fn legendre_eval<T: Scalar>(d: SphereDim, m: usize, t: T) -> Result<T> {
    if !(t.abs() <= T::one()) {
        return Err(Error::OutOfDomain(t.to_f64().unwrap_or(f64::NAN)));
    }
    let rec = Recurrence::<T>::new(d, m.max(1));
    let mut coeffs = vec![T::zero(); m + 1];
    coeffs[m] = T::one();
    Ok(harmonic_dim_real::<T>(d, m) * rec.sum(&coeffs, t))
}

/// `||p_m||^2` in `L^2_{w_d}([-1, 1])`, equal to `N(m) ω_d / ω_{d-1}`.
pub fn legendre_norm_sq<T: Scalar>(d: SphereDim, m: usize) -> T {
    harmonic_dim_real::<T>(d, m) * d.weight_mass::<T>()
}

/// Gauss rule for `∫_{-1}^{1} f(t) (1 - t^2)^{weight_exponent} dt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    pub weight_exponent: T,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Nodes and weights mapped affinely from `[-1, 1]` onto `[a, b]`
    /// (only meaningful for the unweighted rule).
    pub fn mapped(&self, a: T, b: T) -> Vec<(T, T)> {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (mid + half * x, half * w))
            .collect()
    }
}

/// Gauss nodes and weights for the weight `(1 - t^2)^{(d-2)/2}`.
///
/// Nodes are the zeros of `p_n`, found by Newton iteration on the recurrence
/// (with deflation against roots already found); weights are Christoffel
/// numbers `mass / Σ_{j<n} N(j) r_j(x)^2`.
pub fn gauss_rule<T: Scalar>(d: SphereDim, num_nodes: usize) -> Result<QuadratureRule<T>> {
    if num_nodes == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let n = num_nodes;
    let rec = Recurrence::<T>::new(d, n + 1);
    let alpha = (d.get() as f64 - 2.0) / 2.0;
    let tol = lit::<T>(1e-15).max(T::epsilon() * lit(4.0));
    let mut vals = vec![T::zero(); n + 1];
    let mut roots: Vec<T> = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25 + 0.5 * alpha) / (n as f64 + 0.5 + alpha)).cos();
        let mut x = lit::<T>(guess);
        for _ in 0..100 {
            rec.fill(x, &mut vals);
            let (rn, rn1) = (vals[n], vals[n - 1]);
            // (1 - x^2) r_n' = n (r_{n-1} - x r_n)
            let deriv = from_usize::<T>(n) * (rn1 - x * rn) / (T::one() - x * x);
            let deflate: T = roots.iter().map(|&r| (x - r).recip()).sum();
            let step = rn / (deriv - rn * deflate);
            x = x - step;
            if step.abs() <= tol {
                break;
            }
        }
        roots.push(x);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
    let mass = d.weight_mass::<T>();
    let dims: Vec<T> = (0..n).map(|j| harmonic_dim_real::<T>(d, j)).collect();
    let weights = roots
        .iter()
        .map(|&x| {
            rec.fill(x, &mut vals);
            let s: T = (0..n).map(|j| dims[j] * vals[j] * vals[j]).sum();
            mass / s
        })
        .collect();
    Ok(QuadratureRule { nodes: roots, weights, weight_exponent: lit(alpha) })
}

/// Plain Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Scalar>(num_nodes: usize) -> QuadratureRule<T> {
    gauss_rule(SphereDim(2), num_nodes.max(1)).expect("nonzero node count")
}

/// `∫_{-1}^{1} t^{2j} (1 - t^2)^α dt = B(j + 1/2, α + 1)`.
pub fn even_moment<T: Scalar>(d: SphereDim, j: usize) -> T {
    let a = lit::<T>(j as f64 + 0.5);
    let b = d.weight_exponent::<T>() + T::one();
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}
