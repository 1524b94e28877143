//! Smooth dyadic cutoff `ζ` and the block symbols `φ_q`.
//!
//! `ζ(t) = h(t) - h(2t)` where `h` is the `C^∞` step equal to 1 on `(-∞, 1]`
//! and 0 on `[2, ∞)`. Then `supp ζ ⊂ [1/2, 2]`, `ζ(t) + ζ(2t) = 1` on
//! `[1/2, 1]`, and `Σ_{q=0}^{Q} ζ(2^{-q} m) = h(2^{-Q} m) - h(2m)` telescopes.

use serde::Serialize;

use crate::activation::{xi_eval, ActivationOrder};
use crate::error::{Error, Result};
use crate::polynomials::SphereDim;
use crate::scalar::{lit, Scalar};

fn bump<T: Scalar>(u: T) -> T {
    if u > T::zero() {
        (-u.recip()).exp()
    } else {
        T::zero()
    }
}

/// Smooth step: 1 for `x <= 1`, 0 for `x >= 2`.
pub fn smooth_step<T: Scalar>(x: T) -> T {
    let one = T::one();
    let two = lit::<T>(2.0);
    if x <= one {
        return one;
    }
    if x >= two {
        return T::zero();
    }
    let a = bump(two - x);
    let b = bump(x - one);
    a / (a + b)
}

/// The dyadic cutoff `ζ(t) = h(t) - h(2t)`.
pub fn zeta_eval<T: Scalar>(t: T) -> T {
    smooth_step(t) - smooth_step(t + t)
}

/// `Σ_{q=0}^{q_max} ζ(2^{-q} m)`, which is 1 once the levels cover `m`.
pub fn partition_check<T: Scalar>(m: u64, q_max: u32) -> Result<T> {
    if m == 0 {
        return Err(Error::InvalidParameter("partition of unity starts at m = 1".into()));
    }
    let need = 64 - (2 * m - 1).leading_zeros(); // ceil(log2(2m))
    if q_max < need {
        return Err(Error::IncompleteCover { m, q_max });
    }
    let mf = lit::<T>(m as f64);
    Ok((0..=q_max).map(|q| zeta_eval(mf / lit::<T>(2f64.powi(q as i32)))).sum())
}

/// Minimum of `ζ` on `[3/5, 5/3]`, measured on a fine grid.
pub fn positivity_constant() -> f64 {
    let (a, b) = (0.6f64, 5.0 / 3.0);
    let n = 20_000;
    (0..=n)
        .map(|i| zeta_eval(a + (b - a) * i as f64 / n as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Finite-difference bounds on `|ζ'|` and `|ζ''|` over `[1/2, 2]` with step `h`.
pub fn derivative_bounds(h: f64) -> (f64, f64) {
    let n = (1.5 / h).ceil() as usize;
    let mut d1 = 0.0f64;
    let mut d2 = 0.0f64;
    for i in 0..=n {
        let t = 0.5 + 1.5 * i as f64 / n as f64;
        let (l, c, r) = (zeta_eval(t - h), zeta_eval(t), zeta_eval(t + h));
        d1 = d1.max(((r - l) / (2.0 * h)).abs());
        d2 = d2.max(((r - 2.0 * c + l) / (h * h)).abs());
    }
    (d1, d2)
}

/// The symbol `φ_q` of dyadic level `q`, viewed through the degrees it weights.
///
/// In degree form `φ_q(2^{-q} m) = ζ(2^{-q} j) ξ(j)` with `j = 2m + I_k`; the
/// weight vanishes whenever `j <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockSymbol {
    pub q: u32,
    pub d: SphereDim,
    pub k: ActivationOrder,
}

impl BlockSymbol {
    pub fn new(q: u32, d: SphereDim, k: ActivationOrder) -> Self {
        BlockSymbol { q, d, k }
    }

    fn scale<T: Scalar>(&self) -> T {
        lit(2f64.powi(self.q as i32))
    }

    /// `φ_q(t)` for `t >= 0`.
    pub fn eval<T: Scalar>(&self, t: T) -> T {
        let two = lit::<T>(2.0);
        let ik = lit::<T>(self.k.parity_offset() as f64);
        let scale = self.scale::<T>();
        let z = zeta_eval(two * t + ik / scale);
        if z == T::zero() {
            return T::zero();
        }
        match xi_eval(self.d, self.k, two * scale * t + ik) {
            Ok(x) => z * x,
            Err(_) => T::zero(),
        }
    }

    /// Weight `ζ(2^{-q} j) ξ(j)` on the degree `j` (zero unless `j ≡ I_k` mod 2 and `j > k`).
    pub fn degree_weight<T: Scalar>(&self, j: usize) -> T {
        if j <= self.k.get() || j % 2 != self.k.parity_offset() {
            return T::zero();
        }
        let z = zeta_eval(lit::<T>(j as f64) / self.scale::<T>());
        if z == T::zero() {
            return T::zero();
        }
        z * xi_eval(self.d, self.k, lit::<T>(j as f64)).expect("j > k")
    }

    /// Degrees `j` that can carry a nonzero weight: `2^{q-1} < j < 2^{q+1}`.
    pub fn degree_range(&self) -> std::ops::RangeInclusive<usize> {
        let lo = (1usize << self.q) / 2 + 1;
        let hi = (1usize << (self.q + 1)) - 1;
        lo.max(self.k.get() + 1)..=hi
    }

    /// Smallest truncation degree that covers the whole support.
    pub fn required_degree(&self) -> usize {
        1usize << (self.q + 1)
    }
}

/// `φ_q(t)`; see [`BlockSymbol::eval`].
pub fn phi_eval<T: Scalar>(q: u32, d: SphereDim, k: ActivationOrder, t: T) -> T {
    BlockSymbol::new(q, d, k).eval(t)
}
