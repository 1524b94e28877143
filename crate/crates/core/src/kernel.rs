//! Zonal kernel matrices on a point set: degree blocks `P(m)`, dyadic blocks
//! `Q_q` generated by the localized kernels `L_q`, dominance certificates and
//! localization profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::activation::{tail_sum, xi_eval, ActivationOrder};
use crate::cutoff::{smooth_step, BlockSymbol};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Matrix};
use crate::points::{kappa_for_separation, PointSet};
use crate::polynomials::{harmonic_dim_real, Recurrence, SphereDim};
use crate::scalar::{lit, to_f64, Scalar};

/// Dominance threshold on `max_offdiag_rowsum / diag`.
pub const DOMINANCE_RATIO: f64 = 0.5;

/// Symmetric matrix `K(θ_i·θ_j)` for the zonal kernel `K = Σ_m c_m r_m`.
pub fn assemble_zonal_matrix<T: Scalar>(ps: &PointSet<T>, rec: &Recurrence<T>, coeffs: &[T]) -> Matrix<T> {
    assemble_pairwise(ps, |ts, out| rec.sum_many(coeffs, ts, out))
}

/// Symmetric matrix from a batched zonal evaluator `eval(ts, out)`.
pub fn assemble_pairwise<T, F>(ps: &PointSet<T>, eval: F) -> Matrix<T>
where
    T: Scalar,
    F: Fn(&[T], &mut [T]) + Sync,
{
    let n = ps.len();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ts: Vec<T> = (i..n).map(|j| ps.dot(i, j)).collect();
            let mut out = vec![T::zero(); ts.len()];
            eval(&ts, &mut out);
            out
        })
        .collect();
    let mut m = Matrix::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            m.set(i, i + off, v);
            m.set(i + off, i, v);
        }
    }
    m
}

/// `P(m)` with entries `p_m(θ_i·θ_j)`.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeBlock<T> {
    pub m: usize,
    pub matrix: Matrix<T>,
}

pub fn assemble_degree_block<T: Scalar>(ps: &PointSet<T>, m: usize) -> DegreeBlock<T> {
    let d = ps.dim();
    let rec = Recurrence::new(d, m.max(1));
    let mut coeffs = vec![T::zero(); m + 1];
    coeffs[m] = harmonic_dim_real(d, m);
    DegreeBlock { m, matrix: assemble_zonal_matrix(ps, &rec, &coeffs) }
}

/// `L_q(t) = Σ_j ζ(2^{-q} j) ξ(j) p_j(t)` over `j ≡ I_k (mod 2)`, `j > k`.
#[derive(Debug, Clone)]
pub struct LocalizedKernel<T> {
    pub symbol: BlockSymbol,
    coeffs: Vec<T>,
    rec: Recurrence<T>,
}

impl<T: Scalar> LocalizedKernel<T> {
    /// Kernel truncated at degree `max_degree`, which must cover `supp φ_q`.
    pub fn new(q: u32, d: SphereDim, k: ActivationOrder, max_degree: usize) -> Result<Self> {
        let symbol = BlockSymbol::new(q, d, k);
        let need = symbol.required_degree();
        if max_degree < need {
            return Err(Error::InsufficientDegree { have: max_degree, need });
        }
        let top = *symbol.degree_range().end();
        let mut coeffs = vec![T::zero(); top + 1];
        for j in symbol.degree_range() {
            coeffs[j] = symbol.degree_weight::<T>(j) * harmonic_dim_real::<T>(d, j);
        }
        Ok(LocalizedKernel { symbol, rec: Recurrence::new(d, top.max(1)), coeffs })
    }

    pub fn eval(&self, t: T) -> T {
        self.rec.sum(&self.coeffs, t)
    }

    pub fn eval_many(&self, ts: &[T], out: &mut [T]) {
        self.rec.sum_many(&self.coeffs, ts, out)
    }

    /// `L_q(1) = Σ_j ζ(2^{-q} j) ξ(j) N(j)`.
    pub fn at_one(&self) -> T {
        self.coeffs.iter().copied().sum()
    }
}

/// `L_q(t)` with truncation degree `max_degree >= 2^{q+1}`.
pub fn localized_kernel_eval<T: Scalar>(
    q: u32,
    d: SphereDim,
    k: ActivationOrder,
    t: T,
    max_degree: usize,
) -> Result<T> {
    if !(t.abs() <= T::one()) {
        return Err(Error::OutOfDomain(to_f64(t)));
    }
    Ok(LocalizedKernel::new(q, d, k, max_degree)?.eval(t))
}

/// `Q_q` with entries `L_q(θ_i·θ_j)`.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicBlock<T> {
    pub q: u32,
    pub k: ActivationOrder,
    pub matrix: Matrix<T>,
    pub diag: T,
    /// Degrees `j` with possibly nonzero weight, inclusive.
    pub degree_lo: usize,
    pub degree_hi: usize,
    /// Compact support makes the block sum finite; kept for reporting.
    pub truncation_residual: T,
}

pub fn assemble_dyadic_block<T: Scalar>(ps: &PointSet<T>, q: u32, k: ActivationOrder) -> DyadicBlock<T> {
    let d = ps.dim();
    let symbol = BlockSymbol::new(q, d, k);
    let kernel = LocalizedKernel::new(q, d, k, symbol.required_degree()).expect("degree covers support");
    let matrix = assemble_pairwise(ps, |ts, out| kernel.eval_many(ts, out));
    let range = symbol.degree_range();
    DyadicBlock {
        q,
        k,
        matrix,
        diag: kernel.at_one(),
        degree_lo: *range.start(),
        degree_hi: *range.end(),
        truncation_residual: T::zero(),
    }
}

/// Row-dominance and spectral-floor certificate for one dyadic block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceCertificate {
    pub q: u32,
    pub n: usize,
    pub diag: f64,
    pub max_offdiag_rowsum: f64,
    pub dominance_ratio: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// `λ_min · 2^{q(2k+1)}`.
    pub floor_constant: f64,
    /// `diag - max_offdiag_rowsum`.
    pub gershgorin_lower: f64,
    /// `λ_min >= gershgorin_lower` up to eigensolver backward error.
    pub gershgorin_consistent: bool,
    pub dominant: bool,
}

pub fn certify_dominance<T: Scalar>(block: &DyadicBlock<T>) -> Result<DominanceCertificate> {
    let a = &block.matrix;
    let n = a.n();
    let diag = to_f64(block.diag);
    let max_off = (0..n)
        .map(|i| {
            a.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| to_f64(v).abs())
                .sum::<f64>()
        })
        .fold(0.0f64, f64::max);
    let vals = symmetric_eigenvalues(a)?;
    let lambda_min = vals.first().map(|&v| to_f64(v)).unwrap_or(0.0);
    let lambda_max = vals.last().map(|&v| to_f64(v)).unwrap_or(0.0);
    let ratio = if diag > 0.0 { max_off / diag } else { f64::INFINITY };
    let scale = 2f64.powi((block.q * (2 * block.k.get() as u32 + 1)) as i32);
    let glb = diag - max_off;
    let slack = 1e-10 * to_f64(a.norm()).max(diag.abs());
    Ok(DominanceCertificate {
        q: block.q,
        n,
        diag,
        max_offdiag_rowsum: max_off,
        dominance_ratio: ratio,
        lambda_min,
        lambda_max,
        floor_constant: lambda_min * scale,
        gershgorin_lower: glb,
        gershgorin_consistent: lambda_min >= glb - slack,
        dominant: ratio <= DOMINANCE_RATIO,
    })
}

/// Outcome of scanning dyadic levels for the first dominant block.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceSearch {
    pub separation: f64,
    pub q_start: u32,
    pub q_star: Option<u32>,
    /// `2^{q*} h` for the level found.
    pub implied_c3: Option<f64>,
    pub certificates: Vec<DominanceCertificate>,
}

/// Scans `q = q_start, q_start + 1, ..., q_cap` with `q_start` the threshold
/// for `C3 = 1`, stopping at the first block whose dominance ratio is at most 1/2.
pub fn find_dominant_level<T: Scalar>(
    ps: &PointSet<T>,
    k: ActivationOrder,
    separation: f64,
    q_cap: u32,
) -> Result<DominanceSearch> {
    let q_start = kappa_for_separation(separation, 1.0)?;
    let mut certificates = Vec::new();
    let mut q_star = None;
    for q in q_start..=q_cap.max(q_start) {
        let cert = certify_dominance(&assemble_dyadic_block(ps, q, k))?;
        let dominant = cert.dominant;
        certificates.push(cert);
        if dominant {
            q_star = Some(q);
            break;
        }
    }
    Ok(DominanceSearch {
        separation,
        q_start,
        q_star,
        implied_c3: q_star.map(|q| 2f64.powi(q as i32) * separation),
        certificates,
    })
}

/// `E[m] = aᵀ P(m) a` for `m = 0..=max_degree`.
pub fn degree_energies<T: Scalar>(ps: &PointSet<T>, a: &[T], max_degree: usize) -> Vec<T> {
    let n = ps.len();
    assert_eq!(a.len(), n);
    let d = ps.dim();
    let rec = Recurrence::<T>::new(d, max_degree.max(1));
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // Σ_{j >= i} w_ij a_i a_j r_m(t_ij), off-diagonal pairs counted twice
            let mut acc = vec![T::zero(); max_degree + 1];
            let mut vals = vec![T::zero(); max_degree + 1];
            for j in i..n {
                let w = if j == i { a[i] * a[i] } else { lit::<T>(2.0) * a[i] * a[j] };
                rec.fill(ps.dot(i, j), &mut vals);
                for (s, &v) in acc.iter_mut().zip(&vals) {
                    *s = *s + w * v;
                }
            }
            acc
        })
        .collect();
    let mut total = vec![T::zero(); max_degree + 1];
    for row in &rows {
        for (t, &v) in total.iter_mut().zip(row) {
            *t = *t + v;
        }
    }
    for (m, t) in total.iter_mut().enumerate() {
        *t = *t * harmonic_dim_real::<T>(d, m);
    }
    total
}

/// `aᵀ Q_q a = Σ_j ζ(2^{-q} j) ξ(j) E[j]` from precomputed degree energies.
pub fn dyadic_energy<T: Scalar>(energies: &[T], symbol: &BlockSymbol) -> Result<T> {
    let need = symbol.required_degree();
    if energies.len() < need {
        return Err(Error::InsufficientDegree { have: energies.len().saturating_sub(1), need });
    }
    Ok(symbol
        .degree_range()
        .map(|j| symbol.degree_weight::<T>(j) * energies[j])
        .sum())
}

/// Trace weight `Σ_j (1 - h(2^{-Q} j)) ξ(j) N(j)` left uncovered by the dyadic
/// levels `0..=Q`.
pub fn dyadic_tail<T: Scalar>(d: SphereDim, k: ActivationOrder, q_max: u32) -> T {
    let lo = 1usize << q_max;
    let hi = 1usize << (q_max + 1);
    let scale = lit::<T>(lo as f64);
    let partial: T = (lo + 1..hi)
        .filter(|&j| j > k.get() && j % 2 == k.parity_offset())
        .map(|j| {
            let jt = lit::<T>(j as f64);
            (T::one() - smooth_step(jt / scale))
                * xi_eval(d, k, jt).expect("j > k")
                * harmonic_dim_real::<T>(d, j)
        })
        .sum();
    partial + tail_sum::<T>(d, k, hi - 1)
}

/// Angles `θ_i = π (i + 1/2) / N`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| std::f64::consts::PI * (i as f64 + 0.5) / n as f64).collect()
}

/// `(θ, |L_q(cos θ)|)` on a grid of interior angles.
pub fn localization_profile<T: Scalar>(
    q: u32,
    d: SphereDim,
    k: ActivationOrder,
    grid: &[T],
) -> Result<Vec<(T, T)>> {
    if grid.len() < 3 {
        return Err(Error::DegenerateGrid(format!("{} angles", grid.len())));
    }
    if let Some(bad) = grid.iter().find(|&&th| !(th > T::zero() && th < T::PI())) {
        return Err(Error::DegenerateGrid(format!("angle {} outside (0, π)", to_f64(*bad))));
    }
    let kernel = LocalizedKernel::new(q, d, k, BlockSymbol::new(q, d, k).required_degree())?;
    let ts: Vec<T> = grid.iter().map(|&th| th.cos()).collect();
    let mut out = vec![T::zero(); ts.len()];
    kernel.eval_many(&ts, &mut out);
    Ok(grid.iter().zip(out).map(|(&th, v)| (th, v.abs())).collect())
}

/// Power-law fit of the localization envelope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationFit {
    pub q: u32,
    /// Fitted exponent of `env ≈ A (1 + 2^q sin θ)^{slope}`.
    pub slope: f64,
    pub slope_stderr: f64,
    /// `A / L_q(1)`.
    pub amplitude: f64,
    pub points_used: usize,
    pub diag: f64,
    /// `|L_q(0)| / L_q(1)`.
    pub equator_ratio: f64,
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, stderr(b))`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("{n} points for a line fit")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((a, b, stderr))
}

/// Fits `ln env(x)` against `ln(1 + x)`, `x = 2^q sin θ`, over `x ∈ [4, 2^q / 4]`,
/// where `env(x)` is the largest `|L_q|` seen at any `x' >= x`.
pub fn fit_localization(
    q: u32,
    d: SphereDim,
    k: ActivationOrder,
    profile: &[(f64, f64)],
) -> Result<LocalizationFit> {
    let scale = 2f64.powi(q as i32);
    let mut pts: Vec<(f64, f64)> = profile.iter().map(|&(th, v)| (scale * th.sin(), v)).collect();
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite abscissa"));
    let mut run = 0.0f64;
    for p in pts.iter_mut() {
        run = run.max(p.1);
        p.1 = run;
    }
    let (lo, hi) = (4.0, scale / 4.0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .filter(|&&(x, v)| x >= lo && x <= hi && v > 0.0)
        .map(|&(x, v)| ((1.0 + x).ln(), v.ln()))
        .unzip();
    let (a, b, se) = ols(&xs, &ys)?;
    let kernel = LocalizedKernel::<f64>::new(q, d, k, BlockSymbol::new(q, d, k).required_degree())?;
    let diag = kernel.at_one();
    Ok(LocalizationFit {
        q,
        slope: b,
        slope_stderr: se,
        amplitude: a.exp() / diag,
        points_used: xs.len(),
        diag,
        equator_ratio: kernel.eval(0.0).abs() / diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::build_table;
    use crate::linalg::symmetric_eigenvalues;
    use crate::points::generate_antipodal_quasiuniform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s2() -> SphereDim {
        SphereDim::new(2).unwrap()
    }

    fn random_points(n: usize, seed: u64) -> PointSet<f64> {
        let pool = crate::points::candidate_pool::<f64>(s2(), n, seed);
        let rows: Vec<Vec<f64>> = pool.chunks_exact(3).map(|c| c.to_vec()).collect();
        PointSet::from_rows(s2(), &rows).unwrap()
    }

    #[test]
    fn insufficient_degree() {
        let r = localized_kernel_eval::<f64>(5, s2(), ActivationOrder::new(1), 0.3, 63);
        assert_eq!(r, Err(Error::InsufficientDegree { have: 63, need: 64 }));
        assert!(localized_kernel_eval::<f64>(5, s2(), ActivationOrder::new(1), 0.3, 64).is_ok());
    }

    #[test]
    fn diagonal_scaling_band() {
        for k in 0..2 {
            let k = ActivationOrder::new(k);
            let vals: Vec<f64> = (3..=10)
                .map(|q| {
                    let l = LocalizedKernel::<f64>::new(q, s2(), k, 1 << (q + 1)).unwrap();
                    l.at_one() * 2f64.powi((q * (2 * k.get() as u32 + 1)) as i32)
                })
                .collect();
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            assert!(lo > 0.0 && hi / lo <= 4.0, "{vals:?}");
        }
    }

    #[test]
    fn single_point_block() {
        let ps = random_points(1, 3);
        let b = assemble_dyadic_block(&ps, 4, ActivationOrder::new(1));
        assert_eq!(b.matrix.n(), 1);
        assert!((b.matrix.get(0, 0) - b.diag).abs() <= 1e-12 * b.diag);
    }

    #[test]
    fn antipodal_entries() {
        let ps = random_points(3, 4).antipodal_closure();
        for k in 0..3 {
            let k = ActivationOrder::new(k);
            let b = assemble_dyadic_block(&ps, 5, k);
            let sign = if k.parity_offset() == 0 { 1.0 } else { -1.0 };
            for i in 0..3 {
                assert!((b.matrix.get(i, i + 3) - sign * b.diag).abs() <= 1e-10 * b.diag);
            }
        }
    }

    #[test]
    fn degree_blocks_are_psd() {
        let ps = random_points(30, 5);
        for m in [0usize, 1, 2, 7, 20] {
            let p = assemble_degree_block(&ps, m);
            let n_m = harmonic_dim_real::<f64>(s2(), m);
            assert!((p.matrix.get(3, 3) - n_m).abs() < 1e-12 * n_m);
            let lmin = symmetric_eigenvalues(&p.matrix).unwrap()[0];
            assert!(lmin >= -1e-8 * n_m);
        }
    }

    #[test]
    fn dyadic_sum_matches_spectral_sum() {
        let ps = random_points(12, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        for k in 0..2 {
            let k = ActivationOrder::new(k);
            let q_max = 8u32;
            let top = 1usize << (q_max + 1);
            let table = build_table::<f64>(s2(), k, top).unwrap();
            let e = degree_energies(&ps, &a, top);
            // degrees weighted by Σ_{q ≤ q_max} ζ(2^{-q} j) = h(2^{-q_max} j)
            let spectral: f64 = (k.get() + 1..=top)
                .map(|j| {
                    let s = table.sigma_hat(j);
                    smooth_step(j as f64 / (1 << q_max) as f64) * s * s * e[j]
                })
                .sum();
            let dyadic: f64 = (0..=q_max)
                .map(|q| assemble_dyadic_block(&ps, q, k).matrix.quad_form(&a))
                .sum();
            assert!((spectral - dyadic).abs() <= 1e-10 * spectral.abs(), "{spectral} {dyadic}");
            let via_energy: f64 = (0..=q_max)
                .map(|q| dyadic_energy(&e, &BlockSymbol::new(q, s2(), k)).unwrap())
                .sum();
            assert!((via_energy - dyadic).abs() <= 1e-10 * spectral.abs());
        }
    }

    #[test]
    fn degree_energies_match_blocks() {
        let ps = random_points(9, 8);
        let a: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let e = degree_energies(&ps, &a, 12);
        for m in [0usize, 3, 12] {
            let direct = assemble_degree_block(&ps, m).matrix.quad_form(&a);
            assert!((direct - e[m]).abs() <= 1e-11 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn gershgorin_holds() {
        let ps = generate_antipodal_quasiuniform::<f64>(s2(), 64, 1, 50).unwrap();
        for q in 3..8 {
            let c = certify_dominance(&assemble_dyadic_block(&ps, q, ActivationOrder::new(1))).unwrap();
            assert!(c.gershgorin_consistent);
            if c.dominant {
                assert!(c.lambda_min >= c.diag / 2.0 - 1e-12 * c.diag);
            }
        }
    }

    #[test]
    fn profile_symmetry_and_fit() {
        let k = ActivationOrder::new(1);
        let grid = uniform_grid(2048);
        let prof = localization_profile(8, s2(), k, &grid).unwrap();
        let diag = LocalizedKernel::<f64>::new(8, s2(), k, 512).unwrap().at_one();
        for i in 0..1024 {
            let (a, b) = (prof[i].1, prof[2047 - i].1);
            assert!((a - b).abs() <= 1e-12 * diag);
        }
        let fit = fit_localization(8, s2(), k, &prof).unwrap();
        assert!(fit.slope <= -2.0 && fit.equator_ratio <= 1e-3, "{fit:?}");
        assert!(localization_profile::<f64>(8, s2(), k, &[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn line_fit() {
        let xs: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 1.25 * x).collect();
        let (a, b, se) = ols(&xs, &ys).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b + 1.25).abs() < 1e-14 && se < 1e-12);
        assert!(ols(&xs[..2], &ys[..2]).is_err());
    }

    #[test]
    fn dyadic_tail_matches_direct_weights() {
        let k = ActivationOrder::new(1);
        let t6: f64 = dyadic_tail(s2(), k, 6);
        let t7: f64 = dyadic_tail(s2(), k, 7);
        let level7: f64 = (65..256)
            .map(|j| BlockSymbol::new(7, s2(), k).degree_weight::<f64>(j) * harmonic_dim_real::<f64>(s2(), j))
            .sum();
        assert!((t6 - t7 - level7).abs() <= 1e-12 * t6);
    }
}
