//! Zonal Sobolev targets and best `L^2(S^d)` approximation from
//! `span{σ_k(θ_j·)}` via the Gram system.

use rayon::prelude::*;
use serde::Serialize;

use crate::activation::{index_set_member, ActivationOrder, CoefficientTable};
use crate::error::{Error, Result};
use crate::kernel::{assemble_pairwise, assemble_zonal_matrix, degree_energies};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::points::PointSet;
use crate::polynomials::{gauss_rule, harmonic_dim_real, Recurrence, SphereDim};
use crate::scalar::{lit, to_f64, Scalar};
use crate::surface::exact_kernel;

/// Smoothness margin: `f̂(m)^2 N(m) = (1+m)^{-2r-1-δ}`.
pub const DEFAULT_DELTA: f64 = 0.5;
/// Default spectral cut-off of a target.
pub const DEFAULT_TARGET_DEGREE: usize = 2048;
pub const DEFAULT_RCOND: f64 = 1e-12;

/// `f(η) = Σ_m f̂(m) p_m(θ₀·η)`.
#[derive(Debug, Clone, Serialize)]
pub struct ZonalTarget<T> {
    pub d: SphereDim,
    pub center: Vec<T>,
    pub coeffs: Vec<T>,
    pub smoothness: f64,
    pub restricted: bool,
}

impl<T: Scalar> ZonalTarget<T> {
    pub fn from_coeffs(d: SphereDim, center: Vec<T>, coeffs: Vec<T>, smoothness: f64, restricted: bool) -> Result<Self> {
        if center.len() != d.ambient() {
            return Err(Error::InvalidParameter("center has the wrong dimension".into()));
        }
        let norm = center.iter().map(|&x| x * x).sum::<T>().sqrt();
        let dev = to_f64((norm - T::one()).abs());
        if !(dev <= 1e-8) {
            return Err(Error::NonUnitVector(dev));
        }
        Ok(ZonalTarget { d, center, coeffs, smoothness, restricted })
    }

    /// Expansion of the zonal profile `g(θ₀·η)` up to `max_degree`, exact for
    /// polynomial `g` of degree at most `max_degree`.
    pub fn from_profile(
        d: SphereDim,
        center: Vec<T>,
        max_degree: usize,
        g: impl Fn(T) -> T,
    ) -> Result<Self> {
        let rule = gauss_rule::<T>(d, max_degree + 8)?;
        let rec = Recurrence::<T>::new(d, max_degree.max(1));
        let mut coeffs = vec![T::zero(); max_degree + 1];
        let mut vals = vec![T::zero(); max_degree + 1];
        let mass = d.weight_mass::<T>();
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            rec.fill(x, &mut vals);
            let gx = g(x);
            for (c, &r) in coeffs.iter_mut().zip(&vals) {
                // <g, p_m> / ||p_m||^2 = <g, r_m> / mass
                *c = *c + w * gx * r / mass;
            }
        }
        Self::from_coeffs(d, center, coeffs, f64::INFINITY, false)
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `‖f‖^2 = Σ f̂(m)^2 N(m)`.
    pub fn norm_sq(&self) -> T {
        self.tail_norm_sq(0)
    }

    /// `‖f - P_{from-1} f‖^2 = Σ_{m >= from} f̂(m)^2 N(m)`.
    pub fn tail_norm_sq(&self, from: usize) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .skip(from)
            .map(|(m, &c)| c * c * harmonic_dim_real::<T>(self.d, m))
            .sum()
    }

    /// `Σ (m^{2r} + 1) f̂(m)^2 N(m)`.
    pub fn sobolev_norm_sq(&self, r: f64) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| (lit::<T>((m as f64).powf(2.0 * r)) + T::one()) * c * c * harmonic_dim_real::<T>(self.d, m))
            .sum()
    }

    pub fn eval(&self, eta: &[T]) -> T {
        let t: T = self.center.iter().zip(eta).map(|(&a, &b)| a * b).sum();
        let t = t.max(-T::one()).min(T::one());
        let rec = Recurrence::<T>::new(self.d, self.max_degree().max(1));
        let c: Vec<T> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &f)| f * harmonic_dim_real::<T>(self.d, m))
            .collect();
        rec.sum(&c, t)
    }
}

/// Power-law zonal target with `f̂(m)^2 N(m) = (1+m)^{-2r-1-δ}` on the
/// allowed degrees (all of `0..=M_f`, or `E_{σ_k} ∩ [0, M_f]` when restricted).
pub fn make_sobolev_target<T: Scalar>(
    d: SphereDim,
    k: ActivationOrder,
    r: f64,
    max_degree: usize,
    center: Vec<T>,
    restrict_to_index_set: bool,
) -> Result<ZonalTarget<T>> {
    make_sobolev_target_with_margin(d, k, r, DEFAULT_DELTA, max_degree, center, restrict_to_index_set)
}

pub fn make_sobolev_target_with_margin<T: Scalar>(
    d: SphereDim,
    k: ActivationOrder,
    r: f64,
    delta: f64,
    max_degree: usize,
    center: Vec<T>,
    restrict_to_index_set: bool,
) -> Result<ZonalTarget<T>> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("smoothness r must be positive".into()));
    }
    if max_degree < 8 {
        return Err(Error::InvalidParameter("target degree cap must be at least 8".into()));
    }
    let coeffs = (0..=max_degree)
        .map(|m| {
            if restrict_to_index_set && !index_set_member(k, m) {
                return T::zero();
            }
            let e = (1.0 + m as f64).powf(-2.0 * r - 1.0 - delta);
            lit::<T>((e / harmonic_dim_real::<f64>(d, m)).sqrt())
        })
        .collect();
    ZonalTarget::from_coeffs(d, center, coeffs, r, restrict_to_index_set)
}

/// A fixed, generic unit vector used as the default target center.
pub fn default_center<T: Scalar>(d: SphereDim) -> Vec<T> {
    let raw: Vec<f64> = (0..d.ambient()).map(|i| 0.3 + 0.17 * i as f64 + 0.05 * (i * i) as f64).collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw.iter().map(|x| lit(x / norm)).collect()
}

/// How the Gram matrix `⨍ σ_k(θ_i·η) σ_k(θ_j·η) dη` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GramKernel {
    /// Closed-form arc-cosine kernel (no truncation).
    Exact,
    /// Truncated Legendre series `Σ_{m ≤ M} σ̂_k(m)^2 p_m`.
    Spectral,
}

/// Normal equations of the best-approximation problem.
#[derive(Debug, Clone, Serialize)]
pub struct GramSystem<T> {
    pub g: Matrix<T>,
    pub b: Vec<T>,
    pub norm_sq_f: T,
    pub kernel: GramKernel,
    /// Trace weight omitted by a truncated kernel (zero for the exact kernel).
    pub tail_bound: T,
}

/// The Gram matrix alone.
pub fn gram_matrix<T: Scalar>(
    ps: &PointSet<T>,
    table: &CoefficientTable<T>,
    kernel: GramKernel,
) -> Matrix<T> {
    match kernel {
        GramKernel::Exact => {
            let (d, k) = (table.d, table.k);
            assemble_pairwise(ps, |ts, out| {
                for (o, &t) in out.iter_mut().zip(ts) {
                    *o = exact_kernel(d, k, t.acos());
                }
            })
        }
        GramKernel::Spectral => {
            let rec = Recurrence::new(table.d, table.max_degree);
            assemble_zonal_matrix(ps, &rec, &table.kernel_series(table.max_degree))
        }
    }
}

/// `b_j = Σ_m f̂(m) σ̂_k(m) p_m(θ₀·θ_j)`.
pub fn rhs_vector<T: Scalar>(ps: &PointSet<T>, table: &CoefficientTable<T>, target: &ZonalTarget<T>) -> Vec<T> {
    let top = target.max_degree().min(table.max_degree);
    let coeffs: Vec<T> = (0..=top)
        .map(|m| target.coeffs[m] * table.sigma_hat(m) * harmonic_dim_real::<T>(table.d, m))
        .collect();
    let rec = Recurrence::new(table.d, top.max(1));
    let ts: Vec<T> = ps
        .iter()
        .map(|p| {
            let t: T = p.iter().zip(&target.center).map(|(&a, &b)| a * b).sum();
            t.max(-T::one()).min(T::one())
        })
        .collect();
    let mut b = vec![T::zero(); ts.len()];
    rec.sum_many(&coeffs, &ts, &mut b);
    b
}

pub fn assemble_gram<T: Scalar>(
    ps: &PointSet<T>,
    table: &CoefficientTable<T>,
    target: &ZonalTarget<T>,
    kernel: GramKernel,
) -> Result<GramSystem<T>> {
    if table.d != target.d || table.d != ps.dim() {
        return Err(Error::InvalidParameter("dimension mismatch between points, table and target".into()));
    }
    if table.max_degree < target.max_degree() {
        return Err(Error::InsufficientDegree { have: table.max_degree, need: target.max_degree() });
    }
    let tail_bound = match kernel {
        GramKernel::Exact => T::zero(),
        GramKernel::Spectral => {
            let diag = table.trace() + table.tail;
            let tol = lit::<T>(1e-10) * diag;
            if table.tail > tol {
                let p = 2.0 * table.k.get() as f64 + 1.0;
                let need = table.max_degree as f64 * (to_f64(table.tail / tol)).powf(1.0 / p);
                return Err(Error::InsufficientDegree { have: table.max_degree, need: need.ceil() as usize });
            }
            table.tail
        }
    };
    Ok(GramSystem {
        g: gram_matrix(ps, table, kernel),
        b: rhs_vector(ps, table, target),
        norm_sq_f: target.norm_sq(),
        kernel,
        tail_bound,
    })
}

/// Result of the pseudo-inverse solve.
#[derive(Debug, Clone, Serialize)]
pub struct BestApprox<T> {
    pub error: T,
    /// `‖f‖^2 - bᵀG⁺b` before clamping at zero.
    pub error_sq_raw: T,
    /// Amount added by the clamp (zero when the raw value is nonnegative).
    pub clamp: T,
    pub projection: T,
    pub a: Vec<T>,
    pub dropped_modes: usize,
    /// More than half of the spectrum was dropped.
    pub ill_conditioned: bool,
}

pub fn best_approx_error<T: Scalar>(sys: &GramSystem<T>, rcond: T) -> Result<BestApprox<T>> {
    if !(rcond > T::zero() && rcond < T::one()) {
        return Err(Error::InvalidParameter("rcond must lie in (0, 1)".into()));
    }
    let n = sys.b.len();
    let eig = symmetric_eigen(&sys.g)?;
    let (a, dropped) = eig.pseudo_solve(&sys.b, rcond);
    let projection: T = a.iter().zip(&sys.b).map(|(&x, &y)| x * y).sum();
    let raw = sys.norm_sq_f - projection;
    let clamp = if raw < T::zero() { -raw } else { T::zero() };
    Ok(BestApprox {
        error: raw.max(T::zero()).sqrt(),
        error_sq_raw: raw,
        clamp,
        projection,
        a,
        dropped_modes: dropped,
        ill_conditioned: 2 * dropped > n,
    })
}

/// `‖f - Σ_j a_j σ_k(θ_j·)‖^2 = ‖f‖^2 - 2 aᵀb + aᵀGa`.
pub fn residual_sq<T: Scalar>(sys: &GramSystem<T>, a: &[T]) -> T {
    let ab: T = a.iter().zip(&sys.b).map(|(&x, &y)| x * y).sum();
    sys.norm_sq_f - lit::<T>(2.0) * ab + sys.g.quad_form(a)
}

/// Split of `‖f_n‖^2` at a cut-off degree.
#[derive(Debug, Clone, Serialize)]
pub struct EnergySplit<T> {
    /// `Σ_{m < cutoff} σ̂^2 aᵀP(m)a`.
    pub low: T,
    /// `‖f_n‖^2 - low`.
    pub high: T,
    /// `‖f_n‖^2 = aᵀ G a` with the exact kernel.
    pub total: T,
    /// Per-degree energies `σ̂^2 aᵀP(m)a`, `m < cutoff`.
    pub per_degree: Vec<T>,
}

/// Low/high split of `f_n = Σ a_j σ_k(θ_j·)` at degree `cutoff_degree`.
pub fn low_degree_energy<T: Scalar>(
    a: &[T],
    ps: &PointSet<T>,
    table: &CoefficientTable<T>,
    cutoff_degree: usize,
) -> Result<EnergySplit<T>> {
    if cutoff_degree == 0 {
        return Err(Error::InvalidParameter("cut-off degree must be positive".into()));
    }
    if table.max_degree + 1 < cutoff_degree {
        return Err(Error::InsufficientDegree { have: table.max_degree, need: cutoff_degree - 1 });
    }
    let energies = degree_energies(ps, a, cutoff_degree - 1);
    let per_degree: Vec<T> = energies
        .iter()
        .enumerate()
        .map(|(m, &e)| table.sigma_hat(m) * table.sigma_hat(m) * e)
        .collect();
    let low: T = per_degree.iter().copied().sum();
    let total = exact_quadratic_form(ps, table.k, a);
    Ok(EnergySplit { low, high: total - low, total, per_degree })
}

/// `aᵀ G a` for the exact kernel, without storing `G`.
pub fn exact_quadratic_form<T: Scalar>(ps: &PointSet<T>, k: ActivationOrder, a: &[T]) -> T {
    let d = ps.dim();
    let n = ps.len();
    let rows: Vec<T> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = a[i] * exact_kernel(d, k, T::zero());
            for j in i + 1..n {
                let rho = crate::surface::angle_between(ps.point(i), ps.point(j));
                s = s + lit::<T>(2.0) * a[j] * exact_kernel(d, k, rho);
            }
            a[i] * s
        })
        .collect();
    rows.into_iter().sum()
}

/// Coefficients that reproduce `(θ_i·η)^k` from an antipodally closed set in
/// which point `i + n/2` is `-θ_i`.
pub fn antipodal_reconstruction<T: Scalar>(n: usize, i: usize, k: ActivationOrder) -> Vec<T> {
    let mut a = vec![T::zero(); n];
    a[i] = T::one();
    a[i + n / 2] = if k.get() % 2 == 0 { T::one() } else { -T::one() };
    a
}

/// Integration nodes on `S^d` with weights summing to 1: the product rule
/// on `S^2`, a seeded Monte Carlo sample otherwise.
pub fn sphere_nodes<T: Scalar>(d: SphereDim, resolution: usize, seed: u64) -> Vec<(Vec<T>, T)> {
    if d.get() == 2 {
        return crate::surface::sphere_product_rule::<T>(resolution, 2 * resolution)
            .into_iter()
            .map(|(p, w)| (p.to_vec(), w))
            .collect();
    }
    let count = resolution * resolution * 2;
    let pool = crate::points::candidate_pool::<T>(d, count, seed);
    let w = lit::<T>(1.0 / count as f64);
    pool.chunks_exact(d.ambient()).map(|p| (p.to_vec(), w)).collect()
}

/// `‖f - Σ_j a_j σ_k(θ_j·)‖` evaluated pointwise on integration nodes.
///
/// Unlike `‖f‖^2 - bᵀG⁺b`, this does not lose half the digits to
/// cancellation when the residual is tiny.
pub fn residual_norm<T: Scalar>(
    target: &ZonalTarget<T>,
    ps: &PointSet<T>,
    k: ActivationOrder,
    a: &[T],
    nodes: &[(Vec<T>, T)],
) -> T {
    let kk = k.get() as i32;
    let rec = Recurrence::<T>::new(target.d, target.max_degree().max(1));
    let c: Vec<T> = target
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, &f)| f * harmonic_dim_real::<T>(target.d, m))
        .collect();
    let sq: T = nodes
        .par_iter()
        .map(|(eta, w)| {
            let t0: T = target.center.iter().zip(eta).map(|(&x, &y)| x * y).sum();
            let mut r = rec.sum(&c, t0.max(-T::one()).min(T::one()));
            for (j, &aj) in a.iter().enumerate() {
                let t: T = ps.point(j).iter().zip(eta).map(|(&x, &y)| x * y).sum();
                if t > T::zero() {
                    r = r - aj * t.powi(kk);
                }
            }
            *w * r * r
        })
        .collect::<Vec<T>>()
        .into_iter()
        .sum();
    sq.sqrt()
}

/// Expansion of the zonal power `t ↦ t^k` about `center`.
pub fn power_target<T: Scalar>(d: SphereDim, k: ActivationOrder, center: Vec<T>) -> Result<ZonalTarget<T>> {
    let kk = k.get() as i32;
    ZonalTarget::from_profile(d, center, k.get().max(8), |t| t.powi(kk))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::build_table;
    use crate::points::generate_antipodal_quasiuniform;
    use crate::surface::sphere_product_rule;

    fn s2() -> SphereDim {
        SphereDim::new(2).unwrap()
    }

    #[test]
    fn target_norms_and_sobolev() {
        let k = ActivationOrder::new(1);
        let t = make_sobolev_target::<f64>(s2(), k, 1.0, 64, default_center(s2()), false).unwrap();
        assert!(t.sobolev_norm_sq(1.0).is_finite());
        // H^3 partial sums keep growing with the degree cap, H^1 ones settle
        let grow = |r: f64| {
            let a = make_sobolev_target::<f64>(s2(), k, 1.0, 256, default_center(s2()), false).unwrap();
            let b = make_sobolev_target::<f64>(s2(), k, 1.0, 512, default_center(s2()), false).unwrap();
            b.sobolev_norm_sq(r) / a.sobolev_norm_sq(r)
        };
        assert!(grow(3.0) > 4.0);
        assert!(grow(1.0) < 1.05);
        assert!(make_sobolev_target::<f64>(s2(), k, 0.0, 64, default_center(s2()), false).is_err());
        assert!(make_sobolev_target::<f64>(s2(), k, 1.0, 4, default_center(s2()), false).is_err());
    }

    #[test]
    fn norm_matches_surface_quadrature() {
        let t = make_sobolev_target::<f64>(s2(), ActivationOrder::new(0), 1.0, 8, default_center(s2()), false).unwrap();
        let rule = sphere_product_rule::<f64>(24, 48);
        let quad: f64 = rule.iter().map(|(p, w)| w * t.eval(p).powi(2)).sum();
        assert!((quad - t.norm_sq()).abs() <= 1e-10 * t.norm_sq());
    }

    #[test]
    fn profile_expansion_of_powers() {
        let t = ZonalTarget::<f64>::from_profile(s2(), default_center(s2()), 10, |x| x * x).unwrap();
        // t^2 = 1/3 p_0 + (2/3)/5 p_2 on S^2
        assert!((t.coeffs[0] - 1.0 / 3.0).abs() < 1e-14);
        assert!((t.coeffs[2] - 2.0 / 15.0).abs() < 1e-14);
        assert!(t.coeffs[1].abs() < 1e-14 && t.coeffs[4].abs() < 1e-14);
    }

    fn setup(n: usize, k: usize) -> (PointSet<f64>, CoefficientTable<f64>) {
        let ps = generate_antipodal_quasiuniform::<f64>(s2(), n, 1, 50).unwrap();
        (ps, build_table(s2(), ActivationOrder::new(k), 512).unwrap())
    }

    #[test]
    fn constant_target_needs_an_antipodal_pair() {
        // σ_0(θ·η) + σ_0(-θ·η) = 1 almost everywhere
        let (ps, table) = setup(8, 0);
        let closed = ps.antipodal_closure();
        let mut c = vec![0.0; 9];
        c[0] = 1.0;
        let t = ZonalTarget::from_coeffs(s2(), default_center(s2()), c, 1.0, true).unwrap();
        let sys = assemble_gram(&closed, &table, &t, GramKernel::Exact).unwrap();
        let sol = best_approx_error(&sys, 1e-12).unwrap();
        assert!(sol.error <= 1e-7, "{}", sol.error);
        let open = assemble_gram(&ps, &table, &t, GramKernel::Exact).unwrap();
        assert!(best_approx_error(&open, 1e-12).unwrap().error > 1e-3);
    }

    #[test]
    fn unreachable_target_keeps_full_error() {
        let (ps, table) = setup(16, 1);
        let mut c = vec![0.0; 9];
        c[3] = 0.2;
        c[5] = 0.1;
        let t = ZonalTarget::from_coeffs(s2(), default_center(s2()), c, 1.0, false).unwrap();
        let sys = assemble_gram(&ps, &table, &t, GramKernel::Exact).unwrap();
        assert!(sys.b.iter().all(|&x| x == 0.0));
        let sol = best_approx_error(&sys, 1e-12).unwrap();
        assert!((sol.error - t.norm_sq().sqrt()).abs() < 1e-15);
    }

    #[test]
    fn pythagoras_and_residual() {
        let (ps, table) = setup(40, 0);
        let t = make_sobolev_target(s2(), ActivationOrder::new(0), 2.5, 256, default_center(s2()), true).unwrap();
        let sys = assemble_gram(&ps, &table, &t, GramKernel::Exact).unwrap();
        let sol = best_approx_error(&sys, 1e-12).unwrap();
        assert!((sol.error_sq_raw + sol.projection - sys.norm_sq_f).abs() <= 1e-10 * sys.norm_sq_f);
        let res = residual_sq(&sys, &sol.a);
        assert!((res - sol.error_sq_raw).abs() <= 1e-10 * sys.norm_sq_f);
        assert!(best_approx_error(&sys, 1.5).is_err());
    }

    #[test]
    fn spectral_gram_needs_depth() {
        let (ps, table) = setup(10, 0);
        let t = make_sobolev_target(s2(), ActivationOrder::new(0), 2.5, 64, default_center(s2()), true).unwrap();
        assert!(matches!(
            assemble_gram(&ps, &table, &t, GramKernel::Spectral),
            Err(Error::InsufficientDegree { .. })
        ));
        let deep = build_table::<f64>(s2(), ActivationOrder::new(2), 2048).unwrap();
        let ok = assemble_gram(&ps, &deep, &t, GramKernel::Spectral).unwrap();
        let exact = gram_matrix(&ps, &deep, GramKernel::Exact);
        for i in 0..10 {
            for j in 0..10 {
                assert!((ok.g.get(i, j) - exact.get(i, j)).abs() <= 1e-9 * exact.get(0, 0));
            }
        }
    }

    #[test]
    fn energy_split_adds_up() {
        let (ps, table) = setup(20, 1);
        let a: Vec<f64> = (0..20).map(|i| ((i * 7 % 5) as f64 - 2.0) / 3.0).collect();
        let s = low_degree_energy(&a, &ps, &table, 512).unwrap();
        // the degrees above 511 carry at most ‖a‖^2 times the trace tail
        let a2: f64 = a.iter().map(|x| x * x).sum();
        assert!(s.high >= -1e-12 * s.total && s.high <= 2.0 * a2 * table.tail + 1e-12 * s.total);
        assert!((s.low + s.high - s.total).abs() < 1e-15 * s.total.max(1.0) * 10.0);
    }

    #[test]
    fn antipodal_reconstruction_identity() {
        let base = generate_antipodal_quasiuniform::<f64>(s2(), 10, 3, 50).unwrap();
        let ps = base.antipodal_closure();
        for k in 0..3 {
            let k = ActivationOrder::new(k);
            let table = build_table::<f64>(s2(), k, 64).unwrap();
            let t = power_target(s2(), k, ps.point(2).to_vec()).unwrap();
            let a = antipodal_reconstruction::<f64>(20, 2, k);
            let nodes = sphere_nodes::<f64>(s2(), 60, 1);
            let norm = t.norm_sq().sqrt();
            assert!(residual_norm(&t, &ps, k, &a, &nodes) <= 1e-12 * norm);
            let sys = assemble_gram(&ps, &table, &t, GramKernel::Exact).unwrap();
            let sol = best_approx_error(&sys, 1e-12).unwrap();
            assert!(residual_norm(&t, &ps, k, &sol.a, &nodes) <= 1e-10 * norm);
        }
    }

    #[test]
    fn exact_quadratic_form_matches_matrix() {
        let (ps, table) = setup(15, 1);
        let a: Vec<f64> = (0..15).map(|i| (i as f64).cos()).collect();
        let g = gram_matrix(&ps, &table, GramKernel::Exact);
        let q = exact_quadratic_form(&ps, ActivationOrder::new(1), &a);
        assert!((g.quad_form(&a) - q).abs() < 1e-13 * q.abs());
    }
}
