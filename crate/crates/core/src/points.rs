//! Point sets on `S^d`: greedy antipodal maximin generation and uniformity
//! certificates (separation, antipodal separation, mesh norm).
//!
//! Distances are computed from chords, `ρ = 2 asin(|x - y| / 2)`, which is
//! the same angle as `acos(x·y)` but keeps full relative accuracy near 0 and
//! π and is exactly zero for duplicated or antipodal pairs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polynomials::SphereDim;
use crate::scalar::{lit, Scalar};

/// Tolerance on `| |x| - 1 |` accepted by distance routines.
pub const UNIT_TOLERANCE: f64 = 1e-8;
/// Default candidate-pool multiplier for greedy generation.
pub const DEFAULT_POOL_FACTOR: usize = 50;
/// Minimum candidate-pool size.
pub const MIN_POOL: usize = 10_000;

/// `n` unit vectors in `R^{d+1}`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSet<T> {
    d: SphereDim,
    coords: Vec<T>,
}

impl<T: Scalar> PointSet<T> {
    /// Builds a set from explicit rows, rejecting rows that are not unit length.
    pub fn from_rows(d: SphereDim, rows: &[Vec<T>]) -> Result<Self> {
        let dim = d.ambient();
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidParameter(format!(
                    "point has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            check_unit(row)?;
            coords.extend_from_slice(row);
        }
        Ok(PointSet { d, coords })
    }

    pub fn dim(&self) -> SphereDim {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.d.ambient()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        let a = self.d.ambient();
        &self.coords[i * a..(i + 1) * a]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks_exact(self.d.ambient())
    }

    /// `θ_i · θ_j`, clamped to `[-1, 1]`.
    #[inline]
    pub fn dot(&self, i: usize, j: usize) -> T {
        dot(self.point(i), self.point(j)).max(-T::one()).min(T::one())
    }

    /// First `n` points.
    pub fn prefix(&self, n: usize) -> Self {
        let a = self.d.ambient();
        PointSet { d: self.d, coords: self.coords[..n.min(self.len()) * a].to_vec() }
    }

    /// The set together with the negation of every point.
    pub fn antipodal_closure(&self) -> Self {
        let mut coords = self.coords.clone();
        coords.extend(self.coords.iter().map(|&x| -x));
        PointSet { d: self.d, coords }
    }
}

#[inline]
fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

fn check_unit<T: Scalar>(x: &[T]) -> Result<()> {
    let norm = dot(x, x).sqrt();
    let dev = (norm - T::one()).abs().to_f64().unwrap_or(f64::NAN);
    if !(dev <= UNIT_TOLERANCE) {
        return Err(Error::NonUnitVector(dev));
    }
    Ok(())
}

#[inline]
fn chord_angle<T: Scalar>(x: &[T], y: &[T], sign: T) -> T {
    let c: T = x.iter().zip(y).map(|(&a, &b)| (a - sign * b) * (a - sign * b)).sum();
    let half = c.sqrt() / lit(2.0);
    lit::<T>(2.0) * half.min(T::one()).asin()
}

/// Geodesic distance `ρ(x, y)` in `[0, π]`.
pub fn geodesic<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_unit(x)?;
    check_unit(y)?;
    Ok(chord_angle(x, y, T::one()))
}

/// Antipodal distance `min(ρ(x, y), ρ(x, -y))` in `[0, π/2]`.
pub fn antipodal_distance<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    check_unit(x)?;
    check_unit(y)?;
    Ok(chord_angle(x, y, T::one()).min(chord_angle(x, y, -T::one())))
}

fn random_unit<T: Scalar>(rng: &mut ChaCha8Rng, dim: usize, out: &mut Vec<T>) {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.extend(v.iter().map(|x| lit::<T>(x / norm)));
            return;
        }
    }
}

/// Seeded pool of `size` uniform random unit vectors.
pub fn candidate_pool<T: Scalar>(d: SphereDim, size: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Vec::with_capacity(size * d.ambient());
    for _ in 0..size {
        random_unit(&mut rng, d.ambient(), &mut pool);
    }
    pool
}

/// Greedy maximin selection of `n` points from a pool under the antipodal
/// metric. The first point is the first candidate; each later point is the
/// candidate farthest (in antipodal distance) from everything chosen so far,
/// ties broken by pool index.
pub fn greedy_select<T: Scalar>(d: SphereDim, pool: &[T], n: usize) -> Result<PointSet<T>> {
    let a = d.ambient();
    let size = pool.len() / a;
    if size == 0 || n == 0 {
        return Err(Error::PoolExhausted { found: 0, requested: n });
    }
    // Largest |x·θ| against chosen points; antipodal distance is acos of it.
    let mut closeness = vec![T::neg_infinity(); size];
    let mut chosen = Vec::with_capacity(n * a);
    let mut next = 0usize;
    let limit = T::one() - lit::<T>(64.0) * T::epsilon();
    for found in 0..n {
        let p = &pool[next * a..(next + 1) * a];
        chosen.extend_from_slice(p);
        closeness[next] = T::infinity();
        if found + 1 == n {
            break;
        }
        closeness
            .par_iter_mut()
            .zip(pool.par_chunks_exact(a))
            .for_each(|(c, x)| {
                let v = dot(x, p).abs();
                if v > *c {
                    *c = v;
                }
            });
        let (best, val) = closeness
            .par_iter()
            .enumerate()
            .map(|(i, &c)| (i, c))
            .reduce(
                || (usize::MAX, T::infinity()),
                |l, r| if r.1 < l.1 || (r.1 == l.1 && r.0 < l.0) { r } else { l },
            );
        if best == usize::MAX || !(val < limit) {
            return Err(Error::PoolExhausted { found: found + 1, requested: n });
        }
        next = best;
    }
    Ok(PointSet { d, coords: chosen })
}

/// Antipodally quasi-uniform `n`-point set from a seeded pool of
/// `max(pool_factor * n, 10^4)` candidates.
pub fn generate_antipodal_quasiuniform<T: Scalar>(
    d: SphereDim,
    n: usize,
    seed: u64,
    pool_factor: usize,
) -> Result<PointSet<T>> {
    if n < d.get() + 2 {
        return Err(Error::TooFewPoints { n, min: d.get() + 2 });
    }
    let size = (pool_factor.max(1) * n).max(MIN_POOL);
    let pool = candidate_pool::<T>(d, size, seed);
    greedy_select(d, &pool, n)
}

/// Separation and covering statistics of a point set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub n: usize,
    /// `min_{i≠j} ρ(θ_i, θ_j)`.
    pub separation_geo: f64,
    /// `min_{i≠j} min(ρ(θ_i, θ_j), ρ(-θ_i, θ_j))`.
    pub separation: f64,
    /// Sampled lower estimate of `max_θ min_j ρ(θ, θ_j)`.
    pub mesh_norm: f64,
    pub mesh_ratio: f64,
    pub mesh_is_estimate: bool,
    /// Set when some pair is (numerically) antipodal or duplicated.
    pub antipodal_violation: bool,
}

/// Exact pairwise separations plus a sampled, hill-climbed mesh-norm estimate.
pub fn certify_uniformity<T: Scalar>(ps: &PointSet<T>, mesh_samples: usize, seed: u64) -> Result<UniformityReport> {
    let n = ps.len();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    let (sep_geo, sep) = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = ps.point(i);
            let mut g = f64::INFINITY;
            let mut s = f64::INFINITY;
            for j in i + 1..n {
                let y = ps.point(j);
                let plus = chord_angle(x, y, T::one()).to_f64().unwrap_or(f64::NAN);
                let minus = chord_angle(x, y, -T::one()).to_f64().unwrap_or(f64::NAN);
                g = g.min(plus);
                s = s.min(plus.min(minus));
            }
            (g, s)
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |a, b| (a.0.min(b.0), a.1.min(b.1)));
    let mesh = mesh_norm_estimate(ps, mesh_samples, seed);
    Ok(UniformityReport {
        n,
        separation_geo: sep_geo,
        separation: sep,
        mesh_norm: mesh,
        mesh_ratio: if sep > 0.0 { mesh / sep } else { f64::INFINITY },
        mesh_is_estimate: true,
        antipodal_violation: !(sep > 1e-12),
    })
}

fn nearest_distance<T: Scalar>(ps: &PointSet<T>, x: &[f64]) -> f64 {
    let best = ps
        .iter()
        .map(|p| p.iter().zip(x).map(|(a, b)| a.to_f64().unwrap_or(f64::NAN) * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    best.clamp(-1.0, 1.0).acos()
}

fn mesh_norm_estimate<T: Scalar>(ps: &PointSet<T>, samples: usize, seed: u64) -> f64 {
    let a = ps.dim().ambient();
    let samples = samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d65_7368);
    let mut pts: Vec<f64> = Vec::with_capacity(samples * a);
    for _ in 0..samples {
        random_unit(&mut rng, a, &mut pts);
    }
    let (worst_idx, mut worst) = pts
        .par_chunks_exact(a)
        .enumerate()
        .map(|(i, x)| (i, nearest_distance(ps, x)))
        .reduce(|| (usize::MAX, f64::NEG_INFINITY), |l, r| if r.1 > l.1 || (r.1 == l.1 && r.0 < l.0) { r } else { l });
    let mut x = pts[worst_idx * a..(worst_idx + 1) * a].to_vec();
    // Local refinement around the worst sample with shrinking steps.
    let mut step = worst * 0.5;
    for _ in 0..3 {
        for _ in 0..200 {
            let mut y: Vec<f64> = x
                .iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + step * z
                })
                .collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
            let dist = nearest_distance(ps, &y);
            if dist > worst {
                worst = dist;
                x = y;
            }
        }
        step *= 0.5;
    }
    worst
}

/// Smallest level `κ >= 0` with `2^κ >= C3 / h`, where `h` is the antipodal separation.
pub fn kappa_threshold(report: &UniformityReport, c3: f64) -> Result<u32> {
    kappa_for_separation(report.separation, c3)
}

/// [`kappa_threshold`] on a bare separation value.
pub fn kappa_for_separation(h: f64, c3: f64) -> Result<u32> {
    if !(h > 0.0) {
        return Err(Error::AntipodalDegeneracy);
    }
    if !(c3 > 0.0) {
        return Err(Error::InvalidParameter("C3 must be positive".into()));
    }
    let mut q = 0u32;
    while 2f64.powi(q as i32) * h < c3 {
        q += 1;
        if q > 1000 {
            return Err(Error::InvalidParameter("separation too small for a dyadic level".into()));
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> SphereDim {
        SphereDim::new(2).unwrap()
    }

    #[test]
    fn geodesic_examples() {
        let e1 = [1.0f64, 0.0, 0.0];
        let e2 = [0.0f64, 1.0, 0.0];
        let m1 = [-1.0f64, 0.0, 0.0];
        assert_eq!(geodesic(&e1, &e1).unwrap(), 0.0);
        assert!((geodesic(&e1, &m1).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((geodesic(&e1, &e2).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(geodesic(&[1.1f64, 0.0, 0.0], &e1), Err(Error::NonUnitVector(_))));
    }

    #[test]
    fn antipodal_metric_symmetry() {
        let pool = candidate_pool::<f64>(s2(), 60, 3);
        for t in pool.chunks_exact(9) {
            let (x, y) = (&t[0..3], &t[3..6]);
            let ny: Vec<f64> = y.iter().map(|v| -v).collect();
            let a = antipodal_distance(x, y).unwrap();
            assert_eq!(a, antipodal_distance(y, x).unwrap());
            assert!((a - antipodal_distance(x, &ny).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn small_set_ordering() {
        let ps = generate_antipodal_quasiuniform::<f64>(s2(), 6, 7, DEFAULT_POOL_FACTOR).unwrap();
        let r = certify_uniformity(&ps, 600, 1).unwrap();
        assert!(r.separation > 0.0 && r.separation <= r.separation_geo);
        assert!(r.mesh_norm >= r.separation_geo / 2.0);
    }

    #[test]
    fn deterministic() {
        let a = generate_antipodal_quasiuniform::<f64>(s2(), 40, 11, 50).unwrap();
        let b = generate_antipodal_quasiuniform::<f64>(s2(), 40, 11, 50).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            generate_antipodal_quasiuniform::<f64>(s2(), 3, 1, 50),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn orthogonal_pair() {
        let ps = PointSet::from_rows(s2(), &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let r = certify_uniformity(&ps, 200, 1).unwrap();
        assert!((r.separation_geo - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((r.separation - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn antipodal_pair_is_degenerate() {
        let ps = PointSet::from_rows(
            s2(),
            &[vec![0.6, 0.8, 0.0], vec![0.0, 0.0, 1.0], vec![-0.6, -0.8, 0.0]],
        )
        .unwrap();
        let r = certify_uniformity(&ps, 300, 1).unwrap();
        assert_eq!(r.separation, 0.0);
        assert!(r.antipodal_violation);
        assert_eq!(kappa_threshold(&r, 4.0), Err(Error::AntipodalDegeneracy));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa_for_separation(0.125, 1.0).unwrap(), 3);
        assert_eq!(kappa_for_separation(0.1, 2.0).unwrap(), 5);
        assert_eq!(kappa_for_separation(0.0, 2.0), Err(Error::AntipodalDegeneracy));
    }

    #[test]
    fn greedy_prefixes_are_monotone() {
        let pool = candidate_pool::<f64>(s2(), 10_000, 5);
        let full = greedy_select(s2(), &pool, 200).unwrap();
        let mut prev = f64::INFINITY;
        for n in [10usize, 25, 50, 100, 200] {
            let r = certify_uniformity(&full.prefix(n), 10, 1).unwrap();
            assert!(r.separation <= prev);
            prev = r.separation;
        }
    }

    #[test]
    fn packing_bound_on_s2() {
        // 2n disjoint caps of radius h/2: n (1 - cos(h/2)) <= 1
        for n in [32usize, 128, 512] {
            let ps = generate_antipodal_quasiuniform::<f64>(s2(), n, 2, 50).unwrap();
            let r = certify_uniformity(&ps, 10, 1).unwrap();
            assert!(n as f64 * (1.0 - (r.separation / 2.0).cos()) <= 1.0);
        }
    }

    #[test]
    fn mesh_ratio_is_moderate() {
        let ps = generate_antipodal_quasiuniform::<f64>(s2(), 256, 1, 50).unwrap();
        let r = certify_uniformity(&ps, 25_600, 1).unwrap();
        assert!(r.mesh_ratio <= 4.0, "{r:?}");
        let r2 = certify_uniformity(&ps, 51_200, 2).unwrap();
        assert!((r.mesh_norm - r2.mesh_norm).abs() <= 0.05 * r.mesh_norm);
    }

    #[test]
    fn separation_scaling_band() {
        let vals: Vec<f64> = [64usize, 128, 256, 512, 1024]
            .iter()
            .map(|&n| {
                let ps = generate_antipodal_quasiuniform::<f64>(s2(), n, 1, 50).unwrap();
                certify_uniformity(&ps, 10, 1).unwrap().separation * (n as f64).sqrt()
            })
            .collect();
        let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
        let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
        assert!(hi / lo <= 3.0, "{vals:?}");
    }
}
