//! Dense symmetric matrices and a symmetric eigensolver
//! (Householder tridiagonalization followed by implicit QL).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Square dense matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![T::zero(); n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data has wrong length");
        Matrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `xᵀ A x`.
    pub fn quad_form(&self, x: &[T]) -> T {
        self.matvec(x).iter().zip(x).map(|(&a, &b)| a * b).sum()
    }

    pub fn add_scaled(&mut self, other: &Matrix<T>, s: T) {
        assert_eq!(self.n, other.n);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + s * b;
        }
    }

    pub fn max_asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

/// Eigen-decomposition `A = V diag(values) Vᵀ`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    // column-major: eigenvector j is vectors[j*n..(j+1)*n]
    vectors: Vec<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    pub fn vector(&self, j: usize) -> &[T] {
        let n = self.values.len();
        &self.vectors[j * n..(j + 1) * n]
    }

    /// `x = A⁺ b` keeping eigenvalues above `rcond * λ_max`; returns the
    /// solution and the number of dropped modes.
    pub fn pseudo_solve(&self, b: &[T], rcond: T) -> (Vec<T>, usize) {
        let n = self.values.len();
        let lmax = self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
        let cut = rcond * lmax;
        let mut x = vec![T::zero(); n];
        let mut dropped = 0;
        for j in 0..n {
            let lam = self.values[j];
            if !(lam > cut) {
                dropped += 1;
                continue;
            }
            let v = self.vector(j);
            let c: T = v.iter().zip(b).map(|(&a, &bb)| a * bb).sum::<T>() / lam;
            for (xi, &vi) in x.iter_mut().zip(v) {
                *xi = *xi + c * vi;
            }
        }
        (x, dropped)
    }
}

#[inline]
fn idx(n: usize, r: usize, c: usize) -> usize {
    // column-major access keeps the inner loops of the reduction contiguous
    c * n + r
}

/// Householder reduction to tridiagonal form (in place on `v`, column-major).
/// With `accumulate` the orthogonal transform is formed in `v`.
fn tred2<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T], accumulate: bool) {
    for j in 0..n {
        d[j] = v[idx(n, n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale = scale + d[k].abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(n, i - 1, j)];
                v[idx(n, i, j)] = T::zero();
                v[idx(n, j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] = d[k] / scale;
                h = h + d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(n, j, i)] = f;
                g = e[j] + v[idx(n, j, j)] * f;
                let col = &v[idx(n, 0, j)..idx(n, 0, j) + n];
                for k in j + 1..i {
                    g = g + col[k] * d[k];
                    e[k] = e[k] + col[k] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                let base = idx(n, 0, j);
                for k in j..i {
                    v[base + k] = v[base + k] - (f * e[k] + g * d[k]);
                }
                d[j] = v[idx(n, i - 1, j)];
                v[idx(n, i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    if !accumulate {
        for j in 0..n {
            d[j] = v[idx(n, j, j)];
        }
        e[0] = T::zero();
        return;
    }
    for i in 0..n - 1 {
        v[idx(n, n - 1, i)] = v[idx(n, i, i)];
        v[idx(n, i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[idx(n, k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[idx(n, k, i + 1)] * v[idx(n, k, j)];
                }
                let base = idx(n, 0, j);
                for k in 0..=i {
                    v[base + k] = v[base + k] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[idx(n, k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n, n - 1, j)];
        v[idx(n, n - 1, j)] = T::zero();
    }
    v[idx(n, n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL on the tridiagonal `(d, e)`, optionally rotating `v`.
fn tql2<T: Scalar>(n: usize, v: Option<&mut [T]>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let mut v = v;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let two = lit::<T>(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    let max_iter = 60;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::EigenNonConvergence {
                        iterations: max_iter,
                        norm: tst1.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;
                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (lo, hi) = v.split_at_mut(idx(n, 0, i + 1));
                        let vi = &mut lo[idx(n, 0, i)..];
                        for k in 0..n {
                            let hk = hi[k];
                            hi[k] = s * vi[k] + c * hk;
                            vi[k] = c * vi[k] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

fn check_square<T: Scalar>(a: &Matrix<T>) -> Result<()> {
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Full eigen-decomposition of a symmetric matrix.
pub fn symmetric_eigen<T: Scalar>(a: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    check_square(a)?;
    let n = a.n;
    if n == 0 {
        return Ok(SymmetricEigen { values: vec![], vectors: vec![] });
    }
    // row-major symmetric data doubles as column-major
    let mut v = a.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(n, &mut v, &mut d, &mut e, true);
    tql2(n, Some(&mut v), &mut d, &mut e)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &j in &order {
        vectors.extend_from_slice(&v[j * n..(j + 1) * n]);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<T>> {
    check_square(a)?;
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let mut v = a.data.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(n, &mut v, &mut d, &mut e, false);
    tql2(n, None, &mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Matrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.random_range(-1.0..1.0);
                a.set(i, j, x);
                a.set(j, i, x);
            }
        }
        a
    }

    #[test]
    fn diagonal_and_small() {
        let a = Matrix::from_row_major(2, vec![2.0f64, 1.0, 1.0, 2.0]);
        let e = symmetric_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15 && (e.values[1] - 3.0).abs() < 1e-15);
        let a = Matrix::from_fn(4, |i, j| if i == j { (4 - i) as f64 } else { 0.0 });
        assert_eq!(symmetric_eigenvalues(&a).unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        let one = Matrix::from_row_major(1, vec![5.0]);
        assert_eq!(symmetric_eigen(&one).unwrap().values, vec![5.0]);
    }

    #[test]
    fn backward_error_and_orthogonality() {
        for (n, seed) in [(7usize, 1u64), (40, 2), (120, 3)] {
            let a = random_symmetric(n, seed);
            let e = symmetric_eigen(&a).unwrap();
            let norm = a.norm();
            let mut resid = 0.0f64;
            for j in 0..n {
                let v = e.vector(j);
                let av = a.matvec(v);
                for i in 0..n {
                    resid = resid.max((av[i] - e.values[j] * v[i]).abs());
                }
                for l in 0..n {
                    let ip: f64 = v.iter().zip(e.vector(l)).map(|(x, y)| x * y).sum();
                    let want = if l == j { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-12);
                }
            }
            assert!(resid <= 1e-10 * norm, "n={n}: {resid}");
            let vals = symmetric_eigenvalues(&a).unwrap();
            for (x, y) in vals.iter().zip(&e.values) {
                assert!((x - y).abs() <= 1e-12 * norm);
            }
        }
    }

    #[test]
    fn trace_is_preserved() {
        let a = random_symmetric(60, 9);
        let tr: f64 = (0..60).map(|i| a.get(i, i)).sum();
        let s: f64 = symmetric_eigenvalues(&a).unwrap().iter().sum();
        assert!((tr - s).abs() < 1e-11);
    }

    #[test]
    fn pseudo_inverse_drops_null_space() {
        // rank-one matrix u uᵀ
        let u = [1.0f64, 2.0, -1.0];
        let a = Matrix::from_fn(3, |i, j| u[i] * u[j]);
        let e = symmetric_eigen(&a).unwrap();
        let (x, dropped) = e.pseudo_solve(&u, 1e-12);
        assert_eq!(dropped, 2);
        // A⁺ u = u / |u|^2
        for (xi, ui) in x.iter().zip(&u) {
            assert!((xi - ui / 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn single_precision() {
        let a = Matrix::<f32>::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]);
        let v: Vec<f32> = symmetric_eigenvalues(&a).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-6 && (v[1] - 3.0).abs() < 1e-6);
    }
}
