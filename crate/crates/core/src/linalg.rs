//! Small dense linear algebra kernel: storage, a square-root free Cholesky
//! (LDLᵀ) over any [`Field`], a symmetric eigensolver and a Jacobi
//! preconditioned conjugate gradient.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> DenseMatrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DenseMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        DenseMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

impl<T: Field> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn is_symmetric(&self, tol: &T) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| (self[(i, j)].clone() - self[(j, i)].clone()).abs_val() <= *tol)
            })
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LDLᵀ factorization of a symmetric positive definite matrix.
///
/// Only field operations are used, so the factorization is exact over the
/// rationals.
#[derive(Debug, Clone)]
pub struct LdlFactor<T> {
    /// Unit lower triangle in the strict lower part, D on the diagonal.
    packed: DenseMatrix<T>,
}

impl<T: Field> LdlFactor<T> {
    /// Returns `None` when a pivot is not strictly positive.
    pub fn new(a: &DenseMatrix<T>) -> Option<Self> {
        let n = a.rows();
        assert_eq!(n, a.cols());
        let mut p = DenseMatrix::<T>::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].clone();
            for k in 0..j {
                let l = p[(j, k)].clone();
                d = d - l.clone() * l * p[(k, k)].clone();
            }
            if d <= T::zero() {
                return None;
            }
            p[(j, j)] = d.clone();
            for i in j + 1..n {
                let mut s = a[(i, j)].clone();
                for k in 0..j {
                    s = s - p[(i, k)].clone() * p[(j, k)].clone() * p[(k, k)].clone();
                }
                p[(i, j)] = s / d.clone();
            }
        }
        Some(LdlFactor { packed: p })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let p = &self.packed;
        let n = p.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = p[(i, k)].clone() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = yi.clone() / p[(i, i)].clone();
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = p[(k, i)].clone() * y[k].clone();
                y[i] = y[i].clone() - t;
            }
        }
        y
    }

    /// Solves `A X = B` column by column.
    pub fn solve_many(&self, b: &DenseMatrix<T>) -> DenseMatrix<T> {
        let mut x = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let col = self.solve(&b.column(j));
            for (i, v) in col.into_iter().enumerate() {
                x[(i, j)] = v;
            }
        }
        x
    }
}

/// Eigen decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Option<DenseMatrix<T>>,
}

/// Householder tridiagonalization followed by implicit QL with Wilkinson
/// shifts. Only the lower triangle of `a` is read.
pub fn symmetric_eigen<T: Scalar>(a: &DenseMatrix<T>, want_vectors: bool) -> Result<SymmetricEigen<T>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "eigen decomposition needs a square matrix");
    if n == 0 {
        return Ok(SymmetricEigen {
            values: vec![],
            vectors: want_vectors.then(|| DenseMatrix::zeros(0, 0)),
        });
    }
    let mut v = a.clone();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e, want_vectors);
    ql_implicit(&mut d, &mut e, want_vectors.then_some(&mut v))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| {
        let mut out = DenseMatrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                out[(r, new)] = v[(r, old)];
            }
        }
        out
    });
    Ok(SymmetricEigen { values, vectors })
}

fn tridiagonalize<T: Scalar>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T], accumulate: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let t = f * e[k] + g * d[k];
                    v[(k, j)] -= t;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (i, di) in d.iter_mut().enumerate() {
            *di = v[(i, i)];
        }
        e[0] = T::zero();
        return;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let t = g * d[k];
                    v[(k, j)] -= t;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], mut vectors: Option<&mut DenseMatrix<T>>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let two = T::lit(2.0);
    let max_sweeps = 60 * n.max(1);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::ConvergenceFailure(format!(
                        "QL iteration did not converge for eigenvalue {l}"
                    )));
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
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

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
                    if let Some(v) = vectors.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                            v[(k, i)] = c * v[(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

/// Jacobi preconditioned conjugate gradient for a symmetric positive
/// (semi)definite operator.
///
/// With `deflate_constant` the iterates are kept orthogonal to the all-ones
/// vector, which makes singular Laplacian systems with a compatible right hand
/// side well posed.
pub fn conjugate_gradient<T: Scalar>(
    apply: impl Fn(&[T], &mut [T]),
    diagonal: &[T],
    b: &[T],
    rel_tol: T,
    max_iter: usize,
    deflate_constant: bool,
) -> Result<Vec<T>> {
    let n = b.len();
    let project = |x: &mut [T]| {
        if deflate_constant && n > 0 {
            let mean = x.iter().copied().sum::<T>() / T::from_usize_lossy(n);
            x.iter_mut().for_each(|v| *v -= mean);
        }
    };
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(x, y)| *x * *y).sum::<T>();
    let precond = |r: &[T], z: &mut [T]| {
        for i in 0..n {
            z[i] = if diagonal[i] > T::zero() { r[i] / diagonal[i] } else { r[i] };
        }
    };

    let mut r = b.to_vec();
    project(&mut r);
    let bnorm = dot(&r, &r).sqrt();
    let mut x = vec![T::zero(); n];
    if bnorm == T::zero() {
        return Ok(x);
    }
    let mut z = vec![T::zero(); n];
    precond(&r, &mut z);
    project(&mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![T::zero(); n];
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        project(&mut ap);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            project(&mut x);
            return Ok(x);
        }
        precond(&r, &mut z);
        project(&mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // Recompute the true residual before giving up.
    let mut ax = vec![T::zero(); n];
    apply(&x, &mut ax);
    let mut res = b.to_vec();
    project(&mut res);
    let rn = res
        .iter()
        .zip(&ax)
        .map(|(a, b)| (*a - *b) * (*a - *b))
        .sum::<T>()
        .sqrt();
    if rn <= rel_tol * bnorm * T::lit(10.0) {
        project(&mut x);
        Ok(x)
    } else {
        Err(Error::ConvergenceFailure(format!(
            "conjugate gradient stalled at relative residual {:e}",
            (rn / bnorm).to_f64().unwrap_or(f64::NAN)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ldl_exact_over_rationals() {
        let a = DenseMatrix::from_rows(vec![
            vec![q(2, 1), q(-1, 1)],
            vec![q(-1, 1), q(2, 1)],
        ]);
        let f = LdlFactor::new(&a).unwrap();
        let x = f.solve(&[q(1, 1), q(0, 1)]);
        assert_eq!(x, vec![q(2, 3), q(1, 3)]);
    }

    #[test]
    fn ldl_rejects_indefinite() {
        let a = DenseMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(LdlFactor::new(&a).is_none());
        let z = DenseMatrix::from_rows(vec![vec![0.0]]);
        assert!(LdlFactor::new(&z).is_none());
    }

    #[test]
    fn eigen_of_path_laplacian() {
        let a = DenseMatrix::<f64>::from_rows(vec![
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ]);
        let eig = symmetric_eigen(&a, true).unwrap();
        let expect = [0.0, 1.0, 3.0];
        for (v, e) in eig.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
        let vecs = eig.vectors.unwrap();
        for k in 0..3 {
            let col = vecs.column(k);
            let av = a.mul_vec(&col);
            for i in 0..3 {
                assert!((av[i] - eig.values[k] * col[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigen_values_only_matches_full() {
        let a = DenseMatrix::<f64>::from_rows(vec![
            vec![4.0, 1.0, -2.0, 0.5],
            vec![1.0, 3.0, 0.0, 1.0],
            vec![-2.0, 0.0, 5.0, -1.0],
            vec![0.5, 1.0, -1.0, 2.0],
        ]);
        let full = symmetric_eigen(&a, true).unwrap();
        let vals = symmetric_eigen(&a, false).unwrap();
        for (x, y) in full.values.iter().zip(&vals.values) {
            assert!((x - y).abs() < 1e-12);
        }
        let trace: f64 = full.values.iter().sum();
        assert!((trace - 14.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_single_and_empty() {
        let a = DenseMatrix::from_rows(vec![vec![3.5f32]]);
        assert_eq!(symmetric_eigen(&a, true).unwrap().values, vec![3.5]);
        let e = DenseMatrix::<f64>::zeros(0, 0);
        assert!(symmetric_eigen(&e, false).unwrap().values.is_empty());
    }

    #[test]
    fn cg_solves_grounded_laplacian() {
        // Path P4 Laplacian, singular; rhs orthogonal to ones.
        let lap = DenseMatrix::<f64>::from_rows(vec![
            vec![1.0, -1.0, 0.0, 0.0],
            vec![-1.0, 2.0, -1.0, 0.0],
            vec![0.0, -1.0, 2.0, -1.0],
            vec![0.0, 0.0, -1.0, 1.0],
        ]);
        let b = [1.0, 0.0, 0.0, -1.0];
        let x = conjugate_gradient(
            |v, out| out.copy_from_slice(&lap.mul_vec(v)),
            &[1.0, 2.0, 2.0, 1.0],
            &b,
            1e-13,
            100,
            true,
        )
        .unwrap();
        // effective resistance between the path ends is 3
        assert!((x[0] - x[3] - 3.0).abs() < 1e-10);
        assert!(x.iter().sum::<f64>().abs() < 1e-12);
    }
}
