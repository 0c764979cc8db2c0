//! Steklov spectrum through the Dirichlet-to-Neumann (DtN) operator.
//!
//! The DtN matrix is the Schur complement of the Laplacian onto the boundary,
//! `S = L_BB - L_BI L_II^{-1} L_IB`; its eigenpairs are the Steklov eigenpairs,
//! and `f_I = -L_II^{-1} L_IB f_B` is the harmonic extension of boundary data.

use std::collections::VecDeque;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::graph::BoundaryGraph;
use crate::linalg::{conjugate_gradient, symmetric_eigen, DenseMatrix, LdlFactor};
use crate::scalar::{Field, Scalar};

/// Interior blocks larger than this are solved by conjugate gradient.
pub const DENSE_INTERIOR_LIMIT: usize = 4096;

/// Dirichlet-to-Neumann matrix on the boundary vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct DtnMatrix<T> {
    /// Order `|boundary|`; row/column `i` belongs to `boundary[i]`.
    pub matrix: DenseMatrix<T>,
    pub boundary: Vec<usize>,
    pub interior: Vec<usize>,
    /// `|interior| x |boundary|` harmonic extension operator.
    pub extension: DenseMatrix<T>,
}

impl<T: Field> DtnMatrix<T> {
    /// Extends boundary values (ordered like `boundary`) harmonically to all vertices.
    pub fn extend(&self, n: usize, on_boundary: &[T]) -> Vec<T> {
        let mut f = vec![T::zero(); n];
        for (&b, v) in self.boundary.iter().zip(on_boundary) {
            f[b] = v.clone();
        }
        for (row, &i) in self.interior.iter().enumerate() {
            f[i] = self
                .extension
                .row(row)
                .iter()
                .zip(on_boundary)
                .fold(T::zero(), |acc, (e, x)| acc + e.clone() * x.clone());
        }
        f
    }
}

fn check_interior_attached(g: &BoundaryGraph) -> Result<()> {
    let mut seen = vec![false; g.n()];
    let mut queue: VecDeque<usize> = g.boundary().iter().copied().collect();
    for &b in g.boundary() {
        seen[b] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    if seen.iter().all(|&s| s) {
        Ok(())
    } else {
        Err(Error::SingularInterior)
    }
}

struct Blocks {
    boundary: Vec<usize>,
    interior: Vec<usize>,
    /// position of a vertex inside its own block
    local: Vec<usize>,
}

impl Blocks {
    fn new(g: &BoundaryGraph) -> Self {
        let boundary = g.boundary().to_vec();
        let interior = g.interior();
        let mut local = vec![0; g.n()];
        for (i, &b) in boundary.iter().enumerate() {
            local[b] = i;
        }
        for (i, &v) in interior.iter().enumerate() {
            local[v] = i;
        }
        Blocks {
            boundary,
            interior,
            local,
        }
    }

    fn l_bb<T: Field>(&self, g: &BoundaryGraph) -> DenseMatrix<T> {
        let nb = self.boundary.len();
        let mut m = DenseMatrix::zeros(nb, nb);
        for (i, &b) in self.boundary.iter().enumerate() {
            m[(i, i)] = T::from_int(g.degree(b) as i64);
            for &w in g.neighbors(b) {
                if g.is_boundary(w) {
                    m[(i, self.local[w])] = -T::one();
                }
            }
        }
        m
    }

    /// `L_IB` as a dense `|I| x |B|` block.
    fn l_ib<T: Field>(&self, g: &BoundaryGraph) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.interior.len(), self.boundary.len());
        for (i, &v) in self.interior.iter().enumerate() {
            for &w in g.neighbors(v) {
                if g.is_boundary(w) {
                    m[(i, self.local[w])] = -T::one();
                }
            }
        }
        m
    }

    fn l_ii<T: Field>(&self, g: &BoundaryGraph) -> DenseMatrix<T> {
        let ni = self.interior.len();
        let mut m = DenseMatrix::zeros(ni, ni);
        for (i, &v) in self.interior.iter().enumerate() {
            m[(i, i)] = T::from_int(g.degree(v) as i64);
            for &w in g.neighbors(v) {
                if !g.is_boundary(w) {
                    m[(i, self.local[w])] = -T::one();
                }
            }
        }
        m
    }
}

/// Assembles `S = L_BB + L_IB^T E` from the extension `E = -L_II^{-1} L_IB`.
fn assemble<T: Field>(g: &BoundaryGraph, blocks: Blocks, extension: DenseMatrix<T>) -> DtnMatrix<T> {
    let mut s = blocks.l_bb::<T>(g);
    let nb = blocks.boundary.len();
    // L_BI has at most deg(b) nonzeros per row, all equal to -1.
    for (i, &b) in blocks.boundary.iter().enumerate() {
        for &w in g.neighbors(b) {
            if !g.is_boundary(w) {
                let row = blocks.local[w];
                for j in 0..nb {
                    s[(i, j)] = s[(i, j)].clone() - extension[(row, j)].clone();
                }
            }
        }
    }
    DtnMatrix {
        matrix: s,
        boundary: blocks.boundary,
        interior: blocks.interior,
        extension,
    }
}

fn dense_extension<T: Field>(g: &BoundaryGraph, blocks: &Blocks) -> Result<DenseMatrix<T>> {
    let l_ii = blocks.l_ii::<T>(g);
    let factor = LdlFactor::new(&l_ii).ok_or(Error::SingularInterior)?;
    let rhs = blocks.l_ib::<T>(g);
    Ok(factor.solve_many(&rhs).map(|x| -x.clone()))
}

/// Exact DtN matrix over the rationals.
pub fn dtn_matrix_exact(g: &BoundaryGraph) -> Result<DtnMatrix<BigRational>> {
    check_interior_attached(g)?;
    let blocks = Blocks::new(g);
    let extension = dense_extension(g, &blocks)?;
    Ok(assemble(g, blocks, extension))
}

/// Floating point DtN matrix. Dense LDLᵀ of `L_II` up to
/// [`DENSE_INTERIOR_LIMIT`] interior vertices, Jacobi-CG above.
pub fn dtn_matrix<T: Scalar>(g: &BoundaryGraph) -> Result<DtnMatrix<T>> {
    check_interior_attached(g)?;
    let blocks = Blocks::new(g);
    let extension = if blocks.interior.len() <= DENSE_INTERIOR_LIMIT {
        dense_extension(g, &blocks)?
    } else {
        iterative_extension(g, &blocks)?
    };
    let mut dtn = assemble(g, blocks, extension);
    let nb = dtn.boundary.len();
    let half = T::lit(0.5);
    for i in 0..nb {
        for j in 0..i {
            let avg = (dtn.matrix[(i, j)] + dtn.matrix[(j, i)]) * half;
            dtn.matrix[(i, j)] = avg;
            dtn.matrix[(j, i)] = avg;
        }
    }
    Ok(dtn)
}

fn iterative_extension<T: Scalar>(g: &BoundaryGraph, blocks: &Blocks) -> Result<DenseMatrix<T>> {
    let ni = blocks.interior.len();
    let nb = blocks.boundary.len();
    let inner: Vec<Vec<usize>> = blocks
        .interior
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| !g.is_boundary(w))
                .map(|&w| blocks.local[w])
                .collect()
        })
        .collect();
    let diag: Vec<T> = blocks
        .interior
        .iter()
        .map(|&v| T::from_usize_lossy(g.degree(v)))
        .collect();
    let apply = |x: &[T], out: &mut [T]| {
        for i in 0..ni {
            let mut acc = diag[i] * x[i];
            for &j in &inner[i] {
                acc -= x[j];
            }
            out[i] = acc;
        }
    };
    let mut ext = DenseMatrix::zeros(ni, nb);
    for (j, &b) in blocks.boundary.iter().enumerate() {
        // -L_IB e_b has a one at each interior neighbour of b
        let mut rhs = vec![T::zero(); ni];
        let mut any = false;
        for &w in g.neighbors(b) {
            if !g.is_boundary(w) {
                rhs[blocks.local[w]] = T::one();
                any = true;
            }
        }
        if !any {
            continue;
        }
        let x = conjugate_gradient(&apply, &diag, &rhs, T::solve_tol(), 20 * ni + 100, false)?;
        for i in 0..ni {
            ext[(i, j)] = x[i];
        }
    }
    Ok(ext)
}

/// Sorted Steklov eigenvalues with harmonically extended eigenfunctions.
#[derive(Debug, Clone, PartialEq)]
pub struct SteklovSpectrum<T> {
    pub eigenvalues: Vec<T>,
    pub boundary: Vec<usize>,
    /// `n x |boundary|`; column `k` is the eigenfunction of `eigenvalues[k]`.
    pub eigenfunctions: DenseMatrix<T>,
}

impl<T: Scalar> SteklovSpectrum<T> {
    /// `lambda(1)` is the smallest eigenvalue.
    pub fn lambda(&self, k: usize) -> Option<T> {
        k.checked_sub(1).and_then(|i| self.eigenvalues.get(i).copied())
    }

    pub fn eigenfunction(&self, k: usize) -> Vec<T> {
        self.eigenfunctions.column(k - 1)
    }
}

fn clamp_structural_zero<T: Scalar>(values: &mut [T]) {
    if let (Some(&first), Some(&last)) = (values.first(), values.last()) {
        let scale = last.abs().max(first.abs());
        if first.abs() < T::eigen_tol() * scale || scale == T::zero() {
            values[0] = T::zero();
        }
    }
}

pub fn steklov_spectrum<T: Scalar>(g: &BoundaryGraph) -> Result<SteklovSpectrum<T>> {
    let dtn = dtn_matrix::<T>(g)?;
    let eig = symmetric_eigen(&dtn.matrix, true)?;
    let vectors = eig.vectors.expect("vectors requested");
    let nb = dtn.boundary.len();

    let norm = (0..nb)
        .flat_map(|i| (0..nb).map(move |j| (i, j)))
        .map(|(i, j)| dtn.matrix[(i, j)].abs())
        .fold(T::zero(), T::max);
    let tol = T::eigen_tol() * norm.max(T::one()) * T::from_usize_lossy(nb.max(1));
    for k in 0..nb {
        let v = vectors.column(k);
        let sv = dtn.matrix.mul_vec(&v);
        let worst = sv
            .iter()
            .zip(&v)
            .map(|(a, b)| (*a - eig.values[k] * *b).abs())
            .fold(T::zero(), T::max);
        if !(worst <= tol) {
            return Err(Error::ConvergenceFailure(format!(
                "eigenpair {k} residual {:e} above tolerance",
                worst.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }

    let mut eigenvalues = eig.values;
    clamp_structural_zero(&mut eigenvalues);
    let n = g.n();
    let mut eigenfunctions = DenseMatrix::zeros(n, nb);
    for k in 0..nb {
        let f = dtn.extend(n, &vectors.column(k));
        for (v, x) in f.into_iter().enumerate() {
            eigenfunctions[(v, k)] = x;
        }
    }
    Ok(SteklovSpectrum {
        eigenvalues,
        boundary: dtn.boundary,
        eigenfunctions,
    })
}

/// Eigenvalues only; skips eigenvector accumulation.
pub fn steklov_eigenvalues<T: Scalar>(g: &BoundaryGraph) -> Result<Vec<T>> {
    let dtn = dtn_matrix::<T>(g)?;
    let mut values = symmetric_eigen(&dtn.matrix, false)?.values;
    clamp_structural_zero(&mut values);
    Ok(values)
}

/// `k`-th smallest Steklov eigenvalue, 1-based.
pub fn lambda_k<T: Scalar>(g: &BoundaryGraph, k: usize) -> Result<T> {
    let nb = g.boundary().len();
    if k == 0 || k > nb {
        return Err(Error::IndexOutOfRange {
            what: "eigenvalue",
            index: k,
            bound: nb,
        });
    }
    Ok(steklov_eigenvalues::<T>(g)?[k - 1])
}

/// Dirichlet energy `sum over edges (f(x) - f(y))^2`.
pub fn dirichlet_energy<T: Scalar>(g: &BoundaryGraph, f: &[T]) -> T {
    g.edges()
        .iter()
        .map(|&(x, y)| (f[x] - f[y]) * (f[x] - f[y]))
        .sum()
}

pub fn rayleigh_quotient<T: Scalar>(g: &BoundaryGraph, f: &[T]) -> Result<T> {
    assert_eq!(f.len(), g.n(), "function must be defined on every vertex");
    let mass: T = g.boundary().iter().map(|&b| f[b] * f[b]).sum();
    if mass == T::zero() {
        return Err(Error::ZeroBoundaryNorm);
    }
    Ok(dirichlet_energy(g, f) / mass)
}

/// Vector-valued Rayleigh quotient; an upper bound on λ₂ whenever the boundary
/// values sum to zero.
pub fn vector_rayleigh_bound<T: Scalar, const D: usize>(g: &BoundaryGraph, v: &[[T; D]]) -> Result<T> {
    assert_eq!(v.len(), g.n(), "embedding must be defined on every vertex");
    let norm = |p: &[T; D]| p.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let mut sum = [T::zero(); D];
    let mut mass = T::zero();
    let mut total_norm = T::zero();
    for &b in g.boundary() {
        for d in 0..D {
            sum[d] += v[b][d];
        }
        let nb = norm(&v[b]);
        mass += nb * nb;
        total_norm += nb;
    }
    if mass == T::zero() {
        return Err(Error::ZeroBoundaryNorm);
    }
    let centroid_tol = T::epsilon().sqrt() * T::lit(64.0);
    let s = norm(&sum);
    if s > centroid_tol * total_norm {
        return Err(Error::CentroidNotZero(s.to_f64().unwrap_or(f64::NAN)));
    }
    let energy: T = g
        .edges()
        .iter()
        .map(|&(x, y)| (0..D).map(|d| (v[x][d] - v[y][d]) * (v[x][d] - v[y][d])).sum::<T>())
        .sum();
    Ok(energy / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn star() -> BoundaryGraph {
        BoundaryGraph::new(4, &[(0, 1), (0, 2), (0, 3)], &[1, 2, 3]).unwrap()
    }

    #[test]
    fn dtn_full_boundary_is_laplacian() {
        let k2 = BoundaryGraph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        let s = dtn_matrix::<f64>(&k2).unwrap();
        assert_eq!(s.matrix.to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert!(s.interior.is_empty());
    }

    #[test]
    fn dtn_exact_path_and_star() {
        let p3 = BoundaryGraph::new(3, &[(0, 1), (1, 2)], &[0, 2]).unwrap();
        let s = dtn_matrix_exact(&p3).unwrap();
        assert_eq!(
            s.matrix.to_rows(),
            vec![vec![q(1, 2), q(-1, 2)], vec![q(-1, 2), q(1, 2)]]
        );
        let s = dtn_matrix_exact(&star()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { q(2, 3) } else { q(-1, 3) };
                assert_eq!(s.matrix[(i, j)], expect);
            }
        }
    }

    #[test]
    fn singular_interior_detected() {
        // vertex 2,3 form an interior component with no boundary attachment
        let g = BoundaryGraph::new(4, &[(0, 1), (2, 3)], &[0, 1]).unwrap();
        assert_eq!(dtn_matrix::<f64>(&g).unwrap_err(), Error::SingularInterior);
        assert_eq!(steklov_spectrum::<f64>(&g).unwrap_err(), Error::SingularInterior);
    }

    #[test]
    fn small_spectra() {
        let k2 = BoundaryGraph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        let s = steklov_spectrum::<f64>(&k2).unwrap();
        assert_eq!(s.eigenvalues[0], 0.0);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-12);

        let p3 = BoundaryGraph::new(3, &[(0, 1), (1, 2)], &[0, 2]).unwrap();
        let s = steklov_spectrum::<f64>(&p3).unwrap();
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
        // eigenfunction of lambda2 is antisymmetric, zero at the middle
        let f = s.eigenfunction(2);
        assert!(f[1].abs() < 1e-12);

        let s = steklov_spectrum::<f64>(&star()).unwrap();
        for (v, e) in s.eigenvalues.iter().zip([0.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_works() {
        let p3 = BoundaryGraph::new(3, &[(0, 1), (1, 2)], &[0, 2]).unwrap();
        let s = steklov_spectrum::<f32>(&p3).unwrap();
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn rayleigh_examples() {
        let k2 = BoundaryGraph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        assert_eq!(rayleigh_quotient(&k2, &[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(rayleigh_quotient(&k2, &[3.0, 3.0]).unwrap(), 0.0);
        let p3 = BoundaryGraph::new(3, &[(0, 1), (1, 2)], &[0, 2]).unwrap();
        assert_eq!(rayleigh_quotient(&p3, &[1.0, 0.0, -1.0]).unwrap(), 1.0);
        assert_eq!(
            rayleigh_quotient(&p3, &[0.0, 1.0, 0.0]).unwrap_err(),
            Error::ZeroBoundaryNorm
        );
    }

    #[test]
    fn vector_rayleigh_examples() {
        let k2 = BoundaryGraph::new(2, &[(0, 1)], &[0, 1]).unwrap();
        let b = vector_rayleigh_bound(&k2, &[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(b, 2.0);
        assert!(matches!(
            vector_rayleigh_bound(&k2, &[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]),
            Err(Error::CentroidNotZero(_))
        ));
        assert_eq!(
            vector_rayleigh_bound(&k2, &[[0.0; 3], [0.0; 3]]).unwrap_err(),
            Error::ZeroBoundaryNorm
        );
    }

    #[test]
    fn lambda_k_range() {
        let c4 = BoundaryGraph::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)], &[0, 1, 2, 3]).unwrap();
        assert!((lambda_k::<f64>(&c4, 2).unwrap() - 2.0).abs() < 1e-12);
        assert!((lambda_k::<f64>(&c4, 4).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(lambda_k::<f64>(&c4, 1).unwrap(), 0.0);
        assert!(matches!(lambda_k::<f64>(&c4, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(lambda_k::<f64>(&c4, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn iterative_route_matches_dense() {
        // ladder with boundary on one rail
        let n = 20;
        let mut edges = Vec::new();
        for i in 0..n - 1 {
            edges.push((i, i + 1));
            edges.push((n + i, n + i + 1));
        }
        for i in 0..n {
            edges.push((i, n + i));
        }
        let g = BoundaryGraph::new(2 * n, &edges, &(0..n).collect::<Vec<_>>()).unwrap();
        let blocks = Blocks::new(&g);
        let dense = dense_extension::<f64>(&g, &blocks).unwrap();
        let iter = iterative_extension::<f64>(&g, &blocks).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((dense[(i, j)] - iter[(i, j)]).abs() < 1e-10);
            }
        }
    }
}
