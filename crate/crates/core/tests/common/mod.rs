#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use steklov::BoundaryGraph;

/// Random spanning tree on `n` vertices plus each other pair with probability `p`.
pub fn random_connected_edges<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (a, b) = (order[i], order[j]);
        edges.push((a.min(b), a.max(b)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) && !edges.contains(&(u, v)) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Random subset of `0..n` with at least `min` elements.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, min: usize) -> Vec<usize> {
    let size = rng.gen_range(min.min(n)..=n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut s = all[..size].to_vec();
    s.sort_unstable();
    s
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, min_boundary: usize) -> BoundaryGraph {
    let edges = random_connected_edges(rng, n, p);
    let boundary = random_subset(rng, n, min_boundary);
    BoundaryGraph::new(n, &edges, &boundary).unwrap()
}

pub fn laplacian(n: usize, edges: &[(usize, usize)]) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(n, n);
    for &(u, v) in edges {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    l
}

/// Schur complement of the Laplacian onto `boundary`.
pub fn dtn(n: usize, edges: &[(usize, usize)], boundary: &[usize]) -> DMatrix<f64> {
    let l = laplacian(n, edges);
    let interior: Vec<usize> = (0..n).filter(|v| !boundary.contains(v)).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |i, j| l[(rows[i], cols[j])]);
    let lbb = pick(boundary, boundary);
    if interior.is_empty() {
        return lbb;
    }
    let lbi = pick(boundary, &interior);
    let lii = pick(&interior, &interior);
    let x = lii.lu().solve(&lbi.transpose()).expect("interior block invertible");
    lbb - lbi * x
}

pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

pub fn steklov(g: &BoundaryGraph) -> Vec<f64> {
    sorted_eigenvalues(dtn(g.n(), g.edges(), g.boundary()))
}

/// `(e_u - e_v)ᵀ (L + J/n)⁻¹ (e_u - e_v)`.
pub fn resistance(n: usize, edges: &[(usize, usize)], u: usize, v: usize) -> f64 {
    let l = laplacian(n, edges) + DMatrix::from_element(n, n, 1.0 / n as f64);
    let mut b = DVector::zeros(n);
    b[u] = 1.0;
    b[v] = -1.0;
    let x = l.lu().solve(&b).expect("grounded Laplacian invertible");
    x[u] - x[v]
}

/// Faces of a rotation system: the dart after `u -> v` is `v -> w` with `w`
/// following `u` in the rotation at `v`.
pub fn trace_faces(rotation: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::new();
    let mut faces = Vec::new();
    for (u, nbrs) in rotation.iter().enumerate() {
        for &v in nbrs {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            while seen.insert((a, b)) {
                face.push(a);
                let rot = &rotation[b];
                let i = rot.iter().position(|&x| x == a).expect("rotation lists every neighbor");
                (a, b) = (b, rot[(i + 1) % rot.len()]);
            }
            faces.push(face);
        }
    }
    faces
}
