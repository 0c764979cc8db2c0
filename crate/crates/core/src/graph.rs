//! Graphs with a distinguished boundary, their Laplacian, and combinatorial
//! surface embeddings given by rotation systems.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Field;

/// Above this order the Laplacian is kept as adjacency lists.
pub const DENSE_LAPLACIAN_LIMIT: usize = 4096;

/// Simple undirected graph with a non-empty boundary vertex set.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted lexicographically; the
/// position of an edge in [`BoundaryGraph::edges`] is its stable index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
}

impl BoundaryGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], boundary: &[usize]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::IndexOutOfRange {
                        what: "edge endpoint",
                        index: w,
                        bound: n,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &normalized {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let (boundary, is_boundary) = Self::check_boundary(n, boundary)?;
        Ok(BoundaryGraph {
            n,
            edges: normalized,
            adjacency,
            boundary,
            is_boundary,
        })
    }

    fn check_boundary(n: usize, boundary: &[usize]) -> Result<(Vec<usize>, Vec<bool>)> {
        if boundary.is_empty() {
            return Err(Error::EmptyBoundary);
        }
        let mut is_boundary = vec![false; n];
        for &b in boundary {
            if b >= n {
                return Err(Error::IndexOutOfRange {
                    what: "boundary vertex",
                    index: b,
                    bound: n,
                });
            }
            if is_boundary[b] {
                return Err(Error::DuplicateBoundary(b));
            }
            is_boundary[b] = true;
        }
        let mut sorted = boundary.to_vec();
        sorted.sort_unstable();
        Ok((sorted, is_boundary))
    }

    /// Same edges, different boundary.
    pub fn with_boundary(&self, boundary: &[usize]) -> Result<Self> {
        let (boundary, is_boundary) = Self::check_boundary(self.n, boundary)?;
        Ok(BoundaryGraph {
            boundary,
            is_boundary,
            ..self.clone()
        })
    }

    /// Adds one edge, keeping the boundary.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Self::new(self.n, &edges, &self.boundary)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary[v]
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_boundary[v]).collect()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Component label per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.components().1 <= 1
    }

    /// Breadth-first distances from `source`; unreachable vertices get `usize::MAX`.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn laplacian(&self) -> LaplacianMatrix {
        if self.n <= DENSE_LAPLACIAN_LIMIT {
            let mut m = vec![0i64; self.n * self.n];
            for (u, nb) in self.adjacency.iter().enumerate() {
                m[u * self.n + u] = nb.len() as i64;
                for &w in nb {
                    m[u * self.n + w] = -1;
                }
            }
            LaplacianMatrix::Dense { n: self.n, entries: m }
        } else {
            LaplacianMatrix::Sparse {
                adjacency: self.adjacency.clone(),
            }
        }
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let boundary: Vec<_> = self.boundary.iter().map(|&b| perm[b]).collect();
        Self::new(self.n, &edges, &boundary)
    }
}

/// Integer graph Laplacian, dense up to [`DENSE_LAPLACIAN_LIMIT`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LaplacianMatrix {
    Dense { n: usize, entries: Vec<i64> },
    Sparse { adjacency: Vec<Vec<usize>> },
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        match self {
            LaplacianMatrix::Dense { n, .. } => *n,
            LaplacianMatrix::Sparse { adjacency } => adjacency.len(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        match self {
            LaplacianMatrix::Dense { n, entries } => entries[i * n + j],
            LaplacianMatrix::Sparse { adjacency } => {
                if i == j {
                    adjacency[i].len() as i64
                } else if adjacency[i].binary_search(&j).is_ok() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn apply<T: Field>(&self, x: &[T]) -> Vec<T> {
        let n = self.n();
        assert_eq!(x.len(), n);
        match self {
            LaplacianMatrix::Dense { entries, .. } => (0..n)
                .map(|i| {
                    let mut acc = T::zero();
                    for j in 0..n {
                        let a = entries[i * n + j];
                        if a != 0 {
                            acc = acc + T::from_int(a) * x[j].clone();
                        }
                    }
                    acc
                })
                .collect(),
            LaplacianMatrix::Sparse { adjacency } => adjacency
                .iter()
                .enumerate()
                .map(|(i, nb)| {
                    nb.iter()
                        .fold(T::zero(), |acc, &j| acc + x[i].clone() - x[j].clone())
                })
                .collect(),
        }
    }

    pub fn to_dense<T: Field>(&self) -> DenseMatrix<T> {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let a = self.entry(i, j);
                if a != 0 {
                    m[(i, j)] = T::from_int(a);
                }
            }
        }
        m
    }
}

/// Faces of an embedding together with the face index of every dart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Faces {
    /// Each face as the cyclic sequence of dart tails.
    pub cycles: Vec<Vec<usize>>,
    /// `dart_face[v][i]` is the face containing the dart `v -> rotation[v][i]`.
    pub dart_face: Vec<Vec<usize>>,
}

/// A [`BoundaryGraph`] embedded on an orientable surface via a rotation
/// system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationGraph {
    base: BoundaryGraph,
    rotation: Vec<Vec<usize>>,
    /// `twin[v][i]` is the position of `v` in the rotation of `rotation[v][i]`.
    twin: Vec<Vec<usize>>,
}

impl RotationGraph {
    pub fn new(base: BoundaryGraph, rotation: Vec<Vec<usize>>) -> Result<Self> {
        if rotation.len() != base.n() {
            return Err(Error::MalformedRotation(format!(
                "{} rotation lists for {} vertices",
                rotation.len(),
                base.n()
            )));
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut sorted = rot.clone();
            sorted.sort_unstable();
            if sorted != base.neighbors(v) {
                return Err(Error::MalformedRotation(format!(
                    "rotation at vertex {v} is not a permutation of its neighbors"
                )));
            }
        }
        let position: Vec<HashMap<usize, usize>> = rotation
            .iter()
            .map(|rot| rot.iter().enumerate().map(|(i, &w)| (w, i)).collect())
            .collect();
        let twin = rotation
            .iter()
            .enumerate()
            .map(|(v, rot)| rot.iter().map(|&w| position[w][&v]).collect())
            .collect();
        Ok(RotationGraph {
            base,
            rotation,
            twin,
        })
    }

    /// Builds an embedding from consistently oriented face cycles of a closed
    /// surface. For a face `.. a, b, c ..` the neighbor following `a` in the
    /// rotation at `b` is `c`, so [`RotationGraph::trace_faces`] returns the
    /// same cycles.
    pub fn from_faces(n: usize, faces: &[Vec<usize>], boundary: &[usize]) -> Result<Self> {
        let mut successor: Vec<HashMap<usize, usize>> = vec![HashMap::new(); n];
        let mut edges = Vec::new();
        for (fi, face) in faces.iter().enumerate() {
            let len = face.len();
            if len < 3 {
                return Err(Error::MalformedRotation(format!("face {fi} has length {len}")));
            }
            for i in 0..len {
                let (a, b, c) = (face[i], face[(i + 1) % len], face[(i + 2) % len]);
                for w in [a, b, c] {
                    if w >= n {
                        return Err(Error::IndexOutOfRange {
                            what: "face vertex",
                            index: w,
                            bound: n,
                        });
                    }
                }
                if successor[b].insert(a, c).is_some() {
                    return Err(Error::MalformedRotation(format!(
                        "dart {a}->{b} appears in more than one face"
                    )));
                }
                if a < b {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let base = BoundaryGraph::new(n, &edges, boundary)?;
        let mut rotation = Vec::with_capacity(n);
        for (v, succ) in successor.iter().enumerate() {
            let nb = base.neighbors(v);
            if succ.len() != nb.len() {
                return Err(Error::MalformedRotation(format!(
                    "vertex {v} is on an unmatched dart; faces do not close up a surface"
                )));
            }
            let mut rot = Vec::with_capacity(nb.len());
            if let Some(&start) = nb.first() {
                let mut cur = start;
                loop {
                    rot.push(cur);
                    cur = *succ.get(&cur).ok_or_else(|| {
                        Error::MalformedRotation(format!("vertex {v}: missing corner after {cur}"))
                    })?;
                    if cur == start || rot.len() > nb.len() {
                        break;
                    }
                }
            }
            if rot.len() != nb.len() {
                return Err(Error::MalformedRotation(format!(
                    "faces around vertex {v} do not form a single disk"
                )));
            }
            rotation.push(rot);
        }
        Self::new(base, rotation)
    }

    pub fn base(&self) -> &BoundaryGraph {
        &self.base
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn with_boundary(&self, boundary: &[usize]) -> Result<Self> {
        Ok(RotationGraph {
            base: self.base.with_boundary(boundary)?,
            ..self.clone()
        })
    }

    fn next_dart(&self, v: usize, i: usize) -> (usize, usize) {
        let w = self.rotation[v][i];
        let j = self.twin[v][i];
        (w, (j + 1) % self.rotation[w].len())
    }

    pub fn face_structure(&self) -> Faces {
        let n = self.base.n();
        let mut dart_face: Vec<Vec<usize>> =
            self.rotation.iter().map(|r| vec![usize::MAX; r.len()]).collect();
        let mut cycles = Vec::new();
        for v in 0..n {
            for i in 0..self.rotation[v].len() {
                if dart_face[v][i] != usize::MAX {
                    continue;
                }
                let f = cycles.len();
                let mut cycle = Vec::new();
                let (mut cv, mut ci) = (v, i);
                while dart_face[cv][ci] == usize::MAX {
                    dart_face[cv][ci] = f;
                    cycle.push(cv);
                    (cv, ci) = self.next_dart(cv, ci);
                }
                cycles.push(cycle);
            }
        }
        Faces { cycles, dart_face }
    }

    /// Face cycles, following next = successor of the reversed dart at its head.
    pub fn trace_faces(&self) -> Vec<Vec<usize>> {
        self.face_structure().cycles
    }

    pub fn face_count(&self) -> usize {
        let f = self.trace_faces().len();
        // an isolated vertex still bounds one face
        if self.base.edge_count() == 0 {
            f.max(1)
        } else {
            f
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.base.n() as i64 - self.base.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> Result<usize> {
        if !self.base.is_connected() {
            return Err(Error::Disconnected);
        }
        let chi = self.euler_characteristic();
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::MalformedRotation(format!(
                "euler characteristic {chi} is not that of a closed orientable surface"
            )));
        }
        Ok(((2 - chi) / 2) as usize)
    }

    pub fn is_fully_triangulated(&self) -> bool {
        let faces = self.trace_faces();
        !faces.is_empty() && faces.iter().all(|f| f.len() == 3)
    }

    /// Relabels vertex `v` as `perm[v]`, carrying the rotation along.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let base = self.base.relabel(perm)?;
        let mut rotation = vec![Vec::new(); self.base.n()];
        for (v, rot) in self.rotation.iter().enumerate() {
            rotation[perm[v]] = rot.iter().map(|&w| perm[w]).collect();
        }
        Self::new(base, rotation)
    }
}
