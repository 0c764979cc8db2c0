//! Triangulation completion, hexagon subdivision and boundary inheritance.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::RotationGraph;

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Zig-zag triangulation of the polygon `p[0..m]`: chords `p1 p_s p2 p_{s-1} ...`.
fn zigzag(p: &[usize]) -> Vec<[usize; 3]> {
    let s = p.len() - 1;
    let mut tris = vec![[p[0], p[1], p[s]]];
    let (mut lo, mut hi) = (1, s);
    let mut step = 0;
    while hi - lo >= 2 {
        if step % 2 == 0 {
            tris.push([p[lo], p[lo + 1], p[hi]]);
            lo += 1;
        } else {
            tris.push([p[lo], p[hi - 1], p[hi]]);
            hi -= 1;
        }
        step += 1;
    }
    tris
}

fn chords(p: &[usize], tris: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let m = p.len();
    let sides: HashSet<_> = (0..m).map(|i| key(p[i], p[(i + 1) % m])).collect();
    let mut out = Vec::new();
    for t in tris {
        for i in 0..3 {
            let e = key(t[i], t[(i + 1) % 3]);
            if !sides.contains(&e) && !out.contains(&e) {
                out.push(e);
            }
        }
    }
    out
}

/// Node budget of the ear search in one face.
const EAR_SEARCH_BUDGET: usize = 20_000;

struct EarSearch<'a> {
    edges: &'a HashSet<(usize, usize)>,
    added: HashSet<(usize, usize)>,
    /// Chords per corner of the walk are capped at this value when set.
    cap: Option<u8>,
    budget: usize,
}

impl EarSearch<'_> {
    fn run(&mut self, w: &mut Vec<usize>, gain: &mut Vec<u8>, tris: &mut Vec<[usize; 3]>) -> bool {
        let m = w.len();
        if m == 3 {
            tris.push([w[0], w[1], w[2]]);
            return true;
        }
        let mut ears: Vec<(u8, u8, usize)> = Vec::new();
        for i in 0..m {
            let (ia, ic) = ((i + m - 1) % m, (i + 1) % m);
            let (a, c) = (w[ia], w[ic]);
            let chord = key(a, c);
            if a == c || self.edges.contains(&chord) || self.added.contains(&chord) {
                continue;
            }
            if self.cap.is_some_and(|cap| gain[ia] >= cap || gain[ic] >= cap) {
                continue;
            }
            ears.push((gain[ia].max(gain[ic]), gain[ia] + gain[ic], i));
        }
        // least loaded corners first
        ears.sort_unstable();
        for (_, _, i) in ears {
            if self.budget == 0 {
                return false;
            }
            self.budget -= 1;
            let (ia, ic) = ((i + m - 1) % m, (i + 1) % m);
            let (a, b, c) = (w[ia], w[i], w[ic]);
            let chord = key(a, c);
            gain[ia] += 1;
            gain[ic] += 1;
            self.added.insert(chord);
            tris.push([a, b, c]);
            let g = gain.remove(i);
            w.remove(i);
            if self.run(w, gain, tris) {
                return true;
            }
            w.insert(i, b);
            gain.insert(i, g);
            tris.pop();
            self.added.remove(&chord);
            gain[ia] -= 1;
            gain[ic] -= 1;
        }
        false
    }
}

/// Triangulates a closed face walk by clipping ears, never creating an
/// existing edge. Tries first with at most two chords per corner, then four.
fn ear_clip(walk: &[usize], edges: &HashSet<(usize, usize)>) -> Option<Vec<[usize; 3]>> {
    for cap in [Some(2), Some(4), None] {
        let mut search = EarSearch {
            edges,
            added: HashSet::new(),
            cap,
            budget: EAR_SEARCH_BUDGET,
        };
        let mut tris = Vec::new();
        if search.run(&mut walk.to_vec(), &mut vec![0; walk.len()], &mut tris) {
            return Some(tris);
        }
    }
    None
}

/// Adds chords inside every non-triangular face so that the embedding becomes
/// a triangulation of the same surface. The input is a spanning subgraph of
/// the output.
pub fn fully_triangulate(rg: &RotationGraph) -> Result<RotationGraph> {
    let base = rg.base();
    let faces = rg.trace_faces();
    let mut edges: HashSet<(usize, usize)> = base.edges().iter().copied().collect();
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
    for (fi, face) in faces.iter().enumerate() {
        let m = face.len();
        if m == 3 {
            out.push(face.clone());
            continue;
        }
        let distinct: HashSet<_> = face.iter().collect();
        let is_cycle = distinct.len() == m;
        let mut chosen = None;
        if is_cycle {
            for offset in 0..m {
                let p: Vec<usize> = (0..m).map(|i| face[(i + offset) % m]).collect();
                let tris = zigzag(&p);
                let new = chords(&p, &tris);
                if new.iter().all(|e| !edges.contains(e)) {
                    chosen = Some((tris, new));
                    break;
                }
            }
        }
        if chosen.is_none() {
            if let Some(tris) = ear_clip(face, &edges) {
                let new = chords(face, &tris);
                chosen = Some((tris, new));
            }
        }
        let (tris, new) = chosen.ok_or(if is_cycle {
            Error::ChordConflict(fi)
        } else {
            Error::NonCycleFace(fi)
        })?;
        edges.extend(new);
        out.extend(tris.iter().map(|t| t.to_vec()));
    }
    RotationGraph::from_faces(base.n(), &out, base.boundary())
}

fn midpoint(rg: &RotationGraph, u: usize, v: usize) -> usize {
    let base = rg.base();
    base.n()
        + base
            .edge_index(u, v)
            .expect("midpoint requested for a non-edge")
}

/// Splits every triangle into four through its edge midpoints. Midpoint of
/// the edge with index `e` (sorted edge order) becomes vertex `n + e`.
pub fn hex_subdivide(rg: &RotationGraph) -> Result<RotationGraph> {
    if !rg.is_fully_triangulated() {
        return Err(Error::NotTriangulated);
    }
    let faces = rg.trace_faces();
    let mut out = Vec::with_capacity(4 * faces.len());
    for f in &faces {
        let (a, b, c) = (f[0], f[1], f[2]);
        let (ab, bc, ca) = (midpoint(rg, a, b), midpoint(rg, b, c), midpoint(rg, c, a));
        out.push(vec![a, ab, ca]);
        out.push(vec![ab, b, bc]);
        out.push(vec![bc, c, ca]);
        out.push(vec![ab, bc, ca]);
    }
    let n = rg.base().n() + rg.base().edge_count();
    RotationGraph::from_faces(n, &out, rg.base().boundary())
}

/// Triangular grid of subdivision vertices inside one original face.
///
/// Point `(i, j)` with `i + j <= side` sits at barycentric weights
/// `(side - i - j, i, j)` on the face corners `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceGrid {
    pub corners: [usize; 3],
    pub side: usize,
    ids: Vec<usize>,
}

impl FaceGrid {
    fn new(corners: [usize; 3]) -> Self {
        let mut g = FaceGrid {
            corners,
            side: 1,
            ids: vec![usize::MAX; 4],
        };
        g.set(0, 0, corners[0]);
        g.set(1, 0, corners[1]);
        g.set(0, 1, corners[2]);
        g
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + j <= self.side);
        i * (self.side + 1) + j
    }

    fn set(&mut self, i: usize, j: usize, v: usize) {
        let s = self.slot(i, j);
        self.ids[s] = v;
    }

    pub fn vertex(&self, i: usize, j: usize) -> usize {
        self.ids[self.slot(i, j)]
    }

    /// Vertex at the given barycentric weights keyed by corner vertex.
    pub fn vertex_at_weights(&self, weights: &[(usize, usize)]) -> usize {
        let w = |corner: usize| {
            weights
                .iter()
                .find(|(v, _)| *v == corner)
                .map_or(0, |(_, x)| *x)
        };
        self.vertex(w(self.corners[1]), w(self.corners[2]))
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.side).flat_map(move |i| (0..=self.side - i).map(move |j| (i, j)))
    }

    /// Barycentric weights of grid point `(i, j)` keyed by corner vertex.
    pub fn weights(&self, i: usize, j: usize) -> [(usize, usize); 3] {
        [
            (self.corners[0], self.side - i - j),
            (self.corners[1], i),
            (self.corners[2], j),
        ]
    }

    fn subdivided(&self, parent: &RotationGraph) -> Self {
        let side = 2 * self.side;
        let mut g = FaceGrid {
            corners: self.corners,
            side,
            ids: vec![usize::MAX; (side + 1) * (side + 1)],
        };
        for i2 in 0..=side {
            for j2 in 0..=side - i2 {
                let (i, j) = (i2 / 2, j2 / 2);
                let v = match (i2 % 2, j2 % 2) {
                    (0, 0) => self.vertex(i, j),
                    (1, 0) => midpoint(parent, self.vertex(i, j), self.vertex(i + 1, j)),
                    (0, 1) => midpoint(parent, self.vertex(i, j), self.vertex(i, j + 1)),
                    _ => midpoint(parent, self.vertex(i + 1, j), self.vertex(i, j + 1)),
                };
                g.set(i2, j2, v);
            }
        }
        g
    }
}

/// `k`-fold hexagon subdivision with the nearest-original-vertex partition.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedGraph {
    /// The subdivided triangulation; its boundary is the inherited one.
    pub graph: RotationGraph,
    pub original: RotationGraph,
    pub level: usize,
    /// Nearest original vertex of every vertex (smallest index on ties).
    pub parent: Vec<usize>,
    /// Faces of the original graph in trace order, with their grids.
    pub grids: Vec<FaceGrid>,
}

impl RefinedGraph {
    pub fn boundary(&self) -> &[usize] {
        self.graph.base().boundary()
    }

    /// Grid resolution `2^k`.
    pub fn side(&self) -> usize {
        1 << self.level
    }

    /// Cell (partition class) of every original vertex.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.original.base().n()];
        for (v, &p) in self.parent.iter().enumerate() {
            cells[p].push(v);
        }
        cells
    }
}

fn nearest_original(rg: &RotationGraph, originals: usize) -> Vec<usize> {
    let n = rg.base().n();
    let mut dist = vec![usize::MAX; n];
    let mut owner = vec![usize::MAX; n];
    let mut frontier: Vec<usize> = (0..originals).collect();
    for v in 0..originals {
        dist[v] = 0;
        owner[v] = v;
    }
    let mut queue = VecDeque::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &w in rg.base().neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    owner[w] = owner[u];
                    next.push(w);
                } else if dist[w] == dist[u] + 1 && owner[u] < owner[w] {
                    owner[w] = owner[u];
                }
            }
        }
        queue.extend(next.iter().copied());
        frontier = next;
    }
    owner
}

pub fn refine(rg: &RotationGraph, boundary: &[usize], k: usize) -> Result<RefinedGraph> {
    if !rg.is_fully_triangulated() {
        return Err(Error::NotTriangulated);
    }
    let original = rg.with_boundary(boundary)?;
    let mut grids: Vec<FaceGrid> = original
        .trace_faces()
        .iter()
        .map(|f| FaceGrid::new([f[0], f[1], f[2]]))
        .collect();
    let mut graph = original.clone();
    for _ in 0..k {
        grids = grids.iter().map(|g| g.subdivided(&graph)).collect();
        graph = hex_subdivide(&graph)?;
    }
    let n0 = original.base().n();
    let parent = nearest_original(&graph, n0);
    let inherited: Vec<usize> = (0..graph.base().n())
        .filter(|&v| original.base().is_boundary(parent[v]))
        .collect();
    let graph = graph.with_boundary(&inherited)?;
    Ok(RefinedGraph {
        graph,
        original,
        level: k,
        parent,
        grids,
    })
}

/// `|inherited boundary| / (4^k |original boundary|)`.
pub fn boundary_growth(refined: &RefinedGraph) -> f64 {
    let scale = 4f64.powi(refined.level as i32);
    refined.boundary().len() as f64 / (scale * refined.original.base().boundary().len() as f64)
}
