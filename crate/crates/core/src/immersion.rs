//! (ξ, ℓ)-immersions: every source edge becomes a path in the host, every host
//! edge carries at most ξ paths and every path has at most ℓ edges.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BoundaryGraph, RotationGraph};
use crate::refine::{refine, RefinedGraph};
use crate::scalar::Scalar;
use crate::spectrum::{lambda_k, steklov_eigenvalues};

#[derive(Debug, Clone, PartialEq)]
pub struct Immersion {
    source: BoundaryGraph,
    host: BoundaryGraph,
    vertex_map: Vec<usize>,
    /// Host vertex sequence per source edge (sorted edge order), running from
    /// the image of the smaller endpoint to the image of the larger one.
    paths: Vec<Vec<usize>>,
    xi: usize,
    ell: usize,
    /// Seed that produced a random immersion.
    pub seed: Option<u64>,
    /// Vertex of the subdivided graph behind each host vertex.
    pub host_labels: Option<Vec<usize>>,
}

impl Immersion {
    pub fn new(
        source: BoundaryGraph,
        host: BoundaryGraph,
        vertex_map: Vec<usize>,
        paths: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let (xi, ell) = verify_immersion(&source, &host, &vertex_map, &paths)?;
        Ok(Immersion {
            source,
            host,
            vertex_map,
            paths,
            xi,
            ell,
            seed: None,
            host_labels: None,
        })
    }

    /// Each edge mapped onto itself.
    pub fn identity(g: &BoundaryGraph) -> Self {
        let paths = g.edges().iter().map(|&(u, v)| vec![u, v]).collect();
        Self::new(g.clone(), g.clone(), (0..g.n()).collect(), paths)
            .expect("identity immersion is valid")
    }

    pub fn source(&self) -> &BoundaryGraph {
        &self.source
    }

    pub fn host(&self) -> &BoundaryGraph {
        &self.host
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    /// Largest number of paths through one host edge.
    pub fn xi(&self) -> usize {
        self.xi
    }

    /// Longest path, in edges.
    pub fn ell(&self) -> usize {
        self.ell
    }
}

/// Checks the immersion structure and recomputes `(xi, ell)`.
pub fn verify_immersion(
    source: &BoundaryGraph,
    host: &BoundaryGraph,
    vertex_map: &[usize],
    paths: &[Vec<usize>],
) -> Result<(usize, usize)> {
    if vertex_map.len() != source.n() {
        return Err(Error::IndexOutOfRange {
            what: "vertex map length",
            index: vertex_map.len(),
            bound: source.n(),
        });
    }
    let mut used = vec![false; host.n()];
    for &h in vertex_map {
        if h >= host.n() {
            return Err(Error::IndexOutOfRange {
                what: "mapped vertex",
                index: h,
                bound: host.n(),
            });
        }
        if std::mem::replace(&mut used[h], true) {
            return Err(Error::NonInjective);
        }
    }
    if paths.len() != source.edge_count() {
        return Err(Error::BrokenPath(paths.len().min(source.edge_count())));
    }
    let mut load = vec![0usize; host.edge_count()];
    let mut ell = 0;
    for (i, (&(u, v), path)) in source.edges().iter().zip(paths).enumerate() {
        let (a, b) = (vertex_map[u], vertex_map[v]);
        let ends = (path.first().copied(), path.last().copied());
        if ends != (Some(a), Some(b)) && ends != (Some(b), Some(a)) {
            return Err(Error::EndpointMismatch(i));
        }
        let mut seen = HashSet::new();
        for w in path.windows(2) {
            let e = host.edge_index(w[0], w[1]).ok_or(Error::BrokenPath(i))?;
            if !seen.insert(e) {
                return Err(Error::BrokenPath(i));
            }
            load[e] += 1;
        }
        ell = ell.max(path.len() - 1);
    }
    let mut image: Vec<usize> = source.boundary().iter().map(|&b| vertex_map[b]).collect();
    image.sort_unstable();
    if image != host.boundary() {
        return Err(Error::BoundaryMismatch);
    }
    Ok((load.into_iter().max().unwrap_or(0), ell))
}

/// `(λ_k(source), ξ ℓ λ_k(host))`; the first never exceeds the second.
pub fn comparison_bound<T: Scalar>(imm: &Immersion, k: usize) -> Result<(T, T)> {
    let lhs = lambda_k::<T>(&imm.source, k)?;
    let host = lambda_k::<T>(&imm.host, k)?;
    let factor = T::from_usize_lossy(imm.xi * imm.ell);
    Ok((lhs, factor * host))
}

/// Removes cycles from a walk, keeping the first visit of every vertex.
fn loop_erase(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    let mut at: HashMap<usize, usize> = HashMap::new();
    for &v in walk {
        if let Some(&k) = at.get(&v) {
            for w in out.drain(k + 1..) {
                at.remove(&w);
            }
        } else {
            at.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

/// Joins walks `v -> x` and `u -> x` into a walk `v -> u`: the common tail is
/// cut back first, then any remaining loops are erased.
fn join_at_connector(mut from_v: Vec<usize>, mut from_u: Vec<usize>) -> Vec<usize> {
    while from_v.len() >= 2
        && from_u.len() >= 2
        && from_v[from_v.len() - 2] == from_u[from_u.len() - 2]
    {
        from_v.pop();
        from_u.pop();
    }
    from_u.pop();
    from_v.extend(from_u.into_iter().rev());
    loop_erase(&from_v)
}

/// Position of a subdivision vertex inside an original face.
#[derive(Debug, Clone, Copy)]
struct Located {
    face: usize,
    vertex: usize,
}

/// Two original faces sharing edge `p q`, viewed as a square grid.
///
/// `(x, y)` with `y <= x` lies in `f1 = (p, q, s)` at weights
/// `p: r - x, s: x - y, q: y`; `y >= x` lies in `f2 = (p, q, t)` at
/// `p: r - y, t: y - x, q: x`.
struct Rhombus {
    p: usize,
    q: usize,
    s: usize,
    t: usize,
    f1: usize,
    f2: usize,
}

struct Router<'a> {
    refined: &'a RefinedGraph,
    r: usize,
    /// Corners of every original face.
    corners: Vec<[usize; 3]>,
    /// Faces around every original vertex in rotation order.
    around: Vec<Vec<usize>>,
    /// Face across each side `(corners[i], corners[i+1])`.
    across: Vec<[usize; 3]>,
    /// Barycentric weights of a subdivision vertex in every face containing it.
    weights: HashMap<(usize, usize), [usize; 3]>,
    /// Faces containing each subdivision vertex.
    faces_of: Vec<Vec<usize>>,
}

impl<'a> Router<'a> {
    fn new(refined: &'a RefinedGraph) -> Self {
        let original = &refined.original;
        let structure = original.face_structure();
        let corners: Vec<[usize; 3]> = refined.grids.iter().map(|g| g.corners).collect();
        let around = (0..original.base().n())
            .map(|v| structure.dart_face[v].clone())
            .collect();
        let dart_face = |a: usize, b: usize| {
            let i = original.rotation()[a].iter().position(|&w| w == b).unwrap();
            structure.dart_face[a][i]
        };
        let across = corners
            .iter()
            .map(|c| [0, 1, 2].map(|i| dart_face(c[(i + 1) % 3], c[i])))
            .collect();
        let mut weights = HashMap::new();
        let mut faces_of = vec![Vec::new(); refined.graph.base().n()];
        for (f, grid) in refined.grids.iter().enumerate() {
            for (i, j) in grid.points() {
                let v = grid.vertex(i, j);
                weights.insert((v, f), [grid.side - i - j, i, j]);
                faces_of[v].push(f);
            }
        }
        Router {
            refined,
            r: refined.side(),
            corners,
            around,
            across,
            weights,
            faces_of,
        }
    }

    fn weight(&self, loc: Located, corner: usize) -> usize {
        let c = self.corners[loc.face];
        let w = self.weights[&(loc.vertex, loc.face)];
        (0..3).find(|&i| c[i] == corner).map_or(0, |i| w[i])
    }

    fn apex(&self, face: usize, p: usize, q: usize) -> usize {
        *self.corners[face]
            .iter()
            .find(|&&c| c != p && c != q)
            .expect("triangle has a third corner")
    }

    fn rhombus(&self, f1: usize, f2: usize) -> Rhombus {
        let c1 = self.corners[f1];
        let shared: Vec<usize> = c1
            .iter()
            .copied()
            .filter(|c| self.corners[f2].contains(c))
            .collect();
        let (p, q) = (shared[0], shared[1]);
        Rhombus {
            p,
            q,
            s: self.apex(f1, p, q),
            t: self.apex(f2, p, q),
            f1,
            f2,
        }
    }

    fn rhombus_vertex(&self, rh: &Rhombus, x: usize, y: usize) -> usize {
        let r = self.r;
        if y <= x {
            self.refined.grids[rh.f1].vertex_at_weights(&[(rh.p, r - x), (rh.s, x - y), (rh.q, y)])
        } else {
            self.refined.grids[rh.f2].vertex_at_weights(&[(rh.p, r - y), (rh.t, y - x), (rh.q, x)])
        }
    }

    fn rhombus_coords(&self, rh: &Rhombus, loc: Located) -> (usize, usize) {
        let r = self.r;
        if loc.face == rh.f1 {
            (r - self.weight(loc, rh.p), self.weight(loc, rh.q))
        } else {
            (self.weight(loc, rh.q), r - self.weight(loc, rh.p))
        }
    }

    /// L-shaped grid route between two points of `f1 ∪ f2`.
    fn l_route(&self, rh: &Rhombus, from: Located, to: Located, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let (x0, y0) = self.rhombus_coords(rh, from);
        let (x1, y1) = self.rhombus_coords(rh, to);
        let along_x_first: bool = rng.gen();
        let mut pts = Vec::new();
        let step = |a: usize, b: usize| -> Vec<usize> {
            if a <= b {
                (a..=b).collect()
            } else {
                (b..=a).rev().collect()
            }
        };
        if along_x_first {
            pts.extend(step(x0, x1).into_iter().map(|x| (x, y0)));
            pts.extend(step(y0, y1).into_iter().skip(1).map(|y| (x1, y)));
        } else {
            pts.extend(step(y0, y1).into_iter().map(|y| (x0, y)));
            pts.extend(step(x0, x1).into_iter().skip(1).map(|x| (x, y1)));
        }
        pts.into_iter()
            .map(|(x, y)| self.rhombus_vertex(rh, x, y))
            .collect()
    }

    fn random_point(&self, face: usize, rng: &mut ChaCha8Rng) -> Located {
        let grid = &self.refined.grids[face];
        let count = (self.r + 1) * (self.r + 2) / 2;
        let (i, j) = grid.points().nth(rng.gen_range(0..count)).expect("grid point");
        Located {
            face,
            vertex: grid.vertex(i, j),
        }
    }

    /// Faces around `v` holding `vertex`, as positions in the cyclic order.
    fn slots(&self, v: usize, vertex: usize) -> Vec<usize> {
        let ring = &self.around[v];
        (0..ring.len())
            .filter(|&i| self.faces_of[vertex].contains(&ring[i]))
            .collect()
    }

    /// Random walk from `start` to `target` through the faces around `v`.
    fn initial_path(&self, v: usize, start: usize, target: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let ring = &self.around[v];
        let d = ring.len();
        let mut best = (usize::MAX, 0, 0);
        for &a in &self.slots(v, start) {
            for &b in &self.slots(v, target) {
                let fwd = (b + d - a) % d;
                let dist = fwd.min(d - fwd);
                if dist < best.0 {
                    best = (dist, a, b);
                }
            }
        }
        let (dist, a, b) = best;
        let fwd = (b + d - a) % d;
        let forward = if fwd == d - fwd && dist > 0 {
            rng.gen::<bool>()
        } else {
            fwd <= d - fwd
        };
        let seq: Vec<usize> = (0..=dist)
            .map(|s| {
                let i = if forward { a + s } else { a + d - s };
                ring[i % d]
            })
            .collect();

        let mut stops = vec![Located {
            face: seq[0],
            vertex: start,
        }];
        for &f in seq.iter().skip(1).take(dist.saturating_sub(1)) {
            stops.push(self.random_point(f, rng));
        }
        stops.push(Located {
            face: *seq.last().unwrap(),
            vertex: target,
        });

        let mut walk = vec![start];
        for pair in stops.windows(2) {
            let (from, to) = (pair[0], pair[1]);
            let partner = if from.face != to.face {
                to.face
            } else {
                self.across[from.face][rng.gen_range(0..3)]
            };
            let rh = self.rhombus(from.face, partner);
            walk.extend(self.l_route(&rh, from, to, rng).into_iter().skip(1));
        }
        walk
    }
}

/// Random immersion of the original graph into a subgraph of its `k`-fold
/// subdivision.
///
/// Draw order from a ChaCha8 stream seeded with `seed`: one representative per
/// original vertex in index order, then per source edge `{v, u}` (sorted, `v <
/// u`) the connector, followed by the route from `v` and the route from `u`.
/// A route draws a tie-break coin only when both directions around the vertex
/// are equally short, then the intermediate points, then per segment an
/// adjacent-face choice when both ends share a face and one L-shape coin.
pub fn random_immersion(refined: &RefinedGraph, seed: u64) -> Result<Immersion> {
    if refined.level == 0 {
        return Err(Error::TooSmall("random immersion needs level >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let router = Router::new(refined);
    let original = refined.original.base();

    let cells = refined.cells();
    let mut rep = Vec::with_capacity(original.n());
    for (v, cell) in cells.iter().enumerate() {
        let candidates: Vec<usize> = cell
            .iter()
            .copied()
            .filter(|&w| !router.slots(v, w).is_empty())
            .collect();
        rep.push(*candidates.choose(&mut rng).expect("cell holds its own vertex"));
    }

    let structure = refined.original.face_structure();
    let face_of_dart = |a: usize, b: usize| {
        let i = refined.original.rotation()[a]
            .iter()
            .position(|&w| w == b)
            .unwrap();
        structure.dart_face[a][i]
    };
    let r = refined.side();
    let mut routes = Vec::with_capacity(original.edge_count());
    for &(v, u) in original.edges() {
        let rh = router.rhombus(face_of_dart(v, u), face_of_dart(u, v));
        let cell = rng.gen_range(0..(r + 1) * (r + 1));
        let x = router.rhombus_vertex(&rh, cell / (r + 1), cell % (r + 1));
        let from_v = router.initial_path(v, rep[v], x, &mut rng);
        let from_u = router.initial_path(u, rep[u], x, &mut rng);
        routes.push(join_at_connector(from_v, from_u));
    }

    let mut labels: Vec<usize> = routes.iter().flatten().copied().chain(rep.iter().copied()).collect();
    labels.sort_unstable();
    labels.dedup();
    let index: HashMap<usize, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges: Vec<(usize, usize)> = routes
        .iter()
        .flat_map(|p| p.windows(2).map(|w| (index[&w[0]].min(index[&w[1]]), index[&w[0]].max(index[&w[1]]))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let boundary: Vec<usize> = original.boundary().iter().map(|&b| index[&rep[b]]).collect();
    let host = BoundaryGraph::new(labels.len(), &edges, &boundary)?;
    let vertex_map = rep.iter().map(|v| index[v]).collect();
    let paths = routes
        .iter()
        .map(|p| p.iter().map(|v| index[v]).collect())
        .collect();
    let mut imm = Immersion::new(original.clone(), host, vertex_map, paths)?;
    imm.seed = Some(seed);
    imm.host_labels = Some(labels);
    Ok(imm)
}

/// Both sides of `|δΩ| λ₂(G) <= C |δΩ^(k)| λ₂(G^(k))` and the ratio that
/// estimates `C`, with the tightest random immersion over the seeds tried.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub level: usize,
    pub boundary_size: usize,
    pub refined_boundary_size: usize,
    pub lambda2: f64,
    pub refined_lambda2: f64,
    /// `|δΩ| λ₂(G)`.
    pub lhs: f64,
    /// `|δΩ^(k)| λ₂(G^(k))`.
    pub rhs: f64,
    pub ratio: f64,
    /// Seed, ξ, ℓ and `ξ ℓ λ₂(H)` of the best immersion found.
    pub best_immersion: Option<(u64, usize, usize, f64)>,
}

pub fn chain_bound(g: &RotationGraph, boundary: &[usize], k: usize, seeds: &[u64]) -> Result<ChainReport> {
    let refined = refine(g, boundary, k)?;
    let source = refined.original.base();
    let lambda2 = lambda_k::<f64>(source, 2)?;
    let refined_lambda2 = if k == 0 {
        lambda2
    } else {
        lambda_k::<f64>(refined.graph.base(), 2)?
    };
    let boundary_size = source.boundary().len();
    let refined_boundary_size = refined.boundary().len();
    let lhs = boundary_size as f64 * lambda2;
    let rhs = refined_boundary_size as f64 * refined_lambda2;
    let mut best: Option<(u64, usize, usize, f64)> = None;
    if k > 0 {
        for &seed in seeds {
            let imm = random_immersion(&refined, seed)?;
            let host_l2 = steklov_eigenvalues::<f64>(imm.host())?[1];
            let bound = (imm.xi() * imm.ell()) as f64 * host_l2;
            if best.map_or(true, |b| bound < b.3) {
                best = Some((seed, imm.xi(), imm.ell(), bound));
            }
        }
    }
    Ok(ChainReport {
        level: k,
        boundary_size,
        refined_boundary_size,
        lambda2,
        refined_lambda2,
        lhs,
        rhs,
        ratio: lhs / rhs,
        best_immersion: best,
    })
}

/// Immersion of `source` into a random subdivision of itself.
///
/// Every edge becomes a path through up to `max_extra` new vertices. With
/// probability `detour` an edge with a common neighbor `w` is instead routed
/// along the paths of `{u, w}` and `{w, v}`, so host edges get shared. Host
/// labels are shuffled.
pub fn subdivided_host(source: &BoundaryGraph, max_extra: usize, detour: f64, seed: u64) -> Result<Immersion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = source.n();
    let mut own: Vec<Vec<usize>> = Vec::with_capacity(source.edge_count());
    for &(u, v) in source.edges() {
        let extra = rng.gen_range(0..=max_extra);
        let mut p = vec![u];
        p.extend(n..n + extra);
        n += extra;
        p.push(v);
        own.push(p);
    }
    let mut paths = own.clone();
    for (i, &(u, v)) in source.edges().iter().enumerate() {
        if !rng.gen_bool(detour) {
            continue;
        }
        let common = source
            .neighbors(u)
            .iter()
            .copied()
            .find(|&w| w != v && source.has_edge(w, v));
        let Some(w) = common else { continue };
        let oriented = |a: usize, b: usize| -> Vec<usize> {
            let p = &own[source.edge_index(a, b).unwrap()];
            if p[0] == a {
                p.clone()
            } else {
                p.iter().rev().copied().collect()
            }
        };
        let mut walk = oriented(u, w);
        walk.extend(oriented(w, v).into_iter().skip(1));
        paths[i] = loop_erase(&walk);
    }
    let mut edges: Vec<(usize, usize)> = paths
        .iter()
        .flat_map(|p| p.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut present = vec![false; n];
    for &(a, b) in &edges {
        present[a] = true;
        present[b] = true;
    }
    for v in 0..source.n() {
        present[v] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| present[v]).collect();
    order.shuffle(&mut rng);
    let mut label = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        label[v] = i;
    }
    let edges: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(a, b)| (label[a].min(label[b]), label[a].max(label[b])))
        .collect();
    let boundary: Vec<usize> = source.boundary().iter().map(|&b| label[b]).collect();
    let host = BoundaryGraph::new(order.len(), &edges, &boundary)?;
    let vertex_map = (0..source.n()).map(|v| label[v]).collect();
    let paths = paths
        .iter()
        .map(|p| p.iter().map(|&v| label[v]).collect())
        .collect();
    Immersion::new(source.clone(), host, vertex_map, paths)
}
