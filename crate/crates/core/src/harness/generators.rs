//! Graph families with known embeddings. Every generator puts all vertices on
//! the boundary; use `with_boundary` to pick another set.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{BoundaryGraph, RotationGraph};
use crate::refine::hex_subdivide;

/// Degree bound of [`gen_genus`]: glued triangle corners have degree at most 6 + 6 - 2.
pub const GENUS_MAX_DEGREE: usize = 10;

fn closed(n: usize, faces: &[[usize; 3]]) -> RotationGraph {
    let faces: Vec<Vec<usize>> = faces.iter().map(|f| f.to_vec()).collect();
    let all: Vec<usize> = (0..n).collect();
    RotationGraph::from_faces(n, &faces, &all).expect("generator faces close up a surface")
}

pub fn tetrahedron() -> RotationGraph {
    closed(4, &[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
}

pub fn octahedron() -> RotationGraph {
    closed(
        6,
        &[
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ],
    )
}

pub fn icosahedron() -> RotationGraph {
    closed(
        12,
        &[
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ],
    )
}

/// Icosahedron subdivided `level` times.
pub fn gen_sphere(level: usize) -> RotationGraph {
    let mut g = icosahedron();
    for _ in 0..level {
        g = hex_subdivide(&g).expect("subdivision of a triangulation");
    }
    g
}

fn torus_faces(n: usize, m: usize) -> Vec<[usize; 3]> {
    let id = |i: usize, j: usize| (i % n) * m + (j % m);
    let mut faces = Vec::with_capacity(2 * n * m);
    for i in 0..n {
        for j in 0..m {
            faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    faces
}

/// `n x m` wraparound grid, one diagonal per square.
pub fn gen_torus(n: usize, m: usize) -> Result<RotationGraph> {
    if n < 3 || m < 3 {
        return Err(Error::TooSmall(format!(
            "torus grid needs both sides >= 3, got {n}x{m}"
        )));
    }
    Ok(closed(n * m, &torus_faces(n, m)))
}

/// Vertex-disjoint faces of `rg`, greedily in trace order.
fn disjoint_faces(rg: &RotationGraph) -> Vec<[usize; 3]> {
    let mut used = vec![false; rg.base().n()];
    let mut out = Vec::new();
    for f in rg.trace_faces() {
        if f.len() == 3 && f.iter().all(|&v| !used[v]) {
            f.iter().for_each(|&v| used[v] = true);
            out.push([f[0], f[1], f[2]]);
        }
    }
    out
}

/// Sphere with `g` handles: `g` tori of size `resolution x resolution`, each
/// missing one triangle, glued into vertex-disjoint triangular holes of a
/// subdivided icosahedron. The hub is subdivided once, or more often when it
/// has no room for `g` holes.
pub fn gen_genus(g: usize, resolution: usize) -> Result<RotationGraph> {
    if g == 0 {
        return Err(Error::TooSmall("genus must be at least 1".into()));
    }
    if resolution < 3 {
        return Err(Error::TooSmall(format!(
            "torus handles need resolution >= 3, got {resolution}"
        )));
    }
    let mut level = 1;
    let (hub, holes) = loop {
        let hub = gen_sphere(level);
        let holes = disjoint_faces(&hub);
        if holes.len() >= g {
            break (hub, holes[..g].to_vec());
        }
        level += 1;
    };
    let r = resolution;
    let block = r * r;
    let h = hub.base().n();
    let cut = [0, r, r + 1];
    let total = h + g * block;

    let mut rep: Vec<usize> = (0..total).collect();
    for (b, a) in holes.iter().enumerate() {
        let c = cut.map(|v| h + b * block + v);
        // orientation-reversing identification of the two hole boundaries
        rep[c[0]] = a[1];
        rep[c[1]] = a[0];
        rep[c[2]] = a[2];
    }
    let mut label = vec![usize::MAX; total];
    let mut next = 0;
    for v in 0..total {
        if rep[v] == v {
            label[v] = next;
            next += 1;
        }
    }
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(2 * g * block + 20 << (2 * level));
    for f in hub.trace_faces() {
        let f = [f[0], f[1], f[2]];
        if !holes.contains(&f) {
            faces.push(f);
        }
    }
    for b in 0..g {
        for f in torus_faces(r, r) {
            if f != cut {
                faces.push(f.map(|v| label[rep[h + b * block + v]]));
            }
        }
    }
    Ok(closed(next, &faces))
}

pub fn path(n: usize) -> Result<RotationGraph> {
    if n < 2 {
        return Err(Error::TooSmall(format!("path needs 2 vertices, got {n}")));
    }
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    let all: Vec<usize> = (0..n).collect();
    let base = BoundaryGraph::new(n, &edges, &all)?;
    let rotation = (0..n).map(|v| base.neighbors(v).to_vec()).collect();
    RotationGraph::new(base, rotation)
}

pub fn cycle(n: usize) -> Result<RotationGraph> {
    if n < 3 {
        return Err(Error::TooSmall(format!("cycle needs 3 vertices, got {n}")));
    }
    let inner: Vec<usize> = (0..n).collect();
    let outer: Vec<usize> = (0..n).rev().collect();
    RotationGraph::from_faces(n, &[inner.clone(), outer], &inner)
}

/// A named family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Tetrahedron,
    Octahedron,
    Icosahedron,
    Sphere { level: usize },
    Torus { n: usize, m: usize },
    Genus { g: usize, resolution: usize },
    Path { n: usize },
    Cycle { n: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Tetrahedron => "tetrahedron",
            Family::Octahedron => "octahedron",
            Family::Icosahedron => "icosahedron",
            Family::Sphere { .. } => "sphere",
            Family::Torus { .. } => "torus",
            Family::Genus { .. } => "genus",
            Family::Path { .. } => "path",
            Family::Cycle { .. } => "cycle",
        }
    }

    /// Parses a family name followed by its integer parameters.
    pub fn parse(name: &str, params: &[usize]) -> Result<Self> {
        let arity = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "family {name} takes {k} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        let fam = match name {
            "tetrahedron" => {
                arity(0)?;
                Family::Tetrahedron
            }
            "octahedron" => {
                arity(0)?;
                Family::Octahedron
            }
            "icosahedron" => {
                arity(0)?;
                Family::Icosahedron
            }
            "sphere" => {
                arity(1)?;
                Family::Sphere { level: params[0] }
            }
            "torus" => {
                arity(2)?;
                Family::Torus {
                    n: params[0],
                    m: params[1],
                }
            }
            "genus" => {
                arity(2)?;
                Family::Genus {
                    g: params[0],
                    resolution: params[1],
                }
            }
            "path" => {
                arity(1)?;
                Family::Path { n: params[0] }
            }
            "cycle" => {
                arity(1)?;
                Family::Cycle { n: params[0] }
            }
            other => return Err(Error::InvalidArgument(format!("unknown family {other}"))),
        };
        Ok(fam)
    }

    pub fn build(&self) -> Result<RotationGraph> {
        match *self {
            Family::Tetrahedron => Ok(tetrahedron()),
            Family::Octahedron => Ok(octahedron()),
            Family::Icosahedron => Ok(icosahedron()),
            Family::Sphere { level } => Ok(gen_sphere(level)),
            Family::Torus { n, m } => gen_torus(n, m),
            Family::Genus { g, resolution } => gen_genus(g, resolution),
            Family::Path { n } => path(n),
            Family::Cycle { n } => cycle(n),
        }
    }

    /// Genus of the embedding this family is built with.
    pub fn genus(&self) -> usize {
        match *self {
            Family::Torus { .. } => 1,
            Family::Genus { g, .. } => g,
            _ => 0,
        }
    }

    pub fn metadata(&self) -> BTreeMap<String, serde_json::Value> {
        let mut meta = BTreeMap::new();
        meta.insert("family".into(), self.name().into());
        meta.insert("genus".into(), self.genus().into());
        match *self {
            Family::Sphere { level } => {
                meta.insert("level".into(), level.into());
            }
            Family::Torus { n, m } => {
                meta.insert("n".into(), n.into());
                meta.insert("m".into(), m.into());
            }
            Family::Genus { resolution, .. } => {
                meta.insert("resolution".into(), resolution.into());
                meta.insert("max_degree_bound".into(), GENUS_MAX_DEGREE.into());
            }
            Family::Path { n } | Family::Cycle { n } => {
                meta.insert("n".into(), n.into());
            }
            _ => {}
        }
        meta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(g: &RotationGraph) -> (usize, usize, usize) {
        (g.base().n(), g.base().edge_count(), g.trace_faces().len())
    }

    #[test]
    fn platonic_counts() {
        assert_eq!(counts(&tetrahedron()), (4, 6, 4));
        assert_eq!(counts(&octahedron()), (6, 12, 8));
        assert_eq!(counts(&icosahedron()), (12, 30, 20));
        for g in [tetrahedron(), octahedron(), icosahedron()] {
            assert_eq!(g.genus().unwrap(), 0);
            assert!(g.is_fully_triangulated());
        }
        assert!((0..12).all(|v| icosahedron().base().degree(v) == 5));
    }

    #[test]
    fn sphere_levels() {
        assert_eq!(counts(&gen_sphere(0)), (12, 30, 20));
        assert_eq!(counts(&gen_sphere(1)), (42, 120, 80));
        let s = gen_sphere(2);
        assert_eq!(counts(&s), (162, 480, 320));
        assert_eq!(s.genus().unwrap(), 0);
        assert!(s.base().max_degree() <= 6);
    }

    #[test]
    fn torus_counts() {
        let t = gen_torus(3, 3).unwrap();
        assert_eq!(counts(&t), (9, 27, 18));
        assert_eq!(t.euler_characteristic(), 0);
        let t = gen_torus(4, 6).unwrap();
        assert_eq!(t.genus().unwrap(), 1);
        assert!(t.is_fully_triangulated());
        assert!((0..24).all(|v| t.base().degree(v) == 6));
        assert!(matches!(gen_torus(2, 5), Err(Error::TooSmall(_))));
    }

    #[test]
    fn genus_tree() {
        let g2 = gen_genus(2, 4).unwrap();
        assert_eq!(g2.euler_characteristic(), -2);
        assert!(g2.is_fully_triangulated());
        for (g, r, hub) in [(1, 3, 42), (3, 5, 42), (4, 4, 42), (11, 4, 42), (12, 6, 162)] {
            let s = gen_genus(g, r).unwrap();
            assert_eq!(s.genus().unwrap(), g);
            assert!(s.is_fully_triangulated());
            assert!(s.base().max_degree() <= GENUS_MAX_DEGREE);
            assert_eq!(s.base().n(), hub + g * (r * r - 3));
        }
        assert!(gen_genus(2, 2).is_err());
        assert!(gen_genus(0, 5).is_err());
    }

    #[test]
    fn paths_and_cycles() {
        let p = path(4).unwrap();
        assert_eq!(p.genus().unwrap(), 0);
        let c = cycle(5).unwrap();
        assert_eq!(c.trace_faces().len(), 2);
        assert_eq!(c.base().boundary().len(), 5);
    }

    #[test]
    fn family_parse() {
        assert_eq!(
            Family::parse("torus", &[3, 4]).unwrap(),
            Family::Torus { n: 3, m: 4 }
        );
        assert!(Family::parse("torus", &[3]).is_err());
        assert!(Family::parse("klein", &[]).is_err());
        let meta = Family::Genus { g: 3, resolution: 4 }.metadata();
        assert_eq!(meta["max_degree_bound"], 10);
    }
}
