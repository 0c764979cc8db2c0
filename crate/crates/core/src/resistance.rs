//! Effective resistance of unit networks, as `2 / λ₂(G, {u, v})` and through
//! the Laplacian pseudoinverse.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{BoundaryGraph, RotationGraph};
use crate::linalg::conjugate_gradient;
use crate::scalar::Scalar;
use crate::spectrum::steklov_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResistanceResult<T> {
    pub u: usize,
    pub v: usize,
    pub r_steklov: T,
    pub r_pinv: T,
    pub discrepancy: T,
}

fn check_pair(g: &BoundaryGraph, u: usize, v: usize) -> Result<()> {
    for w in [u, v] {
        if w >= g.n() {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: w,
                bound: g.n(),
            });
        }
    }
    if u == v {
        return Err(Error::SameVertex);
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `(e_u - e_v)ᵀ L⁺ (e_u - e_v)` by conjugate gradient on `1⊥`.
pub fn resistance_pinv<T: Scalar>(g: &BoundaryGraph, u: usize, v: usize) -> Result<T> {
    check_pair(g, u, v)?;
    let n = g.n();
    let lap = g.laplacian();
    let mut b = vec![T::zero(); n];
    b[u] = T::one();
    b[v] = -T::one();
    let diag: Vec<T> = (0..n).map(|i| T::from_usize_lossy(g.degree(i))).collect();
    let x = conjugate_gradient(
        |x, out| out.copy_from_slice(&lap.apply(x)),
        &diag,
        &b,
        T::solve_tol(),
        20 * n + 100,
        true,
    )?;
    Ok(x[u] - x[v])
}

/// `2 / λ₂(G, {u, v})`.
pub fn resistance_steklov<T: Scalar>(g: &BoundaryGraph, u: usize, v: usize) -> Result<T> {
    check_pair(g, u, v)?;
    let pair = g.with_boundary(&[u, v])?;
    let l2 = steklov_eigenvalues::<T>(&pair)?[1];
    Ok(T::lit(2.0) / l2)
}

/// Both routes; the boundary of `g` is ignored.
pub fn effective_resistance<T: Scalar>(g: &BoundaryGraph, u: usize, v: usize) -> Result<ResistanceResult<T>> {
    let r_steklov = resistance_steklov::<T>(g, u, v)?;
    let r_pinv = resistance_pinv::<T>(g, u, v)?;
    Ok(ResistanceResult {
        u,
        v,
        r_steklov,
        r_pinv,
        discrepancy: (r_steklov - r_pinv).abs(),
    })
}

/// Smallest sampled resistance and `min R · (g + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenusFloorReport {
    pub genus: usize,
    pub pairs_sampled: usize,
    pub min_resistance: f64,
    pub min_pair: (usize, usize),
    pub constant: f64,
}

/// Samples at most `max_pairs` vertex pairs: edges first (adjacent pairs
/// carry the smallest resistances), then uniformly random pairs.
pub fn resistance_genus_floor(rg: &RotationGraph, max_pairs: usize, seed: u64) -> Result<GenusFloorReport> {
    let genus = rg.genus()?;
    let g = rg.base();
    let n = g.n();
    if n < 2 || max_pairs == 0 {
        return Err(Error::TooSmall("need two vertices and at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = g.edges();
    let mut pairs: Vec<(usize, usize)> = if edges.len() <= max_pairs {
        edges.to_vec()
    } else {
        let mut idx = sample(&mut rng, edges.len(), max_pairs).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| edges[i]).collect()
    };
    while pairs.len() < max_pairs && pairs.len() < n * (n - 1) / 2 {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let p = (a.min(b), a.max(b));
        if a != b && !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    let mut best = (f64::INFINITY, (0, 0));
    for &(u, v) in &pairs {
        let r = resistance_pinv::<f64>(g, u, v)?;
        if r < best.0 {
            best = (r, (u, v));
        }
    }
    Ok(GenusFloorReport {
        genus,
        pairs_sampled: pairs.len(),
        min_resistance: best.0,
        min_pair: best.1,
        constant: best.0 * (genus + 1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::{cycle, gen_torus, path};

    fn free(n: usize, edges: &[(usize, usize)]) -> BoundaryGraph {
        BoundaryGraph::new(n, edges, &[0]).unwrap()
    }

    #[test]
    fn small_networks() {
        let cases = [
            (free(2, &[(0, 1)]), 0, 1, 1.0),
            (free(3, &[(0, 1), (1, 2)]), 0, 2, 2.0),
            (free(3, &[(0, 1), (0, 2), (1, 2)]), 0, 1, 2.0 / 3.0),
            (free(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]), 0, 1, 0.75),
        ];
        for (g, u, v, want) in cases {
            let r = effective_resistance::<f64>(&g, u, v).unwrap();
            assert!((r.r_steklov - want).abs() < 1e-12, "{r:?}");
            assert!((r.r_pinv - want).abs() < 1e-10, "{r:?}");
            assert!(r.discrepancy <= 1e-9);
        }
    }

    #[test]
    fn pair_errors() {
        let g = free(3, &[(0, 1)]);
        assert_eq!(effective_resistance::<f64>(&g, 0, 1).unwrap_err(), Error::Disconnected);
        let g = free(2, &[(0, 1)]);
        assert_eq!(effective_resistance::<f64>(&g, 1, 1).unwrap_err(), Error::SameVertex);
        assert!(matches!(
            effective_resistance::<f64>(&g, 0, 5),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn genus_floor_reports() {
        let k2 = path(2).unwrap();
        let rep = resistance_genus_floor(&k2, 10, 0).unwrap();
        assert_eq!(rep.genus, 0);
        assert!((rep.constant - 1.0).abs() < 1e-10);
        let c4 = cycle(4).unwrap();
        let rep = resistance_genus_floor(&c4, 10, 0).unwrap();
        assert!((rep.min_resistance - 0.75).abs() < 1e-10);
        let t = gen_torus(5, 5).unwrap();
        let rep = resistance_genus_floor(&t, 20, 3).unwrap();
        assert_eq!(rep.genus, 1);
        assert!(rep.constant > 0.0);
        assert_eq!(rep.pairs_sampled, 20);
    }
}
