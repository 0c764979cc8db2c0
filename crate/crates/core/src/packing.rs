//! Circle packings of planar triangulations, their lift to the unit sphere,
//! and Möbius centering of a boundary subset.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::graph::{BoundaryGraph, RotationGraph};
use crate::linalg::{conjugate_gradient, DenseMatrix, LdlFactor};
use crate::scalar::Scalar;
use crate::spectrum::{lambda_k, vector_rayleigh_bound};

/// Cap on Collins–Stephenson sweeps.
pub const MAX_SWEEPS: usize = 100_000;
const MAX_NEWTON: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct CirclePacking<T> {
    pub radii: Vec<T>,
    pub centers: Vec<[T; 2]>,
    /// Vertices whose radii were prescribed.
    pub pinned: Vec<usize>,
    /// Largest `|angle sum - 2π|` over free vertices.
    pub residual: T,
    /// Largest `|dist(c_u, c_v) - (r_u + r_v)| / (r_u + r_v)` over edges.
    pub tangency_error: T,
    /// Oriented triangles of the packing.
    pub faces: Vec<[usize; 3]>,
}

/// Angle at the circle of radius `rv` in the triangle of centers with `ru`, `rw`.
fn corner_angle<T: Scalar>(rv: T, ru: T, rw: T) -> T {
    let s = rv + ru + rw;
    T::lit(2.0) * (ru * rw / (s * rv)).sqrt().atan()
}

/// `d corner_angle(rv, ru, rw) / d log ru`.
fn angle_sensitivity<T: Scalar>(rv: T, ru: T, rw: T) -> T {
    let h = (rv * ru * rw / (rv + ru + rw)).sqrt();
    h / (rv + ru)
}

struct Disk<'a, T> {
    n: usize,
    faces: &'a [[usize; 3]],
    incident: Vec<Vec<usize>>,
    free: Vec<usize>,
    /// Position of each free vertex in `free`.
    slot: Vec<Option<usize>>,
    scalar: PhantomData<T>,
}

impl<'a, T: Scalar> Disk<'a, T> {
    fn angle_sum(&self, r: &[T], v: usize) -> T {
        self.incident[v]
            .iter()
            .map(|&f| {
                let t = self.faces[f];
                let i = t.iter().position(|&x| x == v).unwrap();
                corner_angle(r[v], r[t[(i + 1) % 3]], r[t[(i + 2) % 3]])
            })
            .sum()
    }

    fn residuals(&self, r: &[T]) -> Vec<T> {
        self.free
            .iter()
            .map(|&v| self.angle_sum(r, v) - T::TAU())
            .collect()
    }

    fn max_abs(x: &[T]) -> T {
        x.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// One Gauss–Seidel sweep of the uniform-neighbor radius update.
    fn sweep(&self, r: &mut [T]) {
        for &v in &self.free {
            let k = T::from_usize_lossy(self.incident[v].len());
            let theta = self.angle_sum(r, v);
            let beta = (theta / (T::lit(2.0) * k)).sin();
            let delta = (T::PI() / k).sin();
            let neighbor = r[v] * beta / (T::one() - beta);
            r[v] = neighbor * (T::one() - delta) / delta;
        }
    }

    /// Symmetric weights of `-d(angle sums)/d(log r)` per edge, plus its diagonal.
    fn jacobian(&self, r: &[T]) -> (Vec<Vec<(usize, T)>>, Vec<T>) {
        let mut off: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.free.len()];
        let mut diag = vec![T::zero(); self.free.len()];
        for t in self.faces {
            for i in 0..3 {
                let v = t[i];
                let Some(sv) = self.slot[v] else { continue };
                for j in [1, 2] {
                    let u = t[(i + j) % 3];
                    let w = t[(i + 3 - j) % 3];
                    let d = angle_sensitivity(r[v], r[u], r[w]);
                    diag[sv] += d;
                    if let Some(su) = self.slot[u] {
                        off[sv].push((su, -d));
                    }
                }
            }
        }
        (off, diag)
    }

    fn newton_step(&self, r: &[T], res: &[T]) -> Result<Vec<T>> {
        let (off, diag) = self.jacobian(r);
        let m = self.free.len();
        if m <= 1500 {
            let mut a = DenseMatrix::<T>::zeros(m, m);
            for i in 0..m {
                a[(i, i)] = diag[i];
                for &(j, w) in &off[i] {
                    a[(i, j)] += w;
                }
            }
            let ldl = LdlFactor::new(&a).ok_or_else(|| {
                Error::ConvergenceFailure("packing jacobian lost definiteness".into())
            })?;
            return Ok(ldl.solve(res));
        }
        conjugate_gradient(
            |x, out| {
                for i in 0..m {
                    out[i] = diag[i] * x[i] + off[i].iter().map(|&(j, w)| w * x[j]).sum::<T>();
                }
            },
            &diag,
            res,
            T::solve_tol(),
            10 * m + 100,
            false,
        )
    }

    /// Solves for the free radii in place; returns the final residual.
    fn solve(&self, r: &mut [T]) -> Result<T> {
        let target = T::eigen_tol() * T::lit(0.1);
        let warm = T::lit(1e-3);
        let mut sweeps = 0;
        loop {
            let mut res = self.residuals(r);
            let mut norm = Self::max_abs(&res);
            while norm > warm && sweeps < MAX_SWEEPS {
                self.sweep(r);
                sweeps += 1;
                if sweeps % 16 == 0 {
                    res = self.residuals(r);
                    norm = Self::max_abs(&res);
                }
            }
            res = self.residuals(r);
            norm = Self::max_abs(&res);
            for _ in 0..MAX_NEWTON {
                if norm <= target {
                    return Ok(norm);
                }
                // (-J) du = res, and the angle sums decrease as u grows
                let du = match self.newton_step(r, &res) {
                    Ok(du) => du,
                    Err(_) => break,
                };
                let mut scale = T::one();
                let biggest = Self::max_abs(&du);
                if biggest > T::one() {
                    scale = T::one() / biggest;
                }
                let mut accepted = false;
                for _ in 0..40 {
                    let mut trial = r.to_vec();
                    for (k, &v) in self.free.iter().enumerate() {
                        trial[v] = r[v] * (scale * du[k]).exp();
                    }
                    let tres = self.residuals(&trial);
                    let tnorm = Self::max_abs(&tres);
                    if tnorm < norm {
                        r.copy_from_slice(&trial);
                        res = tres;
                        norm = tnorm;
                        accepted = true;
                        break;
                    }
                    scale = scale * T::lit(0.5);
                }
                if !accepted {
                    break;
                }
            }
            if norm <= target {
                return Ok(norm);
            }
            if sweeps >= MAX_SWEEPS {
                return Err(Error::ConvergenceFailure(format!(
                    "circle packing residual {:e} after {sweeps} sweeps",
                    norm.to_f64().unwrap_or(f64::NAN)
                )));
            }
            // Newton stalled; fall back to more sweeps
            for _ in 0..1000.min(MAX_SWEEPS - sweeps) {
                self.sweep(r);
                sweeps += 1;
            }
        }
    }

    fn layout(&self, r: &[T]) -> Vec<[T; 2]> {
        let mut c: Vec<Option<[T; 2]>> = vec![None; self.n];
        let t0 = self.faces[0];
        c[t0[0]] = Some([T::zero(), T::zero()]);
        c[t0[1]] = Some([r[t0[0]] + r[t0[1]], T::zero()]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        let mut done = vec![false; self.faces.len()];
        while let Some(f) = queue.pop_front() {
            if done[f] {
                continue;
            }
            let t = self.faces[f];
            let missing: Vec<usize> = (0..3).filter(|&i| c[t[i]].is_none()).collect();
            if missing.len() > 1 {
                continue;
            }
            done[f] = true;
            if let Some(&m) = missing.first() {
                let (a, b, k) = (t[(m + 1) % 3], t[(m + 2) % 3], t[m]);
                let (pa, pb) = (c[a].unwrap(), c[b].unwrap());
                let alpha = corner_angle(r[a], r[b], r[k]);
                let base = (pb[1] - pa[1]).atan2(pb[0] - pa[0]) + alpha;
                let d = r[a] + r[k];
                c[k] = Some([pa[0] + d * base.cos(), pa[1] + d * base.sin()]);
            }
            for &v in &t {
                for &g in &self.incident[v] {
                    if !done[g] {
                        queue.push_back(g);
                    }
                }
            }
        }
        c.into_iter()
            .map(|p| p.expect("faces form a connected disk"))
            .collect()
    }
}

/// Packs a triangulated disk: `faces` are consistently oriented triangles and
/// `pinned` prescribes the radius of every vertex on the disk boundary.
pub fn pack_disk<T: Scalar>(n: usize, faces: &[[usize; 3]], pinned: &[(usize, T)]) -> Result<CirclePacking<T>> {
    if faces.is_empty() {
        return Err(Error::NotTriangulated);
    }
    let mut incident = vec![Vec::new(); n];
    for (f, t) in faces.iter().enumerate() {
        for &v in t {
            if v >= n {
                return Err(Error::IndexOutOfRange {
                    what: "face vertex",
                    index: v,
                    bound: n,
                });
            }
            incident[v].push(f);
        }
    }
    let mut r = vec![T::one(); n];
    let mut is_pinned = vec![false; n];
    for &(v, rad) in pinned {
        if v >= n {
            return Err(Error::IndexOutOfRange {
                what: "pinned vertex",
                index: v,
                bound: n,
            });
        }
        is_pinned[v] = true;
        r[v] = rad;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !is_pinned[v]).collect();
    let mut slot = vec![None; n];
    for (k, &v) in free.iter().enumerate() {
        slot[v] = Some(k);
    }
    let disk = Disk::<T> {
        n,
        faces,
        incident,
        free,
        slot,
        scalar: PhantomData,
    };
    let residual = disk.solve(&mut r)?;
    let centers = disk.layout(&r);
    let mut tangency_error = T::zero();
    for t in faces {
        for i in 0..3 {
            let (u, v) = (t[i], t[(i + 1) % 3]);
            let d = (centers[u][0] - centers[v][0]).hypot(centers[u][1] - centers[v][1]);
            tangency_error = tangency_error.max((d - r[u] - r[v]).abs() / (r[u] + r[v]));
        }
    }
    let mut pinned: Vec<usize> = pinned.iter().map(|p| p.0).collect();
    pinned.sort_unstable();
    Ok(CirclePacking {
        radii: r,
        centers,
        pinned,
        residual,
        tangency_error,
        faces: faces.to_vec(),
    })
}

/// Packs a spherical triangulation in the plane. The first traced face is the
/// outer face, pinned as three unit circles; the result is scaled so that
/// their centers sit on the unit circle, the first one on the positive x axis.
pub fn circle_pack<T: Scalar>(rg: &RotationGraph) -> Result<CirclePacking<T>> {
    let n = rg.base().n();
    if n < 4 {
        return Err(Error::TooSmall(format!("packing needs 4 vertices, got {n}")));
    }
    if !rg.is_fully_triangulated() {
        return Err(Error::NotTriangulated);
    }
    let genus = rg.genus()?;
    if genus != 0 {
        return Err(Error::NonzeroGenus(genus));
    }
    let traced = rg.trace_faces();
    let outer = [traced[0][0], traced[0][1], traced[0][2]];
    let faces: Vec<[usize; 3]> = traced[1..].iter().map(|f| [f[0], f[1], f[2]]).collect();
    let pinned: Vec<(usize, T)> = outer.iter().map(|&v| (v, T::one())).collect();
    let mut cp = pack_disk(n, &faces, &pinned)?;

    let third = T::lit(1.0 / 3.0);
    let mid = [0, 1].map(|d| outer.iter().map(|&v| cp.centers[v][d]).sum::<T>() * third);
    let a = cp.centers[outer[0]];
    let phi = (a[1] - mid[1]).atan2(a[0] - mid[0]);
    let scale = T::lit(3f64.sqrt() / 2.0);
    let (s, c) = phi.sin_cos();
    for p in cp.centers.iter_mut() {
        let (x, y) = (p[0] - mid[0], p[1] - mid[1]);
        *p = [scale * (c * x + s * y), scale * (c * y - s * x)];
    }
    for r in cp.radii.iter_mut() {
        *r = *r * scale;
    }
    Ok(cp)
}

/// Unit vectors per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereConfiguration<T> {
    pub points: Vec<[T; 3]>,
}

fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl<T: Scalar> SphereConfiguration<T> {
    pub fn centroid(&self, subset: &[usize]) -> [T; 3] {
        let mut c = [T::zero(); 3];
        for &v in subset {
            for d in 0..3 {
                c[d] += self.points[v][d];
            }
        }
        let k = T::from_usize_lossy(subset.len().max(1));
        c.map(|x| x / k)
    }

    pub fn centroid_norm(&self, subset: &[usize]) -> T {
        let c = self.centroid(subset);
        dot3(&c, &c).sqrt()
    }

    /// Largest `| |p| - 1 |`.
    pub fn norm_error(&self) -> T {
        self.points
            .iter()
            .fold(T::zero(), |m, p| m.max((dot3(p, p).sqrt() - T::one()).abs()))
    }
}

/// Inverse stereographic projection from the north pole.
pub fn stereographic_lift<T: Scalar>(p: [T; 2]) -> [T; 3] {
    let q = p[0] * p[0] + p[1] * p[1];
    let d = q + T::one();
    let two = T::lit(2.0);
    [two * p[0] / d, two * p[1] / d, (q - T::one()) / d]
}

pub fn lift_to_sphere<T: Scalar>(cp: &CirclePacking<T>) -> SphereConfiguration<T> {
    SphereConfiguration {
        points: cp.centers.iter().map(|&c| stereographic_lift(c)).collect(),
    }
}

/// Conformal automorphism of the sphere pushing points toward `w`, `|w| < 1`.
pub fn mobius_apply<T: Scalar>(w: &[T; 3], x: &[T; 3]) -> [T; 3] {
    let ww = dot3(w, w);
    let wx = dot3(w, x);
    let two = T::lit(2.0);
    let den = T::one() + two * wx + ww;
    let y = [0, 1, 2].map(|d| ((T::one() - ww) * x[d] + two * (T::one() + wx) * w[d]) / den);
    let n = dot3(&y, &y).sqrt();
    y.map(|v| v / n)
}

fn push<T: Scalar>(sc: &SphereConfiguration<T>, w: &[T; 3]) -> SphereConfiguration<T> {
    SphereConfiguration {
        points: sc.points.iter().map(|x| mobius_apply(w, x)).collect(),
    }
}

/// Maximum descent steps in [`mobius_normalize`].
pub const MOBIUS_MAX_STEPS: usize = 500;

/// Finds a Möbius map after which the points of `subset` average to the
/// origin, and applies it to every point.
///
/// Starts from the best point of a coarse grid in the ball, then takes
/// linearized steps solving `2 (I - M) w = -c` with `M` the second moment and
/// `c` the centroid of the subset, capped at `|w| <= 1/2` and halved until the
/// centroid shrinks.
pub fn mobius_normalize<T: Scalar>(sc: &SphereConfiguration<T>, subset: &[usize]) -> Result<SphereConfiguration<T>> {
    if subset.is_empty() {
        return Err(Error::EmptyBoundary);
    }
    let tol = T::lit(1e-7).max(T::epsilon() * T::lit(64.0));
    let goal = tol * T::lit(1e-2);
    let start = sc.centroid_norm(subset);
    if start <= tol {
        return Ok(sc.clone());
    }
    let first = sc.points[subset[0]];
    let spread = subset.iter().any(|&v| {
        let p = sc.points[v];
        let d = [0, 1, 2].map(|i| p[i] - first[i]);
        dot3(&d, &d).sqrt() > T::epsilon().sqrt()
    });
    if !spread {
        return Err(Error::NormalizationFailure(start.to_f64().unwrap_or(f64::NAN)));
    }

    let mut cur = sc.clone();
    let mut norm = start;
    let grid = [-0.6, -0.3, 0.0, 0.3, 0.6];
    for &a in &grid {
        for &b in &grid {
            for &c in &grid {
                let w = [T::lit(a), T::lit(b), T::lit(c)];
                if dot3(&w, &w) >= T::lit(0.81) {
                    continue;
                }
                let trial = push(sc, &w);
                let tn = trial.centroid_norm(subset);
                if tn < norm {
                    cur = trial;
                    norm = tn;
                }
            }
        }
    }

    let k = T::from_usize_lossy(subset.len());
    for _ in 0..MOBIUS_MAX_STEPS {
        if norm <= goal {
            break;
        }
        let c = cur.centroid(subset);
        let mut a = DenseMatrix::<T>::identity(3);
        for &v in subset {
            let p = cur.points[v];
            for i in 0..3 {
                for j in 0..3 {
                    a[(i, j)] -= p[i] * p[j] / k;
                }
            }
        }
        let rhs = c.map(|x| -x / T::lit(2.0));
        let w = match LdlFactor::new(&a) {
            Some(f) => f.solve(&rhs),
            None => rhs.to_vec(),
        };
        let mut w = [w[0], w[1], w[2]];
        let len = dot3(&w, &w).sqrt();
        let cap = T::lit(0.5);
        if len > cap {
            w = w.map(|x| x * cap / len);
        }
        let mut improved = false;
        for _ in 0..40 {
            let trial = push(&cur, &w);
            let tn = trial.centroid_norm(subset);
            if tn < norm {
                cur = trial;
                norm = tn;
                improved = true;
                break;
            }
            w = w.map(|x| x * T::lit(0.5));
        }
        if !improved {
            break;
        }
    }
    if norm <= tol {
        Ok(cur)
    } else {
        Err(Error::NormalizationFailure(norm.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Upper bounds on λ₂ for a planar triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCertificate {
    pub lambda2: f64,
    /// Vector Rayleigh quotient of the centered sphere embedding.
    pub geometric_bound: f64,
    /// `8 D / |δΩ|`.
    pub degree_bound: f64,
    pub max_degree: usize,
    pub boundary_size: usize,
    pub centroid_norm: f64,
    pub packing_residual: f64,
    pub geometric_within_degree_bound: bool,
}

/// Additive slack when comparing λ₂ against the geometric bound.
pub const CERTIFICATE_SLACK: f64 = 1e-8;

pub fn certify_planar_bound(rg: &RotationGraph, boundary: &[usize]) -> Result<PlanarCertificate> {
    let rg = rg.with_boundary(boundary)?;
    let g: &BoundaryGraph = rg.base();
    let cp = circle_pack::<f64>(&rg)?;
    let sc = mobius_normalize(&lift_to_sphere(&cp), g.boundary())?;
    let geometric_bound = vector_rayleigh_bound::<f64, 3>(g, &sc.points)?;
    let lambda2 = lambda_k::<f64>(g, 2)?;
    if lambda2 > geometric_bound + CERTIFICATE_SLACK {
        return Err(Error::CertificateUnsound {
            lambda2,
            bound: geometric_bound,
        });
    }
    let max_degree = g.max_degree();
    let boundary_size = g.boundary().len();
    let degree_bound = 8.0 * max_degree as f64 / boundary_size as f64;
    Ok(PlanarCertificate {
        lambda2,
        geometric_bound,
        degree_bound,
        max_degree,
        boundary_size,
        centroid_norm: sc.centroid_norm(g.boundary()),
        packing_residual: cp.residual,
        geometric_within_degree_bound: geometric_bound <= degree_bound,
    })
}

/// SVG drawing of a packing at 100 px per unit.
pub fn packing_svg<T: Scalar>(cp: &CirclePacking<T>) -> String {
    let px = |x: T| x.to_f64().unwrap_or(0.0) * 100.0;
    let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for (c, &r) in cp.centers.iter().zip(&cp.radii) {
        let (x, y, r) = (px(c[0]), -px(c[1]), px(r));
        lo_x = lo_x.min(x - r);
        lo_y = lo_y.min(y - r);
        hi_x = hi_x.max(x + r);
        hi_y = hi_y.max(y + r);
    }
    let pad = 5.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        lo_x - pad,
        lo_y - pad,
        hi_x - lo_x + 2.0 * pad,
        hi_y - lo_y + 2.0 * pad
    );
    for (v, (c, &r)) in cp.centers.iter().zip(&cp.radii).enumerate() {
        let fill = if cp.pinned.binary_search(&v).is_ok() { "#f4d6a0" } else { "#cfe3f7" };
        let _ = writeln!(
            s,
            r#"  <circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="{fill}" fill-opacity="0.6" stroke="black" stroke-width="0.5"/>"#,
            px(c[0]),
            -px(c[1]),
            px(r)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generators::{gen_sphere, icosahedron, octahedron, tetrahedron};

    #[test]
    fn sensitivity_matches_finite_differences() {
        let (rv, ru, rw) = (0.7, 1.3, 0.4);
        let h = 1e-6;
        let fd = (corner_angle(rv, ru * (h as f64).exp(), rw) - corner_angle(rv, ru * (-h as f64).exp(), rw)) / (2.0 * h);
        assert!((fd - angle_sensitivity(rv, ru, rw)).abs() < 1e-8);
        // scaling all three radii leaves the angle unchanged
        let fv = (corner_angle(rv * h.exp(), ru, rw) - corner_angle(rv * (-h).exp(), ru, rw)) / (2.0 * h);
        let total = fv + angle_sensitivity(rv, ru, rw) + angle_sensitivity(rv, rw, ru);
        assert!(total.abs() < 1e-8);
    }

    #[test]
    fn hexagonal_flower() {
        let faces: Vec<[usize; 3]> = (0..6).map(|i| [0, 1 + i, 1 + (i + 1) % 6]).collect();
        let pinned: Vec<(usize, f64)> = (1..7).map(|v| (v, 1.0)).collect();
        let cp = pack_disk(7, &faces, &pinned).unwrap();
        assert!((cp.radii[0] - 1.0).abs() < 1e-10);
        assert!(cp.tangency_error < 1e-10);
    }

    #[test]
    fn tetrahedron_center_radius() {
        let cp = circle_pack::<f64>(&tetrahedron()).unwrap();
        let scale = 3f64.sqrt() / 2.0;
        let free = (0..4).find(|v| !cp.pinned.contains(v)).unwrap();
        assert!((cp.radii[free] / scale - (2.0 / 3f64.sqrt() - 1.0)).abs() < 1e-10);
        assert!(cp.residual <= 1e-8);
        // the free circle sits at the center
        assert!(cp.centers[free][0].abs() < 1e-9 && cp.centers[free][1].abs() < 1e-9);
    }

    #[test]
    fn octahedron_and_sphere_levels() {
        for g in [octahedron(), icosahedron(), gen_sphere(2)] {
            let cp = circle_pack::<f64>(&g).unwrap();
            assert!(cp.residual <= 1e-8);
            assert!(cp.tangency_error <= 1e-7);
            assert!(cp.radii.iter().all(|&r| r > 0.0));
        }
    }

    #[test]
    fn f32_packing() {
        let cp = circle_pack::<f32>(&octahedron()).unwrap();
        assert!(cp.tangency_error < 1e-3);
    }

    #[test]
    fn packing_rejects_bad_input() {
        use crate::harness::generators::{cycle, gen_torus};
        assert_eq!(circle_pack::<f64>(&cycle(5).unwrap()).unwrap_err(), Error::NotTriangulated);
        assert_eq!(
            circle_pack::<f64>(&gen_torus(3, 3).unwrap()).unwrap_err(),
            Error::NonzeroGenus(1)
        );
    }

    #[test]
    fn lift_formula() {
        assert_eq!(stereographic_lift([0.0, 0.0]), [0.0, 0.0, -1.0]);
        let p = stereographic_lift([0.6f64, 0.8]);
        assert!(p[2].abs() < 1e-15);
        let q = stereographic_lift([3.0f64, -2.0]);
        assert!((dot3(&q, &q) - 1.0).abs() < 1e-15);
        assert!((q[0] - 6.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn mobius_keeps_centered_input() {
        let sc = SphereConfiguration {
            points: vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]],
        };
        assert_eq!(mobius_normalize(&sc, &[0, 1]).unwrap(), sc);
    }

    #[test]
    fn mobius_centers_polar_cluster() {
        let mut pts = Vec::new();
        for i in 0..20 {
            let t = i as f64 * 0.7;
            let z: f64 = 0.95 + 0.002 * i as f64;
            let s = (1.0 - z * z).sqrt();
            pts.push([s * t.cos(), s * t.sin(), z]);
        }
        let sc = SphereConfiguration { points: pts };
        let all: Vec<usize> = (0..20).collect();
        let out = mobius_normalize(&sc, &all).unwrap();
        assert!(out.centroid_norm(&all) <= 1e-7);
        assert!(out.norm_error() <= 1e-10);
    }

    #[test]
    fn mobius_rejects_majority_point() {
        let sc = SphereConfiguration {
            points: vec![[0.0, 0.0, 1.0]; 3].into_iter().chain([[1.0, 0.0, 0.0]]).collect(),
        };
        assert!(matches!(
            mobius_normalize(&sc, &[0, 1, 2, 3]),
            Err(Error::NormalizationFailure(_))
        ));
        let single = SphereConfiguration {
            points: vec![[0.0, 1.0, 0.0]; 2],
        };
        assert!(matches!(
            mobius_normalize(&single, &[0, 1]),
            Err(Error::NormalizationFailure(_))
        ));
    }

    #[test]
    fn certificates() {
        let c = certify_planar_bound(&octahedron(), &(0..6).collect::<Vec<_>>()).unwrap();
        assert!(c.lambda2 <= c.geometric_bound + 1e-8);
        assert!((c.degree_bound - 32.0 / 6.0).abs() < 1e-12);
        let c = certify_planar_bound(&icosahedron(), &(0..12).collect::<Vec<_>>()).unwrap();
        assert!(c.lambda2 <= c.geometric_bound + 1e-8);
        assert!(c.lambda2 * 12.0 <= 40.0);
        let c = certify_planar_bound(&gen_sphere(1), &[0, 5, 9, 20, 30, 41]).unwrap();
        assert!(c.lambda2 <= c.geometric_bound + 1e-8);
    }

    #[test]
    fn svg_has_one_circle_per_vertex() {
        let cp = circle_pack::<f64>(&octahedron()).unwrap();
        let svg = packing_svg(&cp);
        assert_eq!(svg.matches("<circle").count(), 6);
    }
}
