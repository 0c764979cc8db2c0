//! λ₂·|δΩ| across genus, with CSV and SVG output.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::RotationGraph;
use crate::harness::generators::gen_genus;
use crate::spectrum::steklov_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPolicy {
    AllVertices,
    /// Each vertex independently with probability `p`.
    RandomFraction { p: f64, seed: u64 },
    /// The corners of the first traced face.
    SingleFace,
}

impl FromStr for BoundaryPolicy {
    type Err = Error;

    /// `all`, `face` or `random:<p>:<seed>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown boundary policy {s:?}"));
        match s {
            "all" => Ok(BoundaryPolicy::AllVertices),
            "face" => Ok(BoundaryPolicy::SingleFace),
            _ => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() != 3 || parts[0] != "random" {
                    return Err(bad());
                }
                let p: f64 = parts[1].parse().map_err(|_| bad())?;
                let seed: u64 = parts[2].parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidArgument(format!("fraction {p} outside [0, 1]")));
                }
                Ok(BoundaryPolicy::RandomFraction { p, seed })
            }
        }
    }
}

impl BoundaryPolicy {
    /// Boundary for the genus-`g` instance.
    pub fn select(&self, rg: &RotationGraph, g: usize) -> Vec<usize> {
        let n = rg.base().n();
        match *self {
            BoundaryPolicy::AllVertices => (0..n).collect(),
            BoundaryPolicy::RandomFraction { p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(g as u64));
                (0..n).filter(|_| rng.gen_bool(p)).collect()
            }
            BoundaryPolicy::SingleFace => {
                let mut f = rg.trace_faces().swap_remove(0);
                f.sort_unstable();
                f
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub family: String,
    pub g: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub boundary_size: usize,
    pub lambda2: f64,
    pub product: f64,
    pub product_over_g: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    /// Ordered by genus.
    pub records: Vec<SweepRecord>,
    /// One line per skipped instance.
    pub diagnostics: Vec<String>,
}

/// One record per genus `1..=g_max`, instances computed in parallel.
pub fn sweep_main_bound(g_max: usize, resolution: usize, policy: BoundaryPolicy) -> Result<SweepOutcome> {
    if g_max == 0 {
        return Err(Error::TooSmall("g_max must be at least 1".into()));
    }
    let results: Vec<Result<std::result::Result<SweepRecord, String>>> = (1..=g_max)
        .into_par_iter()
        .map(|g| {
            let rg = gen_genus(g, resolution)?;
            let boundary = policy.select(&rg, g);
            if boundary.len() < 2 {
                return Ok(Err(format!(
                    "genus {g}: boundary has {} vertex(es), lambda2 undefined; skipped",
                    boundary.len()
                )));
            }
            let graph = rg.base().with_boundary(&boundary)?;
            let lambda2 = steklov_eigenvalues::<f64>(&graph)?[1];
            let product = lambda2 * boundary.len() as f64;
            Ok(Ok(SweepRecord {
                family: "genus".into(),
                g,
                d: graph.max_degree(),
                boundary_size: boundary.len(),
                lambda2,
                product,
                product_over_g: product / g.max(1) as f64,
            }))
        })
        .collect();
    let mut out = SweepOutcome::default();
    for r in results {
        match r? {
            Ok(rec) => out.records.push(rec),
            Err(msg) => out.diagnostics.push(msg),
        }
    }
    out.records.sort_by(|a, b| (&a.family, a.g).cmp(&(&b.family, b.g)));
    Ok(out)
}

/// `x` with 12 significant digits; plain decimal unless the exponent is extreme.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let mut body = if exp >= 0 {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{digits}{}", "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if negative {
        body.insert(0, '-');
    }
    body
}

pub const CSV_HEADER: [&str; 7] = [
    "family",
    "g",
    "D",
    "boundary_size",
    "lambda2",
    "product",
    "product_over_g",
];

pub fn records_to_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.family.clone(),
            r.g.to_string(),
            r.d.to_string(),
            r.boundary_size.to_string(),
            format_sig12(r.lambda2),
            format_sig12(r.product),
            format_sig12(r.product_over_g),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Scatter plot of `product_over_g` against `g`.
pub fn sweep_svg(records: &[SweepRecord]) -> String {
    let (w, h, m) = (480.0, 320.0, 40.0);
    let gmax = records.iter().map(|r| r.g).max().unwrap_or(1).max(1) as f64;
    let ymax = records
        .iter()
        .map(|r| r.product_over_g)
        .filter(|y| y.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.1;
    let sx = |g: f64| m + (g - 0.5) / gmax * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#);
    let _ = writeln!(
        s,
        r#"  <line x1="{m}" y1="{0}" x2="{1}" y2="{0}" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(s, r#"  <line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let _ = writeln!(
        s,
        r#"  <text x="{}" y="{}" font-size="12" text-anchor="middle">g</text>"#,
        w / 2.0,
        h - 8.0
    );
    let _ = writeln!(
        s,
        r#"  <text x="12" y="{}" font-size="12" transform="rotate(-90 12 {})">lambda2 |dOmega| / g</text>"#,
        h / 2.0,
        h / 2.0
    );
    let _ = writeln!(
        s,
        r#"  <text x="{}" y="{}" font-size="10">{}</text>"#,
        m + 4.0,
        m - 4.0,
        format_sig12(ymax)
    );
    for r in records {
        let _ = writeln!(
            s,
            r#"  <circle cx="{:.3}" cy="{:.3}" r="4" fill="steelblue"><title>g={} {}</title></circle>"#,
            sx(r.g as f64),
            sy(r.product_over_g),
            r.g,
            format_sig12(r.product_over_g)
        );
        let _ = writeln!(
            s,
            r#"  <text x="{:.3}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            sx(r.g as f64),
            h - m + 14.0,
            r.g
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_sig12(43.5), "43.5000000000");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(-0.00125), "-0.00125000000000");
        assert_eq!(format_sig12(123456789012345.0), "123456789012000");
        assert_eq!(format_sig12(0.0), "0.00000000000");
        assert_eq!(format_sig12(2.5e-9), "2.50000000000e-9");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn policies() {
        assert_eq!("all".parse::<BoundaryPolicy>().unwrap(), BoundaryPolicy::AllVertices);
        assert_eq!(
            "random:0.25:7".parse::<BoundaryPolicy>().unwrap(),
            BoundaryPolicy::RandomFraction { p: 0.25, seed: 7 }
        );
        assert!("random:2:7".parse::<BoundaryPolicy>().is_err());
        assert!("ring".parse::<BoundaryPolicy>().is_err());
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let a = sweep_main_bound(3, 4, BoundaryPolicy::AllVertices).unwrap();
        assert_eq!(a.records.len(), 3);
        for (i, r) in a.records.iter().enumerate() {
            assert_eq!(r.g, i + 1);
            assert_eq!(r.product, r.lambda2 * r.boundary_size as f64);
            assert!(r.product_over_g.is_finite());
        }
        let p = BoundaryPolicy::RandomFraction { p: 0.3, seed: 11 };
        let x = records_to_csv(&sweep_main_bound(2, 4, p).unwrap().records).unwrap();
        let y = records_to_csv(&sweep_main_bound(2, 4, p).unwrap().records).unwrap();
        assert_eq!(x, y);
        assert!(x.starts_with("family,g,D,boundary_size,lambda2,product,product_over_g\n"));
    }

    #[test]
    fn tiny_boundary_is_skipped() {
        let p = BoundaryPolicy::RandomFraction { p: 0.0, seed: 1 };
        let out = sweep_main_bound(2, 4, p).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.diagnostics.len(), 2);
    }

    #[test]
    fn svg_has_points() {
        let out = sweep_main_bound(2, 4, BoundaryPolicy::SingleFace).unwrap();
        assert_eq!(sweep_svg(&out.records).matches("<circle").count(), 2);
    }
}
