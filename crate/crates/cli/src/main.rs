use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use steklov::harness::document::{instance_cap, GraphDocument};
use steklov::harness::generators::Family;
use steklov::harness::sweep::{records_to_csv, sweep_main_bound, sweep_svg, BoundaryPolicy};
use steklov::immersion::{comparison_bound, random_immersion};
use steklov::packing::{circle_pack, packing_svg};
use steklov::refine::{boundary_growth, refine};
use steklov::resistance::effective_resistance;
use steklov::spectrum::{dtn_matrix, steklov_eigenvalues};
use steklov::{BoundaryGraph, Error, RotationGraph};

#[derive(Parser)]
#[command(name = "steklov", version, about = "Discrete Steklov eigenvalues on graphs with boundary")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steklov eigenvalues in ascending order, or only the k-th one.
    Spectrum {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Dirichlet-to-Neumann matrix, one row per boundary vertex.
    Dtn { file: PathBuf },
    /// Effective resistance between two vertices.
    Resist {
        file: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(long)]
        v: usize,
    },
    /// k-fold hexagon subdivision with inherited boundary.
    Subdivide {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random immersion into the k-fold subdivision.
    Immerse {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Planar circle packing of a spherical triangulation.
    Pack {
        file: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Geometric upper bound on lambda2 from the centered packing.
    CertifyPlanar { file: PathBuf },
    /// Writes a generated family: tetrahedron, octahedron, icosahedron,
    /// sphere LEVEL, torus N M, genus G RES, path N, cycle N.
    Gen {
        family: String,
        params: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// lambda2 |boundary| across genus 1..=gmax.
    Sweep {
        #[arg(long, default_value_t = 4)]
        gmax: usize,
        #[arg(long, default_value_t = 6)]
        res: usize,
        /// all, face, or random:<p>:<seed>
        #[arg(long, default_value = "all")]
        policy: String,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

/// `println!` that reports a closed stdout instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {
        writeln!(io::stdout().lock(), $($arg)*)?
    };
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds to 12 significant digits and prints the shortest form.
fn short(x: f64) -> String {
    let y = round12(x);
    if y == 0.0 {
        "0".into()
    } else {
        y.to_string()
    }
}

fn load(path: &Path) -> Result<GraphDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc = GraphDocument::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    doc.check_size(instance_cap())?;
    Ok(doc)
}

fn load_graph(path: &Path) -> Result<BoundaryGraph> {
    Ok(load(path)?.to_boundary_graph()?)
}

fn load_embedded(path: &Path) -> Result<(GraphDocument, RotationGraph)> {
    let doc = load(path)?;
    let rg = doc.to_rotation_graph()?;
    Ok((doc, rg))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Spectrum { file, k } => {
            let g = load_graph(&file)?;
            let values = steklov_eigenvalues::<f64>(&g)?;
            match k {
                Some(k) => {
                    let v = k.checked_sub(1).and_then(|i| values.get(i)).ok_or(Error::IndexOutOfRange {
                        what: "eigenvalue",
                        index: k,
                        bound: values.len(),
                    })?;
                    out!("{}", short(*v));
                }
                None => {
                    let line: Vec<String> = values.iter().map(|&x| short(x)).collect();
                    out!("{}", line.join(" "));
                }
            }
        }
        Command::Dtn { file } => {
            let g = load_graph(&file)?;
            let dtn = dtn_matrix::<f64>(&g)?;
            out!("# boundary {:?}", dtn.boundary);
            for row in dtn.matrix.to_rows() {
                let line: Vec<String> = row.iter().map(|&x| short(x)).collect();
                out!("{}", line.join(" "));
            }
        }
        Command::Resist { file, u, v } => {
            let g = load_graph(&file)?;
            let r = effective_resistance::<f64>(&g, u, v)?;
            out!("resistance\tpseudoinverse\tdiscrepancy");
            out!("{:?}\t{:?}\t{:e}", round12(r.r_steklov), round12(r.r_pinv), r.discrepancy);
        }
        Command::Subdivide { file, k, output } => {
            let (doc, rg) = load_embedded(&file)?;
            let refined = refine(&rg, &doc.boundary, k)?;
            let mut meta = doc.meta.clone();
            meta.insert("subdivision_level".into(), k.into());
            let out = GraphDocument::from_rotation_graph(&refined.graph).with_meta(meta);
            emit(&out.to_json(), output.as_deref())?;
            eprintln!(
                "vertices {} edges {} boundary {} growth {}",
                refined.graph.base().n(),
                refined.graph.base().edge_count(),
                refined.boundary().len(),
                short(boundary_growth(&refined))
            );
        }
        Command::Immerse { file, k, seed } => {
            let (doc, rg) = load_embedded(&file)?;
            let refined = refine(&rg, &doc.boundary, k)?;
            let imm = random_immersion(&refined, seed)?;
            out!("seed {seed}");
            out!("host_vertices {}", imm.host().n());
            out!("host_edges {}", imm.host().edge_count());
            out!("xi {}", imm.xi());
            out!("ell {}", imm.ell());
            if imm.source().boundary().len() >= 2 {
                let (lhs, rhs) = comparison_bound::<f64>(&imm, 2)?;
                out!("lambda2_source {}", short(lhs));
                out!("xi_ell_lambda2_host {}", short(rhs));
            }
        }
        Command::Pack { file, svg } => {
            let (_, rg) = load_embedded(&file)?;
            let cp = circle_pack::<f64>(&rg)?;
            out!("residual {:e}", cp.residual);
            out!("tangency_error {:e}", cp.tangency_error);
            out!("vertex radius x y");
            for (v, (r, c)) in cp.radii.iter().zip(&cp.centers).enumerate() {
                out!("{v} {} {} {}", short(*r), short(c[0]), short(c[1]));
            }
            if let Some(p) = svg {
                fs::write(&p, packing_svg(&cp)).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::CertifyPlanar { file } => {
            let (doc, rg) = load_embedded(&file)?;
            let c = steklov::packing::certify_planar_bound(&rg, &doc.boundary)?;
            out!("lambda2 {}", short(c.lambda2));
            out!("geometric_bound {}", short(c.geometric_bound));
            out!("degree_bound {}", short(c.degree_bound));
            out!("max_degree {}", c.max_degree);
            out!("boundary_size {}", c.boundary_size);
            out!("centroid_norm {:e}", c.centroid_norm);
            out!("geometric_within_degree_bound {}", c.geometric_within_degree_bound);
        }
        Command::Gen { family, params, output } => {
            let fam = Family::parse(&family, &params)?;
            let rg = fam.build()?;
            let doc = GraphDocument::from_rotation_graph(&rg).with_meta(fam.metadata());
            doc.check_size(instance_cap())?;
            emit(&doc.to_json(), output.as_deref())?;
        }
        Command::Sweep { gmax, res, policy, csv, svg } => {
            let policy: BoundaryPolicy = policy.parse()?;
            let outcome = sweep_main_bound(gmax, res, policy)?;
            for d in &outcome.diagnostics {
                eprintln!("{d}");
            }
            emit(&records_to_csv(&outcome.records)?, csv.as_deref())?;
            if let Some(p) = svg {
                fs::write(&p, sweep_svg(&outcome.records)).with_context(|| format!("writing {}", p.display()))?;
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_convergence() => 2,
        _ => 1,
    }
}

fn broken_pipe(err: &anyhow::Error) -> bool {
    err.downcast_ref::<io::Error>()
        .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
