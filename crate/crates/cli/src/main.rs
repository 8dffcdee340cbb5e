//! `modlab`: generate and ingest orthodiagonal maps, solve for the unit
//! potential, decompose the current into non-crossing paths, draw the rectangle
//! tiling and run refinement studies.

use clap::{Args, Parser, Subcommand, ValueEnum};
use modlab::convergence::{self, MeshSpec};
use modlab::dirichlet::{self, DEFAULT_TOL};
use modlab::modulus;
use modlab::ncms::{self, NcmsDecomposition};
use modlab::ortho::{self, ArcMarkers, DualPair, OrthodiagonalMap};
use modlab::tiling::{self, SvgOptions};
use modlab::{PlaneNetwork, Point};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    /// A module invariant failed; the payload names it.
    #[error("invariant '{invariant}' violated: {detail}")]
    Invariant { invariant: String, detail: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Invariant { .. } => 1,
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

fn violated(invariant: &str, detail: impl Into<String>) -> CliError {
    CliError::Invariant { invariant: invariant.into(), detail: detail.into() }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

#[derive(Parser, Debug)]
#[command(name = "modlab", version, about = "Discrete modulus, non-crossing path decompositions and rectangle tilings")]
struct Cli {
    /// Tolerance for the invariant checks.
    #[arg(long, global = true, env = "MODLAB_TOL", value_parser = positive, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Seed for Monte-Carlo checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run the invariant checks only; write no artifacts.
    #[arg(long, global = true)]
    validate_only: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a grid map as JSON.
    Generate {
        #[arg(value_enum)]
        kind: GridKind,
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a Triangle .node/.ele pair into an orthodiagonal map.
    Ingest {
        node: PathBuf,
        ele: PathBuf,
        /// Boundary markers for S1,T1,S2,T2.
        #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [1i64, 2, 3, 4])]
        markers: Vec<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the primal network with boundary edges of this total conductance.
        #[arg(long, value_parser = positive, requires = "network_out")]
        boundary_eps: Option<f64>,
        #[arg(long)]
        network_out: Option<PathBuf>,
    },
    /// Solve for the unit potential and print the modulus.
    Solve {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose the current flow into non-crossing paths.
    Decompose {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify the rectangle tiling.
    Tile {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Rectangles as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Draw the paths over the tiling.
        #[arg(long)]
        overlay: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Refinement studies written as CSV.
    Converge {
        #[command(subcommand)]
        study: Study,
    },
    /// Fulkerson, Beurling and flow-decomposition checks.
    Check {
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Network or orthodiagonal map JSON.
    path: PathBuf,
    /// Use the dual network of a map.
    #[arg(long)]
    dual: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum GridKind {
    Grid,
    Rotated,
}

#[derive(Args, Debug)]
struct CsvOut {
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fill the runtime column (makes the output time dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Study {
    /// Straight grids on the L x 1 rectangle
    Rect {
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        out: CsvOut,
    },
    /// Rotated grids on the L x 1 rectangle
    Rotated {
        #[arg(long = "L", default_value_t = 1)]
        l: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[command(flatten)]
        out: CsvOut,
    },
    /// Ingested triangulations of one domain, coarse to fine
    Mesh {
        /// Mesh base paths (without .node/.ele), coarsest first.
        #[arg(required = true)]
        meshes: Vec<PathBuf>,
        /// Refinement parameter of each mesh.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 4, default_values_t = [1i64, 2, 3, 4])]
        markers: Vec<i64>,
        /// Continuous potential to compare against: x for the unit square.
        #[arg(long, value_enum)]
        reference: Option<Reference>,
        #[command(flatten)]
        out: CsvOut,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Reference {
    X,
}

struct Ctx {
    tol: f64,
    seed: u64,
    validate_only: bool,
}

impl Ctx {
    fn write(&self, path: &Option<PathBuf>, contents: &str) -> Result<(), CliError> {
        match path {
            Some(p) if !self.validate_only => fs::write(p, contents)
                .map_err(|e| CliError::Domain(format!("cannot write {}: {e}", p.display()))),
            _ => Ok(()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn arc_markers(m: &[i64]) -> ArcMarkers {
    ArcMarkers { s1: m[0], t1: m[1], s2: m[2], t2: m[3] }
}

struct Loaded {
    net: PlaneNetwork,
    pair: Option<DualPair>,
}

fn load(input: &Input) -> Result<Loaded, CliError> {
    let text = read(&input.path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", input.path.display())))?;
    if value.get("V_black").is_some() {
        let map = OrthodiagonalMap::from_json(&text).map_err(domain)?;
        check_map(&map)?;
        let pair = ortho::dual_pair(&map).map_err(domain)?;
        let net = if input.dual { pair.dual.clone() } else { pair.primal.clone() };
        return Ok(Loaded { net, pair: Some(pair) });
    }
    if input.dual {
        return Err(CliError::Usage("--dual needs an orthodiagonal map".into()));
    }
    let net = PlaneNetwork::from_json(&text).map_err(domain)?;
    Ok(Loaded { net, pair: None })
}

fn check_network(net: &PlaneNetwork) -> Result<(), CliError> {
    match net.validate().first() {
        Some(v) => Err(violated(v.invariant, v.detail.clone())),
        None => Ok(()),
    }
}

fn check_map(map: &OrthodiagonalMap) -> Result<(), CliError> {
    match map.validate().first() {
        Some(v) => Err(violated(v.invariant, v.detail.clone())),
        None => Ok(()),
    }
}

fn solve(ctx: &Ctx, net: &PlaneNetwork) -> Result<dirichlet::HarmonicSolution, CliError> {
    check_network(net)?;
    let sol = dirichlet::solve_unit(net).map_err(domain)?;
    let residual = dirichlet::harmonic_residual(net, &sol);
    if residual > ctx.tol * sol.energy.max(1.0) {
        return Err(violated("harmonic", format!("Kirchhoff residual {residual:e}")));
    }
    Ok(sol)
}

fn decompose(ctx: &Ctx, net: &PlaneNetwork, h: &[f64]) -> Result<NcmsDecomposition, CliError> {
    let dec = ncms::decompose_with(net, h).map_err(domain)?;
    let flow = dirichlet::current_flow(net, h).flow;
    let from_paths = ncms::flow_decomposition(net, &dec);
    let worst = flow.iter().zip(&from_paths).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if worst > ctx.tol * dec.modulus.max(1.0) {
        return Err(violated("flow-decomposition", format!("edgewise mismatch {worst:e}")));
    }
    Ok(dec)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx { tol: cli.tol, seed: cli.seed, validate_only: cli.validate_only };
    match cli.command {
        Command::Generate { kind, l, n, out } => {
            if l == 0 || n == 0 {
                return Err(CliError::Usage("--L and --n must be positive".into()));
            }
            let map = match kind {
                GridKind::Grid => ortho::grid_map(l, n),
                GridKind::Rotated => ortho::rotated_grid_map(l, n),
            };
            check_map(&map)?;
            let pair = ortho::dual_pair(&map).map_err(domain)?;
            check_network(&pair.primal)?;
            check_network(&pair.dual)?;
            println!("quads = {}", map.quads.len());
            ctx.write(&out, &map.to_json())
        }
        Command::Ingest { node, ele, markers, out, boundary_eps, network_out } => {
            let map = ortho::ingest_triangulation(&read(&node)?, &read(&ele)?, arc_markers(&markers))
                .map_err(domain)?;
            check_map(&map)?;
            let pair = ortho::dual_pair(&map).map_err(domain)?;
            check_network(&pair.primal)?;
            check_network(&pair.dual)?;
            println!("quads = {}", map.quads.len());
            ctx.write(&out, &map.to_json())?;
            if let Some(eps) = boundary_eps {
                let net = ortho::assign_boundary_conductance(&map, eps).map_err(domain)?;
                check_network(&net)?;
                ctx.write(&network_out, &net.to_json())?;
            }
            Ok(())
        }
        Command::Solve { input, out } => {
            let loaded = load(&input)?;
            let sol = solve(&ctx, &loaded.net)?;
            println!("modulus = {:.12}", sol.energy);
            let density = dirichlet::extremal_density(&loaded.net, &sol.potentials);
            let doc = json!({ "modulus": sol.energy, "potentials": sol.potentials, "density": density });
            ctx.write(&out, &doc.to_string())
        }
        Command::Decompose { input, out } => {
            let loaded = load(&input)?;
            let sol = solve(&ctx, &loaded.net)?;
            let dec = decompose(&ctx, &loaded.net, &sol.potentials)?;
            println!("modulus = {:.12}", dec.modulus);
            println!("paths = {}", dec.paths.len());
            ctx.write(&out, &dec.to_json())
        }
        Command::Tile { input, svg, json, overlay, samples } => {
            let loaded = load(&input)?;
            let net = &loaded.net;
            let sol = solve(&ctx, net)?;
            let dec = decompose(&ctx, net, &sol.potentials)?;
            let t = tiling::build_tiling(net, &sol.potentials, &dec).map_err(domain)?;
            let area: f64 = t.rects.iter().filter(|r| !r.degenerate).map(|r| r.area()).sum();
            let cov = tiling::coverage(&t, samples, ctx.seed);
            println!("modulus = {:.12}", dec.modulus);
            println!("area = {:.12}", area);
            println!("coverage: {} samples, {} gaps, {} overlaps", cov.samples, cov.gaps, cov.overlaps);
            if cov.gaps + cov.overlaps > 0 {
                return Err(violated("tiling-coverage", format!("{} gaps, {} overlaps", cov.gaps, cov.overlaps)));
            }
            if let (Some(pair), false) = (&loaded.pair, input.dual) {
                let r = tiling::dual_height_residual(pair, &t).map_err(domain)?;
                if r > 1e-8 {
                    return Err(violated("dual-heights", format!("largest gap {r:e}")));
                }
            }
            let opts = SvgOptions { overlay_paths: overlay, ..SvgOptions::default() };
            ctx.write(&svg, &tiling::emit_svg(&t, Some((&sol.potentials, &dec)), &opts))?;
            let rects = serde_json::to_string(&t).expect("tiling serializes");
            ctx.write(&json, &rects)
        }
        Command::Converge { study } => converge(&ctx, study),
        Command::Check { input } => check(&ctx, &input),
    }
}

fn converge(ctx: &Ctx, study: Study) -> Result<(), CliError> {
    let increasing = |ns: &[usize]| ns.windows(2).all(|w| w[0] < w[1]) && ns.iter().all(|&n| n > 0);
    if let Study::Rect { l, n, .. } | Study::Rotated { l, n, .. } = &study {
        if *l == 0 || !increasing(n) {
            return Err(CliError::Usage("--L must be positive and --n a positive increasing list".into()));
        }
    }
    let (rows, out) = match study {
        Study::Rect { l, n, out } => (convergence::rectangle_study(l, &n).map_err(domain)?, out),
        Study::Rotated { l, n, out } => (convergence::rotated_study(l, &n).map_err(domain)?, out),
        Study::Mesh { meshes, eps, markers, reference, out } => {
            if meshes.len() != eps.len() {
                return Err(CliError::Usage("give one --eps value per mesh".into()));
            }
            let specs: Vec<MeshSpec> = meshes
                .iter()
                .zip(&eps)
                .map(|(base, &e)| MeshSpec {
                    parameter: e,
                    node: base.with_extension("node"),
                    ele: base.with_extension("ele"),
                })
                .collect();
            let exact = |p: Point| p.x;
            let reference: Option<&dyn Fn(Point) -> f64> = reference.map(|Reference::X| &exact as _);
            let rows = convergence::mesh_study(&specs, arc_markers(&markers), reference).map_err(domain)?;
            let diffs = convergence::modulus_differences(&rows);
            if !diffs.is_empty() {
                let shown: Vec<String> = diffs.iter().map(|d| convergence::format_g12(*d)).collect();
                println!("modulus differences = {}", shown.join(","));
            }
            if !convergence::differences_shrink(&rows) {
                eprintln!("warning: successive modulus differences do not shrink");
            }
            (rows, out)
        }
    };
    for r in &rows {
        if (r.fulkerson_product - 1.0).abs() > 1e-6 {
            return Err(violated("fulkerson", format!("product {} at parameter {}", r.fulkerson_product, r.parameter)));
        }
    }
    let csv = convergence::to_csv(&rows, out.timing);
    match (&out.csv, ctx.validate_only) {
        (Some(_), _) => ctx.write(&out.csv, &csv),
        (None, false) => {
            print!("{csv}");
            Ok(())
        }
        (None, true) => Ok(()),
    }
}

fn check(ctx: &Ctx, input: &Input) -> Result<(), CliError> {
    let loaded = load(input)?;
    let net = &loaded.net;
    let sol = solve(ctx, net)?;
    println!("modulus = {:.12}", sol.energy);
    if let Some(pair) = &loaded.pair {
        let f = ortho::fulkerson_check(pair).map_err(domain)?;
        println!("fulkerson product = {:.12}", f.product);
        if (f.product - 1.0).abs() > 1e-8 {
            return Err(violated("fulkerson", format!("product {}", f.product)));
        }
    }
    let dec = decompose(ctx, net, &sol.potentials)?;
    println!("paths = {}", dec.paths.len());
    let rho = dirichlet::extremal_density(net, &sol.potentials);
    let shortest = modulus::min_rho_length(net, &rho);
    println!("shortest rho-length = {:.12}", shortest);
    if shortest < 1.0 - ctx.tol {
        return Err(violated("beurling-admissible", format!("a path has rho-length {shortest}")));
    }
    let family = modulus::PathFamily::new(net, dec.paths.clone()).map_err(domain)?;
    let report = modulus::verify_beurling(net, &family, &rho, &family, Some(&dec.masses));
    println!("beurling length deviation = {:e}", report.max_length_deviation);
    if report.max_length_deviation > ctx.tol {
        return Err(violated("beurling-length", format!("deviation {:e}", report.max_length_deviation)));
    }
    let residual = report.certificate_residual.unwrap_or(0.0);
    println!("beurling certificate residual = {residual:e}");
    if residual > ctx.tol * dec.modulus.max(1.0) {
        return Err(violated("beurling-certificate", format!("residual {residual:e}")));
    }
    println!("flow decomposition: ok");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
