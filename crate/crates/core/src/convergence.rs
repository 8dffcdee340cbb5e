//! Refinement studies on grids and ingested meshes: modulus, Fulkerson
//! product, harmonic error against a known continuous potential and the
//! Kolmogorov distance of the decomposition pmf to the uniform law on heights.

use crate::dirichlet;
use crate::error::ConvergenceError;
use crate::geometry::Point;
use crate::ncms::{self, NcmsDecomposition};
use crate::network::{Path, PlaneNetwork};
use crate::ortho::{self, ArcMarkers, DualPair};
use std::path::PathBuf;
use std::time::Instant;

/// One row of a study. `parameter` is n for grids and the mesh spacing for meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub modulus_primal: f64,
    pub modulus_dual: f64,
    pub fulkerson_product: f64,
    pub harmonic_max_error: Option<f64>,
    pub pmf_distance: Option<f64>,
    pub runtime_ms: f64,
    /// Largest Hausdorff distance from a decomposition path to its straight limit line.
    pub path_line_distance: Option<f64>,
}

pub const CSV_HEADER: &str =
    "parameter,modulusPrimal,modulusDual,fulkersonProduct,harmonicMaxError,pmfDistance,runtimeMs";

/// C's `%.12g`.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV in the fixed column order. Runtimes are left blank unless `timing` is set,
/// so that repeated runs produce identical bytes.
pub fn to_csv(rows: &[ConvergenceRow], timing: bool) -> String {
    let opt = |v: Option<f64>| v.map(format_g12).unwrap_or_default();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let runtime = if timing { format_g12(r.runtime_ms) } else { String::new() };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_g12(r.parameter),
            format_g12(r.modulus_primal),
            format_g12(r.modulus_dual),
            format_g12(r.fulkerson_product),
            opt(r.harmonic_max_error),
            opt(r.pmf_distance),
            runtime
        ));
    }
    out
}

/// sup over t in [0,1] of |F(t) − t| for the law putting `masses[i]` at
/// `heights[i]` (clamped to [0,1]).
pub fn kolmogorov_to_uniform(heights: &[f64], masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    let mut atoms: Vec<(f64, f64)> =
        heights.iter().map(|h| h.clamp(0.0, 1.0)).zip(masses.iter().map(|m| m / total)).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf = 0.0;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let t = atoms[i].0;
        worst = worst.max((cdf - t).abs());
        while i < atoms.len() && atoms[i].0 == t {
            cdf += atoms[i].1;
            i += 1;
        }
        worst = worst.max((cdf - t).abs());
    }
    worst.max((cdf - 1.0).abs())
}

/// Mean of the reference height over a path's vertices.
pub fn path_height(net: &PlaneNetwork, path: &Path, psi: &dyn Fn(Point) -> f64) -> f64 {
    path.vertices.iter().map(|&v| psi(net.pos(v))).sum::<f64>() / path.vertices.len() as f64
}

/// Kolmogorov distance between the decomposition pmf placed at the reference
/// heights of its paths and the uniform law on [0,1].
pub fn pmf_transverse_distance(
    net: &PlaneNetwork,
    dec: &NcmsDecomposition,
    reference: Option<&dyn Fn(Point) -> f64>,
) -> Result<f64, ConvergenceError> {
    let psi = reference.ok_or(ConvergenceError::NoReference)?;
    let heights: Vec<f64> = dec.paths.iter().map(|p| path_height(net, p, psi)).collect();
    Ok(kolmogorov_to_uniform(&heights, &dec.pmf))
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 { 0.0 } else { (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0) };
    p.dist(Point::new(a.x + t * ab.x, a.y + t * ab.y))
}

fn point_polyline_distance(p: Point, line: &[Point]) -> f64 {
    line.windows(2).map(|w| point_segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between a path and the slope-1 segment through the mean
/// of its y − x values, cut off at x + y = 0 and x + y = 2L.
pub fn slope_one_distance(net: &PlaneNetwork, path: &Path, l: f64) -> f64 {
    let pts: Vec<Point> = path.vertices.iter().map(|&v| net.pos(v)).collect();
    let c = pts.iter().map(|p| p.y - p.x).sum::<f64>() / pts.len() as f64;
    let (a, b) = (Point::new(-c / 2.0, c / 2.0), Point::new(l - c / 2.0, l + c / 2.0));
    let forward = pts.iter().map(|&p| point_segment_distance(p, a, b)).fold(0.0, f64::max);
    let samples = 4 * pts.len();
    let backward = (0..=samples)
        .map(|k| {
            let t = k as f64 / samples as f64;
            point_polyline_distance(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)), &pts)
        })
        .fold(0.0, f64::max);
    forward.max(backward)
}

fn max_error(net: &PlaneNetwork, h: &[f64], exact: &dyn Fn(Point) -> f64) -> f64 {
    (0..net.num_vertices()).map(|v| (h[v] - exact(net.pos(v))).abs()).fold(0.0, f64::max)
}

struct Measured {
    row: ConvergenceRow,
    dec: NcmsDecomposition,
}

fn measure(
    parameter: f64,
    pair: &DualPair,
    exact: Option<&dyn Fn(Point) -> f64>,
    psi: Option<&dyn Fn(Point) -> f64>,
    started: Instant,
) -> Result<Measured, ConvergenceError> {
    let sol = dirichlet::solve_unit(&pair.primal)?;
    let dual = dirichlet::solve_unit(&pair.dual)?.energy;
    let dec = ncms::decompose_with(&pair.primal, &sol.potentials)?;
    let harmonic_max_error = exact.map(|f| max_error(&pair.primal, &sol.potentials, f));
    let pmf_distance = match psi {
        Some(_) => Some(pmf_transverse_distance(&pair.primal, &dec, psi)?),
        None => None,
    };
    let row = ConvergenceRow {
        parameter,
        modulus_primal: sol.energy,
        modulus_dual: dual,
        fulkerson_product: sol.energy * dual,
        harmonic_max_error,
        pmf_distance,
        runtime_ms: started.elapsed().as_secs_f64() * 1e3,
        path_line_distance: None,
    };
    Ok(Measured { row, dec })
}

/// Straight grid of aspect L: exact modulus (1/L)(1 + 1/n), exact potential x/L,
/// reference heights y.
pub fn rectangle_study(l: usize, ns: &[usize]) -> Result<Vec<ConvergenceRow>, ConvergenceError> {
    let lf = l as f64;
    let exact = move |p: Point| p.x / lf;
    let psi = |p: Point| p.y;
    ns.iter()
        .map(|&n| {
            let started = Instant::now();
            let pair = ortho::dual_pair(&ortho::grid_map(l, n))?;
            Ok(measure(n as f64, &pair, Some(&exact), Some(&psi), started)?.row)
        })
        .collect()
}

/// Rotated grid of aspect L: modulus 1/L, exact potential (x + y)/(2L),
/// reference heights (y − x)/2, plus the distance of the paths to slope-1 lines.
pub fn rotated_study(l: usize, ns: &[usize]) -> Result<Vec<ConvergenceRow>, ConvergenceError> {
    let lf = l as f64;
    let exact = move |p: Point| (p.x + p.y) / (2.0 * lf);
    let psi = |p: Point| (p.y - p.x) / 2.0;
    ns.iter()
        .map(|&n| {
            let started = Instant::now();
            let pair = ortho::dual_pair(&ortho::rotated_grid_map(l, n))?;
            let Measured { mut row, dec } = measure(n as f64, &pair, Some(&exact), Some(&psi), started)?;
            row.path_line_distance = Some(
                dec.paths.iter().map(|p| slope_one_distance(&pair.primal, p, lf)).fold(0.0, f64::max),
            );
            row.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
            Ok(row)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub parameter: f64,
    pub node: PathBuf,
    pub ele: PathBuf,
}

/// Ingested meshes of one domain at decreasing spacing. `exact` is the
/// continuous potential when known.
pub fn mesh_study(
    meshes: &[MeshSpec],
    markers: ArcMarkers,
    exact: Option<&dyn Fn(Point) -> f64>,
) -> Result<Vec<ConvergenceRow>, ConvergenceError> {
    meshes
        .iter()
        .map(|m| {
            let started = Instant::now();
            let map = ortho::ingest_files(&m.node, &m.ele, markers)?;
            let pair = ortho::dual_pair(&map)?;
            Ok(measure(m.parameter, &pair, exact, None, started)?.row)
        })
        .collect()
}

/// |M(k) − M(k+1)| along a study.
pub fn modulus_differences(rows: &[ConvergenceRow]) -> Vec<f64> {
    rows.windows(2).map(|w| (w[0].modulus_primal - w[1].modulus_primal).abs()).collect()
}

/// Whether successive modulus differences shrink. A soft check: callers warn.
pub fn differences_shrink(rows: &[ConvergenceRow]) -> bool {
    modulus_differences(rows).windows(2).all(|w| w[1] < w[0])
}
