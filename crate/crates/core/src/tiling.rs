//! Rectangle tiling of [0,1] × [0,M] built from a non-crossing decomposition:
//! edge e becomes a rectangle of width ρ(e) = |dh(e)| and height σ(e)ρ(e),
//! stacked at the total mass of the paths below the first path using e.

use crate::dirichlet;
use crate::error::TilingError;
use crate::geometry::Point;
use crate::ncms::NcmsDecomposition;
use crate::network::PlaneNetwork;
use crate::ortho::DualPair;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write;

/// Relative size below which a width counts as zero.
const ZERO_WIDTH: f64 = 1e-11;
/// Absolute slack for the geometric checks.
pub const BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub edge: usize,
    pub x0: f64,
    pub width: f64,
    pub y0: f64,
    pub height: f64,
    /// Zero width, or not used by any path. Kept but ignored by the checks.
    pub degenerate: bool,
}

impl Rect {
    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    fn x1(&self) -> f64 {
        self.x0 + self.width
    }

    fn y1(&self) -> f64 {
        self.y0 + self.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RectangleTiling {
    pub rects: Vec<Rect>,
    /// Height M of the bounding box [0,1] × [0,M].
    pub height: f64,
    /// Bottom of each path's strip, indexed like the decomposition (top first).
    #[serde(skip)]
    pub strip_offsets: Vec<f64>,
}

/// Stacks the paths bottom up and places every edge at the strip of the first
/// path that uses it, then checks area, containment and disjointness.
pub fn build_tiling(
    net: &PlaneNetwork,
    h: &[f64],
    dec: &NcmsDecomposition,
) -> Result<RectangleTiling, TilingError> {
    let rho = dirichlet::extremal_density(net, h);
    let rho_max = rho.iter().copied().fold(0.0, f64::max);
    let k = dec.paths.len();
    let mut strip_offsets = vec![0.0; k];
    let mut y0: Vec<Option<f64>> = vec![None; net.num_edges()];
    let mut below = 0.0;
    for j in (0..k).rev() {
        strip_offsets[j] = below;
        for &e in &dec.paths[j].edges {
            y0[e].get_or_insert(below);
        }
        below += dec.masses[j];
    }
    let rects = net
        .edges()
        .iter()
        .map(|ed| {
            let e = ed.id;
            let width = rho[e];
            Rect {
                edge: e,
                x0: h[ed.u].min(h[ed.v]),
                width,
                y0: y0[e].unwrap_or(0.0),
                height: ed.sigma * width,
                degenerate: y0[e].is_none() || width <= ZERO_WIDTH * rho_max,
            }
        })
        .collect();
    let tiling = RectangleTiling { rects, height: dec.modulus, strip_offsets };
    check_geometry(&tiling)?;
    Ok(tiling)
}

fn check_geometry(t: &RectangleTiling) -> Result<(), TilingError> {
    let m = t.height;
    let tol = BAND * m.max(1.0);
    let area: f64 = t.rects.iter().filter(|r| !r.degenerate).map(Rect::area).sum();
    if (area - m).abs() > tol {
        return Err(TilingError::GeometryMismatch(format!("rectangle areas sum to {area}, expected {m}")));
    }
    for r in t.rects.iter().filter(|r| !r.degenerate) {
        if r.x0 < -tol || r.x1() > 1.0 + tol || r.y0 < -tol || r.y1() > m + tol {
            return Err(TilingError::GeometryMismatch(format!(
                "rectangle of edge {} leaves the bounding box",
                r.edge
            )));
        }
    }
    if let Some((a, b)) = first_overlap(t, tol) {
        return Err(TilingError::GeometryMismatch(format!(
            "rectangles of edges {a} and {b} overlap"
        )));
    }
    Ok(())
}

/// Sweep in x: a pair overlaps when both its x and y intersections exceed `tol`.
fn first_overlap(t: &RectangleTiling, tol: f64) -> Option<(usize, usize)> {
    let mut live: Vec<&Rect> = t.rects.iter().filter(|r| !r.degenerate).collect();
    live.sort_by(|a, b| a.x0.total_cmp(&b.x0).then(a.edge.cmp(&b.edge)));
    let mut open: Vec<&Rect> = Vec::new();
    for r in live {
        open.retain(|o| o.x1() > r.x0 + tol);
        for o in &open {
            let dy = o.y1().min(r.y1()) - o.y0.max(r.y0);
            let dx = o.x1().min(r.x1()) - r.x0;
            if dx > tol && dy > tol {
                return Some((o.edge, r.edge));
            }
        }
        open.push(r);
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageReport {
    pub samples: usize,
    /// Samples not within the band of any rectangle.
    pub gaps: usize,
    /// Samples deeper than the band inside two or more rectangles.
    pub overlaps: usize,
}

/// Monte-Carlo coverage of [0,1] × [0,M] by the non-degenerate rectangles.
pub fn coverage(t: &RectangleTiling, samples: usize, seed: u64) -> CoverageReport {
    let m = t.height;
    let mut report = CoverageReport { samples, gaps: 0, overlaps: 0 };
    if m <= 0.0 || samples == 0 {
        return report;
    }
    let live: Vec<&Rect> = t.rects.iter().filter(|r| !r.degenerate).collect();
    let side = ((live.len() as f64).sqrt().ceil() as usize).max(1);
    let cell = |x: f64, y: f64| {
        let i = ((x * side as f64) as usize).min(side - 1);
        let j = ((y / m * side as f64) as usize).min(side - 1);
        j * side + i
    };
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); side * side];
    for (k, r) in live.iter().enumerate() {
        let (i0, j0) = (cell(r.x0 - BAND, 0.0) % side, cell(0.0, r.y0 - BAND) / side);
        let (i1, j1) = (cell(r.x1() + BAND, 0.0) % side, cell(0.0, r.y1() + BAND) / side);
        for j in j0..=j1 {
            for i in i0..=i1 {
                buckets[j * side + i].push(k);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x: f64 = rng.random::<f64>();
        let y = rng.random::<f64>() * m;
        let (mut near, mut deep) = (0, 0);
        for &k in &buckets[cell(x, y)] {
            let r = live[k];
            if x >= r.x0 - BAND && x <= r.x1() + BAND && y >= r.y0 - BAND && y <= r.y1() + BAND {
                near += 1;
                if x > r.x0 + BAND && x < r.x1() - BAND && y > r.y0 + BAND && y < r.y1() - BAND {
                    deep += 1;
                }
            }
        }
        if near == 0 {
            report.gaps += 1;
        }
        if deep >= 2 {
            report.overlaps += 1;
        }
    }
    report
}

/// Image of each vertex in the tiling: (h(v), mass below the first path
/// through v). Vertices on no path map to `None`.
pub fn tiling_coordinates(net: &PlaneNetwork, h: &[f64], dec: &NcmsDecomposition) -> Vec<Option<Point>> {
    let mut coords = vec![None; net.num_vertices()];
    let mut below = 0.0;
    for j in (0..dec.paths.len()).rev() {
        for &v in &dec.paths[j].vertices {
            coords[v].get_or_insert(Point::new(h[v], below));
        }
        below += dec.masses[j];
    }
    coords
}

fn cluster_count(mut xs: Vec<f64>) -> usize {
    xs.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for x in xs {
        if x - last > BAND {
            count += 1;
        }
        last = x;
    }
    count
}

/// Distinct x positions of rectangle sides and distinct potentials of the
/// vertices used by the decomposition, each clustered at the band width.
pub fn vertical_segment_counts(t: &RectangleTiling, net: &PlaneNetwork, h: &[f64], dec: &NcmsDecomposition) -> (usize, usize) {
    let sides = t.rects.iter().filter(|r| !r.degenerate).flat_map(|r| [r.x0, r.x1()]).collect();
    let mut used = vec![false; net.num_vertices()];
    for p in &dec.paths {
        for &v in &p.vertices {
            used[v] = true;
        }
    }
    let levels = (0..net.num_vertices()).filter(|&v| used[v]).map(|v| h[v]).collect();
    (cluster_count(sides), cluster_count(levels))
}

/// Largest gap between a rectangle's bottom and M times the dual unit potential
/// at the lower end of the paired dual edge.
pub fn dual_height_residual(pair: &DualPair, t: &RectangleTiling) -> Result<f64, TilingError> {
    let g = dirichlet::solve_unit(&pair.dual)?.potentials;
    let mut worst: f64 = 0.0;
    for r in t.rects.iter().filter(|r| !r.degenerate) {
        let ed = pair.dual.edge(pair.paired(r.edge));
        let lower = g[ed.u].min(g[ed.v]) * t.height;
        worst = worst.max((r.y0 - lower).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub stroke_width: f64,
    /// Draw each path as a polyline through its vertices at mid-strip height.
    pub overlay_paths: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { stroke_width: 0.002, overlay_paths: false }
    }
}

fn fill(edge: usize) -> String {
    let hash = (edge as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 40;
    format!("hsl({},55%,72%)", hash % 360)
}

/// SVG with y pointing up: the bottom strip is drawn at the bottom.
pub fn emit_svg(
    t: &RectangleTiling,
    overlay: Option<(&[f64], &NcmsDecomposition)>,
    opts: &SvgOptions,
) -> String {
    let m = t.height;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 1 {m}">"#);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="{}">"#, opts.stroke_width);
    for r in t.rects.iter().filter(|r| !r.degenerate) {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" data-edge="{}"/>"#,
            r.x0,
            m - r.y1(),
            r.width,
            r.height,
            fill(r.edge),
            r.edge
        );
    }
    let _ = writeln!(s, "</g>");
    if let (true, Some((h, dec))) = (opts.overlay_paths, overlay) {
        let _ = writeln!(s, r#"<g fill="none" stroke="red" stroke-width="{}">"#, opts.stroke_width);
        for (j, p) in dec.paths.iter().enumerate() {
            let y = m - (t.strip_offsets[j] + dec.masses[j] / 2.0);
            let pts: Vec<String> = p.vertices.iter().map(|&v| format!("{},{}", h[v], y)).collect();
            let _ = writeln!(s, r#"<polyline points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncms;
    use crate::network::Edge;
    use crate::ortho::{dual_pair, grid_map};

    fn single_edge() -> PlaneNetwork {
        PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None }],
            vec![0],
            vec![1],
            vec![0, 1],
        )
        .unwrap()
    }

    fn tile(net: &PlaneNetwork) -> (Vec<f64>, NcmsDecomposition, RectangleTiling) {
        let h = dirichlet::solve_unit(net).unwrap().potentials;
        let dec = ncms::decompose_with(net, &h).unwrap();
        let t = build_tiling(net, &h, &dec).unwrap();
        (h, dec, t)
    }

    #[test]
    fn single_edge_is_the_unit_square() {
        let net = single_edge();
        let (h, dec, t) = tile(&net);
        let r = t.rects[0];
        assert_eq!((r.x0, r.width, r.y0, r.height), (0.0, 1.0, 0.0, 1.0));
        assert_eq!(emit_svg(&t, None, &SvgOptions::default()).matches("<rect").count(), 1);
        let c = tiling_coordinates(&net, &h, &dec);
        assert_eq!(c[1], Some(Point::new(1.0, 0.0)));
    }

    #[test]
    fn small_grid_has_six_half_squares() {
        let pair = dual_pair(&grid_map(1, 2)).unwrap();
        let (h, dec, t) = tile(&pair.primal);
        let live: Vec<&Rect> = t.rects.iter().filter(|r| !r.degenerate).collect();
        assert_eq!(live.len(), 6);
        for r in &live {
            assert!((r.width - 0.5).abs() < 1e-12 && (r.height - 0.5).abs() < 1e-12);
        }
        assert!((t.height - 1.5).abs() < 1e-12);
        let cov = coverage(&t, 20_000, 7);
        assert_eq!((cov.gaps, cov.overlaps), (0, 0));
        assert!(dual_height_residual(&pair, &t).unwrap() < 1e-8);
        let (a, b) = vertical_segment_counts(&t, &pair.primal, &h, &dec);
        assert_eq!((a, b), (3, 3));
        assert_eq!(emit_svg(&t, None, &SvgOptions::default()).matches("<rect").count(), 6);
    }

    #[test]
    fn empty_tiling_has_flat_view_box() {
        let t = RectangleTiling { rects: vec![], height: 0.0, strip_offsets: vec![] };
        let svg = emit_svg(&t, None, &SvgOptions::default());
        assert!(svg.contains(r#"viewBox="0 0 1 0""#));
        assert_eq!(svg.matches("<rect").count(), 0);
    }

    #[test]
    fn overlapping_rectangles_are_rejected() {
        let r = Rect { edge: 0, x0: 0.0, width: 1.0, y0: 0.0, height: 1.0, degenerate: false };
        let t = RectangleTiling { rects: vec![r, Rect { edge: 1, y0: 0.5, ..r }], height: 2.0, strip_offsets: vec![] };
        assert!(matches!(check_geometry(&t), Err(TilingError::GeometryMismatch(_))));
    }
}
