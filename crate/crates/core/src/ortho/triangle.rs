//! Reading Triangle `.node` / `.ele` files and turning a Delaunay triangulation
//! into an orthodiagonal map: each interior edge together with the
//! circumcentres of its two triangles spans one quad.

use super::{ArcRole, Color, HullNode, MapVertex, OrthodiagonalMap, QuadFace};
use crate::error::MapError;
use crate::geometry::{self, Point};
use std::collections::HashMap;

/// Largest allowed ratio of circumradius to shortest triangle side.
const MAX_RADIUS_RATIO: f64 = 1e6;

/// Boundary marker integers naming each arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcMarkers {
    pub s1: i64,
    pub t1: i64,
    pub s2: i64,
    pub t2: i64,
}

impl Default for ArcMarkers {
    fn default() -> Self {
        ArcMarkers { s1: 1, t1: 2, s2: 3, t2: 4 }
    }
}

impl ArcMarkers {
    fn role(&self, marker: i64) -> Option<ArcRole> {
        match marker {
            m if m == self.s1 => Some(ArcRole::S1),
            m if m == self.t1 => Some(ArcRole::T1),
            m if m == self.s2 => Some(ArcRole::S2),
            m if m == self.t2 => Some(ArcRole::T2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeFile {
    pub points: Vec<Point>,
    pub markers: Vec<i64>,
    /// Index of the first vertex, 0 or 1.
    pub base: usize,
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, MapError> {
    tok.parse()
        .map_err(|_| MapError::ParseError(format!("line {line}: cannot read {what} from '{tok}'")))
}

pub fn parse_node(text: &str) -> Result<NodeFile, MapError> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| MapError::ParseError("empty node file".into()))?;
    if header.len() < 2 {
        return Err(MapError::ParseError(format!("line {hl}: node header needs at least two fields")));
    }
    let count: usize = num(header[0], hl, "vertex count")?;
    let dim: usize = num(header[1], hl, "dimension")?;
    if dim != 2 {
        return Err(MapError::ParseError(format!("line {hl}: only two-dimensional nodes are supported")));
    }
    let nattr: usize = header.get(2).map_or(Ok(0), |t| num(t, hl, "attribute count"))?;
    let nmark: usize = header.get(3).map_or(Ok(0), |t| num(t, hl, "marker count"))?;
    let mut points = Vec::with_capacity(count);
    let mut markers = Vec::with_capacity(count);
    let mut base = 0;
    for (k, (ln, toks)) in lines.by_ref().take(count).enumerate() {
        if toks.len() < 3 + nattr + nmark {
            return Err(MapError::ParseError(format!("line {ln}: too few fields for a vertex")));
        }
        let id: usize = num(toks[0], ln, "vertex id")?;
        if k == 0 {
            if id > 1 {
                return Err(MapError::ParseError(format!("line {ln}: first vertex must be 0 or 1")));
            }
            base = id;
        }
        if id != base + k {
            return Err(MapError::ParseError(format!("line {ln}: vertex ids must be consecutive")));
        }
        let p = Point::new(num(toks[1], ln, "x")?, num(toks[2], ln, "y")?);
        if !p.is_finite() {
            return Err(MapError::ParseError(format!("line {ln}: non-finite coordinate")));
        }
        points.push(p);
        markers.push(if nmark > 0 { num(toks[3 + nattr], ln, "boundary marker")? } else { 0 });
    }
    if points.len() != count {
        return Err(MapError::ParseError(format!("expected {count} vertices, found {}", points.len())));
    }
    Ok(NodeFile { points, markers, base })
}

/// Triangles as zero-based vertex triples.
pub fn parse_ele(text: &str, base: usize, num_points: usize) -> Result<Vec<[usize; 3]>, MapError> {
    let mut lines = data_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| MapError::ParseError("empty ele file".into()))?;
    let count: usize = num(header[0], hl, "triangle count")?;
    let per: usize = header.get(1).map_or(Ok(3), |t| num(t, hl, "nodes per triangle"))?;
    if per != 3 && per != 6 {
        return Err(MapError::ParseError(format!("line {hl}: triangles must have 3 or 6 nodes")));
    }
    let mut tris = Vec::with_capacity(count);
    for (ln, toks) in lines.by_ref().take(count) {
        if toks.len() < 1 + per {
            return Err(MapError::ParseError(format!("line {ln}: too few fields for a triangle")));
        }
        let mut t = [0usize; 3];
        for k in 0..3 {
            let raw: usize = num(toks[1 + k], ln, "vertex index")?;
            if raw < base || raw - base >= num_points {
                return Err(MapError::ParseError(format!("line {ln}: vertex index {raw} out of range")));
            }
            t[k] = raw - base;
        }
        tris.push(t);
    }
    if tris.len() != count {
        return Err(MapError::ParseError(format!("expected {count} triangles, found {}", tris.len())));
    }
    Ok(tris)
}

pub fn ingest_files(
    node_path: &std::path::Path,
    ele_path: &std::path::Path,
    markers: ArcMarkers,
) -> Result<OrthodiagonalMap, MapError> {
    let read = |p: &std::path::Path| {
        std::fs::read_to_string(p).map_err(|e| MapError::ParseError(format!("{}: {e}", p.display())))
    };
    ingest_triangulation(&read(node_path)?, &read(ele_path)?, markers)
}

pub fn ingest_triangulation(
    node_text: &str,
    ele_text: &str,
    markers: ArcMarkers,
) -> Result<OrthodiagonalMap, MapError> {
    let nodes = parse_node(node_text)?;
    let mut tris = parse_ele(ele_text, nodes.base, nodes.points.len())?;
    let pts = &nodes.points;
    let mut centers = Vec::with_capacity(tris.len());
    for (i, t) in tris.iter_mut().enumerate() {
        let [a, b, c] = t.map(|k| pts[k]);
        let o = geometry::orient(a, b, c);
        if o == 0.0 {
            return Err(MapError::DegenerateQuad(format!("triangle {i} is flat")));
        }
        if o < 0.0 {
            t.swap(1, 2);
        }
        let [a, b, c] = t.map(|k| pts[k]);
        let cc = geometry::circumcenter(a, b, c)
            .ok_or_else(|| MapError::DegenerateQuad(format!("triangle {i} is flat")))?;
        let shortest = a.dist(b).min(b.dist(c)).min(c.dist(a));
        if cc.dist(a) > MAX_RADIUS_RATIO * shortest {
            return Err(MapError::DegenerateQuad(format!("triangle {i} is too thin")));
        }
        centers.push(cc);
    }

    // Directed edge p→q of a counterclockwise triangle has that triangle on its left.
    let mut left_of: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            if left_of.insert((t[k], t[(k + 1) % 3]), i).is_some() {
                return Err(MapError::ParseError(format!(
                    "edge {}-{} is used twice in the same direction",
                    t[k],
                    t[(k + 1) % 3]
                )));
            }
        }
    }
    let mut interior: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut hull_next: HashMap<usize, usize> = HashMap::new();
    let mut keys: Vec<&(usize, usize)> = left_of.keys().collect();
    keys.sort();
    for &&(p, q) in &keys {
        match left_of.get(&(q, p)) {
            Some(&right) if p < q => interior.push((p, q, right, left_of[&(p, q)])),
            Some(_) => {}
            None => {
                if hull_next.insert(p, q).is_some() {
                    return Err(MapError::InvalidMap(format!("triangulation boundary touches itself at node {p}")));
                }
            }
        }
    }
    if interior.is_empty() {
        return Err(MapError::InvalidMap("triangulation has no interior edge".into()));
    }

    let mut black_id = vec![usize::MAX; pts.len()];
    let mut white_id = vec![usize::MAX; tris.len()];
    for &(p, q, _, _) in &interior {
        black_id[p] = 0;
        black_id[q] = 0;
    }
    let mut vertices = Vec::new();
    for (k, id) in black_id.iter_mut().enumerate() {
        if *id == 0 {
            *id = vertices.len();
            vertices.push(MapVertex { pos: pts[k], color: Color::Black });
        }
    }
    for &(_, _, r, l) in &interior {
        white_id[r] = 0;
        white_id[l] = 0;
    }
    for (t, id) in white_id.iter_mut().enumerate() {
        if *id == 0 {
            *id = vertices.len();
            vertices.push(MapVertex { pos: centers[t], color: Color::White });
        }
    }

    let mut quads = Vec::with_capacity(interior.len());
    for &(p, q, right, left) in &interior {
        let (v1, v2) = (pts[p], pts[q]);
        let (w1, w2) = (centers[right], centers[left]);
        let (dv, dw) = (v1.dist(v2), w1.dist(w2));
        if dw <= 1e-12 * dv {
            return Err(MapError::DegenerateQuad(format!(
                "triangles on edge {}-{} share their circumcircle",
                p + nodes.base,
                q + nodes.base
            )));
        }
        // The left circumcentre must lie further along the left normal than the right one.
        let normal = Point::new(-(v2.y - v1.y), v2.x - v1.x);
        if w2.sub(w1).dot(normal) <= 0.0 {
            return Err(MapError::NonDelaunay(p + nodes.base, q + nodes.base));
        }
        quads.push(QuadFace { corners: [black_id[p], white_id[right], black_id[q], white_id[left]] });
    }

    let role_of_node = |k: usize| markers.role(nodes.markers[k]);
    let mut node_of_black = vec![0; vertices.len()];
    for (k, &id) in black_id.iter().enumerate() {
        if id != usize::MAX {
            node_of_black[id] = k;
        }
    }
    let start = *hull_next.keys().min().expect("a triangulation has a boundary");
    let mut hull = Vec::new();
    let mut k = start;
    loop {
        hull.push(HullNode {
            pos: pts[k],
            map_vertex: (black_id[k] != usize::MAX).then_some(black_id[k]),
            role: role_of_node(k),
        });
        k = *hull_next
            .get(&k)
            .ok_or_else(|| MapError::InvalidMap(format!("triangulation boundary breaks at node {k}")))?;
        if k == start {
            break;
        }
        if hull.len() > hull_next.len() {
            return Err(MapError::InvalidMap("triangulation boundary is not a simple cycle".into()));
        }
    }
    if hull.len() != hull_next.len() {
        return Err(MapError::InvalidMap("triangulation has holes or several components".into()));
    }
    OrthodiagonalMap::from_parts(vertices, quads, |v| role_of_node(node_of_black[v]), Some(hull))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ortho::dual_pair;

    // Hexagon around one interior point, markers 1..4 on the sides.
    const HEX_NODE: &str = "# hexagon\n7 2 0 1\n1 0 0 1\n2 0 1 1\n3 1 -0.3 2\n4 1 1.3 4\n5 2 0 3\n6 2 1 3\n7 1.05 0.45 0\n";
    const HEX_ELE: &str = "6 3 0\n1 6 7 5\n2 7 6 4\n3 7 2 1\n4 2 7 4\n5 3 7 1\n6 7 3 5\n";

    #[test]
    fn every_interior_edge_gives_an_orthogonal_quad() {
        let map = ingest_triangulation(HEX_NODE, HEX_ELE, ArcMarkers::default()).unwrap();
        assert_eq!(map.quads.len(), 6);
        for quad in &map.quads {
            let [v1, w1, v2, w2] = quad.corners.map(|x| map.pos(x));
            let (d1, d2) = (v2.sub(v1), w2.sub(w1));
            assert!(d1.dot(d2).abs() <= 1e-12 * d1.dot(d1).sqrt() * d2.dot(d2).sqrt());
        }
        assert_eq!(map.hull.as_ref().unwrap().len(), 6);
        assert!(map.validate().is_empty(), "{:?}", map.validate());
        let pair = dual_pair(&map).unwrap();
        assert_eq!(pair.primal.boundary_a().len(), 2);
        assert_eq!(pair.primal.boundary_b().len(), 2);
    }

    #[test]
    fn cocircular_square_halves_are_degenerate() {
        let node = "4 2 0 1\n0 0 0 1\n1 1 0 2\n2 1 1 3\n3 0 1 4\n";
        let ele = "2 3 0\n0 0 1 2\n1 0 2 3\n";
        let err = ingest_triangulation(node, ele, ArcMarkers::default()).unwrap_err();
        assert!(matches!(err, MapError::DegenerateQuad(_)));
    }

    #[test]
    fn non_delaunay_pair_is_rejected() {
        // Both angles opposite the long edge 0-1 are obtuse.
        let node = "4 2 0 1\n0 0 0 1\n1 4 0 2\n2 2 0.4 3\n3 2 -0.4 4\n";
        let ele = "2 3 0\n0 0 3 1\n1 0 1 2\n";
        let err = ingest_triangulation(node, ele, ArcMarkers::default()).unwrap_err();
        assert!(matches!(err, MapError::NonDelaunay(..)), "{err:?}");
    }

    #[test]
    fn malformed_ele_is_a_parse_error() {
        let err = ingest_triangulation(HEX_NODE, "2 3 0\n1 1 2\n", ArcMarkers::default()).unwrap_err();
        assert!(matches!(err, MapError::ParseError(_)));
        let err = ingest_triangulation(HEX_NODE, "1 3 0\n1 1 2 9\n", ArcMarkers::default()).unwrap_err();
        assert!(matches!(err, MapError::ParseError(_)));
    }

    #[test]
    fn zero_based_files_are_detected() {
        let node: String = HEX_NODE
            .lines()
            .enumerate()
            .map(|(i, l)| match i {
                0 | 1 => format!("{l}\n"),
                _ => {
                    let (id, rest) = l.split_once(' ').unwrap();
                    format!("{} {rest}\n", id.parse::<usize>().unwrap() - 1)
                }
            })
            .collect();
        let ele: String = HEX_ELE
            .lines()
            .enumerate()
            .map(|(i, l)| match i {
                0 => format!("{l}\n"),
                _ => l.split(' ').map(|t| (t.parse::<usize>().unwrap() - 1).to_string()).collect::<Vec<_>>().join(" ") + "\n",
            })
            .collect();
        assert_eq!(parse_node(&node).unwrap().base, 0);
        let map = ingest_triangulation(&node, &ele, ArcMarkers::default()).unwrap();
        assert_eq!(map.quads.len(), 6);
    }
}
