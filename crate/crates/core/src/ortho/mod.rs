//! Orthodiagonal maps: quad meshes whose faces have perpendicular diagonals,
//! with the black diagonals forming the primal network and the white ones the dual.

mod generators;
mod triangle;

pub use generators::{grid_map, rotated_grid_map};
pub use triangle::{ingest_files, ingest_triangulation, parse_ele, parse_node, ArcMarkers, NodeFile};

use crate::dirichlet;
use crate::error::MapError;
use crate::geometry::{self, Point};
use crate::network::{Edge, Path, PlaneNetwork, Violation};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapVertex {
    pub pos: Point,
    pub color: Color,
}

/// Corners `[v1, w1, v2, w2]` in counterclockwise order, v black and w white.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadFace {
    pub corners: [usize; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArcRole {
    S1,
    T1,
    S2,
    T2,
}

/// The four boundary arcs as vertex paths, each counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryArcs {
    #[serde(rename = "S1")]
    pub s1: Vec<usize>,
    #[serde(rename = "T1")]
    pub t1: Vec<usize>,
    #[serde(rename = "S2")]
    pub s2: Vec<usize>,
    #[serde(rename = "T2")]
    pub t2: Vec<usize>,
}

impl BoundaryArcs {
    pub fn get(&self, role: ArcRole) -> &[usize] {
        match role {
            ArcRole::S1 => &self.s1,
            ArcRole::T1 => &self.t1,
            ArcRole::S2 => &self.s2,
            ArcRole::T2 => &self.t2,
        }
    }
}

/// A node of the source triangulation's outer boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct HullNode {
    pub pos: Point,
    /// Black map vertex of this node, absent for excluded convex corners.
    pub map_vertex: Option<usize>,
    pub role: Option<ArcRole>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthodiagonalMap {
    pub vertices: Vec<MapVertex>,
    pub quads: Vec<QuadFace>,
    pub arcs: BoundaryArcs,
    /// Boundary cycle, counterclockwise.
    pub boundary: Vec<usize>,
    /// Boundary cycle of the triangulation the map was built from, if any.
    pub hull: Option<Vec<HullNode>>,
}

impl OrthodiagonalMap {
    /// Assembles a map from vertices and quads. Quads are turned counterclockwise
    /// if needed; arcs are derived from the roles of the black boundary vertices.
    pub fn from_parts(
        vertices: Vec<MapVertex>,
        mut quads: Vec<QuadFace>,
        black_role: impl Fn(usize) -> Option<ArcRole>,
        hull: Option<Vec<HullNode>>,
    ) -> Result<Self, MapError> {
        if quads.is_empty() {
            return Err(MapError::InvalidMap("map has no quads".into()));
        }
        for (i, q) in quads.iter_mut().enumerate() {
            let c = q.corners;
            if c.iter().any(|&x| x >= vertices.len()) {
                return Err(MapError::InvalidMap(format!("quad {i} references an unknown vertex")));
            }
            let colors = c.map(|x| vertices[x].color);
            if colors != [Color::Black, Color::White, Color::Black, Color::White] {
                return Err(MapError::InvalidMap(format!("quad {i} does not alternate black and white")));
            }
            let pts: Vec<Point> = c.iter().map(|&x| vertices[x].pos).collect();
            if geometry::signed_area2(&pts) < 0.0 {
                q.corners = [c[0], c[3], c[2], c[1]];
            }
        }
        let boundary = boundary_cycle(&quads)?;
        let arcs = assign_arcs(&boundary, &vertices, &black_role)?;
        Ok(OrthodiagonalMap { vertices, quads, arcs, boundary, hull })
    }

    pub fn pos(&self, v: usize) -> Point {
        self.vertices[v].pos
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |invariant: &'static str, detail: String| out.push(Violation { invariant, detail });
        for (i, q) in self.quads.iter().enumerate() {
            let c = q.corners;
            let colors = c.map(|x| self.vertices[x].color);
            if colors != [Color::Black, Color::White, Color::Black, Color::White] {
                push("bipartition", format!("quad {i} does not alternate colors"));
                continue;
            }
            let pts: Vec<Point> = c.iter().map(|&x| self.pos(x)).collect();
            if geometry::signed_area2(&pts) <= 0.0 {
                push("quad-orientation", format!("quad {i} is not counterclockwise"));
            }
            let (d1, d2) = (pts[2].sub(pts[0]), pts[3].sub(pts[1]));
            let cos = d1.dot(d2) / (d1.dot(d1).sqrt() * d2.dot(d2).sqrt());
            if !(cos.abs() <= 1e-9) {
                push("orthogonal-diagonals", format!("quad {i} has diagonal cosine {cos}"));
            }
        }
        match boundary_cycle(&self.quads) {
            Ok(cycle) => {
                let mut a: Vec<usize> = cycle.clone();
                let mut b = self.boundary.clone();
                a.sort();
                b.sort();
                if a != b {
                    push("simple-boundary", "stored boundary differs from the quad boundary".into());
                }
            }
            Err(e) => push("simple-boundary", e.to_string()),
        }
        for s in [ArcRole::S1, ArcRole::S2] {
            for t in [ArcRole::T1, ArcRole::T2] {
                let ss: HashSet<usize> = self.arcs.get(s).iter().copied().collect();
                let common = self.arcs.get(t).iter().filter(|v| ss.contains(v)).count();
                if common != 1 {
                    push("arc-corners", format!("{s:?} and {t:?} share {common} vertices"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut black = Vec::new();
        let mut white = Vec::new();
        for (id, v) in self.vertices.iter().enumerate() {
            let j = MapVertexJson { id, x: v.pos.x, y: v.pos.y };
            match v.color {
                Color::Black => black.push(j),
                Color::White => white.push(j),
            }
        }
        let doc = MapJson {
            v_black: black,
            v_white: white,
            quads: self.quads.iter().map(|q| q.corners).collect(),
            arcs: self.arcs.clone(),
        };
        serde_json::to_string(&doc).expect("map serializes")
    }

    /// Reads a map written by [`OrthodiagonalMap::to_json`]; arcs are recomputed
    /// from the roles they give the black boundary vertices.
    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let doc: MapJson = serde_json::from_str(text).map_err(|e| MapError::ParseError(e.to_string()))?;
        let n = doc.v_black.len() + doc.v_white.len();
        let mut vertices = vec![None; n];
        for (list, color) in [(&doc.v_black, Color::Black), (&doc.v_white, Color::White)] {
            for v in list {
                if v.id >= n || vertices[v.id].is_some() {
                    return Err(MapError::ParseError(format!("bad vertex id {}", v.id)));
                }
                vertices[v.id] = Some(MapVertex { pos: Point::new(v.x, v.y), color });
            }
        }
        let vertices: Vec<MapVertex> = vertices.into_iter().map(|v| v.expect("ids are dense")).collect();
        let mut roles = HashMap::new();
        for role in [ArcRole::T1, ArcRole::T2, ArcRole::S1, ArcRole::S2] {
            for &v in doc.arcs.get(role) {
                roles.insert(v, role);
            }
        }
        let quads = doc.quads.iter().map(|&corners| QuadFace { corners }).collect();
        let map = OrthodiagonalMap::from_parts(vertices, quads, |v| roles.get(&v).copied(), None)?;
        if map.arcs != doc.arcs {
            return Err(MapError::InvalidArcs("stored arcs are inconsistent with the quads".into()));
        }
        Ok(map)
    }
}

#[derive(Serialize, Deserialize)]
struct MapVertexJson {
    id: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    #[serde(rename = "V_black")]
    v_black: Vec<MapVertexJson>,
    #[serde(rename = "V_white")]
    v_white: Vec<MapVertexJson>,
    quads: Vec<[usize; 4]>,
    arcs: BoundaryArcs,
}

/// Counterclockwise boundary cycle: quad sides that belong to a single quad,
/// followed in the direction that keeps their quad on the left.
fn boundary_cycle(quads: &[QuadFace]) -> Result<Vec<usize>, MapError> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for q in quads {
        for k in 0..4 {
            let (a, b) = (q.corners[k], q.corners[(k + 1) % 4]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if let Some((s, _)) = count.iter().find(|(_, &c)| c > 2) {
        return Err(MapError::InvalidMap(format!("side {}-{} lies on more than two quads", s.0, s.1)));
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for q in quads {
        for k in 0..4 {
            let (a, b) = (q.corners[k], q.corners[(k + 1) % 4]);
            if count[&(a.min(b), a.max(b))] == 1 && next.insert(a, b).is_some() {
                return Err(MapError::InvalidMap(format!("boundary touches itself at vertex {a}")));
            }
        }
    }
    let Some((&start, _)) = next.iter().next() else {
        return Err(MapError::InvalidMap("map has no boundary".into()));
    };
    let mut cycle = vec![start];
    let mut v = next[&start];
    while v != start {
        if cycle.len() > next.len() {
            return Err(MapError::InvalidMap("boundary is not a closed curve".into()));
        }
        cycle.push(v);
        v = *next
            .get(&v)
            .ok_or_else(|| MapError::InvalidMap(format!("boundary breaks off at vertex {v}")))?;
    }
    if cycle.len() != next.len() {
        return Err(MapError::InvalidMap("boundary consists of several closed curves".into()));
    }
    Ok(cycle)
}

/// A white boundary vertex takes its role from its black neighbours along the
/// boundary: between two S1 (S2) vertices it is on S1 (S2); next to a T1 (T2)
/// vertex, or going from S1 to S2 (S2 to S1), it is on T1 (T2).
fn white_role(before: ArcRole, after: ArcRole) -> Result<ArcRole, MapError> {
    use ArcRole::*;
    match (before, after) {
        (S1, S1) => Ok(S1),
        (S2, S2) => Ok(S2),
        (T1, T2) | (T2, T1) => Err(MapError::InvalidArcs("a white vertex sits between T1 and T2".into())),
        (T1, _) | (_, T1) | (S1, S2) => Ok(T1),
        (T2, _) | (_, T2) | (S2, S1) => Ok(T2),
    }
}

fn assign_arcs(
    cycle: &[usize],
    vertices: &[MapVertex],
    black_role: &impl Fn(usize) -> Option<ArcRole>,
) -> Result<BoundaryArcs, MapError> {
    let k = cycle.len();
    let role_of_black = |v: usize| {
        black_role(v).ok_or_else(|| MapError::InvalidArcs(format!("boundary vertex {v} has no arc role")))
    };
    let mut side_role = Vec::with_capacity(k);
    for i in 0..k {
        let (a, b) = (cycle[i], cycle[(i + 1) % k]);
        let wi = if vertices[a].color == Color::White { i } else { i + 1 };
        if vertices[a].color == vertices[b].color {
            return Err(MapError::InvalidMap(format!("boundary side {a}-{b} joins equal colors")));
        }
        let before = role_of_black(cycle[(wi + k - 1) % k])?;
        let after = role_of_black(cycle[(wi + 1) % k])?;
        side_role.push(white_role(before, after)?);
    }
    let starts: Vec<usize> = (0..k).filter(|&i| side_role[i] != side_role[(i + k - 1) % k]).collect();
    if starts.len() != 4 {
        return Err(MapError::InvalidArcs(format!("boundary splits into {} arcs, expected 4", starts.len())));
    }
    let mut arcs = BoundaryArcs::default();
    let order = [ArcRole::S1, ArcRole::T1, ArcRole::S2, ArcRole::T2];
    let first = starts.iter().position(|&s| side_role[s] == ArcRole::S1).ok_or_else(|| {
        MapError::InvalidArcs("no S1 arc".into())
    })?;
    for j in 0..4 {
        let s = starts[(first + j) % 4];
        let e = starts[(first + j + 1) % 4];
        if side_role[s] != order[j] {
            return Err(MapError::InvalidArcs("arcs are not in the order S1, T1, S2, T2".into()));
        }
        let len = (e + k - s) % k;
        let path: Vec<usize> = (0..=len).map(|t| cycle[(s + t) % k]).collect();
        match order[j] {
            ArcRole::S1 => arcs.s1 = path,
            ArcRole::T1 => arcs.t1 = path,
            ArcRole::S2 => arcs.s2 = path,
            ArcRole::T2 => arcs.t2 = path,
        }
    }
    Ok(arcs)
}

/// Primal and dual networks of a map. Edge i of either network comes from quad i.
#[derive(Debug, Clone)]
pub struct DualPair {
    pub primal: PlaneNetwork,
    pub dual: PlaneNetwork,
    /// Map vertex of each primal vertex.
    pub black_ids: Vec<usize>,
    /// Map vertex of each dual vertex.
    pub white_ids: Vec<usize>,
}

impl DualPair {
    /// Dual edge paired with primal edge `e`.
    pub fn paired(&self, e: usize) -> usize {
        e
    }
}

/// Canonical weight |w1w2| / |v1v2| of the primal edge of a quad.
pub fn canonical_weight(map: &OrthodiagonalMap, q: &QuadFace) -> Result<f64, MapError> {
    let [v1, w1, v2, w2] = q.corners.map(|x| map.pos(x));
    let (dv, dw) = (v1.dist(v2), w1.dist(w2));
    if !(dv > 0.0) || !(dw > 0.0) || dw <= 1e-12 * dv || dv <= 1e-12 * dw {
        return Err(MapError::DegenerateQuad(format!("quad {:?} has a zero-length diagonal", q.corners)));
    }
    Ok(dw / dv)
}

pub fn dual_pair(map: &OrthodiagonalMap) -> Result<DualPair, MapError> {
    let mut black_index = vec![usize::MAX; map.vertices.len()];
    let mut white_index = vec![usize::MAX; map.vertices.len()];
    let (mut black_ids, mut white_ids) = (Vec::new(), Vec::new());
    for q in &map.quads {
        for (k, &x) in q.corners.iter().enumerate() {
            let (index, ids) = if k % 2 == 0 {
                (&mut black_index, &mut black_ids)
            } else {
                (&mut white_index, &mut white_ids)
            };
            if index[x] == usize::MAX {
                index[x] = ids.len();
                ids.push(x);
            }
        }
    }
    let mut pe = Vec::with_capacity(map.quads.len());
    let mut de = Vec::with_capacity(map.quads.len());
    for (i, q) in map.quads.iter().enumerate() {
        let [v1, w1, v2, w2] = q.corners;
        let [p1, q1, p2, q2] = q.corners.map(|x| map.pos(x));
        let sigma = canonical_weight(map, q)?;
        let primal_inside = geometry::orient(p1, p2, q1) <= 0.0 && geometry::orient(p1, p2, q2) >= 0.0;
        let dual_inside = geometry::orient(q1, q2, p2) <= 0.0 && geometry::orient(q1, q2, p1) >= 0.0;
        pe.push(Edge {
            id: i,
            u: black_index[v1],
            v: black_index[v2],
            sigma,
            bend: (!primal_inside).then(|| q1.midpoint(q2)),
        });
        de.push(Edge {
            id: i,
            u: white_index[w1],
            v: white_index[w2],
            sigma: 1.0 / sigma,
            bend: (!dual_inside).then(|| p1.midpoint(p2)),
        });
    }
    let on = |arc: &[usize], index: &[usize]| -> Vec<usize> {
        arc.iter().filter(|&&x| index[x] != usize::MAX).map(|&x| index[x]).collect()
    };
    let primal = PlaneNetwork::new(
        black_ids.iter().map(|&x| map.pos(x)).collect(),
        pe,
        on(&map.arcs.s1, &black_index),
        on(&map.arcs.s2, &black_index),
        on(&map.boundary, &black_index),
    )?;
    let dual = PlaneNetwork::new(
        white_ids.iter().map(|&x| map.pos(x)).collect(),
        de,
        on(&map.arcs.t1, &white_index),
        on(&map.arcs.t2, &white_index),
        on(&map.boundary, &white_index),
    )?;
    Ok(DualPair { primal, dual, black_ids, white_ids })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FulkersonReport {
    pub primal: f64,
    pub dual: f64,
    pub product: f64,
}

pub fn fulkerson_check(pair: &DualPair) -> Result<FulkersonReport, MapError> {
    let primal = dirichlet::solve_unit(&pair.primal)?.energy;
    let dual = dirichlet::solve_unit(&pair.dual)?.energy;
    Ok(FulkersonReport { primal, dual, product: primal * dual })
}

/// Number of edges of `primal_path` whose paired dual edge lies on `dual_path`.
pub fn dual_crossing_count(pair: &DualPair, primal_path: &Path, dual_path: &Path) -> usize {
    let dual_edges: HashSet<usize> = dual_path.edges.iter().copied().collect();
    primal_path.edges.iter().filter(|&&e| dual_edges.contains(&pair.paired(e))).count()
}

/// Primal network with extra boundary edges of total conductance `eps` joining
/// consecutive boundary nodes that are not already joined. For maps built from
/// a triangulation the boundary nodes are those of the triangulation, so
/// excluded convex corners come back attached by boundary edges only.
pub fn assign_boundary_conductance(map: &OrthodiagonalMap, eps: f64) -> Result<PlaneNetwork, MapError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(MapError::Precondition(format!("boundary conductance must be positive, got {eps}")));
    }
    let pair = dual_pair(map)?;
    let primal = &pair.primal;
    let mut positions: Vec<Point> = primal.vertices().iter().map(|v| v.pos).collect();
    let mut black_index = HashMap::new();
    for (i, &x) in pair.black_ids.iter().enumerate() {
        black_index.insert(x, i);
    }
    let mut cycle = Vec::new();
    let mut a = Vec::new();
    let mut b = Vec::new();
    match &map.hull {
        Some(hull) => {
            for node in hull {
                let id = match node.map_vertex.and_then(|x| black_index.get(&x).copied()) {
                    Some(i) => i,
                    None => {
                        positions.push(node.pos);
                        positions.len() - 1
                    }
                };
                match node.role {
                    Some(ArcRole::S1) => a.push(id),
                    Some(ArcRole::S2) => b.push(id),
                    _ => {}
                }
                cycle.push(id);
            }
        }
        None => {
            cycle = primal.outer_boundary().to_vec();
            a = primal.boundary_a().to_vec();
            b = primal.boundary_b().to_vec();
        }
    }
    let joined: HashSet<(usize, usize)> =
        primal.edges().iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    let k = cycle.len();
    let extra: Vec<(usize, usize)> = (0..k)
        .map(|i| (cycle[i], cycle[(i + 1) % k]))
        .filter(|&(x, y)| !joined.contains(&(x.min(y), x.max(y))))
        .collect();
    if extra.is_empty() {
        return Ok(primal.clone());
    }
    let sigma_b = eps / extra.len() as f64;
    let mut edges: Vec<Edge> = primal.edges().to_vec();
    for (x, y) in extra {
        edges.push(Edge { id: edges.len(), u: x, v: y, sigma: sigma_b, bend: None });
    }
    Ok(PlaneNetwork::new(positions, edges, a, b, cycle)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid_map() {
        let map = grid_map(1, 1);
        assert!(map.validate().is_empty());
        let pair = dual_pair(&map).unwrap();
        assert_eq!(pair.primal.num_vertices(), 4);
        assert_eq!(pair.primal.num_edges(), 4);
        assert!(pair.primal.edges().iter().all(|e| e.sigma == 1.0));
        assert!(pair.dual.edges().iter().all(|e| e.sigma == 1.0));
        assert!(pair.primal.validate().is_empty());
        assert!(pair.dual.validate().is_empty());
    }

    #[test]
    fn map_json_round_trip() {
        let map = rotated_grid_map(1, 2);
        let back = OrthodiagonalMap::from_json(&map.to_json()).unwrap();
        assert_eq!(back.quads, map.quads);
        assert_eq!(back.arcs, map.arcs);
        assert_eq!(back.to_json(), map.to_json());
    }

    #[test]
    fn zero_boundary_conductance_is_rejected() {
        let err = assign_boundary_conductance(&rotated_grid_map(1, 1), 0.0).unwrap_err();
        assert!(matches!(err, MapError::Precondition(_)));
    }

    #[test]
    fn straight_grid_needs_no_boundary_edges() {
        let map = grid_map(2, 2);
        let net = assign_boundary_conductance(&map, 0.1).unwrap();
        assert_eq!(net.num_edges(), dual_pair(&map).unwrap().primal.num_edges());
    }

    #[test]
    fn boundary_edges_share_the_conductance() {
        let map = rotated_grid_map(1, 2);
        let pure = dual_pair(&map).unwrap().primal;
        let net = assign_boundary_conductance(&map, 0.1).unwrap();
        let extra: Vec<f64> = net.edges()[pure.num_edges()..].iter().map(|e| e.sigma).collect();
        assert!(!extra.is_empty());
        for s in &extra {
            assert!((s - 0.1 / extra.len() as f64).abs() < 1e-15);
        }
        assert!(net.validate().is_empty(), "{:?}", net.validate());
    }
}
