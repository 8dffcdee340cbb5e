//! Embedded weighted planar networks with two marked boundary arcs.
//!
//! Faces are traced with the convention that a face lies to the left of each of
//! its half-edges, so the unbounded face is walked clockwise. Going clockwise
//! around the outer boundary one passes up the A side, along the top side, down
//! the B side and back along the bottom side.

use crate::error::NetworkError;
use crate::geometry::{self, Point};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub pos: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub sigma: f64,
    /// Optional interior bend point; the edge is then the two segments u→bend→v.
    pub bend: Option<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirectedEdge {
    pub edge: usize,
    /// true when traversed from `u` to `v`.
    pub forward: bool,
}

impl DirectedEdge {
    pub fn new(edge: usize, forward: bool) -> Self {
        DirectedEdge { edge, forward }
    }

    pub fn reversed(self) -> Self {
        DirectedEdge { edge: self.edge, forward: !self.forward }
    }

    fn half(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    fn from_half(h: usize) -> Self {
        DirectedEdge { edge: h / 2, forward: h % 2 == 0 }
    }
}

/// A simple path given by its vertex sequence and the edges joining consecutive vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Path {
    pub fn first(&self) -> usize {
        self.vertices[0]
    }

    pub fn last(&self) -> usize {
        *self.vertices.last().expect("path has vertices")
    }

    pub fn contains_edge(&self, e: usize) -> bool {
        self.edges.contains(&e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

#[derive(Debug, Clone)]
pub struct PlaneNetwork {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    a: Vec<usize>,
    b: Vec<usize>,
    boundary: Vec<usize>,
    in_a: Vec<bool>,
    in_b: Vec<bool>,
    rotation: Vec<Vec<DirectedEdge>>,
    rot_pos: Vec<usize>,
    outer_walk: Vec<DirectedEdge>,
}

impl PlaneNetwork {
    /// Builds a network and its rotation system. Structural errors (bad ids,
    /// coinciding departure angles) are rejected here; every other invariant is
    /// reported by [`PlaneNetwork::validate`].
    pub fn new(
        positions: Vec<Point>,
        edges: Vec<Edge>,
        a: Vec<usize>,
        b: Vec<usize>,
        boundary: Vec<usize>,
    ) -> Result<Self, NetworkError> {
        let n = positions.len();
        for (i, e) in edges.iter().enumerate() {
            if e.id != i {
                return Err(NetworkError::NonDenseEdgeIds { index: i, found: e.id });
            }
            for w in [e.u, e.v] {
                if w >= n {
                    return Err(NetworkError::UnknownVertex { edge: i, vertex: w });
                }
            }
        }
        for &w in a.iter().chain(&b).chain(&boundary) {
            if w >= n {
                return Err(NetworkError::UnknownBoundaryVertex(w));
            }
        }
        let vertices: Vec<Vertex> =
            positions.into_iter().enumerate().map(|(id, pos)| Vertex { id, pos }).collect();
        let mut in_a = vec![false; n];
        let mut in_b = vec![false; n];
        a.iter().for_each(|&w| in_a[w] = true);
        b.iter().for_each(|&w| in_b[w] = true);
        let mut net = PlaneNetwork {
            vertices,
            edges,
            a,
            b,
            boundary,
            in_a,
            in_b,
            rotation: Vec::new(),
            rot_pos: Vec::new(),
            outer_walk: Vec::new(),
        };
        net.rotation = angular_rotation(&net)?;
        net.rot_pos = vec![usize::MAX; 2 * net.edges.len()];
        for rot in &net.rotation {
            for (i, d) in rot.iter().enumerate() {
                net.rot_pos[d.half()] = i;
            }
        }
        net.outer_walk = net.trace_outer_walk();
        Ok(net)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn pos(&self, v: usize) -> Point {
        self.vertices[v].pos
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn sigma(&self, e: usize) -> f64 {
        self.edges[e].sigma
    }

    pub fn boundary_a(&self) -> &[usize] {
        &self.a
    }

    pub fn boundary_b(&self) -> &[usize] {
        &self.b
    }

    pub fn outer_boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_a(&self, v: usize) -> bool {
        self.in_a[v]
    }

    pub fn is_b(&self, v: usize) -> bool {
        self.in_b[v]
    }

    /// Counterclockwise order of the half-edges leaving `v`.
    pub fn rotation(&self, v: usize) -> &[DirectedEdge] {
        &self.rotation[v]
    }

    pub fn tail(&self, d: DirectedEdge) -> usize {
        let e = &self.edges[d.edge];
        if d.forward {
            e.u
        } else {
            e.v
        }
    }

    pub fn head(&self, d: DirectedEdge) -> usize {
        self.tail(d.reversed())
    }

    /// Directed edge leaving `v` along edge `e`.
    pub fn leaving(&self, e: usize, v: usize) -> DirectedEdge {
        DirectedEdge::new(e, self.edges[e].u == v)
    }

    /// Geometry of a half-edge from tail to head, including the bend point.
    pub fn polyline(&self, d: DirectedEdge) -> Vec<Point> {
        let e = &self.edges[d.edge];
        let (p, q) = (self.pos(e.u), self.pos(e.v));
        let mut pts = match e.bend {
            Some(m) => vec![p, m, q],
            None => vec![p, q],
        };
        if !d.forward {
            pts.reverse();
        }
        pts
    }

    /// Index of a half-edge within the rotation at its tail.
    pub fn rotation_position(&self, d: DirectedEdge) -> usize {
        self.rot_pos[d.half()]
    }

    /// Clockwise walk around the unbounded face.
    pub fn outer_walk(&self) -> &[DirectedEdge] {
        &self.outer_walk
    }

    /// Next half-edge of the face to the left of `d`.
    pub fn face_next(&self, d: DirectedEdge) -> DirectedEdge {
        let v = self.head(d);
        let rot = &self.rotation[v];
        let pos = self.rot_pos[d.reversed().half()];
        rot[(pos + rot.len() - 1) % rot.len()]
    }

    /// Boundary faces as closed half-edge cycles.
    pub fn faces(&self) -> Vec<Vec<DirectedEdge>> {
        let mut seen = vec![false; 2 * self.edges.len()];
        let mut faces = Vec::new();
        for h in 0..seen.len() {
            if seen[h] || self.rot_pos[h] == usize::MAX {
                continue;
            }
            let start = DirectedEdge::from_half(h);
            let mut face = Vec::new();
            let mut d = start;
            loop {
                seen[d.half()] = true;
                face.push(d);
                d = self.face_next(d);
                if d == start {
                    break;
                }
            }
            faces.push(face);
        }
        faces
    }

    fn face_area2(&self, face: &[DirectedEdge]) -> f64 {
        let mut pts = Vec::new();
        for &d in face {
            let pl = self.polyline(d);
            pts.extend_from_slice(&pl[..pl.len() - 1]);
        }
        geometry::signed_area2(&pts)
    }

    fn trace_outer_walk(&self) -> Vec<DirectedEdge> {
        let mut best: Option<(f64, Vec<DirectedEdge>)> = None;
        for f in self.faces() {
            let area = self.face_area2(&f);
            if best.as_ref().is_none_or(|(a, _)| area < *a) {
                best = Some((area, f));
            }
        }
        best.map(|(_, f)| f).unwrap_or_default()
    }

    /// The A run of the boundary list in counterclockwise order, i.e. from the
    /// top side downward.
    pub fn a_run(&self) -> Option<Vec<usize>> {
        cyclic_run(&self.boundary, &self.in_a)
    }

    /// The B run in counterclockwise order, i.e. from the bottom side upward.
    pub fn b_run(&self) -> Option<Vec<usize>> {
        cyclic_run(&self.boundary, &self.in_b)
    }

    /// For every A and B vertex on the outer walk, the walk position where the
    /// walk arrives at it on the A side (last arrival) and on the B side (first
    /// arrival). The half-edges after the A position up to and including the B
    /// position run along the top side.
    pub fn top_side_anchors(&self) -> Result<TopAnchors, NetworkError> {
        let w = &self.outer_walk;
        let m = w.len();
        let label = |i: usize| -> u8 {
            let h = self.head(w[i]);
            if self.in_a[h] {
                1
            } else if self.in_b[h] {
                2
            } else {
                0
            }
        };
        let hits: Vec<usize> = (0..m).filter(|&i| label(i) != 0).collect();
        if hits.is_empty() {
            return Err(NetworkError::InvalidPath("A and B are not on the outer face".into()));
        }
        let mut transitions = 0;
        let mut start = None;
        for k in 0..hits.len() {
            let prev = hits[(k + hits.len() - 1) % hits.len()];
            let cur = hits[k];
            if label(prev) != label(cur) {
                transitions += 1;
                if label(cur) == 1 {
                    start = Some(cur);
                }
            }
        }
        let start = match (transitions, start) {
            (2, Some(s)) => s,
            _ => {
                return Err(NetworkError::InvalidPath(
                    "A and B do not form two separated runs of the outer face".into(),
                ))
            }
        };
        let mut a_pos = HashMap::new();
        let mut b_pos = HashMap::new();
        let mut i = start;
        while label(i) != 2 {
            if label(i) == 1 {
                a_pos.insert(self.head(w[i]), i);
            }
            i = (i + 1) % m;
        }
        while label(i) != 1 {
            if label(i) == 2 {
                b_pos.entry(self.head(w[i])).or_insert(i);
            }
            i = (i + 1) % m;
        }
        Ok(TopAnchors { a_pos, b_pos })
    }

    /// Checks every structural invariant and reports each violation found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |invariant: &'static str, detail: String| out.push(Violation { invariant, detail });
        for v in &self.vertices {
            if !v.pos.is_finite() {
                push("finite-position", format!("vertex {} has a non-finite position", v.id));
            }
        }
        for e in &self.edges {
            if !(e.sigma > 0.0) || !e.sigma.is_finite() {
                push("positive-weight", format!("edge {} has weight {}", e.id, e.sigma));
            }
            if e.u == e.v {
                push("no-self-loop", format!("edge {} is a loop at vertex {}", e.id, e.u));
            }
            if let Some(p) = e.bend {
                if !p.is_finite() {
                    push("finite-position", format!("edge {} has a non-finite bend", e.id));
                }
            }
        }
        if self.a.is_empty() {
            push("boundary-arcs", "A is empty".into());
        }
        if self.b.is_empty() {
            push("boundary-arcs", "B is empty".into());
        }
        if let Some(&v) = self.a.iter().find(|&&v| self.in_b[v]) {
            push("boundary-arcs", format!("vertex {v} lies in both A and B"));
        }
        let mut seen = HashSet::new();
        for &v in &self.boundary {
            if !seen.insert(v) {
                push("boundary-order", format!("vertex {v} repeats in the boundary order"));
            }
        }
        for &v in self.a.iter().chain(&self.b) {
            if !seen.contains(&v) {
                push("boundary-order", format!("vertex {v} of A or B is missing from the boundary order"));
            }
        }
        if self.a_run().is_none() {
            push("boundary-arcs", "A is not a contiguous run of the boundary order".into());
        }
        if self.b_run().is_none() {
            push("boundary-arcs", "B is not a contiguous run of the boundary order".into());
        }
        let on_outer: HashSet<usize> = self.outer_walk.iter().map(|&d| self.head(d)).collect();
        for &v in &self.boundary {
            if !on_outer.contains(&v) && !self.rotation[v].is_empty() {
                push("boundary-order", format!("boundary vertex {v} is not on the outer face"));
            }
        }
        for (e1, e2) in self.crossing_pairs() {
            push("planarity", format!("edges {e1} and {e2} cross"));
        }
        out
    }

    /// Pairs of edges whose polylines meet away from a shared endpoint.
    pub fn crossing_pairs(&self) -> Vec<(usize, usize)> {
        struct Seg {
            edge: usize,
            p: Point,
            q: Point,
            pv: Option<usize>,
            qv: Option<usize>,
        }
        let mut segs = Vec::new();
        for e in &self.edges {
            if e.u == e.v {
                continue;
            }
            let (p, q) = (self.pos(e.u), self.pos(e.v));
            match e.bend {
                Some(m) => {
                    segs.push(Seg { edge: e.id, p, q: m, pv: Some(e.u), qv: None });
                    segs.push(Seg { edge: e.id, p: m, q, pv: None, qv: Some(e.v) });
                }
                None => segs.push(Seg { edge: e.id, p, q, pv: Some(e.u), qv: Some(e.v) }),
            }
        }
        let xmin = |s: &Seg| s.p.x.min(s.q.x);
        let xmax = |s: &Seg| s.p.x.max(s.q.x);
        segs.sort_by(|s, t| xmin(s).partial_cmp(&xmin(t)).unwrap_or(Ordering::Equal));
        let mut found = HashSet::new();
        let mut active: Vec<usize> = Vec::new();
        for i in 0..segs.len() {
            let s = &segs[i];
            let x0 = xmin(s);
            active.retain(|&j| xmax(&segs[j]) >= x0);
            for &j in &active {
                let t = &segs[j];
                if t.edge == s.edge {
                    continue;
                }
                if s.p.y.max(s.q.y) < t.p.y.min(t.q.y) || t.p.y.max(t.q.y) < s.p.y.min(s.q.y) {
                    continue;
                }
                let shared = [s.pv, s.qv]
                    .iter()
                    .flatten()
                    .any(|v| t.pv == Some(*v) || t.qv == Some(*v));
                if shared {
                    continue;
                }
                if geometry::segments_intersect(s.p, s.q, t.p, t.q) {
                    found.insert((s.edge.min(t.edge), s.edge.max(t.edge)));
                }
            }
            active.push(i);
        }
        let mut v: Vec<_> = found.into_iter().collect();
        v.sort();
        v
    }

    /// Finds an edge joining `u` and `v` (lowest id).
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.rotation[u].iter().filter(|d| self.head(**d) == v).map(|d| d.edge).min()
    }

    pub fn path_from_vertices(&self, vertices: &[usize]) -> Result<Path, NetworkError> {
        let mut edges = Vec::new();
        for w in vertices.windows(2) {
            let e = self.edge_between(w[0], w[1]).ok_or_else(|| {
                NetworkError::InvalidPath(format!("no edge between {} and {}", w[0], w[1]))
            })?;
            edges.push(e);
        }
        Ok(Path { vertices: vertices.to_vec(), edges })
    }

    /// Checks that `p` is a simple path starting in A and ending in B.
    pub fn check_path(&self, p: &Path) -> Result<(), NetworkError> {
        let bad = |m: String| Err(NetworkError::InvalidPath(m));
        if p.edges.is_empty() || p.vertices.len() != p.edges.len() + 1 {
            return bad("a path needs at least one edge and one more vertex than edges".into());
        }
        for (i, &e) in p.edges.iter().enumerate() {
            let ed = self.edges.get(e).ok_or(NetworkError::InvalidPath(format!("unknown edge {e}")))?;
            let (x, y) = (p.vertices[i], p.vertices[i + 1]);
            if !((ed.u == x && ed.v == y) || (ed.u == y && ed.v == x)) {
                return bad(format!("edge {e} does not join {x} and {y}"));
            }
        }
        let mut seen = HashSet::new();
        if !p.vertices.iter().all(|v| seen.insert(*v)) {
            return bad("path repeats a vertex".into());
        }
        if !self.in_a[p.first()] || !self.in_b[p.last()] {
            return bad("path must run from A to B".into());
        }
        Ok(())
    }

    /// Half-edges of `p` in path order.
    pub fn path_directed(&self, p: &Path) -> Vec<DirectedEdge> {
        p.edges.iter().zip(&p.vertices).map(|(&e, &v)| self.leaving(e, v)).collect()
    }

    pub fn with_sigma(&self, sigma: &[f64]) -> PlaneNetwork {
        let mut net = self.clone();
        for (e, s) in net.edges.iter_mut().zip(sigma) {
            e.sigma = *s;
        }
        net
    }

    pub fn to_json(&self) -> String {
        let doc = NetworkJson {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson { id: v.id, x: v.pos.x, y: v.pos.y })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeJson {
                    id: e.id,
                    u: e.u,
                    v: e.v,
                    sigma: e.sigma,
                    bend: e.bend.map(|p| [p.x, p.y]),
                })
                .collect(),
            a: self.a.clone(),
            b: self.b.clone(),
            boundary: self.boundary.clone(),
        };
        serde_json::to_string(&doc).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetworkError> {
        let doc: NetworkJson =
            serde_json::from_str(text).map_err(|e| NetworkError::Json(e.to_string()))?;
        let mut pos = Vec::with_capacity(doc.vertices.len());
        for (i, v) in doc.vertices.iter().enumerate() {
            if v.id != i {
                return Err(NetworkError::NonDenseVertexIds { index: i, found: v.id });
            }
            pos.push(Point::new(v.x, v.y));
        }
        let edges = doc
            .edges
            .into_iter()
            .map(|e| Edge {
                id: e.id,
                u: e.u,
                v: e.v,
                sigma: e.sigma,
                bend: e.bend.map(|[x, y]| Point::new(x, y)),
            })
            .collect();
        PlaneNetwork::new(pos, edges, doc.a, doc.b, doc.boundary)
    }
}

#[derive(Debug, Clone)]
pub struct TopAnchors {
    pub a_pos: HashMap<usize, usize>,
    pub b_pos: HashMap<usize, usize>,
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: usize,
    u: usize,
    v: usize,
    sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bend: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct NetworkJson {
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
    #[serde(rename = "A")]
    a: Vec<usize>,
    #[serde(rename = "B")]
    b: Vec<usize>,
    boundary: Vec<usize>,
}

fn cyclic_run(order: &[usize], member: &[bool]) -> Option<Vec<usize>> {
    let n = order.len();
    let count = order.iter().filter(|&&v| member[v]).count();
    if count == 0 {
        return None;
    }
    if count == n {
        return Some(order.to_vec());
    }
    let start = (0..n).find(|&i| member[order[i]] && !member[order[(i + n - 1) % n]])?;
    let run: Vec<usize> = (0..count).map(|k| order[(start + k) % n]).collect();
    if run.iter().all(|&v| member[v]) {
        Some(run)
    } else {
        None
    }
}

/// Counterclockwise order of departure directions at every vertex, starting
/// from angle zero. The direction of a bent edge is that of its first segment.
pub fn angular_rotation(net: &PlaneNetwork) -> Result<Vec<Vec<DirectedEdge>>, NetworkError> {
    let mut rot: Vec<Vec<DirectedEdge>> = vec![Vec::new(); net.vertices.len()];
    for e in &net.edges {
        if e.u == e.v {
            continue;
        }
        rot[e.u].push(DirectedEdge::new(e.id, true));
        rot[e.v].push(DirectedEdge::new(e.id, false));
    }
    let toward = |d: DirectedEdge| net.polyline(d)[1];
    for (v, list) in rot.iter_mut().enumerate() {
        let o = net.vertices[v].pos;
        list.sort_by(|a, b| geometry::angle_cmp(o, toward(*a), toward(*b)).then(a.cmp(b)));
        for w in list.windows(2) {
            if geometry::angle_cmp(o, toward(w[0]), toward(w[1])) == Ordering::Equal {
                return Err(NetworkError::AngularTie { vertex: v, first: w[0].edge, second: w[1].edge });
            }
        }
    }
    Ok(rot)
}

/// Decides for edges off a path whether they lie below it.
///
/// The path together with the stretch of the outer boundary running along the
/// top side from its start to its end bounds a region; edges inside that region
/// or on the stretch are above the path, every other edge off the path is below.
pub struct BelowOracle {
    on_path: Vec<bool>,
    on_stretch: Vec<bool>,
    polygon: Vec<Point>,
    probes: Vec<Point>,
}

impl BelowOracle {
    pub fn new(net: &PlaneNetwork, path: &Path) -> Result<Self, NetworkError> {
        net.check_path(path)?;
        let anchors = net.top_side_anchors()?;
        let (a, b) = (path.first(), path.last());
        let missing = || NetworkError::InvalidPath("path endpoints are not on the outer face".into());
        let pa = *anchors.a_pos.get(&a).ok_or_else(missing)?;
        let pb = *anchors.b_pos.get(&b).ok_or_else(missing)?;
        let walk = net.outer_walk();
        let m = walk.len();
        let mut stretch = Vec::new();
        let mut i = (pa + 1) % m;
        loop {
            stretch.push(walk[i]);
            if i == pb {
                break;
            }
            i = (i + 1) % m;
        }
        let mut on_path = vec![false; net.num_edges()];
        path.edges.iter().for_each(|&e| on_path[e] = true);
        let mut on_stretch = vec![false; net.num_edges()];
        stretch.iter().for_each(|d| on_stretch[d.edge] = true);
        let mut polygon = Vec::new();
        for d in net.path_directed(path) {
            let pl = net.polyline(d);
            polygon.extend_from_slice(&pl[..pl.len() - 1]);
        }
        for d in stretch.iter().rev() {
            let pl = net.polyline(d.reversed());
            polygon.extend_from_slice(&pl[..pl.len() - 1]);
        }
        let probes = net
            .edges()
            .iter()
            .map(|e| {
                let pl = net.polyline(DirectedEdge::new(e.id, true));
                pl[0].midpoint(pl[1])
            })
            .collect();
        Ok(BelowOracle { on_path, on_stretch, polygon, probes })
    }

    pub fn on_path(&self, e: usize) -> bool {
        self.on_path[e]
    }

    /// True when edge `e` is off the path and below it.
    pub fn is_below(&self, e: usize) -> bool {
        if self.on_path[e] || self.on_stretch[e] {
            return false;
        }
        geometry::winding_number(&self.polygon, self.probes[e]) == 0
    }
}

/// Two paths cross when each has an edge off the other that lies below the other.
pub fn paths_cross(net: &PlaneNetwork, g1: &Path, g2: &Path) -> Result<bool, NetworkError> {
    let o1 = BelowOracle::new(net, g1)?;
    let o2 = BelowOracle::new(net, g2)?;
    let e1 = g1.edges.iter().any(|&e| !o2.on_path(e) && o2.is_below(e));
    let e2 = g2.edges.iter().any(|&e| !o1.on_path(e) && o1.is_below(e));
    Ok(e1 && e2)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn single_edge(sigma: f64) -> PlaneNetwork {
        PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![Edge { id: 0, u: 0, v: 1, sigma, bend: None }],
            vec![0],
            vec![1],
            vec![0, 1],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_is_valid() {
        assert!(single_edge(1.0).validate().is_empty());
    }

    #[test]
    fn zero_weight_is_reported() {
        let v = single_edge(0.0).validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].invariant, "positive-weight");
    }

    #[test]
    fn crossing_edges_are_reported() {
        let pos = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 0.0),
        ];
        let edges = vec![
            Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None },
            Edge { id: 1, u: 2, v: 3, sigma: 1.0, bend: None },
        ];
        let net = PlaneNetwork::new(pos, edges, vec![0], vec![1], vec![0, 3, 1, 2]).unwrap();
        let v = net.validate();
        assert!(v.iter().any(|x| x.invariant == "planarity" && x.detail.contains("0 and 1")));
    }

    #[test]
    fn star_rotation_is_east_north_west_south() {
        let pos = vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, -1.0),
            Point::new(-1.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ];
        let edges = (1..5).map(|k| Edge { id: k - 1, u: 0, v: k, sigma: 1.0, bend: None }).collect();
        let net = PlaneNetwork::new(pos, edges, vec![2], vec![3], vec![2, 1, 3, 4]).unwrap();
        let heads: Vec<usize> = net.rotation(0).iter().map(|d| net.head(*d)).collect();
        assert_eq!(heads, vec![3, 4, 2, 1]);
    }

    #[test]
    fn bent_edge_uses_first_segment_direction() {
        let pos = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)];
        let edges = vec![
            Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: Some(Point::new(1.0, -1.0)) },
            Edge { id: 1, u: 0, v: 1, sigma: 1.0, bend: Some(Point::new(1.0, 1.0)) },
        ];
        let net = PlaneNetwork::new(pos, edges, vec![0], vec![1], vec![0, 1]).unwrap();
        let order: Vec<usize> = net.rotation(0).iter().map(|d| d.edge).collect();
        assert_eq!(order, vec![1, 0]);
        assert!(net.validate().is_empty());
    }

    #[test]
    fn parallel_straight_edges_tie() {
        let pos = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        let edges = vec![
            Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None },
            Edge { id: 1, u: 0, v: 1, sigma: 1.0, bend: None },
        ];
        let err = PlaneNetwork::new(pos, edges, vec![0], vec![1], vec![0, 1]).unwrap_err();
        assert!(matches!(err, NetworkError::AngularTie { .. }));
    }

    #[test]
    fn outer_walk_is_clockwise() {
        let pos = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        let edges = (0..4).map(|k| Edge { id: k, u: k, v: (k + 1) % 4, sigma: 1.0, bend: None }).collect();
        let net = PlaneNetwork::new(pos, edges, vec![3, 0], vec![1, 2], vec![0, 1, 2, 3]).unwrap();
        let heads: Vec<usize> = net.outer_walk().iter().map(|d| net.head(*d)).collect();
        assert_eq!(heads.len(), 4);
        let i = heads.iter().position(|&h| h == 0).unwrap();
        assert_eq!(heads[(i + 1) % 4], 3);
        assert_eq!(net.faces().len(), 2);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let pos = vec![Point::new(0.1, 1.0 / 3.0), Point::new(2.0_f64.sqrt(), -0.0)];
        let edges = vec![Edge { id: 0, u: 0, v: 1, sigma: 0.7, bend: Some(Point::new(1e-300, 0.5)) }];
        let net = PlaneNetwork::new(pos, edges, vec![0], vec![1], vec![0, 1]).unwrap();
        let text = net.to_json();
        let back = PlaneNetwork::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert_eq!(back.pos(0).y.to_bits(), (1.0f64 / 3.0).to_bits());
        assert_eq!(back.edge(0), net.edge(0));
    }

    #[test]
    fn identical_paths_do_not_cross() {
        let net = single_edge(1.0);
        let p = net.path_from_vertices(&[0, 1]).unwrap();
        assert!(!paths_cross(&net, &p, &p).unwrap());
    }

    #[test]
    fn invalid_path_is_rejected() {
        let net = single_edge(1.0);
        let p = net.path_from_vertices(&[1, 0]).unwrap();
        assert!(matches!(paths_cross(&net, &p, &p), Err(NetworkError::InvalidPath(_))));
    }
}
