//! Peeling the harmonic current flow into non-crossing top paths.
//!
//! Edges are oriented toward increasing potential and given residual capacity
//! r(e) = σ(e)ρ*(e). Repeatedly the top path of the still active edges is
//! extracted, charged the smallest residual along it, and exhausted edges are
//! dropped. The charges are the path masses; they sum to the modulus.

use crate::dirichlet;
use crate::error::DecompositionError;
use crate::network::{DirectedEdge, Path, PlaneNetwork};
use serde::Serialize;

/// Relative size below which a capacity counts as zero.
pub const ZERO_FACTOR: f64 = 1e-11;
/// Relative size a dangling residual may have before it is reported.
const DANGLING_FACTOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OrientedNetwork<'a> {
    pub base: &'a PlaneNetwork,
    /// Orientation from lower to higher potential; `None` for zero edges.
    pub direction: Vec<Option<DirectedEdge>>,
    pub zero_edges: Vec<bool>,
    /// σ(e)ρ*(e).
    pub capacity: Vec<f64>,
    pub threshold: f64,
}

impl OrientedNetwork<'_> {
    pub fn is_active_out(&self, active: &[bool], d: DirectedEdge) -> bool {
        active[d.edge] && self.direction[d.edge] == Some(d)
    }

    /// Largest |inflow − outflow| of capacity at vertices outside A ∪ B.
    pub fn balance_residual(&self) -> f64 {
        let net = self.base;
        let mut bal = vec![0.0; net.num_vertices()];
        for (e, d) in self.direction.iter().enumerate() {
            if let Some(d) = d {
                bal[net.tail(*d)] -= self.capacity[e];
                bal[net.head(*d)] += self.capacity[e];
            }
        }
        (0..net.num_vertices())
            .filter(|&v| !net.is_a(v) && !net.is_b(v))
            .map(|v| bal[v].abs())
            .fold(0.0, f64::max)
    }
}

/// 1e-11 times the largest σρ*.
pub fn default_threshold(net: &PlaneNetwork, h: &[f64]) -> f64 {
    let max = net
        .edges()
        .iter()
        .map(|e| e.sigma * (h[e.v] - h[e.u]).abs())
        .fold(0.0, f64::max);
    ZERO_FACTOR * max
}

pub fn orient<'a>(
    net: &'a PlaneNetwork,
    h: &[f64],
    zero_threshold: f64,
) -> Result<OrientedNetwork<'a>, DecompositionError> {
    let ne = net.num_edges();
    let mut direction = vec![None; ne];
    let mut zero_edges = vec![false; ne];
    let mut capacity = vec![0.0; ne];
    for e in net.edges() {
        let dh = h[e.v] - h[e.u];
        capacity[e.id] = e.sigma * dh.abs();
        if capacity[e.id] <= zero_threshold || e.u == e.v {
            zero_edges[e.id] = true;
        } else {
            direction[e.id] = Some(DirectedEdge::new(e.id, dh > 0.0));
        }
    }
    let oriented = OrientedNetwork { base: net, direction, zero_edges, capacity, threshold: zero_threshold };
    if let Some(v) = find_cycle(&oriented) {
        return Err(DecompositionError::CycleDetected(v));
    }
    Ok(oriented)
}

fn find_cycle(o: &OrientedNetwork) -> Option<usize> {
    let net = o.base;
    let n = net.num_vertices();
    let mut indeg = vec![0usize; n];
    for d in o.direction.iter().flatten() {
        indeg[net.head(*d)] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut done = 0;
    while let Some(v) = stack.pop() {
        done += 1;
        for &d in net.rotation(v) {
            if o.direction[d.edge] == Some(d) {
                let w = net.head(d);
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
    }
    if done == n {
        None
    } else {
        (0..n).find(|&v| indeg[v] > 0)
    }
}

/// The top path of the active subgraph, traced by always turning as far left
/// as possible. Starts at the highest A vertex that still has an active
/// outgoing edge.
pub fn top_path(o: &OrientedNetwork, active: &[bool]) -> Result<Option<Path>, DecompositionError> {
    let net = o.base;
    let run = net
        .a_run()
        .ok_or_else(|| DecompositionError::TopologyError("A is not a boundary run".into()))?;
    let has_out = |v: usize| net.rotation(v).iter().any(|&d| o.is_active_out(active, d));
    let Some(start) = run.into_iter().find(|&a| has_out(a)) else {
        return Ok(None);
    };
    let anchors = net.top_side_anchors()?;
    let walk = net.outer_walk();
    let pos = *anchors.a_pos.get(&start).ok_or_else(|| {
        DecompositionError::TopologyError(format!("A vertex {start} is not on the outer face"))
    })?;
    let mut reference = walk[(pos + 1) % walk.len()];
    let mut v = start;
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    while !net.is_b(v) {
        let rot = net.rotation(v);
        let k = net.rotation_position(reference);
        let next = (0..rot.len())
            .map(|i| rot[(k + rot.len() - i) % rot.len()])
            .find(|&d| o.is_active_out(active, d));
        let Some(d) = next else {
            return Err(DecompositionError::TopologyError(format!(
                "top path walk stopped at vertex {v} outside B"
            )));
        };
        if edges.len() > net.num_edges() {
            return Err(DecompositionError::TopologyError("top path walk does not terminate".into()));
        }
        edges.push(d.edge);
        v = net.head(d);
        vertices.push(v);
        reference = d.reversed();
    }
    Ok(Some(Path { vertices, edges }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcmsDecomposition {
    /// Paths in extraction order, top first.
    pub paths: Vec<Path>,
    pub masses: Vec<f64>,
    pub modulus: f64,
    pub pmf: Vec<f64>,
}

#[derive(Serialize)]
struct PathJson<'a> {
    vertices: &'a [usize],
    mass: f64,
    pmf: f64,
}

#[derive(Serialize)]
struct DecompositionJson<'a> {
    modulus: f64,
    paths: Vec<PathJson<'a>>,
}

impl NcmsDecomposition {
    pub fn to_json(&self) -> String {
        let doc = DecompositionJson {
            modulus: self.modulus,
            paths: self
                .paths
                .iter()
                .zip(&self.masses)
                .zip(&self.pmf)
                .map(|((p, &mass), &pmf)| PathJson { vertices: &p.vertices, mass, pmf })
                .collect(),
        };
        serde_json::to_string(&doc).expect("decomposition serializes")
    }
}

pub fn decompose(net: &PlaneNetwork) -> Result<NcmsDecomposition, DecompositionError> {
    let sol = dirichlet::solve_unit(net)?;
    decompose_with(net, &sol.potentials)
}

/// Runs the peeling on a given unit potential.
pub fn decompose_with(net: &PlaneNetwork, h: &[f64]) -> Result<NcmsDecomposition, DecompositionError> {
    let oriented = orient(net, h, default_threshold(net, h))?;
    let cap_max = oriented.capacity.iter().copied().fold(0.0, f64::max);
    let thr = oriented.threshold;
    let mut r = oriented.capacity.clone();
    let mut active: Vec<bool> = oriented.zero_edges.iter().map(|z| !z).collect();
    let mut pending: Vec<usize> = (0..net.num_vertices()).collect();
    let mut paths = Vec::new();
    let mut masses = Vec::new();
    loop {
        prune_dangling(&oriented, &mut active, &mut r, &mut pending, DANGLING_FACTOR * cap_max)?;
        let Some(path) = top_path(&oriented, &active)? else { break };
        let m = path.edges.iter().map(|&e| r[e]).fold(f64::INFINITY, f64::min);
        for &e in &path.edges {
            r[e] -= m;
            if r[e] < -1e-12 * cap_max {
                return Err(DecompositionError::Inconsistent(format!(
                    "residual capacity of edge {e} went negative"
                )));
            }
            if r[e] <= thr {
                r[e] = 0.0;
                active[e] = false;
                let ed = net.edge(e);
                pending.push(ed.u);
                pending.push(ed.v);
            }
        }
        paths.push(path);
        masses.push(m);
    }
    if let Some(e) = (0..net.num_edges()).find(|&e| active[e] && r[e] > DANGLING_FACTOR * cap_max) {
        return Err(DecompositionError::Inconsistent(format!(
            "edge {e} keeps residual capacity {} after the last path",
            r[e]
        )));
    }
    let modulus: f64 = masses.iter().sum();
    let pmf = masses.iter().map(|m| m / modulus).collect();
    Ok(NcmsDecomposition { paths, masses, modulus, pmf })
}

/// Drops active edges that can no longer lie on an A→B path because they end
/// (or start) at an interior vertex with no active way onward (or back). Only
/// round-off sized residuals may be dropped this way.
fn prune_dangling(
    o: &OrientedNetwork,
    active: &mut [bool],
    r: &mut [f64],
    pending: &mut Vec<usize>,
    tol: f64,
) -> Result<(), DecompositionError> {
    let net = o.base;
    while let Some(v) = pending.pop() {
        if net.is_a(v) || net.is_b(v) {
            continue;
        }
        let (mut ins, mut outs) = (Vec::new(), Vec::new());
        for &d in net.rotation(v) {
            if !active[d.edge] {
                continue;
            }
            if o.direction[d.edge] == Some(d) {
                outs.push(d);
            } else {
                ins.push(d);
            }
        }
        let stranded = match (ins.is_empty(), outs.is_empty()) {
            (false, true) => ins,
            (true, false) => outs,
            _ => continue,
        };
        for d in stranded {
            if r[d.edge] > tol {
                return Err(DecompositionError::TopologyError(format!(
                    "edge {} is stranded at vertex {v} with residual {}",
                    d.edge, r[d.edge]
                )));
            }
            active[d.edge] = false;
            r[d.edge] = 0.0;
            pending.push(net.head(d));
        }
    }
    Ok(())
}

/// Σ m(γ) times the unit flow along γ, per edge in its u→v direction.
pub fn flow_decomposition(net: &PlaneNetwork, dec: &NcmsDecomposition) -> Vec<f64> {
    let mut flow = vec![0.0; net.num_edges()];
    for (p, &m) in dec.paths.iter().zip(&dec.masses) {
        for d in net.path_directed(p) {
            flow[d.edge] += if d.forward { m } else { -m };
        }
    }
    flow
}
