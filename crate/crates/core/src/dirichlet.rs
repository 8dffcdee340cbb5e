//! Discrete Dirichlet problem, energy, extremal density and current flow.

use crate::error::SolverError;
use crate::network::{DirectedEdge, PlaneNetwork};
use sprs::{FillInReduction, SymmetryCheck, TriMat};
use sprs_ldl::Ldl;
use std::collections::{BTreeMap, VecDeque};

/// Default absolute tolerance for harmonicity residual checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Above this many free vertices the iterative solver is used by default.
const DIRECT_LIMIT: usize = 200_000;
const CG_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub potentials: Vec<f64>,
    pub energy: f64,
    pub clamped: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Auto,
    Direct,
    ConjugateGradient,
}

/// Ohm's law flow σ·dh, stored once per edge in the u→v direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentFlow {
    pub flow: Vec<f64>,
    pub strength: f64,
}

impl CurrentFlow {
    pub fn at(&self, d: DirectedEdge) -> f64 {
        if d.forward {
            self.flow[d.edge]
        } else {
            -self.flow[d.edge]
        }
    }

    /// Largest net outflow at a vertex outside A ∪ B.
    pub fn node_law_residual(&self, net: &PlaneNetwork) -> f64 {
        let mut net_out = vec![0.0; net.num_vertices()];
        for e in net.edges() {
            net_out[e.u] += self.flow[e.id];
            net_out[e.v] -= self.flow[e.id];
        }
        (0..net.num_vertices())
            .filter(|&v| !net.is_a(v) && !net.is_b(v))
            .map(|v| net_out[v].abs())
            .fold(0.0, f64::max)
    }

    /// Net flow into B.
    pub fn inflow_b(&self, net: &PlaneNetwork) -> f64 {
        net.edges()
            .iter()
            .map(|e| match (net.is_b(e.u), net.is_b(e.v)) {
                (false, true) => self.flow[e.id],
                (true, false) => -self.flow[e.id],
                _ => 0.0,
            })
            .sum()
    }
}

pub fn solve_dirichlet(
    net: &PlaneNetwork,
    clamped: &BTreeMap<usize, f64>,
) -> Result<HarmonicSolution, SolverError> {
    solve_dirichlet_with(net, clamped, SolverKind::Auto)
}

/// Potential that is 0 on A, 1 on B and harmonic elsewhere.
pub fn solve_unit(net: &PlaneNetwork) -> Result<HarmonicSolution, SolverError> {
    let mut clamped = BTreeMap::new();
    for &a in net.boundary_a() {
        clamped.insert(a, 0.0);
    }
    for &b in net.boundary_b() {
        clamped.insert(b, 1.0);
    }
    solve_dirichlet(net, &clamped)
}

pub fn solve_dirichlet_with(
    net: &PlaneNetwork,
    clamped: &BTreeMap<usize, f64>,
    kind: SolverKind,
) -> Result<HarmonicSolution, SolverError> {
    let n = net.num_vertices();
    if clamped.is_empty() || clamped.len() > n {
        return Err(SolverError::BadClampedSet);
    }
    for (&v, g) in clamped {
        if v >= n {
            return Err(SolverError::BadClampedSet);
        }
        if !g.is_finite() {
            return Err(SolverError::NonFiniteBoundary(v));
        }
    }
    check_reachable(net, clamped)?;

    let mut index = vec![usize::MAX; n];
    let mut free = Vec::new();
    for v in 0..n {
        if !clamped.contains_key(&v) {
            index[v] = free.len();
            free.push(v);
        }
    }
    let m = free.len();
    let mut tri = TriMat::new((m, m));
    let mut rhs = vec![0.0; m];
    for e in net.edges() {
        if e.u == e.v {
            continue;
        }
        let (iu, iv) = (index[e.u], index[e.v]);
        let s = e.sigma;
        match (iu != usize::MAX, iv != usize::MAX) {
            (true, true) => {
                tri.add_triplet(iu, iu, s);
                tri.add_triplet(iv, iv, s);
                tri.add_triplet(iu, iv, -s);
                tri.add_triplet(iv, iu, -s);
            }
            (true, false) => {
                tri.add_triplet(iu, iu, s);
                rhs[iu] += s * clamped[&e.v];
            }
            (false, true) => {
                tri.add_triplet(iv, iv, s);
                rhs[iv] += s * clamped[&e.u];
            }
            (false, false) => {}
        }
    }
    let mat = tri.to_csr::<usize>();
    if m == 0 {
        let h: Vec<f64> = (0..n).map(|v| clamped[&v]).collect();
        return Ok(HarmonicSolution { energy: energy(net, &h), potentials: h, clamped: clamped.clone() });
    }
    let use_direct = match kind {
        SolverKind::Direct => true,
        SolverKind::ConjugateGradient => false,
        SolverKind::Auto => m <= DIRECT_LIMIT,
    };
    let x = if m == 1 {
        // The sparse factorization does not handle a single unknown.
        vec![rhs[0] / mat.get(0, 0).copied().unwrap_or(f64::NAN)]
    } else if use_direct {
        let csc = mat.to_csc();
        match Ldl::new()
            .fill_in_reduction(FillInReduction::ReverseCuthillMcKee)
            .check_symmetry(SymmetryCheck::DontCheckSymmetry)
            .numeric(csc.view())
        {
            Ok(ldl) => ldl.solve(&rhs),
            Err(_) if kind == SolverKind::Auto => pcg(&mat, &rhs)?,
            Err(e) => return Err(SolverError::SolverFailure(e.to_string())),
        }
    } else {
        pcg(&mat, &rhs)?
    };
    let mut h = vec![0.0; n];
    for (&v, &g) in clamped {
        h[v] = g;
    }
    for (k, &v) in free.iter().enumerate() {
        if !x[k].is_finite() {
            return Err(SolverError::SolverFailure("non-finite potential".into()));
        }
        h[v] = x[k];
    }
    Ok(HarmonicSolution { energy: energy(net, &h), potentials: h, clamped: clamped.clone() })
}

fn check_reachable(net: &PlaneNetwork, clamped: &BTreeMap<usize, f64>) -> Result<(), SolverError> {
    let n = net.num_vertices();
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = clamped.keys().copied().collect();
    for &v in clamped.keys() {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for d in net.rotation(v) {
            let w = net.head(*d);
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(SolverError::Disconnected(v)),
        None => Ok(()),
    }
}

/// Jacobi-preconditioned conjugate gradients.
fn pcg(mat: &sprs::CsMat<f64>, b: &[f64]) -> Result<Vec<f64>, SolverError> {
    let m = b.len();
    let matvec = |x: &[f64], out: &mut [f64]| {
        for (row, vec) in mat.outer_iterator().enumerate() {
            out[row] = vec.iter().map(|(c, &a)| a * x[c]).sum();
        }
    };
    let diag: Vec<f64> = (0..m).map(|i| *mat.get(i, i).unwrap_or(&1.0)).collect();
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; m];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut ap = vec![0.0; m];
    for _ in 0..(10 * m + 1000) {
        matvec(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= CG_RTOL * bnorm {
            return Ok(x);
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SolverError::SolverFailure("conjugate gradients hit the iteration cap".into()))
}

pub fn energy(net: &PlaneNetwork, h: &[f64]) -> f64 {
    net.edges().iter().map(|e| e.sigma * (h[e.v] - h[e.u]).powi(2)).sum()
}

/// ρ*(e) = |h(v) − h(u)|.
pub fn extremal_density(net: &PlaneNetwork, h: &[f64]) -> Vec<f64> {
    net.edges().iter().map(|e| (h[e.v] - h[e.u]).abs()).collect()
}

pub fn current_flow(net: &PlaneNetwork, h: &[f64]) -> CurrentFlow {
    let flow: Vec<f64> = net.edges().iter().map(|e| e.sigma * (h[e.v] - h[e.u])).collect();
    let strength = net
        .edges()
        .iter()
        .map(|e| match (net.is_a(e.u), net.is_a(e.v)) {
            (true, false) => flow[e.id],
            (false, true) => -flow[e.id],
            _ => 0.0,
        })
        .sum();
    CurrentFlow { flow, strength }
}

/// Largest |h(v)Σσ − Σσh(w)| / Σσ over unclamped vertices.
pub fn harmonic_residual(net: &PlaneNetwork, sol: &HarmonicSolution) -> f64 {
    let n = net.num_vertices();
    let mut acc = vec![0.0; n];
    let mut wsum = vec![0.0; n];
    let h = &sol.potentials;
    for e in net.edges() {
        acc[e.u] += e.sigma * (h[e.u] - h[e.v]);
        acc[e.v] += e.sigma * (h[e.v] - h[e.u]);
        wsum[e.u] += e.sigma;
        wsum[e.v] += e.sigma;
    }
    (0..n)
        .filter(|v| !sol.clamped.contains_key(v) && wsum[*v] > 0.0)
        .map(|v| acc[v].abs() / wsum[v])
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::Edge;

    fn path3() -> PlaneNetwork {
        PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)],
            vec![
                Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None },
                Edge { id: 1, u: 1, v: 2, sigma: 1.0, bend: None },
            ],
            vec![0],
            vec![2],
            vec![0, 1, 2],
        )
        .unwrap()
    }

    fn star() -> PlaneNetwork {
        let pos = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(-0.5, 0.8),
            Point::new(-0.5, -0.8),
        ];
        let edges = (1..4).map(|k| Edge { id: k - 1, u: 0, v: k, sigma: 1.0, bend: None }).collect();
        PlaneNetwork::new(pos, edges, vec![2, 3], vec![1], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn midpoint_of_path_is_one_half() {
        let sol = solve_unit(&path3()).unwrap();
        assert!((sol.potentials[1] - 0.5).abs() < 1e-15);
        assert_eq!(sol.potentials[0], 0.0);
        assert_eq!(sol.potentials[2], 1.0);
    }

    #[test]
    fn star_center_is_weighted_average() {
        let sol = solve_unit(&star()).unwrap();
        assert!((sol.potentials[0] - 1.0 / 3.0).abs() < 1e-15);
        let cg = solve_dirichlet_with(&star(), &sol.clamped, SolverKind::ConjugateGradient).unwrap();
        assert!((cg.potentials[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn energy_of_constant_and_unit_edge() {
        let net = path3();
        assert_eq!(energy(&net, &[2.0, 2.0, 2.0]), 0.0);
        assert_eq!(energy(&net, &[0.0, 1.0, 1.0]), 1.0);
        assert!(extremal_density(&net, &[3.0, 3.0, 3.0]).iter().all(|&r| r == 0.0));
    }

    #[test]
    fn flow_on_single_edge() {
        let net = PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![Edge { id: 0, u: 0, v: 1, sigma: 2.0, bend: None }],
            vec![0],
            vec![1],
            vec![0, 1],
        )
        .unwrap();
        let sol = solve_unit(&net).unwrap();
        let f = current_flow(&net, &sol.potentials);
        assert_eq!(f.flow[0], 2.0);
        assert_eq!(f.strength, 2.0);
        assert_eq!(f.at(DirectedEdge::new(0, false)), -2.0);
    }

    #[test]
    fn unreachable_vertex_is_disconnected() {
        let net = PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(5.0, 5.0)],
            vec![Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None }],
            vec![0],
            vec![1],
            vec![0, 1],
        )
        .unwrap();
        assert_eq!(solve_unit(&net).unwrap_err(), SolverError::Disconnected(2));
    }

    #[test]
    fn boundary_data_scales_linearly() {
        let net = star();
        let mut g = BTreeMap::new();
        g.insert(1, 2.5);
        g.insert(2, -1.0);
        g.insert(3, 0.75);
        let s1 = solve_dirichlet(&net, &g).unwrap();
        let g3: BTreeMap<_, _> = g.iter().map(|(k, v)| (*k, 3.0 * v)).collect();
        let s3 = solve_dirichlet(&net, &g3).unwrap();
        for v in 0..4 {
            assert!((s3.potentials[v] - 3.0 * s1.potentials[v]).abs() < 1e-10);
        }
        assert!(harmonic_residual(&net, &s1) < 1e-12);
    }
}
