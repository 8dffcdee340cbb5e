//! Modulus of explicit path families, admissibility, overlap and Beurling checks.
//!
//! The modulus of a family Γ satisfies 1/Mod(Γ) = min over pmfs μ of
//! ‖Σ^{-1/2} Nᵀ μ‖², the squared distance from the origin to the convex hull of
//! the points Σ^{-1/2} N_γ. The brute-force oracle finds that nearest point with
//! Wolfe's minimum-norm-point method.

use crate::dirichlet;
use crate::error::{ModulusError, NetworkError, SolverError};
use crate::network::{Path, PlaneNetwork};
use nalgebra::{DMatrix, DVector};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

const ADMISSIBLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PathFamily {
    pub paths: Vec<Path>,
}

impl PathFamily {
    /// Builds a family, checking that every path is a simple A→B path.
    pub fn new(net: &PlaneNetwork, paths: Vec<Path>) -> Result<Self, NetworkError> {
        for p in &paths {
            net.check_path(p)?;
        }
        Ok(PathFamily { paths })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// N(γ, e).
    pub fn usage(&self, path: usize, e: usize) -> u8 {
        u8::from(self.paths[path].contains_edge(e))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    pub mass: Vec<f64>,
}

impl Pmf {
    pub fn new(mass: Vec<f64>) -> Option<Self> {
        let total: f64 = mass.iter().sum();
        if mass.iter().any(|m| !(*m >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return None;
        }
        Some(Pmf { mass })
    }

    pub fn uniform(n: usize) -> Self {
        Pmf { mass: vec![1.0 / n as f64; n] }
    }
}

pub fn rho_length(path: &Path, rho: &[f64]) -> f64 {
    path.edges.iter().map(|&e| rho[e]).sum()
}

pub fn is_admissible(family: &PathFamily, rho: &[f64]) -> bool {
    family.paths.iter().all(|p| rho_length(p, rho) >= 1.0 - ADMISSIBLE_TOL)
}

/// Smallest ρ-length of an A→B path, by Dijkstra from all of A. ρ is admissible
/// for the full connecting family exactly when this is at least one.
pub fn min_rho_length(net: &PlaneNetwork, rho: &[f64]) -> f64 {
    let mut dist = vec![f64::INFINITY; net.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &a in net.boundary_a() {
        dist[a] = 0.0;
        heap.push((Reverse(Key(0.0)), a));
    }
    while let Some((Reverse(Key(d)), v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if net.is_b(v) {
            return d;
        }
        for &de in net.rotation(v) {
            let w = net.head(de);
            let nd = d + rho[de.edge];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push((Reverse(Key(nd)), w));
            }
        }
    }
    f64::INFINITY
}

#[derive(PartialEq, PartialOrd)]
struct Key(f64);

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

pub fn modulus_from_energy(net: &PlaneNetwork) -> Result<f64, SolverError> {
    Ok(dirichlet::solve_unit(net)?.energy)
}

/// Expected edge usage Nᵀμ.
fn usage_mass(net: &PlaneNetwork, family: &PathFamily, pmf: &Pmf) -> Vec<f64> {
    let mut u = vec![0.0; net.num_edges()];
    for (p, m) in family.paths.iter().zip(&pmf.mass) {
        for &e in &p.edges {
            u[e] += m;
        }
    }
    u
}

/// μᵀ N Σ⁻¹ Nᵀ μ, the expected σ-weighted overlap of two independent μ-paths.
pub fn expected_overlap(net: &PlaneNetwork, family: &PathFamily, pmf: &Pmf) -> f64 {
    usage_mass(net, family, pmf)
        .iter()
        .enumerate()
        .map(|(e, u)| u * u / net.sigma(e))
        .sum()
}

pub fn edge_probability(family: &PathFamily, pmf: &Pmf, e: usize) -> f64 {
    family
        .paths
        .iter()
        .zip(&pmf.mass)
        .filter(|(p, _)| p.contains_edge(e))
        .map(|(_, m)| m)
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeurlingReport {
    /// Whether ρ gives every path of the full family length at least one.
    pub admissible: bool,
    /// max |ℓ_ρ(γ) − 1| over the candidate subfamily.
    pub max_length_deviation: f64,
    /// Candidate paths whose ρ-length exceeds one.
    pub over_long: Vec<usize>,
    /// max_e |Σ_γ m(γ)1{e∈γ} − σ(e)ρ(e)| when masses are supplied.
    pub certificate_residual: Option<f64>,
}

pub fn verify_beurling(
    net: &PlaneNetwork,
    family: &PathFamily,
    rho: &[f64],
    candidate: &PathFamily,
    masses: Option<&[f64]>,
) -> BeurlingReport {
    let lengths: Vec<f64> = candidate.paths.iter().map(|p| rho_length(p, rho)).collect();
    let max_length_deviation = lengths.iter().map(|l| (l - 1.0).abs()).fold(0.0, f64::max);
    let over_long = (0..lengths.len()).filter(|&i| lengths[i] > 1.0 + 1e-9).collect();
    let certificate_residual = masses.map(|m| {
        let mut load = vec![0.0; net.num_edges()];
        for (p, mass) in candidate.paths.iter().zip(m) {
            for &e in &p.edges {
                load[e] += mass;
            }
        }
        (0..net.num_edges())
            .map(|e| (load[e] - net.sigma(e) * rho[e]).abs())
            .fold(0.0, f64::max)
    });
    BeurlingReport {
        admissible: is_admissible(family, rho),
        max_length_deviation,
        over_long,
        certificate_residual,
    }
}

/// All simple paths that start in A, avoid other A vertices and stop at the
/// first B vertex they reach. Edges are explored in increasing id order.
pub fn enumerate_paths(net: &PlaneNetwork, max_paths: usize) -> Result<PathFamily, ModulusError> {
    let n = net.num_vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for e in net.edges() {
        if e.u != e.v {
            adj[e.u].push((e.id, e.v));
            adj[e.v].push((e.id, e.u));
        }
    }
    adj.iter_mut().for_each(|l| l.sort());
    let mut starts: Vec<usize> = net.boundary_a().to_vec();
    starts.sort();
    let mut paths = Vec::new();
    let mut on_path = vec![false; n];
    for &a in &starts {
        let mut verts = vec![a];
        let mut edges = Vec::new();
        on_path[a] = true;
        dfs(net, &adj, &mut on_path, &mut verts, &mut edges, &mut paths, max_paths)?;
        on_path[a] = false;
    }
    Ok(PathFamily { paths })
}

fn dfs(
    net: &PlaneNetwork,
    adj: &[Vec<(usize, usize)>],
    on_path: &mut [bool],
    verts: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    out: &mut Vec<Path>,
    max_paths: usize,
) -> Result<(), ModulusError> {
    let v = *verts.last().unwrap();
    for &(e, w) in &adj[v] {
        if on_path[w] || net.is_a(w) {
            continue;
        }
        verts.push(w);
        edges.push(e);
        if net.is_b(w) {
            if out.len() == max_paths {
                return Err(ModulusError::TooManyPaths(max_paths));
            }
            out.push(Path { vertices: verts.clone(), edges: edges.clone() });
        } else {
            on_path[w] = true;
            dfs(net, adj, on_path, verts, edges, out, max_paths)?;
            on_path[w] = false;
        }
        verts.pop();
        edges.pop();
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub modulus: f64,
    /// Extremal density of the family.
    pub density: Vec<f64>,
    /// An optimal pmf on the family.
    pub pmf: Pmf,
}

/// Modulus of an explicit family via the minimum-norm point of its usage polytope.
pub fn family_modulus(net: &PlaneNetwork, family: &PathFamily) -> Result<QpSolution, ModulusError> {
    if family.is_empty() {
        return Err(ModulusError::EmptyFamily);
    }
    let ne = net.num_edges();
    let scale: Vec<f64> = (0..ne).map(|e| 1.0 / net.sigma(e).sqrt()).collect();
    let pts: Vec<Vec<(usize, f64)>> = family
        .paths
        .iter()
        .map(|p| p.edges.iter().map(|&e| (e, scale[e])).collect())
        .collect();
    let norm2 = |p: &[(usize, f64)]| p.iter().map(|(_, s)| s * s).sum::<f64>();
    let dot = |x: &[f64], p: &[(usize, f64)]| p.iter().map(|(e, s)| x[*e] * s).sum::<f64>();
    let max_norm2 = pts.iter().map(|p| norm2(p)).fold(0.0, f64::max);
    let eps = 1e-15 * max_norm2;

    let j0 = (0..pts.len())
        .min_by(|&i, &j| norm2(&pts[i]).partial_cmp(&norm2(&pts[j])).unwrap())
        .unwrap();
    let mut corral = vec![j0];
    let mut lambda = vec![1.0];
    let point = |corral: &[usize], lambda: &[f64]| {
        let mut x = vec![0.0; ne];
        for (&j, &l) in corral.iter().zip(lambda) {
            for &(e, s) in &pts[j] {
                x[e] += l * s;
            }
        }
        x
    };
    let mut x = point(&corral, &lambda);
    for _major in 0..100_000 {
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let (j, xj) = (0..pts.len())
            .map(|j| (j, dot(&x, &pts[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if xx - xj <= eps || corral.contains(&j) {
            break;
        }
        corral.push(j);
        lambda.push(0.0);
        loop {
            let k = corral.len();
            let mut g = DMatrix::<f64>::from_element(k, k, 1.0);
            for a in 0..k {
                for b in 0..k {
                    let ip: f64 = {
                        let (pa, pb) = (&pts[corral[a]], &pts[corral[b]]);
                        pa.iter()
                            .filter_map(|(e, s)| pb.iter().find(|(f, _)| f == e).map(|(_, t)| s * t))
                            .sum()
                    };
                    g[(a, b)] += ip;
                }
            }
            let Some(xi) = g.lu().solve(&DVector::from_element(k, 1.0)) else {
                corral.pop();
                lambda.pop();
                break;
            };
            let total: f64 = xi.iter().sum();
            let alpha: Vec<f64> = xi.iter().map(|v| v / total).collect();
            if alpha.iter().all(|&a| a > 1e-14) {
                lambda = alpha;
                break;
            }
            let theta = (0..k)
                .filter(|&i| alpha[i] <= 1e-14)
                .map(|i| lambda[i] / (lambda[i] - alpha[i]))
                .fold(f64::INFINITY, f64::min);
            for i in 0..k {
                lambda[i] = theta * alpha[i] + (1.0 - theta) * lambda[i];
            }
            let keep: Vec<bool> = lambda.iter().map(|&l| l > 1e-15).collect();
            let mut idx = 0;
            corral.retain(|_| {
                idx += 1;
                keep[idx - 1]
            });
            lambda.retain(|&l| l > 1e-15);
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
        }
        x = point(&corral, &lambda);
    }
    let xx: f64 = x.iter().map(|v| v * v).sum();
    let mut mass = vec![0.0; family.len()];
    for (&j, &l) in corral.iter().zip(&lambda) {
        mass[j] += l;
    }
    let density = (0..ne).map(|e| x[e] * scale[e] / xx).collect();
    Ok(QpSolution { modulus: 1.0 / xx, density, pmf: Pmf { mass } })
}

/// Modulus of the family of all simple A→B paths, by enumeration.
pub fn brute_force_modulus(net: &PlaneNetwork, max_paths: usize) -> Result<f64, ModulusError> {
    let family = enumerate_paths(net, max_paths)?;
    Ok(family_modulus(net, &family)?.modulus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::network::Edge;

    fn single_edge(sigma: f64) -> PlaneNetwork {
        PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![Edge { id: 0, u: 0, v: 1, sigma, bend: None }],
            vec![0],
            vec![1],
            vec![0, 1],
        )
        .unwrap()
    }

    /// Two parallel routes a→m→b (σ=1 each) plus a direct bent edge a→b (σ=3).
    fn diamond() -> PlaneNetwork {
        PlaneNetwork::new(
            vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 0.0)],
            vec![
                Edge { id: 0, u: 0, v: 1, sigma: 1.0, bend: None },
                Edge { id: 1, u: 1, v: 2, sigma: 1.0, bend: None },
                Edge { id: 2, u: 0, v: 2, sigma: 3.0, bend: Some(Point::new(1.0, -1.0)) },
            ],
            vec![0],
            vec![2],
            vec![0, 2, 1],
        )
        .unwrap()
    }

    #[test]
    fn single_edge_quantities() {
        let net = single_edge(4.0);
        let fam = enumerate_paths(&net, 10).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(rho_length(&fam.paths[0], &[0.0]), 0.0);
        assert!(is_admissible(&fam, &[1.0]));
        assert!(!is_admissible(&fam, &[0.0]));
        assert!((expected_overlap(&net, &fam, &Pmf::uniform(1)) - 0.25).abs() < 1e-15);
        assert!((brute_force_modulus(&net, 10).unwrap() - 4.0).abs() < 1e-12);
        assert!((modulus_from_energy(&single_edge(1.0)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diamond_modulus_matches_energy() {
        let net = diamond();
        let fam = enumerate_paths(&net, 10).unwrap();
        assert_eq!(fam.len(), 2);
        let qp = family_modulus(&net, &fam).unwrap();
        assert!((qp.modulus - 3.5).abs() < 1e-10);
        assert!((modulus_from_energy(&net).unwrap() - 3.5).abs() < 1e-12);
        assert!((qp.density[2] - 1.0).abs() < 1e-10);
        assert!((qp.density[0] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn unused_edge_has_zero_probability() {
        let net = diamond();
        let fam = PathFamily::new(&net, vec![net.path_from_vertices(&[0, 2]).unwrap()]).unwrap();
        assert_eq!(edge_probability(&fam, &Pmf::uniform(1), 0), 0.0);
        assert_eq!(edge_probability(&fam, &Pmf::uniform(1), 2), 1.0);
    }

    #[test]
    fn over_long_path_is_flagged() {
        let net = diamond();
        let fam = enumerate_paths(&net, 10).unwrap();
        let rho = vec![1.0, 1.0, 1.0];
        let rep = verify_beurling(&net, &fam, &rho, &fam, None);
        assert!(rep.admissible);
        assert_eq!(rep.over_long.len(), 1);
        assert!((rep.max_length_deviation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_many_paths() {
        assert_eq!(enumerate_paths(&diamond(), 1).unwrap_err(), ModulusError::TooManyPaths(1));
    }

    #[test]
    fn shortest_rho_length_of_the_extremal_density_is_one() {
        let net = crate::random::random_network(3, 4, 11);
        let h = dirichlet::solve_unit(&net).unwrap().potentials;
        let rho = dirichlet::extremal_density(&net, &h);
        assert!((min_rho_length(&net, &rho) - 1.0).abs() < 1e-12);
        let fam = enumerate_paths(&net, 10_000).unwrap();
        let best = fam.paths.iter().map(|p| rho_length(p, &rho)).fold(f64::INFINITY, f64::min);
        assert!((best - min_rho_length(&net, &rho)).abs() < 1e-12);
    }
}
