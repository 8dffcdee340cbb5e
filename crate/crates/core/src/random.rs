//! Seeded random planar networks: a jittered `rows × cols` lattice with its
//! full outer cycle, a random subset of the inner lattice edges and at most one
//! diagonal per cell. Dropped lattice edges are put back where needed to keep
//! the network connected. A is the left column, B the right column.

use crate::geometry::Point;
use crate::network::{Edge, PlaneNetwork};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_network(rows: usize, cols: usize, seed: u64) -> PlaneNetwork {
    assert!(rows >= 2 && cols >= 2, "need at least a 2 × 2 lattice");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |i: usize, j: usize| j * cols + i;
    let mut positions = Vec::with_capacity(rows * cols);
    for j in 0..rows {
        for i in 0..cols {
            let (dx, dy) = (rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            positions.push(Point::new(i as f64 + dx, j as f64 + dy));
        }
    }
    let on_rim = |i: usize, j: usize, i2: usize, j2: usize| {
        (j == j2 && (j == 0 || j == rows - 1)) || (i == i2 && (i == 0 || i == cols - 1))
    };
    let mut pairs = Vec::new();
    for j in 0..rows {
        for i in 0..cols {
            if i + 1 < cols && (on_rim(i, j, i + 1, j) || rng.random::<f64>() < 0.7) {
                pairs.push((id(i, j), id(i + 1, j)));
            }
            if j + 1 < rows && (on_rim(i, j, i, j + 1) || rng.random::<f64>() < 0.7) {
                pairs.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < cols && j + 1 < rows {
                match rng.random_range(0..3) {
                    0 => pairs.push((id(i, j), id(i + 1, j + 1))),
                    1 => pairs.push((id(i + 1, j), id(i, j + 1))),
                    _ => {}
                }
            }
        }
    }
    reconnect(&mut pairs, rows, cols);
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (u, v))| Edge { id: k, u, v, sigma: rng.random_range(0.5..2.0), bend: None })
        .collect();
    let mut boundary: Vec<usize> = (0..cols).map(|i| id(i, 0)).collect();
    boundary.extend((1..rows).map(|j| id(cols - 1, j)));
    boundary.extend((0..cols - 1).rev().map(|i| id(i, rows - 1)));
    boundary.extend((1..rows - 1).rev().map(|j| id(0, j)));
    let a = (0..rows).rev().map(|j| id(0, j)).collect();
    let b = (0..rows).map(|j| id(cols - 1, j)).collect();
    PlaneNetwork::new(positions, edges, a, b, boundary).expect("random lattice network is well formed")
}

/// Add lattice edges from reached to unreached vertices until everything is
/// reachable from vertex 0. Lattice edges cross neither each other nor diagonals.
fn reconnect(pairs: &mut Vec<(usize, usize)>, rows: usize, cols: usize) {
    let n = rows * cols;
    loop {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in pairs.iter() {
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !std::mem::replace(&mut seen[w], true) {
                    stack.push(w);
                }
            }
        }
        let bridge = (0..n).filter(|&v| !seen[v]).find_map(|v| {
            let (i, j) = (v % cols, v / cols);
            let near = [
                (i > 0).then(|| v - 1),
                (i + 1 < cols).then(|| v + 1),
                (j > 0).then(|| v - cols),
                (j + 1 < rows).then(|| v + cols),
            ];
            near.into_iter().flatten().find(|&w| seen[w]).map(|w| (w.min(v), w.max(v)))
        });
        match bridge {
            Some(edge) => pairs.push(edge),
            None => return,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_networks_are_valid_and_reproducible() {
        for seed in 0..20 {
            let net = random_network(3, 4, seed);
            assert!(net.validate().is_empty(), "{:?}", net.validate());
            assert_eq!(net.to_json(), random_network(3, 4, seed).to_json());
        }
    }

    #[test]
    fn isolated_interior_vertices_are_reattached() {
        // This seed drops every edge at the middle vertex (2, 1).
        let net = random_network(3, 4, 10073950683882856776);
        assert!(net.edges().iter().any(|e| e.u == 6 || e.v == 6));
        crate::dirichlet::solve_unit(&net).unwrap();
    }
}
