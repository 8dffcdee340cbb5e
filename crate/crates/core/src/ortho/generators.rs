use super::{ArcRole, Color, MapVertex, OrthodiagonalMap, QuadFace};
use crate::geometry::Point;
use std::collections::BTreeMap;

/// Lattice builder: black points on integer coordinates, white points at cell
/// centres keyed by doubled coordinates, one quad per unit lattice edge.
struct Lattice {
    scale: f64,
    black: BTreeMap<(i64, i64), usize>,
    white: BTreeMap<(i64, i64), usize>,
    vertices: Vec<MapVertex>,
    quads: Vec<QuadFace>,
}

impl Lattice {
    fn new(n: usize) -> Self {
        Lattice {
            scale: 1.0 / n as f64,
            black: BTreeMap::new(),
            white: BTreeMap::new(),
            vertices: Vec::new(),
            quads: Vec::new(),
        }
    }

    fn add_black(&mut self, p: i64, q: i64) {
        let id = self.vertices.len();
        self.black.insert((p, q), id);
        let pos = Point::new(p as f64 * self.scale, q as f64 * self.scale);
        self.vertices.push(MapVertex { pos, color: Color::Black });
    }

    /// White vertex at the centre of the cell with lower-left corner (p, q).
    fn white_at(&mut self, p: i64, q: i64) -> usize {
        if let Some(&id) = self.white.get(&(p, q)) {
            return id;
        }
        let id = self.vertices.len();
        self.white.insert((p, q), id);
        let pos = Point::new((p as f64 + 0.5) * self.scale, (q as f64 + 0.5) * self.scale);
        self.vertices.push(MapVertex { pos, color: Color::White });
        id
    }

    fn add_edges(&mut self) {
        let pts: Vec<(i64, i64)> = self.black.keys().copied().collect();
        let mut horizontal = Vec::new();
        let mut vertical = Vec::new();
        for &(p, q) in &pts {
            if self.black.contains_key(&(p + 1, q)) {
                horizontal.push((p, q));
            }
            if self.black.contains_key(&(p, q + 1)) {
                vertical.push((p, q));
            }
        }
        horizontal.sort_by_key(|&(p, q)| (q, p));
        vertical.sort_by_key(|&(p, q)| (p, q));
        for (p, q) in horizontal {
            let below = self.white_at(p, q - 1);
            let above = self.white_at(p, q);
            let v1 = self.black[&(p, q)];
            let v2 = self.black[&(p + 1, q)];
            self.quads.push(QuadFace { corners: [v1, below, v2, above] });
        }
        for (p, q) in vertical {
            let right = self.white_at(p, q);
            let left = self.white_at(p - 1, q);
            let v1 = self.black[&(p, q)];
            let v2 = self.black[&(p, q + 1)];
            self.quads.push(QuadFace { corners: [v1, right, v2, left] });
        }
    }
}

/// Map whose primal network is the square grid of mesh 1/n on [0, L] × [0, 1],
/// with A the left side and B the right side.
pub fn grid_map(l: usize, n: usize) -> OrthodiagonalMap {
    assert!(l >= 1 && n >= 1, "grid dimensions must be positive");
    let (cols, rows) = ((l * n) as i64, n as i64);
    let mut lat = Lattice::new(n);
    for q in 0..=rows {
        for p in 0..=cols {
            lat.add_black(p, q);
        }
    }
    lat.add_edges();
    let role: BTreeMap<usize, ArcRole> = lat
        .black
        .iter()
        .filter_map(|(&(p, q), &id)| {
            let r = if p == 0 {
                ArcRole::S1
            } else if p == cols {
                ArcRole::S2
            } else if q == 0 {
                ArcRole::T1
            } else if q == rows {
                ArcRole::T2
            } else {
                return None;
            };
            Some((id, r))
        })
        .collect();
    OrthodiagonalMap::from_parts(lat.vertices, lat.quads, |v| role.get(&v).copied(), None)
        .expect("grid map is well formed")
}

/// Map whose primal network is the unit square lattice (mesh 1/n) inside the
/// rectangle 0 ≤ x + y ≤ 2L, 0 ≤ y − x ≤ 2, a rectangle of aspect L turned by
/// a quarter of a right angle. A lies on x + y = 0 and B on x + y = 2L.
pub fn rotated_grid_map(l: usize, n: usize) -> OrthodiagonalMap {
    assert!(l >= 1 && n >= 1, "grid dimensions must be positive");
    let (umax, wmax) = ((2 * l * n) as i64, (2 * n) as i64);
    let mut lat = Lattice::new(n);
    for q in -wmax..=umax + wmax {
        for p in -wmax..=umax + wmax {
            let (u, w) = (p + q, q - p);
            if (0..=umax).contains(&u) && (0..=wmax).contains(&w) {
                lat.add_black(p, q);
            }
        }
    }
    lat.add_edges();
    let role: BTreeMap<usize, ArcRole> = lat
        .black
        .iter()
        .filter_map(|(&(p, q), &id)| {
            let (u, w) = (p + q, q - p);
            let r = if u == 0 {
                ArcRole::S1
            } else if u == umax {
                ArcRole::S2
            } else if w == 0 {
                ArcRole::T1
            } else if w == wmax {
                ArcRole::T2
            } else {
                return None;
            };
            Some((id, r))
        })
        .collect();
    OrthodiagonalMap::from_parts(lat.vertices, lat.quads, |v| role.get(&v).copied(), None)
        .expect("rotated grid map is well formed")
}
