use modlab::dirichlet::{self, solve_dirichlet, solve_unit, SolverKind};
use modlab::modulus::{brute_force_modulus, enumerate_paths, modulus_from_energy};
use modlab::ncms::{decompose, flow_decomposition};
use modlab::random::random_network;
use modlab::tiling::build_tiling;
use modlab::{paths_cross, BelowOracle, Edge, PlaneNetwork, Point};
use proptest::prelude::*;
use std::collections::BTreeMap;

fn shapes() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=3, 2usize..=4, any::<u64>())
}

/// The same network with vertex ids permuted by `vperm` and edges listed in reverse.
fn relabel(net: &PlaneNetwork, vperm: &[usize]) -> PlaneNetwork {
    let n = net.num_vertices();
    let mut positions = vec![Point::new(0.0, 0.0); n];
    for v in 0..n {
        positions[vperm[v]] = net.pos(v);
    }
    let m = net.num_edges();
    let edges = net
        .edges()
        .iter()
        .map(|e| Edge { id: m - 1 - e.id, u: vperm[e.v], v: vperm[e.u], sigma: e.sigma, bend: e.bend })
        .rev()
        .collect();
    let map = |xs: &[usize]| xs.iter().map(|&v| vperm[v]).collect();
    PlaneNetwork::new(positions, edges, map(net.boundary_a()), map(net.boundary_b()), map(net.outer_boundary()))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn crossing_is_symmetric((r, c, seed) in shapes(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let net = random_network(r, c, seed);
        let fam = enumerate_paths(&net, 100_000).unwrap();
        let (g1, g2) = (&fam.paths[i.index(fam.len())], &fam.paths[j.index(fam.len())]);
        prop_assert_eq!(paths_cross(&net, g1, g2).unwrap(), paths_cross(&net, g2, g1).unwrap());
        prop_assert!(!paths_cross(&net, g1, g1).unwrap());
    }

    #[test]
    fn brute_force_matches_energy((r, c, seed) in shapes()) {
        let net = random_network(r, c, seed);
        let e = modulus_from_energy(&net).unwrap();
        let q = brute_force_modulus(&net, 100_000).unwrap();
        prop_assert!((e - q).abs() < 1e-6 * e.max(1.0));
    }

    #[test]
    fn decomposition_reproduces_the_current((r, c, seed) in shapes()) {
        let net = random_network(r, c, seed);
        let sol = solve_unit(&net).unwrap();
        let dec = decompose(&net).unwrap();
        prop_assert!((dec.modulus - sol.energy).abs() < 1e-9);
        let flow = dirichlet::current_flow(&net, &sol.potentials).flow;
        let from_paths = flow_decomposition(&net, &dec);
        for e in 0..net.num_edges() {
            prop_assert!((flow[e] - from_paths[e]).abs() < 1e-9);
        }
        for a in &dec.paths {
            for b in &dec.paths {
                prop_assert!(!paths_cross(&net, a, b).unwrap());
            }
        }
    }

    #[test]
    fn later_paths_lie_below_earlier_ones((r, c, seed) in shapes()) {
        let net = random_network(r, c, seed);
        let dec = decompose(&net).unwrap();
        for (i, upper) in dec.paths.iter().enumerate() {
            let oracle = BelowOracle::new(&net, upper).unwrap();
            for lower in &dec.paths[i + 1..] {
                for &e in &lower.edges {
                    prop_assert!(oracle.on_path(e) || oracle.is_below(e));
                }
            }
        }
    }

    #[test]
    fn decomposition_ignores_labels((r, c, seed) in shapes(), shuffle in any::<u64>()) {
        let net = random_network(r, c, seed);
        let n = net.num_vertices();
        let mut vperm: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for k in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            vperm.swap(k, (s >> 33) as usize % (k + 1));
        }
        let other = relabel(&net, &vperm);
        let d1 = decompose(&net).unwrap();
        let d2 = decompose(&other).unwrap();
        prop_assert_eq!(d1.paths.len(), d2.paths.len());
        for ((p, q), (m1, m2)) in d1.paths.iter().zip(&d2.paths).zip(d1.masses.iter().zip(&d2.masses)) {
            let mapped: Vec<usize> = p.vertices.iter().map(|&v| vperm[v]).collect();
            prop_assert_eq!(&mapped, &q.vertices);
            prop_assert!((m1 - m2).abs() < 1e-9);
        }
    }

    #[test]
    fn dirichlet_is_linear_in_the_boundary_data((r, c, seed) in shapes(), alpha in -3.0..3.0f64, beta in -3.0..3.0f64) {
        let net = random_network(r, c, seed);
        let bnd: Vec<usize> = net.boundary_a().iter().chain(net.boundary_b()).copied().collect();
        let f: BTreeMap<usize, f64> = bnd.iter().map(|&v| (v, net.pos(v).y)).collect();
        let g: BTreeMap<usize, f64> = bnd.iter().map(|&v| (v, net.pos(v).x * net.pos(v).x)).collect();
        let combo: BTreeMap<usize, f64> = bnd.iter().map(|&v| (v, alpha * f[&v] + beta * g[&v])).collect();
        let (sf, sg, sc) = (
            solve_dirichlet(&net, &f).unwrap(),
            solve_dirichlet(&net, &g).unwrap(),
            solve_dirichlet(&net, &combo).unwrap(),
        );
        for v in 0..net.num_vertices() {
            let lin = alpha * sf.potentials[v] + beta * sg.potentials[v];
            prop_assert!((sc.potentials[v] - lin).abs() < 1e-9);
        }
        let cg = dirichlet::solve_dirichlet_with(&net, &combo, SolverKind::ConjugateGradient).unwrap();
        for v in 0..net.num_vertices() {
            prop_assert!((cg.potentials[v] - sc.potentials[v]).abs() < 1e-8);
        }
    }

    #[test]
    fn tiling_areas_add_up((r, c, seed) in shapes()) {
        let net = random_network(r, c, seed);
        let h = solve_unit(&net).unwrap().potentials;
        let dec = decompose(&net).unwrap();
        let t = build_tiling(&net, &h, &dec).unwrap();
        let total: f64 = t.rects.iter().filter(|r| !r.degenerate).map(|r| r.area()).sum();
        prop_assert!((total - dec.modulus).abs() < 1e-9);
        let rho = dirichlet::extremal_density(&net, &h);
        for rect in &t.rects {
            prop_assert!((rect.area() - net.sigma(rect.edge) * rho[rect.edge].powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_is_exact((r, c, seed) in shapes()) {
        let net = random_network(r, c, seed);
        let back = PlaneNetwork::from_json(&net.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), net.to_json());
    }
}
