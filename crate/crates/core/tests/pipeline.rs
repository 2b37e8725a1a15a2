use std::collections::VecDeque;
use std::f64::consts::PI;

use packlab_core::decimate::DecimationMode;
use packlab_core::pointfield::sample_poisson_stream;
use packlab_core::vcover::SimpleGraph;
use packlab_core::*;
use proptest::prelude::*;

fn brute_edges(cfg: &PointConfiguration, d: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..cfg.len() {
        for j in i + 1..cfg.len() {
            let dx: Vec<f64> = cfg
                .point(i)
                .iter()
                .zip(cfg.point(j))
                .map(|(a, b)| {
                    let side = cfg.box_spec().side();
                    let t = (a - b).abs() % side;
                    t.min(side - t)
                })
                .collect();
            if dx.iter().map(|x| x * x).sum::<f64>().sqrt() <= d {
                out.push((i, j));
            }
        }
    }
    out
}

fn bfs_components(n: usize, edges: &[(usize, usize)]) -> Vec<(Vec<usize>, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        let mut verts = Vec::new();
        while let Some(v) = q.pop_front() {
            verts.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        verts.sort_unstable();
        let e = edges.iter().filter(|(a, _)| verts.binary_search(a).is_ok()).count();
        comps.push((verts, e));
    }
    comps
}

fn brute_cover_size(verts: &[usize], edges: &[(usize, usize)]) -> usize {
    let local: Vec<(usize, usize)> = edges
        .iter()
        .filter(|(a, _)| verts.binary_search(a).is_ok())
        .map(|(a, b)| (verts.binary_search(a).unwrap(), verts.binary_search(b).unwrap()))
        .collect();
    (0u32..1 << verts.len())
        .filter(|s| local.iter().all(|&(a, b)| s >> a & 1 == 1 || s >> b & 1 == 1))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

#[test]
fn census_matches_breadth_first_search() {
    let bx = BoxSpec::torus(2, 6.0).unwrap();
    for t in 0..20 {
        let cfg = sample_poisson_stream(&bx, 1.0, 31, t).unwrap();
        let d = 0.45 + 0.01 * t as f64;
        let edges = brute_edges(&cfg, d);
        let census = component_census(&build_graph(&cfg, d).unwrap());
        let comps = bfs_components(cfg.len(), &edges);
        assert_eq!(census.m, edges.len());
        assert_eq!(census.m1, comps.iter().filter(|(v, e)| v.len() == 2 && *e == 1).count());
        assert_eq!(census.m2, comps.iter().filter(|(v, e)| v.len() == 3 && *e == 2).count());
        assert_eq!(census.m3, comps.iter().filter(|(v, e)| v.len() == 3 && *e == 3).count());
        assert_eq!(census.components.len(), comps.len());
    }
}

#[test]
fn exact_decimation_removes_a_minimum_cover() {
    let bx = BoxSpec::torus(2, 5.0).unwrap();
    for t in 0..30 {
        let cfg = sample_poisson_stream(&bx, 1.0, 5, t).unwrap();
        let d = 0.5;
        let res = decimate(&cfg, d, DecimationMode::Exact).unwrap();
        let edges = brute_edges(&cfg, d);
        let comps = bfs_components(cfg.len(), &edges);
        if comps.iter().all(|(v, _)| v.len() <= 16) {
            let expected: usize = comps
                .iter()
                .filter(|(v, _)| v.len() > 1)
                .map(|(v, _)| brute_cover_size(v, &edges))
                .sum();
            assert_eq!(res.cover_total, expected);
        }
        for &(a, b) in &edges {
            assert!(res.removed.binary_search(&a).is_ok() || res.removed.binary_search(&b).is_ok());
        }
        assert!(res.check_bounds().certified());
    }
}

#[test]
fn expected_edge_count_in_one_and_three_dimensions() {
    // v_1(d) = 2d, v_3(d) = 4 pi d^3 / 3
    let m1 = expected_m(1, 10.0, 0.3, 2.0).unwrap();
    assert!((m1 - 4.0 * 0.6 * 20.0 / 2.0).abs() < 1e-12);
    let m3 = expected_m(3, 3.0, 0.4, 1.0).unwrap();
    assert!((m3 - 4.0 / 3.0 * PI * 0.064 * 216.0 / 2.0).abs() < 1e-10);
}

#[test]
fn dispersion_subset_achieves_the_reported_spacing() {
    let bx = BoxSpec::torus(2, 2.0).unwrap();
    for t in 0..10 {
        let mut cfg = sample_poisson_stream(&bx, 1.5, 77, t).unwrap();
        if cfg.len() > 14 {
            cfg = cfg.select(&(0..14).collect::<Vec<_>>());
        }
        if cfg.len() < 4 {
            continue;
        }
        let disp = delta_nu_exact(&cfg, 3).unwrap();
        let sub = cfg.select(&disp.subset);
        assert_eq!(min_spacing(&sub).unwrap(), disp.best_min_distance);
    }
}

#[test]
fn cover_of_odd_cycle_and_star() {
    let c7 = SimpleGraph::cycle(7);
    assert_eq!(min_vertex_cover(&c7).unwrap().size, 4);
    let star = SimpleGraph::star(5);
    assert_eq!(min_vertex_cover(&star).unwrap().cover, vec![0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decimated_points_are_more_than_d_apart(seed in any::<u64>(), d in 0.2f64..0.9, auto in any::<bool>()) {
        let bx = BoxSpec::torus(2, 4.0).unwrap();
        let cfg = sample_poisson(&bx, 1.0, seed).unwrap();
        prop_assume!(cfg.len() >= 2);
        let mode = if auto { DecimationMode::Auto } else { DecimationMode::Constructive };
        match decimate(&cfg, d, mode) {
            Ok(res) => {
                if res.tau_len() >= 2 {
                    prop_assert!(min_spacing(&res.tau).unwrap() > d);
                }
                prop_assert_eq!(res.kept.len() + res.removed.len(), cfg.len());
                prop_assert!(res.check_bounds().within_lower1);
            }
            Err(e) => prop_assert_eq!(e, Error::FullyDecimated),
        }
    }

    #[test]
    fn torus_distance_never_exceeds_euclidean(
        a in prop::collection::vec(-3.0f64..3.0, 3),
        b in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let bx = BoxSpec::torus(3, 3.0).unwrap();
        let euclid = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(torus_distance(&a, &b, &bx).unwrap() <= euclid + 1e-12);
    }
}
