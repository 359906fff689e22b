use super::*;
use crate::io::gen::{gen_lower_bound, gen_random_planar, RandomPlanar};
use crate::planar::Point;
use crate::testutil::random_small_planar;
use proptest::prelude::*;

fn star() -> PlanarGraph {
    // center 1, leaves 2, 3, 4 on spokes of weight 5, 3, 7
    let pts = [Point::units(0, 0), Point::units(1, 0), Point::units(0, 1), Point::units(-1, -1)];
    PlanarGraph::build_embedding(&pts, &[(1, 2, 5), (1, 3, 3), (1, 4, 7)]).unwrap()
}

fn c4() -> PlanarGraph {
    let pts = [Point::units(0, 0), Point::units(1, 0), Point::units(1, 1), Point::units(0, 1)];
    PlanarGraph::build_embedding(&pts, &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, 1)]).unwrap()
}

fn triangle() -> PlanarGraph {
    let pts = [Point::units(0, 0), Point::units(1, 0), Point::units(0, 1)];
    PlanarGraph::build_embedding(&pts, &[(1, 2, 1), (2, 3, 1), (3, 1, 1)]).unwrap()
}

/// Tree given by edges over local vertices, with no cut links behind it.
fn bare_tree(n: usize, edges: &[(u32, u32, Weight)]) -> GomoryHuTree {
    GomoryHuTree {
        vids: (1..=n as u32).collect(),
        edges: edges
            .iter()
            .enumerate()
            .map(|(k, &(a, b, w))| GhEdge { a, b, w, link: CutLink::Edge(k as u32) })
            .collect(),
        cuts: None,
    }
}

/// Full check of the tree and oracle against max-flow and explicit cuts.
fn check_gh(g: &PlanarGraph) {
    let t = gomory_hu(g).unwrap();
    assert_eq!(t.edges.len(), g.n() - 1);
    for k in 0..t.edges.len() {
        let side = t.side_of_edge(k);
        let want: Vec<u32> = crossing_edges(g, &side).iter().map(|&e| g.edge(e).id).collect();
        assert_eq!(t.cut_edges(k).unwrap(), want, "cut of tree edge {k}");
        assert_eq!(g.weight_of(&crossing_edges(g, &side)), t.edges[k].w);
    }
    let o = build_mincut_oracle(t.clone());
    for u in 0..g.n() as u32 {
        for v in u + 1..g.n() as u32 {
            let k = t.path_min_naive(u, v).unwrap();
            let flow = maxflow_reference(g, g.vid(u), g.vid(v)).unwrap();
            assert_eq!(t.edges[k].w, flow, "pair {u} {v}");
            let (_, w, reads) = o.query_counted(u, v).unwrap();
            assert_eq!(w, flow);
            assert!(reads <= 12);
            let cut = query_cut(&o, g.vid(u), g.vid(v)).unwrap();
            let local: Vec<u32> = cut.iter().map(|&e| g.local_edge(e).unwrap()).collect();
            assert_eq!(g.weight_of(&local), flow);
            assert!(separates(g, &cut, u, v));
        }
    }
}

#[test]
fn test_weight_vector_small() {
    let g = gen_lower_bound(5).unwrap().build().unwrap();
    assert_eq!(weight_vector(&recursive_gmcb(&g).unwrap()), vec![1, 1, 1]);
    assert_eq!(weight_vector(&recursive_gmcb(&triangle()).unwrap()), vec![3]);
}

#[test]
fn test_weight_vector_matches_oracle() {
    for seed in 0..20 {
        let g = random_small_planar(seed, 10 + 3 * seed as usize, 16);
        if !g.is_connected() {
            continue;
        }
        let mut want = crate::gmcb_oracle::greedy_mcb_explicit(&g).unwrap().weights();
        want.sort_unstable();
        assert_eq!(weight_vector(&recursive_gmcb(&g).unwrap()), want);
    }
}

#[test]
fn test_star_is_its_own_tree() {
    let g = star();
    let t = gomory_hu(&g).unwrap();
    let mut es: Vec<(u32, u32, Weight)> = t.edges.iter().map(|e| (e.a.min(e.b), e.a.max(e.b), e.w)).collect();
    es.sort();
    assert_eq!(es, vec![(0, 1, 5), (0, 2, 3), (0, 3, 7)]);
    assert_eq!(maxflow_reference(&g, 2, 4), Ok(5));
    let o = build_mincut_oracle(t);
    assert_eq!(query_weight(&o, 2, 3), Ok(3));
    assert_eq!(query_cut(&o, 3, 1), Ok(vec![1]));
    assert_eq!(query_weight(&o, 2, 2), Err(CutError::SameVertex));
    assert_eq!(query_cut(&o, 4, 4), Err(CutError::SameVertex));
}

#[test]
fn test_single_edge_flow() {
    let g = PlanarGraph::build_embedding(&[Point::units(0, 0), Point::units(1, 0)], &[(1, 2, 9)]).unwrap();
    assert_eq!(maxflow_reference(&g, 1, 2), Ok(9));
    assert_eq!(maxflow_reference(&g, 1, 1), Err(CutError::SameVertex));
    assert_eq!(maxflow_reference(&g, 1, 7), Err(CutError::UnknownVertex(7)));
}

#[test]
fn test_c4_all_pairs_two() {
    let g = c4();
    for u in 1..=4 {
        for v in u + 1..=4 {
            assert_eq!(maxflow_reference(&g, u, v), Ok(2));
        }
    }
    let t = gomory_hu(&g).unwrap();
    assert!(t.edges.iter().all(|e| e.w == 2));
    let o = build_mincut_oracle(t);
    assert_eq!(query_weight(&o, 1, 3), Ok(2));
    for u in 1..=4 {
        for v in u + 1..=4 {
            let cut = query_cut(&o, u, v).unwrap();
            assert_eq!(cut.len(), 2);
            assert!(separates(&g, &cut, u - 1, v - 1));
        }
    }
    check_gh(&g);
}

#[test]
fn test_apmc_cuts_are_min_cuts() {
    for seed in 0..8 {
        let g = random_small_planar(seed, 14, 9);
        if !g.is_connected() || g.m() + 1 == g.n() {
            continue;
        }
        let ap = apmc(&g).unwrap();
        let mut fv = ap.face_vertex.clone();
        fv.sort_unstable();
        assert_eq!(fv, (0..g.n() as u32).collect::<Vec<_>>());
        for (x, r) in ap.imcb.regions.iter().enumerate().skip(1) {
            let p = ap.imcb.regions[r.parent.unwrap() as usize].face;
            let (a, b) = (ap.face_vertex[r.face as usize], ap.face_vertex[p as usize]);
            let w = ap.imcb.triples[x - 1].w;
            assert_eq!(maxflow_reference(&g, g.vid(a), g.vid(b)), Ok(w));
            let cut = ap.cut_edges(x - 1).unwrap();
            assert!(separates(&g, &cut, a, b));
        }
    }
}

#[test]
fn test_tree_input_handled_directly() {
    let g = star();
    // the dual is one vertex with three loops; subdivided, each loop is a
    // triangle whose cut is a single spoke
    let ap = apmc(&g).unwrap();
    assert_eq!(weight_vector(&ap.imcb), vec![3, 5, 7]);
    let mut cuts: Vec<Vec<u32>> = (0..3).map(|t| ap.cut_edges(t).unwrap()).collect();
    cuts.sort();
    assert_eq!(cuts, vec![vec![0], vec![1], vec![2]]);
    let t = gomory_hu(&g).unwrap();
    assert!(t.edges.iter().all(|e| matches!(e.link, CutLink::Edge(_))));
}

#[test]
fn test_disconnected_rejected() {
    let pts = [Point::units(0, 0), Point::units(1, 0), Point::units(5, 5)];
    let g = PlanarGraph::build_embedding(&pts, &[(1, 2, 1)]).unwrap();
    assert_eq!(gomory_hu(&g).unwrap_err(), CutError::Disconnected);
}

#[test]
fn test_random_gh_against_maxflow() {
    let mut done = 0;
    for seed in 0..30 {
        let g = random_small_planar(seed, 6 + seed as usize, 16);
        if g.is_connected() {
            check_gh(&g);
            done += 1;
        }
    }
    for seed in 0..6 {
        let mut rp = RandomPlanar::new(40, seed);
        rp.thin = 0.3 * (seed % 3) as f64;
        check_gh(&gen_random_planar(rp).unwrap().build().unwrap());
        done += 1;
    }
    assert!(done >= 20);
}

#[test]
fn test_path_tree_query() {
    let t = bare_tree(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 2)]);
    let o = build_mincut_oracle(t);
    assert_eq!(query_weight(&o, 1, 4), Ok(1));
    assert_eq!(query_weight(&o, 1, 2), Ok(3));
    assert_eq!(query_weight(&o, 4, 3), Ok(2));
}

fn random_tree(seed: u64, n: usize) -> GomoryHuTree {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<(u32, u32, Weight)> = (1..n as u32)
        .map(|v| {
            // mix of long paths and bushy nodes
            let p = if rng.gen_bool(0.5) { v - 1 } else { rng.gen_range(0..v) };
            (p, v, rng.gen_range(0..20))
        })
        .collect();
    bare_tree(n, &edges)
}

#[test]
fn test_oracle_random_trees_all_pairs() {
    for seed in 0..6 {
        let n = [2, 3, 17, 64, 150, 256][seed as usize];
        let t = random_tree(seed, n);
        let o = build_mincut_oracle(t.clone());
        assert!(o.stats.unsplit == 0, "{:?}", o.stats);
        let target = (n as f64).sqrt().ceil() as usize;
        assert!(o.stats.max_piece <= target.max(2), "{:?}", o.stats);
        for u in 0..n as u32 {
            for v in 0..n as u32 {
                if u == v {
                    continue;
                }
                let (_, w, reads) = o.query_counted(u, v).unwrap();
                assert_eq!(w, t.edges[t.path_min_naive(u, v).unwrap()].w, "{u} {v}");
                assert!(reads <= 12);
            }
        }
    }
}

#[test]
fn test_oracle_neighbor_query_is_edge_weight() {
    let t = random_tree(9, 100);
    let o = build_mincut_oracle(t.clone());
    for e in &t.edges {
        let w = o.query_counted(e.a, e.b).unwrap().1;
        assert!(w <= e.w);
        assert_eq!(w, t.edges[t.path_min_naive(e.a, e.b).unwrap()].w);
    }
}

#[test]
fn test_oracle_sizes_scale_with_sqrt() {
    let n = 4096;
    let o = build_mincut_oracle(random_tree(4, n));
    // |S| and |B| are O(sqrt n); the constants here are loose
    assert!(o.stats.pieces <= 8 * 64, "{:?}", o.stats);
    assert!(o.stats.boundary <= 8 * 64, "{:?}", o.stats);
    assert!(o.stats.array_words <= 40 * n * 64, "{:?}", o.stats);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn test_prop_oracle_equals_path_min(seed in 0u64..10_000, n in 2usize..90) {
        let t = random_tree(seed, n);
        let o = build_mincut_oracle(t.clone());
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                let (_, w, reads) = o.query_counted(u, v).unwrap();
                prop_assert_eq!(w, t.edges[t.path_min_naive(u, v).unwrap()].w);
                prop_assert!(reads <= 12);
            }
        }
    }
}
