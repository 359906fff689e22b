//! Small random plane graphs for unit tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::planar::{segments_conflict, Edge, PlanarGraph, Point, UnionFind};

/// Greedy straight-line graph on `n` random grid points: candidate pairs
/// are added shortest first when they cross nothing, then about a third of
/// the non-spanning-tree edges are dropped. Weights are in `0..=max_w`.
pub(crate) fn random_small_planar(seed: u64, n: usize, max_w: u64) -> PlanarGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut pts: Vec<Point> = Vec::new();
    while pts.len() < n {
        let p = Point::new(rng.gen_range(0..50), rng.gen_range(0..50));
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let (dx, dy) = (pts[a].x - pts[b].x, pts[a].y - pts[b].y);
            pairs.push((dx * dx + dy * dy, a as u32, b as u32));
        }
    }
    pairs.sort();
    let mut chosen: Vec<Edge> = Vec::new();
    for &(_, a, b) in &pairs {
        let e = Edge { u: a, v: b, w: 0, id: 0 };
        if chosen.iter().all(|f| !segments_conflict(&pts, &e, f)) {
            chosen.push(e);
        }
    }
    chosen.shuffle(&mut rng);
    let mut uf = UnionFind::new(n);
    let mut keep = Vec::new();
    let mut rest = Vec::new();
    for e in chosen {
        if uf.union(e.u, e.v) {
            keep.push(e);
        } else {
            rest.push(e);
        }
    }
    for e in rest {
        if rng.gen_bool(0.66) {
            keep.push(e);
        }
    }
    let edges: Vec<(u32, u32, i64)> =
        keep.iter().map(|e| (e.u + 1, e.v + 1, rng.gen_range(0..=max_w) as i64)).collect();
    PlanarGraph::build_embedding(&pts, &edges).expect("greedy graph is plane")
}
