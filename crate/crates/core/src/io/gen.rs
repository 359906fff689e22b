//! Graph generators: the lower-bound family and seeded random Delaunay
//! graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::planar::{orient, PlanarGraph, PlanarError, Point, UnionFind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("need at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Vertex and edge lists ready for [`PlanarGraph::build_embedding`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    pub points: Vec<Point>,
    pub edges: Vec<(u32, u32, i64)>,
}

impl GraphSpec {
    pub fn build(&self) -> Result<PlanarGraph, PlanarError> {
        PlanarGraph::build_embedding(&self.points, &self.edges)
    }

    /// Same graph with every weight set to 1.
    pub fn unweighted(mut self) -> Self {
        self.edges.iter_mut().for_each(|e| e.2 = 1);
        self
    }
}

/// The lower-bound family: a weight-0 path `v1 .. vn` plus weight-1 chords
/// `(v1, v_{i+2})`, on the convex arc `(i, i^2)`.
pub fn gen_lower_bound(n: usize) -> Result<GraphSpec, GenError> {
    if n < 3 {
        return Err(GenError::TooSmall(n));
    }
    let points = (0..n as i64).map(|i| Point::units(i, i * i)).collect();
    let mut edges = Vec::with_capacity(2 * n - 3);
    for i in 1..n as u32 {
        edges.push((i, i + 1, 0));
    }
    for i in 3..=n as u32 {
        edges.push((1, i, 1));
    }
    Ok(GraphSpec { points, edges })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomPlanar {
    pub n: usize,
    pub seed: u64,
    /// Weights are uniform in `0..=max_weight`.
    pub max_weight: u64,
    /// Probability of dropping each edge outside a random spanning tree.
    pub thin: f64,
}

impl RandomPlanar {
    pub fn new(n: usize, seed: u64) -> Self {
        RandomPlanar { n, seed, max_weight: 16, thin: 0.0 }
    }
}

/// Coordinates live on a 2^20 grid, i.e. in `[0, 1.048576)` after scaling.
const GRID: i64 = 1 << 20;

/// Delaunay triangulation of seeded random points with random integer
/// weights, optionally thinned while staying connected.
pub fn gen_random_planar(cfg: RandomPlanar) -> Result<GraphSpec, GenError> {
    if cfg.n < 3 {
        return Err(GenError::TooSmall(cfg.n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (points, tris) = loop {
        let mut seen = std::collections::HashSet::new();
        let mut pts = Vec::with_capacity(cfg.n);
        while pts.len() < cfg.n {
            let p = Point::new(rng.gen_range(0..GRID), rng.gen_range(0..GRID));
            if seen.insert(p) {
                pts.push(p);
            }
        }
        if let Some(t) = delaunay(&pts) {
            break (pts, t);
        }
    };
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(3 * cfg.n);
    for t in tris.chunks(3) {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            pairs.push((a.min(b), a.max(b)));
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    let mut keep = vec![true; pairs.len()];
    if cfg.thin > 0.0 {
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.shuffle(&mut rng);
        let mut uf = UnionFind::new(cfg.n);
        let mut tree = vec![false; pairs.len()];
        for &i in &order {
            tree[i] = uf.union(pairs[i].0, pairs[i].1);
        }
        for &i in &order {
            if !tree[i] && rng.gen_bool(cfg.thin) {
                keep[i] = false;
            }
        }
    }
    let edges = pairs
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(&(a, b), _)| (a + 1, b + 1, rng.gen_range(0..=cfg.max_weight) as i64))
        .collect();
    Ok(GraphSpec { points, edges })
}

fn incircle(a: Point, b: Point, c: Point, d: Point) -> i128 {
    let (adx, ady) = ((a.x - d.x) as i128, (a.y - d.y) as i128);
    let (bdx, bdy) = ((b.x - d.x) as i128, (b.y - d.y) as i128);
    let (cdx, cdy) = ((c.x - d.x) as i128, (c.y - d.y) as i128);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

const NO: u32 = u32::MAX;

/// Sweep-hull triangulation followed by Lawson flips. Returns triangles as
/// counterclockwise vertex triples, or `None` when the first three points
/// in sweep order are collinear.
fn delaunay(pts: &[Point]) -> Option<Vec<u32>> {
    let n = pts.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&i| pts[i as usize]);
    let (a, b, c) = (order[0], order[1], order[2]);
    let o = orient(pts[a as usize], pts[b as usize], pts[c as usize]);
    if o == 0 {
        return None;
    }
    let mut tv: Vec<u32> = Vec::with_capacity(6 * n);
    let mut he: Vec<u32> = Vec::with_capacity(6 * n);
    let (a, b) = if o > 0 { (a, b) } else { (b, a) };
    tv.extend([a, b, c]);
    he.extend([NO, NO, NO]);
    let mut hnext = vec![NO; n];
    let mut hprev = vec![NO; n];
    // hull edge x -> hnext[x] is the triangle halfedge htri[x]
    let mut htri = vec![NO; n];
    hnext[a as usize] = b;
    hnext[b as usize] = c;
    hnext[c as usize] = a;
    hprev[b as usize] = a;
    hprev[c as usize] = b;
    hprev[a as usize] = c;
    htri[a as usize] = 0;
    htri[b as usize] = 1;
    htri[c as usize] = 2;
    let mut stack = Vec::new();
    let mut q = order[2];
    for &p in &order[3..] {
        let pp = pts[p as usize];
        let vis = |x: u32, y: u32| orient(pts[x as usize], pts[y as usize], pp) < 0;
        let mut fwd = Vec::new();
        let mut x = q;
        while vis(x, hnext[x as usize]) {
            fwd.push(x);
            x = hnext[x as usize];
            if x == q {
                break;
            }
        }
        let x_end = x;
        let mut bwd = Vec::new();
        let mut y = q;
        while vis(hprev[y as usize], y) && !fwd.contains(&hprev[y as usize]) {
            y = hprev[y as usize];
            bwd.push(y);
        }
        let y_end = y;
        assert!(!fwd.is_empty() || !bwd.is_empty(), "sweep point sees no hull edge");
        // forward triangles (x_{i+1}, x_i, p)
        let mut prev_pb: u32 = NO; // halfedge p -> x_i of the previous forward triangle
        let mut first_fwd_xp = NO;
        for &xi in &fwd {
            let xn = hnext[xi as usize];
            let t = tv.len() as u32;
            tv.extend([xn, xi, p]);
            he.extend([NO, NO, NO]);
            link(&mut he, t, htri[xi as usize]);
            if prev_pb != NO {
                link(&mut he, t + 1, prev_pb);
            } else {
                first_fwd_xp = t + 1;
            }
            prev_pb = t + 2;
            stack.push(t);
        }
        let last_fwd_px = prev_pb;
        // backward triangles (y_j, y_{j+1}, p) for hull edge y_{j+1} -> y_j
        let mut prev_yp: u32 = NO; // halfedge y_j -> p of the previous backward triangle
        let mut first_bwd_py = NO;
        let mut cur = q;
        for &yn in &bwd {
            let t = tv.len() as u32;
            tv.extend([cur, yn, p]);
            he.extend([NO, NO, NO]);
            link(&mut he, t, htri[yn as usize]);
            if prev_yp != NO {
                link(&mut he, t + 2, prev_yp);
            } else {
                first_bwd_py = t + 2;
            }
            prev_yp = t + 1;
            stack.push(t);
            cur = yn;
        }
        let last_bwd_yp = prev_yp;
        if first_fwd_xp != NO && first_bwd_py != NO {
            link(&mut he, first_fwd_xp, first_bwd_py);
        }
        // new hull: y_end -> p -> x_end
        for &xi in fwd.iter().skip(1) {
            hnext[xi as usize] = NO;
        }
        for &yi in bwd.iter().take(bwd.len().saturating_sub(1)) {
            hnext[yi as usize] = NO;
        }
        if !fwd.is_empty() && !bwd.is_empty() {
            hnext[q as usize] = NO;
        }
        hnext[y_end as usize] = p;
        hprev[p as usize] = y_end;
        hnext[p as usize] = x_end;
        hprev[x_end as usize] = p;
        htri[y_end as usize] = if last_bwd_yp != NO { last_bwd_yp } else { first_fwd_xp };
        htri[p as usize] = if last_fwd_px != NO { last_fwd_px } else { first_bwd_py };
        // Lawson flips on the edges opposite p
        while let Some(t) = stack.pop() {
            legalize(pts, &mut tv, &mut he, &mut htri, 3 * (t / 3), &mut stack);
        }
        q = p;
    }
    Some(tv)
}

fn link(he: &mut [u32], a: u32, b: u32) {
    he[a as usize] = b;
    if b != NO {
        he[b as usize] = a;
    }
}

#[inline]
fn nxt(h: u32) -> u32 {
    if h % 3 == 2 {
        h - 2
    } else {
        h + 1
    }
}

/// Flip halfedge `h` (the first of its triangle) while the opposite vertex
/// lies inside the circumcircle; queues the two outer edges after a flip.
fn legalize(pts: &[Point], tv: &mut [u32], he: &mut [u32], htri: &mut [u32], h: u32, stack: &mut Vec<u32>) {
    let g = he[h as usize];
    if g == NO {
        return;
    }
    // triangle 1: a -> b (h), b -> p, p -> a ; triangle 2: b -> a (g), a -> o, o -> b
    let (h1, h2) = (nxt(h), nxt(nxt(h)));
    let (g1, g2) = (nxt(g), nxt(nxt(g)));
    let (a, b, p) = (tv[h as usize], tv[h1 as usize], tv[h2 as usize]);
    let o = tv[g2 as usize];
    let pt = |v: u32| pts[v as usize];
    if incircle(pt(a), pt(b), pt(p), pt(o)) <= 0 {
        return;
    }
    let (e_g1, e_g2, e_h1, e_h2) = (he[g1 as usize], he[g2 as usize], he[h1 as usize], he[h2 as usize]);
    let t1 = 3 * (h / 3);
    let t2 = 3 * (g / 3);
    // t1 = [a, o, p]: a->o, o->p, p->a ; t2 = [o, b, p]: o->b, b->p, p->o
    tv[t1 as usize] = a;
    tv[t1 as usize + 1] = o;
    tv[t1 as usize + 2] = p;
    tv[t2 as usize] = o;
    tv[t2 as usize + 1] = b;
    tv[t2 as usize + 2] = p;
    link(he, t1, e_g1);
    link(he, t1 + 1, t2 + 2);
    link(he, t1 + 2, e_h2);
    link(he, t2, e_g2);
    link(he, t2 + 1, e_h1);
    for (hh, ext) in [(t1, e_g1), (t1 + 2, e_h2), (t2, e_g2), (t2 + 1, e_h1)] {
        if ext == NO {
            htri[tv[hh as usize] as usize] = hh;
        }
    }
    stack.push(t1);
    stack.push(t2);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_lower_bound_counts() {
        let g = gen_lower_bound(5).unwrap().build().unwrap();
        assert_eq!(g.m(), 7);
        let mut w: Vec<u64> = gen_lower_bound(3).unwrap().build().unwrap().edges().iter().map(|e| e.w).collect();
        w.sort();
        assert_eq!(w, vec![0, 0, 1]);
        assert_eq!(gen_lower_bound(2), Err(GenError::TooSmall(2)));
    }

    #[test]
    fn test_random_deterministic_and_valid() {
        for seed in 0..20 {
            let cfg = RandomPlanar::new(3 + seed as usize * 7, seed);
            let a = gen_random_planar(cfg).unwrap();
            assert_eq!(a, gen_random_planar(cfg).unwrap());
            let g = a.build().unwrap();
            assert!(g.is_connected());
            assert!(g.m() <= 3 * g.n() - 6 || g.n() == 3);
        }
    }

    #[test]
    fn test_delaunay_empty_circles() {
        let cfg = RandomPlanar::new(300, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut pts = Vec::new();
        let mut seen = std::collections::HashSet::new();
        while pts.len() < 300 {
            let p = Point::new(rng.gen_range(0..GRID), rng.gen_range(0..GRID));
            if seen.insert(p) {
                pts.push(p);
            }
        }
        let tris = delaunay(&pts).unwrap();
        for t in tris.chunks(3) {
            let (a, b, c) = (pts[t[0] as usize], pts[t[1] as usize], pts[t[2] as usize]);
            assert!(orient(a, b, c) > 0);
            for (i, &d) in pts.iter().enumerate() {
                if !t.contains(&(i as u32)) {
                    assert!(incircle(a, b, c, d) <= 0);
                }
            }
        }
        // a triangulation of n points with h hull points has 2n - 2 - h triangles
        let g = gen_random_planar(cfg).unwrap().build().unwrap();
        let h = g.faces()[g.ext_face(0).unwrap() as usize].darts.len();
        assert_eq!(tris.len() / 3, 2 * 300 - 2 - h);
    }

    #[test]
    fn test_thinning_keeps_connectivity() {
        let mut cfg = RandomPlanar::new(200, 5);
        cfg.thin = 0.5;
        let full = gen_random_planar(RandomPlanar::new(200, 5)).unwrap();
        let g = gen_random_planar(cfg).unwrap().build().unwrap();
        assert!(g.is_connected());
        assert!(g.m() < full.edges.len());
    }
}
