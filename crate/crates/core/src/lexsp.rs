//! Lex-shortest path trees.
//!
//! Every edge weight gets a symbolic epsilon, carried exactly as a hop
//! count, and remaining ties between equal-length paths are broken in favor
//! of the path whose symmetric difference holds the smallest vertex id. The
//! comparison runs in O(log n) with binary lifting tables built as vertices
//! are finalized.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::ops::Add;

use thiserror::Error;

use crate::planar::{PlanarGraph, Weight};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexError {
    #[error("vertex {0} is not finalized yet")]
    NotFinalized(u32),
    #[error("vertex {anc} is not an ancestor of {a}")]
    NotAncestor { a: u32, anc: u32 },
    #[error("graph is disconnected")]
    Disconnected,
}

/// Path length as (weight, hop count); compares lexicographically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexWeight {
    pub w: Weight,
    pub hops: u32,
}

impl LexWeight {
    pub const ZERO: LexWeight = LexWeight { w: 0, hops: 0 };

    pub fn edge(w: Weight) -> Self {
        LexWeight { w, hops: 1 }
    }
}

impl Add for LexWeight {
    type Output = LexWeight;
    fn add(self, o: LexWeight) -> LexWeight {
        LexWeight { w: self.w + o.w, hops: self.hops + o.hops }
    }
}

const NONE: u32 = u32::MAX;

/// Shortest path tree without lifting tables. Indices are local to the
/// graph the tree was computed in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpTree {
    pub root: u32,
    /// Parent vertex, `u32::MAX` at the root.
    pub parent: Vec<u32>,
    /// Local edge to the parent, `u32::MAX` at the root.
    pub parent_edge: Vec<u32>,
    pub dist: Vec<LexWeight>,
}

impl SpTree {
    pub fn depth(&self, v: u32) -> u32 {
        self.dist[v as usize].hops
    }

    /// Vertices on the path from `v` up to the root, `v` first.
    pub fn path_to_root(&self, mut v: u32) -> Vec<u32> {
        let mut out = vec![v];
        while self.parent[v as usize] != NONE {
            v = self.parent[v as usize];
            out.push(v);
        }
        out
    }
}

/// A lex-shortest path tree with its lifting tables.
#[derive(Clone, Debug)]
pub struct LexSpt {
    pub tree: SpTree,
    /// Global vertex ids, used for all index comparisons.
    gid: Vec<u32>,
    levels: usize,
    /// `up[i * n + u]`: ancestor 2^i edges above `u`, or `NONE`.
    up: Vec<u32>,
    /// `mins[i * n + u]`: smallest id among the 2^i vertices starting at `u`
    /// going up (the ancestor itself excluded).
    mins: Vec<u32>,
    finalized: Vec<bool>,
}

impl LexSpt {
    fn n(&self) -> usize {
        self.gid.len()
    }

    fn build_tables(&mut self, u: u32) {
        let n = self.n();
        let p = self.tree.parent[u as usize];
        let u = u as usize;
        self.up[u] = p;
        self.mins[u] = self.gid[u];
        for i in 1..self.levels {
            let mid = self.up[(i - 1) * n + u];
            if mid == NONE {
                self.up[i * n + u] = NONE;
                continue;
            }
            self.up[i * n + u] = self.up[(i - 1) * n + mid as usize];
            if self.up[i * n + u] == NONE {
                continue;
            }
            self.mins[i * n + u] = self.mins[(i - 1) * n + u].min(self.mins[(i - 1) * n + mid as usize]);
        }
        self.finalized[u] = true;
    }

    fn depth_of(&self, u: u32) -> u32 {
        self.tree.dist[u as usize].hops
    }

    /// Compare the path into `v` through `p` with the one through `q`, both
    /// of equal [`LexWeight`]. `Less` means the path through `p` wins.
    pub fn lex_compare(&self, v: u32, p: u32, q: u32) -> Result<Ordering, LexError> {
        let _ = v;
        for x in [p, q] {
            if !self.finalized[x as usize] {
                return Err(LexError::NotFinalized(x));
            }
        }
        if p == q {
            return Ok(Ordering::Equal);
        }
        debug_assert_eq!(self.depth_of(p), self.depth_of(q));
        let n = self.n();
        let (mut a, mut b) = (p as usize, q as usize);
        let (mut ma, mut mb) = (u32::MAX, u32::MAX);
        for i in (0..self.levels).rev() {
            let (ua, ub) = (self.up[i * n + a], self.up[i * n + b]);
            if ua != NONE && ua != ub {
                ma = ma.min(self.mins[i * n + a]);
                mb = mb.min(self.mins[i * n + b]);
                a = ua as usize;
                b = ub as usize;
            }
        }
        ma = ma.min(self.gid[a]);
        mb = mb.min(self.gid[b]);
        Ok(ma.cmp(&mb))
    }

    /// Smallest global id on the tree path from `anc` down to `a`.
    pub fn path_min_index(&self, a: u32, anc: u32) -> Result<u32, LexError> {
        let (da, dc) = (self.depth_of(a), self.depth_of(anc));
        if dc > da {
            return Err(LexError::NotAncestor { a, anc });
        }
        let n = self.n();
        let mut x = a as usize;
        let mut best = u32::MAX;
        let mut k = da - dc;
        let mut i = 0;
        while k > 0 {
            if k & 1 == 1 {
                best = best.min(self.mins[i * n + x]);
                x = self.up[i * n + x] as usize;
            }
            k >>= 1;
            i += 1;
        }
        if x != anc as usize {
            return Err(LexError::NotAncestor { a, anc });
        }
        Ok(best.min(self.gid[x]))
    }

    /// Ancestor `p_i[u]`, if it exists.
    pub fn ancestor(&self, u: u32, i: usize) -> Option<u32> {
        let x = *self.up.get(i * self.n() + u as usize)?;
        (x != NONE).then_some(x)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn into_tree(self) -> SpTree {
        self.tree
    }
}

/// Lex-shortest path tree of a connected graph from local vertex `s`.
pub fn lex_sp_tree(g: &PlanarGraph, s: u32) -> Result<LexSpt, LexError> {
    let n = g.n();
    let mut levels = 1;
    while (1usize << levels) < n.max(2) {
        levels += 1;
    }
    levels += 1;
    let mut t = LexSpt {
        tree: SpTree {
            root: s,
            parent: vec![NONE; n],
            parent_edge: vec![NONE; n],
            dist: vec![LexWeight { w: Weight::MAX, hops: u32::MAX }; n],
        },
        gid: g.vids().to_vec(),
        levels,
        up: vec![NONE; levels * n],
        mins: vec![u32::MAX; levels * n],
        finalized: vec![false; n],
    };
    t.tree.dist[s as usize] = LexWeight::ZERO;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((LexWeight::ZERO, s)));
    let mut reached = 0;
    while let Some(Reverse((d, x))) = heap.pop() {
        if t.finalized[x as usize] || d != t.tree.dist[x as usize] {
            continue;
        }
        t.build_tables(x);
        reached += 1;
        for &dart in g.darts(x) {
            let y = g.head(dart);
            if t.finalized[y as usize] {
                continue;
            }
            let e = dart >> 1;
            let nd = d + LexWeight::edge(g.weight(e));
            let cur = t.tree.dist[y as usize];
            let take = match nd.cmp(&cur) {
                Ordering::Less => true,
                Ordering::Equal => t.lex_compare(y, x, t.tree.parent[y as usize])? == Ordering::Less,
                Ordering::Greater => false,
            };
            if take {
                t.tree.parent[y as usize] = x;
                t.tree.parent_edge[y as usize] = e;
                if nd < cur {
                    t.tree.dist[y as usize] = nd;
                    heap.push(Reverse((nd, y)));
                }
            }
        }
    }
    if reached != n {
        return Err(LexError::Disconnected);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::Point;
    use crate::testutil::random_small_planar;

    fn c4() -> PlanarGraph {
        PlanarGraph::build_embedding(
            &[Point::units(0, 0), Point::units(1, 0), Point::units(1, 1), Point::units(0, 1)],
            &[(1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn test_c4_tree() {
        let g = c4();
        let t = lex_sp_tree(&g, 0).unwrap();
        assert_eq!(t.tree.parent, vec![NONE, 0, 1, 0]);
        assert_eq!(t.lex_compare(2, 1, 3).unwrap(), Ordering::Less);
        assert_eq!(t.lex_compare(2, 1, 1).unwrap(), Ordering::Equal);
    }

    #[test]
    fn test_path_graph() {
        let g = PlanarGraph::build_embedding(
            &[Point::units(0, 0), Point::units(1, 0), Point::units(2, 0)],
            &[(1, 2, 1), (2, 3, 1)],
        )
        .unwrap();
        let t = lex_sp_tree(&g, 0).unwrap();
        assert_eq!(t.tree.dist[2], LexWeight { w: 2, hops: 2 });
    }

    #[test]
    fn test_not_finalized_and_not_ancestor() {
        let g = c4();
        let t = lex_sp_tree(&g, 0).unwrap();
        assert_eq!(t.path_min_index(2, 2).unwrap(), 3);
        assert_eq!(t.path_min_index(2, 0).unwrap(), 1);
        assert_eq!(t.path_min_index(2, 3), Err(LexError::NotAncestor { a: 2, anc: 3 }));
        let mut u = t.clone();
        u.finalized[3] = false;
        assert_eq!(u.lex_compare(2, 1, 3), Err(LexError::NotFinalized(3)));
    }

    #[test]
    fn test_disconnected() {
        let g = PlanarGraph::build_embedding(&[Point::units(0, 0), Point::units(1, 0)], &[]).unwrap();
        assert_eq!(lex_sp_tree(&g, 0).unwrap_err(), LexError::Disconnected);
    }

    /// Exhaustive oracle: smallest simple path by (w, hops, sorted ids).
    fn best_paths(g: &PlanarGraph, s: u32) -> Vec<Option<(Weight, u32, Vec<u32>, Vec<u32>, usize)>> {
        let n = g.n();
        let mut best: Vec<Option<(Weight, u32, Vec<u32>, Vec<u32>, usize)>> = vec![None; n];
        let mut path = vec![s];
        let mut on = vec![false; n];
        on[s as usize] = true;
        fn rec(
            g: &PlanarGraph,
            path: &mut Vec<u32>,
            on: &mut Vec<bool>,
            w: Weight,
            best: &mut Vec<Option<(Weight, u32, Vec<u32>, Vec<u32>, usize)>>,
        ) {
            let x = *path.last().unwrap();
            let mut ids: Vec<u32> = path.iter().map(|&v| g.vid(v)).collect();
            ids.sort();
            let key = (w, path.len() as u32 - 1, ids);
            let slot = &mut best[x as usize];
            match slot {
                None => *slot = Some((key.0, key.1, key.2, path.clone(), 1)),
                Some(b) => match (key.0, key.1, &key.2).cmp(&(b.0, b.1, &b.2)) {
                    Ordering::Less => *slot = Some((key.0, key.1, key.2, path.clone(), 1)),
                    Ordering::Equal => b.4 += 1,
                    Ordering::Greater => {}
                },
            }
            for &d in g.darts(x) {
                let y = g.head(d);
                if !on[y as usize] {
                    on[y as usize] = true;
                    path.push(y);
                    rec(g, path, on, w + g.weight(d >> 1), best);
                    path.pop();
                    on[y as usize] = false;
                }
            }
        }
        rec(g, &mut path, &mut on, 0, &mut best);
        best
    }

    #[test]
    fn test_matches_exhaustive_enumeration() {
        for seed in 0..60u64 {
            let g = random_small_planar(seed, 4 + (seed % 7) as usize, 3);
            for s in 0..g.n() as u32 {
                let t = lex_sp_tree(&g, s).unwrap();
                let best = best_paths(&g, s);
                for v in 0..g.n() as u32 {
                    let b = best[v as usize].as_ref().unwrap();
                    assert_eq!(b.4, 1, "tie under lex order");
                    let mut p = t.tree.path_to_root(v);
                    p.reverse();
                    assert_eq!(p, b.3, "seed {} s {} v {}", seed, s, v);
                }
            }
        }
    }

    #[test]
    fn test_path_min_matches_scan() {
        for seed in 0..20u64 {
            let g = random_small_planar(seed, 30, 2);
            let t = lex_sp_tree(&g, 0).unwrap();
            for v in 0..g.n() as u32 {
                let path = t.tree.path_to_root(v);
                for (k, &anc) in path.iter().enumerate() {
                    let want = path[..=k].iter().map(|&x| g.vid(x)).min().unwrap();
                    assert_eq!(t.path_min_index(v, anc).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn test_tables_consistent() {
        let g = random_small_planar(7, 40, 4);
        let t = lex_sp_tree(&g, 3).unwrap();
        for u in 0..g.n() as u32 {
            assert_eq!(t.ancestor(u, 0).unwrap_or(NONE), t.tree.parent[u as usize]);
            for i in 1..t.levels() {
                let via = t.ancestor(u, i - 1).and_then(|m| t.ancestor(m, i - 1));
                assert_eq!(t.ancestor(u, i), via);
            }
            let p = t.tree.parent[u as usize];
            if p != NONE {
                let e = t.tree.parent_edge[u as usize];
                assert_eq!(t.tree.dist[u as usize], t.tree.dist[p as usize] + LexWeight::edge(g.weight(e)));
            }
        }
    }
}
