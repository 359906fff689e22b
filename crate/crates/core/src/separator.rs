//! Balanced Jordan-curve separators.
//!
//! The graph is completed to a triangulation `T` by adding one node per
//! face joined to every corner of that face. A breadth-first tree of `T`
//! from a pseudo-center gives fundamental cycles; the side weights of every
//! fundamental cycle come out in O(log n) from rotation prefix sums, and
//! the smallest balanced one is taken. Face nodes are only used to route the
//! curve, so the curve meets the graph in vertices and never crosses an
//! edge. Where the curve follows a graph edge it is pushed off into the
//! face on the exterior side, which leaves that edge in the interior part.

use std::collections::VecDeque;

use thiserror::Error;

use crate::planar::PlanarGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparatorError {
    #[error("graph too small or no balanced separator makes progress")]
    TooSmall,
    #[error("separator has {size} vertices, above the ceiling {ceiling}")]
    TooLarge { size: usize, ceiling: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Int,
    Ext,
    OnJ,
}

/// Piece `J_i` of the curve, running from `vj[i]` to `vj[i + 1]` through a
/// single face. Corners are named by darts: the corner of dart `d` is the
/// sector from `d` counterclockwise to the next dart at its tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JPiece {
    pub face: u32,
    pub start_corner: u32,
    pub end_corner: u32,
    /// The edge the piece runs alongside, when it does.
    pub along_edge: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct SeparatorResult {
    /// Boundary vertices (local ids) in clockwise order: the interior lies
    /// to the right when walking `vj[0], vj[1], ...`.
    pub vj: Vec<u32>,
    pub pieces: Vec<JPiece>,
    pub vertex_side: Vec<Side>,
    /// Every edge is `Int` or `Ext`.
    pub edge_side: Vec<Side>,
    pub face_side: Vec<Side>,
    pub int_vertices: usize,
    pub ext_vertices: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SeparatorConfig {
    /// Ceiling as a multiple of sqrt(n).
    pub ceiling_factor: f64,
    /// Candidates evaluated explicitly before giving up.
    pub max_attempts: usize,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        SeparatorConfig { ceiling_factor: 8.0, max_attempts: 16 }
    }
}

const NONE: u32 = u32::MAX;

/// The face-completed triangulation in CSR form. T-edge `e < m` is graph
/// edge `e`; T-edge `m + a` is the spoke at the corner of dart `a`.
struct Tri<'a> {
    g: &'a PlanarGraph,
    n: usize,
    start: Vec<u32>,
    head: Vec<u32>,
    tedge: Vec<u32>,
    /// Rotation position of each T-edge at its first and second endpoint.
    pos: Vec<u32>,
}

impl<'a> Tri<'a> {
    fn new(g: &'a PlanarGraph) -> Self {
        let n = g.n();
        let m = g.m();
        let nf = g.num_faces();
        let total = n + nf;
        let mut start = Vec::with_capacity(total + 1);
        let mut head = Vec::with_capacity(8 * m);
        let mut tedge = Vec::with_capacity(8 * m);
        let mut pos = vec![0u32; 2 * 3 * m];
        start.push(0);
        for v in 0..n as u32 {
            let base = head.len() as u32;
            for (k, &d) in g.darts(v).iter().enumerate() {
                let e = d >> 1;
                head.push(g.head(d));
                tedge.push(e);
                pos[(2 * e + (d & 1)) as usize] = 2 * k as u32;
                head.push(n as u32 + g.face_of(d));
                tedge.push(m as u32 + d);
                pos[(2 * (m as u32 + d)) as usize] = 2 * k as u32 + 1;
            }
            debug_assert_eq!(head.len() as u32 - base, 2 * g.degree(v) as u32);
            start.push(head.len() as u32);
        }
        for f in g.faces() {
            for (k, &d) in f.darts.iter().enumerate() {
                head.push(g.tail(d));
                tedge.push(m as u32 + d);
                pos[(2 * (m as u32 + d) + 1) as usize] = k as u32;
            }
            start.push(head.len() as u32);
        }
        Tri { g, n, start, head, tedge, pos }
    }

    fn len(&self) -> usize {
        self.start.len() - 1
    }

    fn deg(&self, x: u32) -> u32 {
        self.start[x as usize + 1] - self.start[x as usize]
    }

    fn nbrs(&self, x: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
        let r = self.start[x as usize] as usize..self.start[x as usize + 1] as usize;
        self.head[r.clone()].iter().copied().zip(self.tedge[r].iter().copied())
    }

    /// Endpoints of a T-edge.
    fn ends(&self, te: u32) -> (u32, u32) {
        let m = self.g.m() as u32;
        if te < m {
            let e = self.g.edge(te);
            (e.u, e.v)
        } else {
            let a = te - m;
            (self.g.tail(a), self.n as u32 + self.g.face_of(a))
        }
    }

    /// Rotation position of T-edge `te` at its endpoint `x`.
    fn pos_at(&self, te: u32, x: u32) -> u32 {
        let (a, _) = self.ends(te);
        if a == x {
            self.pos[2 * te as usize]
        } else {
            self.pos[2 * te as usize + 1]
        }
    }

    /// Triangle to the left of T-edge `te` traversed from `x`. Triangle ids
    /// are graph darts.
    fn left_triangle(&self, te: u32, x: u32) -> u32 {
        let g = self.g;
        let m = g.m() as u32;
        if te < m {
            let d = 2 * te;
            if g.tail(d) == x {
                d
            } else {
                d ^ 1
            }
        } else {
            let a = te - m;
            if g.tail(a) == x {
                g.rot_next(a) ^ 1
            } else {
                a
            }
        }
    }

    /// The three T-edges of triangle `d`.
    fn tri_edges(&self, d: u32) -> [u32; 3] {
        let m = self.g.m() as u32;
        [d >> 1, m + d, m + self.g.face_next(d)]
    }

    /// The two triangles of a T-edge.
    fn edge_tris(&self, te: u32) -> (u32, u32) {
        let m = self.g.m() as u32;
        if te < m {
            (2 * te, 2 * te + 1)
        } else {
            let a = te - m;
            (a, self.g.rot_next(a) ^ 1)
        }
    }
}

fn bfs(t: &Tri, root: u32) -> (Vec<u32>, Vec<u32>, Vec<u32>, Vec<u32>) {
    let nn = t.len();
    let mut parent = vec![NONE; nn];
    let mut pedge = vec![NONE; nn];
    let mut depth = vec![NONE; nn];
    let mut order = Vec::with_capacity(nn);
    let mut q = VecDeque::new();
    depth[root as usize] = 0;
    q.push_back(root);
    while let Some(x) = q.pop_front() {
        order.push(x);
        for (y, te) in t.nbrs(x) {
            if depth[y as usize] == NONE {
                depth[y as usize] = depth[x as usize] + 1;
                parent[y as usize] = x;
                pedge[y as usize] = te;
                q.push_back(y);
            }
        }
    }
    (parent, pedge, depth, order)
}

struct Lifting {
    levels: usize,
    up: Vec<u32>,
    depth: Vec<u32>,
}

impl Lifting {
    fn new(parent: &[u32], depth: &[u32], order: &[u32]) -> Self {
        let nn = parent.len();
        let mut levels = 1;
        while (1usize << levels) < nn.max(2) {
            levels += 1;
        }
        let mut up = vec![NONE; levels * nn];
        for &x in order {
            let x = x as usize;
            up[x] = parent[x];
            for i in 1..levels {
                let mid = up[(i - 1) * nn + x];
                up[i * nn + x] = if mid == NONE { NONE } else { up[(i - 1) * nn + mid as usize] };
            }
        }
        Lifting { levels, up, depth: depth.to_vec() }
    }

    fn lift(&self, mut x: u32, k: u32) -> u32 {
        let nn = self.depth.len();
        let mut i = 0;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                x = self.up[i * nn + x as usize];
            }
            k >>= 1;
            i += 1;
        }
        x
    }

    fn lca(&self, a: u32, b: u32) -> u32 {
        let nn = self.depth.len();
        let (da, db) = (self.depth[a as usize], self.depth[b as usize]);
        let (mut a, mut b) = if da >= db { (self.lift(a, da - db), b) } else { (a, self.lift(b, db - da)) };
        if a == b {
            return a;
        }
        for i in (0..self.levels).rev() {
            let (ua, ub) = (self.up[i * nn + a as usize], self.up[i * nn + b as usize]);
            if ua != ub {
                a = ua;
                b = ub;
            }
        }
        self.up[a as usize]
    }
}

/// Per-vertex rotation prefix sums of child subtree weights.
struct Sectors {
    /// Offset of each vertex's prefix array.
    off: Vec<u32>,
    pre: Vec<u32>,
    /// Rotation position of the parent edge, `NONE` at the root.
    ppos: Vec<u32>,
    sw: Vec<u32>,
    total: u32,
}

impl Sectors {
    fn new(t: &Tri, parent: &[u32], pedge: &[u32], order: &[u32]) -> Self {
        let nn = t.len();
        let mut sw = vec![0u32; nn];
        for x in 0..t.n {
            sw[x] = 1;
        }
        for &x in order.iter().rev() {
            let p = parent[x as usize];
            if p != NONE {
                sw[p as usize] += sw[x as usize];
            }
        }
        let mut ppos = vec![NONE; nn];
        for x in 0..nn as u32 {
            if parent[x as usize] != NONE {
                ppos[x as usize] = t.pos_at(pedge[x as usize], x);
            }
        }
        let mut off = Vec::with_capacity(nn + 1);
        let mut pre = Vec::new();
        for x in 0..nn as u32 {
            off.push(pre.len() as u32);
            let deg = t.deg(x);
            let size = if ppos[x as usize] == NONE { deg + 1 } else { deg };
            let mut vals = vec![0u32; size as usize];
            for (k, (y, te)) in t.nbrs(x).enumerate() {
                if parent[y as usize] == x && pedge[y as usize] == te {
                    let r = Self::rel_raw(ppos[x as usize], deg, k as u32);
                    vals[r as usize] = sw[y as usize];
                }
            }
            let mut acc = 0;
            for v in vals {
                acc += v;
                pre.push(acc);
            }
        }
        off.push(pre.len() as u32);
        let total = t.n as u32;
        Sectors { off, pre, ppos, sw, total }
    }

    fn rel_raw(pp: u32, deg: u32, k: u32) -> u32 {
        if pp == NONE {
            k + 1
        } else {
            (k + deg - pp) % deg
        }
    }

    fn size(&self, x: u32) -> u32 {
        self.off[x as usize + 1] - self.off[x as usize]
    }

    /// Prefix sum up to and including relative position `j`.
    fn p(&self, x: u32, j: u32) -> u32 {
        self.pre[(self.off[x as usize] + j) as usize]
    }

    /// Weight strictly inside the counterclockwise sweep at `x` from
    /// rotation position `ka` to `kb`, including the part of the graph
    /// outside the subtree of `x` when the parent edge lies in the sweep.
    fn sector(&self, t: &Tri, x: u32, ka: u32, kb: u32) -> u32 {
        let deg = t.deg(x);
        let pp = self.ppos[x as usize];
        let (ra, rb) = (Self::rel_raw(pp, deg, ka), Self::rel_raw(pp, deg, kb));
        let d = self.size(x);
        if ra < rb {
            self.p(x, rb - 1) - self.p(x, ra)
        } else {
            let mut s = self.p(x, d - 1) - self.p(x, ra);
            if rb >= 1 {
                s += self.p(x, rb - 1);
                if pp != NONE {
                    s += self.total - self.sw[x as usize];
                }
            }
            s
        }
    }
}

/// Side weights of every fundamental cycle, in O(log n) each.
struct Fundamental<'t, 'g> {
    t: &'t Tri<'g>,
    parent: Vec<u32>,
    pedge: Vec<u32>,
    lift: Lifting,
    sec: Sectors,
    pa: Vec<u32>,
    pb: Vec<u32>,
    cnt: Vec<u32>,
}

impl<'t, 'g> Fundamental<'t, 'g> {
    fn new(t: &'t Tri<'g>, root: u32) -> Self {
        let (parent, pedge, depth, order) = bfs(t, root);
        let lift = Lifting::new(&parent, &depth, &order);
        let sec = Sectors::new(t, &parent, &pedge, &order);
        let nn = t.len();
        let mut pa = vec![0u32; nn];
        let mut pb = vec![0u32; nn];
        let mut cnt = vec![0u32; nn];
        for &y in &order {
            let is_g = (y as usize) < t.n;
            let x = parent[y as usize];
            if x == NONE {
                cnt[y as usize] = is_g as u32;
                continue;
            }
            cnt[y as usize] = cnt[x as usize] + is_g as u32;
            let k = t.pos_at(pedge[y as usize], x);
            let pp = sec.ppos[x as usize];
            let (a, b) = if pp == NONE {
                (0, 0)
            } else {
                (sec.sector(t, x, k, pp), sec.sector(t, x, pp, k))
            };
            pa[y as usize] = pa[x as usize] + a;
            pb[y as usize] = pb[x as usize] + b;
        }
        Fundamental { t, parent, pedge, lift, sec, pa, pb, cnt }
    }

    fn is_tree_edge(&self, te: u32) -> bool {
        let (a, b) = self.t.ends(te);
        (self.parent[b as usize] == a && self.pedge[b as usize] == te)
            || (self.parent[a as usize] == b && self.pedge[a as usize] == te)
    }

    fn child_toward(&self, l: u32, x: u32) -> u32 {
        self.lift.lift(x, self.lift.depth[x as usize] - self.lift.depth[l as usize] - 1)
    }

    /// (left weight, graph vertices on the cycle) for the cycle of non-tree
    /// T-edge `te`, oriented from its first endpoint `u` across to `w`.
    fn weigh(&self, te: u32) -> (u32, u32) {
        let t = self.t;
        let s = &self.sec;
        let (u, w) = t.ends(te);
        let l = self.lift.lca(u, w);
        let (ku, kw) = (t.pos_at(te, u), t.pos_at(te, w));
        let k = self.cnt[u as usize] + self.cnt[w as usize] - 2 * self.cnt[l as usize]
            + ((l as usize) < t.n) as u32;
        let pos_in = |x: u32, child: u32| t.pos_at(self.pedge[child as usize], x);
        let left = if u == l {
            let c2 = self.child_toward(l, w);
            s.sector(t, w, s.ppos[w as usize], kw)
                + (self.pb[w as usize] - self.pb[c2 as usize])
                + s.sector(t, u, ku, pos_in(u, c2))
        } else if w == l {
            let c = self.child_toward(l, u);
            (self.pa[u as usize] - self.pa[c as usize])
                + s.sector(t, u, ku, s.ppos[u as usize])
                + s.sector(t, w, pos_in(w, c), kw)
        } else {
            let c = self.child_toward(l, u);
            let c2 = self.child_toward(l, w);
            (self.pa[u as usize] - self.pa[c as usize])
                + s.sector(t, u, ku, s.ppos[u as usize])
                + s.sector(t, w, s.ppos[w as usize], kw)
                + (self.pb[w as usize] - self.pb[c2 as usize])
                + s.sector(t, l, pos_in(l, c), pos_in(l, c2))
        };
        (left, k)
    }

    /// The cycle as (T-vertex, T-edge to the next vertex), oriented from
    /// the lca down to `u`, across to `w`, and back up.
    fn cycle(&self, te: u32) -> Vec<(u32, u32)> {
        let (u, w) = self.t.ends(te);
        let l = self.lift.lca(u, w);
        let mut down = Vec::new();
        let mut x = u;
        while x != l {
            down.push((self.parent[x as usize], self.pedge[x as usize]));
            x = self.parent[x as usize];
        }
        down.reverse();
        let mut out = down;
        out.push((u, te));
        let mut x = w;
        while x != l {
            out.push((x, self.pedge[x as usize]));
            x = self.parent[x as usize];
        }
        out
    }
}

/// Vertex farthest from `s` in T, and the BFS parents.
fn far(t: &Tri, s: u32) -> (u32, Vec<u32>, Vec<u32>) {
    let (parent, _, depth, order) = bfs(t, s);
    (*order.last().unwrap(), parent, depth)
}

/// Middle of a double-sweep diameter path: a cheap pseudo-center.
fn pseudo_center(t: &Tri) -> u32 {
    let (a, _, _) = far(t, 0);
    let (b, parent, depth) = far(t, a);
    let mut x = b;
    for _ in 0..depth[b as usize] / 2 {
        x = parent[x as usize];
    }
    x
}

struct Explicit {
    /// Left side flag per triangle.
    left: Vec<bool>,
    on_cycle_vertex: Vec<bool>,
    on_cycle_edge: Vec<bool>,
}

fn explicit_sides(t: &Tri, cyc: &[(u32, u32)]) -> Explicit {
    let g = t.g;
    let mut on_cycle_edge = vec![false; 3 * g.m()];
    let mut on_cycle_vertex = vec![false; t.len()];
    for &(x, te) in cyc {
        on_cycle_edge[te as usize] = true;
        on_cycle_vertex[x as usize] = true;
    }
    let mut left = vec![false; 2 * g.m()];
    let (x0, te0) = cyc[0];
    let s = t.left_triangle(te0, x0);
    left[s as usize] = true;
    let mut stack = vec![s];
    while let Some(tr) = stack.pop() {
        for te in t.tri_edges(tr) {
            if on_cycle_edge[te as usize] {
                continue;
            }
            let (a, b) = t.edge_tris(te);
            let o = if a == tr { b } else { a };
            if !left[o as usize] {
                left[o as usize] = true;
                stack.push(o);
            }
        }
    }
    Explicit { left, on_cycle_vertex, on_cycle_edge }
}

/// Balanced separator of a connected graph.
pub fn cycle_separator(g: &PlanarGraph, cfg: &SeparatorConfig) -> Result<SeparatorResult, SeparatorError> {
    let n = g.n();
    if !g.is_connected() {
        return Err(SeparatorError::Disconnected);
    }
    if n < 4 || g.m() < 2 {
        return Err(SeparatorError::TooSmall);
    }
    let t = Tri::new(g);
    let root = pseudo_center(&t);
    let fund = Fundamental::new(&t, root);
    let limit = 2 * n as u32;
    let mut cands: Vec<(u32, u32)> = Vec::new();
    for te in 0..3 * g.m() as u32 {
        if fund.is_tree_edge(te) {
            continue;
        }
        let (left, k) = fund.weigh(te);
        let right = n as u32 - left - k;
        if 3 * left.max(right) <= limit {
            cands.push((k, te));
        }
    }
    cands.sort_unstable();
    let ceiling = (cfg.ceiling_factor * (n as f64).sqrt()).ceil() as usize;
    for &(k, te) in cands.iter().take(cfg.max_attempts) {
        if k as usize > ceiling {
            return Err(SeparatorError::TooLarge { size: k as usize, ceiling });
        }
        let cyc = fund.cycle(te);
        let ex = explicit_sides(&t, &cyc);
        let res = build_result(&t, &cyc, &ex);
        debug_assert_eq!(
            {
                let (left, _) = fund.weigh(te);
                left as usize
            },
            (0..n)
                .filter(|&v| !ex.on_cycle_vertex[v] && ex.left[g.darts(v as u32)[0] as usize])
                .count()
        );
        assert!(3 * res.int_vertices.max(res.ext_vertices) <= 2 * n, "separator unbalanced");
        let int_edges = res.edge_side.iter().filter(|&&s| s == Side::Int).count();
        if int_edges > 0 && int_edges < g.m() {
            return Ok(res);
        }
    }
    Err(SeparatorError::TooSmall)
}

fn build_result(t: &Tri, cyc: &[(u32, u32)], ex: &Explicit) -> SeparatorResult {
    let g = t.g;
    let n = g.n();
    let side_of_tri = |tr: u32| if ex.left[tr as usize] { 0u8 } else { 1u8 };
    // sides relative to the walk: 0 = left, 1 = right
    let x_ext = n as u32 + g.ext_face(0).expect("connected graph with edges");
    let int_side: u8 = if ex.on_cycle_vertex[x_ext as usize] {
        1
    } else {
        1 - side_of_tri(g.faces()[(x_ext as usize) - n].darts[0])
    };
    // orient so that the interior is on the right
    let mut seq: Vec<(u32, u32)> = cyc.to_vec();
    if int_side == 0 {
        // reverse the cyclic walk: vertex i+1 now leaves along edge i
        let k = seq.len();
        let rev: Vec<(u32, u32)> = (0..k).rev().map(|i| (seq[(i + 1) % k].0, seq[i].1)).collect();
        seq = rev;
    }
    let start = seq.iter().position(|&(x, _)| (x as usize) < n).expect("cycle holds a graph vertex");
    seq.rotate_left(start);
    let m = g.m() as u32;
    let mut vj = Vec::new();
    let mut pieces = Vec::new();
    let k = seq.len();
    let mut i = 0;
    while i < k {
        let (x, te) = seq[i];
        vj.push(x);
        if te < m {
            let d = if g.tail(2 * te) == x { 2 * te } else { 2 * te + 1 };
            pieces.push(JPiece { face: g.face_of(d), start_corner: d, end_corner: g.face_next(d), along_edge: Some(te) });
            i += 1;
        } else {
            let (fnode, te2) = seq[(i + 1) % k];
            let a = te - m;
            let b = te2 - m;
            debug_assert_eq!(g.face_of(a), fnode - n as u32);
            pieces.push(JPiece { face: g.face_of(a), start_corner: a, end_corner: b, along_edge: None });
            i += 2;
        }
    }
    let to_side = |s: u8| if s == int_side { Side::Int } else { Side::Ext };
    let mut vertex_side = vec![Side::OnJ; n];
    let (mut int_vertices, mut ext_vertices) = (0, 0);
    for v in 0..n {
        if !ex.on_cycle_vertex[v] {
            let s = to_side(side_of_tri(g.darts(v as u32)[0]));
            vertex_side[v] = s;
            if s == Side::Int {
                int_vertices += 1;
            } else {
                ext_vertices += 1;
            }
        }
    }
    let edge_side = (0..g.m())
        .map(|e| if ex.on_cycle_edge[e] { Side::Int } else { to_side(side_of_tri(2 * e as u32)) })
        .collect();
    let face_side = (0..g.num_faces())
        .map(|f| {
            if ex.on_cycle_vertex[n + f] {
                Side::OnJ
            } else {
                to_side(side_of_tri(g.faces()[f].darts[0]))
            }
        })
        .collect();
    SeparatorResult { vj, pieces, vertex_side, edge_side, face_side, int_vertices, ext_vertices }
}

/// The interior and exterior subgraphs; both keep all boundary vertices.
pub fn split_graph(g: &PlanarGraph, sep: &SeparatorResult) -> (PlanarGraph, PlanarGraph) {
    let int: Vec<bool> = sep.edge_side.iter().map(|&s| s == Side::Int).collect();
    let ext: Vec<bool> = int.iter().map(|&b| !b).collect();
    (g.subgraph(&int, &sep.vj), g.subgraph(&ext, &sep.vj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen::{gen_random_planar, RandomPlanar};
    use crate::planar::Point;
    use crate::testutil::random_small_planar;

    fn grid(k: i64) -> PlanarGraph {
        let mut pts = Vec::new();
        let mut e = Vec::new();
        for i in 0..k {
            for j in 0..k {
                pts.push(Point::units(i, j));
                let id = (i * k + j + 1) as u32;
                if j + 1 < k {
                    e.push((id, id + 1, 1));
                }
                if i + 1 < k {
                    e.push((id, id + k as u32, 1));
                }
            }
        }
        PlanarGraph::build_embedding(&pts, &e).unwrap()
    }

    #[test]
    fn test_formula_matches_flood_fill() {
        for seed in 0..30u64 {
            let g = random_small_planar(seed, 6 + (seed as usize % 25), 1);
            let t = Tri::new(&g);
            for root in [0u32, pseudo_center(&t)] {
                let f = Fundamental::new(&t, root);
                for te in 0..3 * g.m() as u32 {
                    if f.is_tree_edge(te) {
                        continue;
                    }
                    let (left, k) = f.weigh(te);
                    let cyc = f.cycle(te);
                    let ex = explicit_sides(&t, &cyc);
                    let want = (0..g.n())
                        .filter(|&v| !ex.on_cycle_vertex[v] && ex.left[g.darts(v as u32)[0] as usize])
                        .count();
                    let kk = (0..g.n()).filter(|&v| ex.on_cycle_vertex[v]).count();
                    assert_eq!((left as usize, k as usize), (want, kk), "seed {} te {}", seed, te);
                }
            }
        }
    }

    #[test]
    fn test_k4_separator() {
        let g = PlanarGraph::build_embedding(
            &[Point::units(0, 0), Point::units(4, 0), Point::units(0, 4), Point::units(1, 1)],
            &[(1, 2, 1), (2, 3, 1), (3, 1, 1), (1, 4, 1), (2, 4, 1), (3, 4, 1)],
        )
        .unwrap();
        let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
        assert!(s.vj.len() <= 3);
        assert!(3 * s.int_vertices.max(s.ext_vertices) <= 8);
    }

    #[test]
    fn test_grid_separator() {
        let g = grid(10);
        let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
        assert!(s.vj.len() <= 40, "size {}", s.vj.len());
        assert!(s.int_vertices <= 66 && s.ext_vertices <= 66);
        let (g1, g2) = split_graph(&g, &s);
        assert!(g1.n() <= 66 + s.vj.len() && g2.n() <= 66 + s.vj.len());
    }

    #[test]
    fn test_path_separator() {
        let pts: Vec<Point> = (0..20).map(|i| Point::units(i, 0)).collect();
        let e: Vec<(u32, u32, i64)> = (1..20).map(|i| (i, i + 1, 1)).collect();
        let g = PlanarGraph::build_embedding(&pts, &e).unwrap();
        let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
        assert!(3 * s.int_vertices.max(s.ext_vertices) <= 40);
    }

    fn check_partition(g: &PlanarGraph, s: &SeparatorResult) {
        let (g1, g2) = split_graph(g, s);
        assert_eq!(g1.m() + g2.m(), g.m());
        let mut ids1: Vec<u32> = g1.vids().to_vec();
        ids1.retain(|id| g2.local_vertex(*id).is_some());
        let mut vj: Vec<u32> = s.vj.iter().map(|&v| g.vid(v)).collect();
        vj.sort();
        vj.dedup();
        assert_eq!(ids1, vj);
        // no edge joins the two strict sides
        for e in g.edges() {
            let (a, b) = (s.vertex_side[e.u as usize], s.vertex_side[e.v as usize]);
            assert!(!(a == Side::Int && b == Side::Ext) && !(a == Side::Ext && b == Side::Int));
        }
        // pieces run through the face their corners belong to
        for (i, p) in s.pieces.iter().enumerate() {
            assert_eq!(g.tail(p.start_corner), s.vj[i]);
            assert_eq!(g.tail(p.end_corner), s.vj[(i + 1) % s.vj.len()]);
            assert_eq!(g.face_of(p.start_corner), p.face);
            assert_eq!(g.face_of(p.end_corner), p.face);
        }
    }

    #[test]
    fn test_random_partitions() {
        for seed in 0..40u64 {
            let g = gen_random_planar(RandomPlanar { n: 20 + seed as usize * 5, seed, max_weight: 16, thin: 0.3 })
                .unwrap()
                .build()
                .unwrap();
            let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
            check_partition(&g, &s);
        }
        for seed in 0..40u64 {
            let g = random_small_planar(seed, 8 + seed as usize % 20, 3);
            if let Ok(s) = cycle_separator(&g, &SeparatorConfig::default()) {
                check_partition(&g, &s);
            }
        }
    }

    #[test]
    fn test_interior_is_right_of_walk() {
        // along a graph edge piece, the edge goes to the interior, so the
        // face right of the walk dart is interior or on the curve
        for seed in 0..30u64 {
            let g = gen_random_planar(RandomPlanar::new(60, seed)).unwrap().build().unwrap();
            let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
            for p in &s.pieces {
                if let Some(_) = p.along_edge {
                    let right = g.face_of(p.start_corner ^ 1);
                    assert_ne!(s.face_side[right as usize], Side::Ext);
                    assert_ne!(s.face_side[p.face as usize], Side::Int);
                }
            }
            let ext = g.ext_face(0).unwrap();
            assert_ne!(s.face_side[ext as usize], Side::Int);
        }
    }

    #[test]
    fn test_separator_size_scaling() {
        for k in [8usize, 10, 12] {
            let n = 1 << k;
            let g = gen_random_planar(RandomPlanar::new(n, 3)).unwrap().build().unwrap();
            let s = cycle_separator(&g, &SeparatorConfig::default()).unwrap();
            assert!((s.vj.len() as f64) <= 8.0 * (n as f64).sqrt());
        }
    }
}
