//! Constant-time min-cut queries over a Gomory-Hu tree.
//!
//! The tree is cut at balanced separator vertices into edge-disjoint
//! subtrees of about `sqrt(n)` vertices. Vertices shared by several
//! subtrees are boundary vertices and get a path-minimum array over the
//! whole tree. Every other vertex knows, per foreign subtree, the boundary
//! vertex of its own subtree that leads there, and the path minima inside
//! its own subtree.

use super::{CutError, GomoryHuTree, NIL};
use crate::planar::Weight;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    pub pieces: usize,
    pub max_piece: usize,
    pub boundary: usize,
    /// Pieces above the size target that had no valid separator.
    pub unsplit: usize,
    /// Entries over all lookup arrays.
    pub array_words: usize,
}

#[derive(Clone, Debug)]
pub struct MinCutOracle {
    pub tree: GomoryHuTree,
    pub stats: OracleStats,
    w: Vec<Weight>,
    bidx: Vec<u32>,
    piece_of: Vec<u32>,
    pos: Vec<u32>,
    /// Per boundary vertex, the least tree edge on the path to each vertex.
    best: Vec<Vec<u32>>,
    /// Per interior vertex, the least tree edge to each vertex of its piece.
    within: Vec<Vec<u32>>,
    /// Per interior vertex and foreign piece: exit boundary vertex and the
    /// least tree edge on the way to it.
    route: Vec<Vec<(u32, u32)>>,
}

/// Split the edge set `edges` (a subtree with `m` vertices) at the vertex
/// of smallest id whose branches can be grouped into two subtrees of
/// between m/4 and 3m/4 vertices each.
fn split_piece(adj: &[Vec<(u32, u32)>], mark: &mut [u32], stamp: u32, edges: &[u32], verts: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let m = verts.len();
    for &k in edges {
        mark[k as usize] = stamp;
    }
    let inside = |k: u32, mark: &[u32]| mark[k as usize] == stamp;
    // subtree sizes from verts[0]
    let mut order = Vec::with_capacity(m);
    let mut parent = std::collections::HashMap::with_capacity(m);
    parent.insert(verts[0], NIL);
    let mut stack = vec![verts[0]];
    while let Some(x) = stack.pop() {
        order.push(x);
        for &(y, k) in &adj[x as usize] {
            if inside(k, mark) && !parent.contains_key(&y) {
                parent.insert(y, x);
                stack.push(y);
            }
        }
    }
    let mut size: std::collections::HashMap<u32, usize> = order.iter().map(|&x| (x, 1)).collect();
    for &x in order.iter().rev() {
        let p = parent[&x];
        if p != NIL {
            let s = size[&x];
            *size.get_mut(&p).unwrap() += s;
        }
    }
    let cap = (m + 2) / 2;
    let ok = |a: usize| a >= 2 && 4 * a >= m && 4 * a <= 3 * m;
    for &v in verts {
        let mut br: Vec<(usize, u32, u32)> = adj[v as usize]
            .iter()
            .filter(|&&(_, k)| inside(k, mark))
            .map(|&(y, k)| (if parent[&y] == v { size[&y] } else { m - size[&v] }, y, k))
            .collect();
        br.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut a = 1;
        let mut take = Vec::new();
        for &(s, _, k) in &br {
            if a + s <= cap {
                a += s;
                take.push(k);
            }
        }
        if !(ok(a) && ok(m + 1 - a)) {
            continue;
        }
        // edges reachable from v through the chosen branches
        let mut part_a = Vec::new();
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for &k in &take {
            part_a.push(k);
            mark[k as usize] = 0;
            let y = adj[v as usize].iter().find(|&&(_, kk)| kk == k).unwrap().0;
            stack.push((y, k));
        }
        while let Some((x, _)) = stack.pop() {
            for &(y, k) in &adj[x as usize] {
                if mark[k as usize] == stamp {
                    mark[k as usize] = 0;
                    part_a.push(k);
                    stack.push((y, k));
                }
            }
        }
        let part_b: Vec<u32> = edges.iter().copied().filter(|&k| mark[k as usize] == stamp).collect();
        for &k in edges {
            mark[k as usize] = 0;
        }
        return Some((part_a, part_b));
    }
    for &k in edges {
        mark[k as usize] = 0;
    }
    None
}

fn piece_vertices(t: &GomoryHuTree, edges: &[u32]) -> Vec<u32> {
    let mut vs: Vec<u32> = edges.iter().flat_map(|&k| [t.edges[k as usize].a, t.edges[k as usize].b]).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

/// Least tree edge on the path from `src` to every vertex reachable over
/// edges accepted by `use_edge`; ties go to the smaller edge index.
fn path_minima(adj: &[Vec<(u32, u32)>], w: &[Weight], src: u32, use_edge: impl Fn(u32) -> bool) -> Vec<u32> {
    let mut out = vec![NIL; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[src as usize] = true;
    let mut stack = vec![src];
    while let Some(x) = stack.pop() {
        let cur = out[x as usize];
        for &(y, k) in &adj[x as usize] {
            if seen[y as usize] || !use_edge(k) {
                continue;
            }
            seen[y as usize] = true;
            out[y as usize] = if cur == NIL || (w[k as usize], k) < (w[cur as usize], cur) { k } else { cur };
            stack.push(y);
        }
    }
    out
}

pub fn build_mincut_oracle(t: GomoryHuTree) -> MinCutOracle {
    let n = t.n();
    let adj = t.adjacency();
    let w: Vec<Weight> = t.edges.iter().map(|e| e.w).collect();
    let target = ((n as f64).sqrt().ceil() as usize).max(2);
    let mut stats = OracleStats::default();

    let mut mark = vec![0u32; t.edges.len()];
    let mut pieces: Vec<Vec<u32>> = Vec::new();
    let mut work: Vec<Vec<u32>> = if t.edges.is_empty() { vec![] } else { vec![(0..t.edges.len() as u32).collect()] };
    let mut stamp = 0;
    while let Some(edges) = work.pop() {
        let verts = piece_vertices(&t, &edges);
        if verts.len() <= target {
            pieces.push(edges);
            continue;
        }
        stamp += 1;
        match split_piece(&adj, &mut mark, stamp, &edges, &verts) {
            Some((a, b)) => {
                work.push(b);
                work.push(a);
            }
            None => {
                stats.unsplit += 1;
                pieces.push(edges);
            }
        }
    }

    let mut edge_piece = vec![NIL; t.edges.len()];
    let mut count = vec![0u32; n];
    let piece_verts: Vec<Vec<u32>> = pieces.iter().map(|p| piece_vertices(&t, p)).collect();
    for (p, edges) in pieces.iter().enumerate() {
        for &k in edges {
            edge_piece[k as usize] = p as u32;
        }
        for &v in &piece_verts[p] {
            count[v as usize] += 1;
        }
    }
    let mut bidx = vec![NIL; n];
    let mut bverts = Vec::new();
    let mut piece_of = vec![NIL; n];
    let mut pos = vec![NIL; n];
    for v in 0..n {
        if count[v] >= 2 {
            bidx[v] = bverts.len() as u32;
            bverts.push(v as u32);
        }
    }
    for (p, vs) in piece_verts.iter().enumerate() {
        for (i, &v) in vs.iter().enumerate() {
            if bidx[v as usize] == NIL {
                piece_of[v as usize] = p as u32;
                pos[v as usize] = i as u32;
            }
        }
    }

    let best: Vec<Vec<u32>> = bverts.iter().map(|&b| path_minima(&adj, &w, b, |_| true)).collect();
    let mut within: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut route: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for (p, vs) in piece_verts.iter().enumerate() {
        let p32 = p as u32;
        // the boundary vertex of p behind which each other piece lies
        let mut behind = vec![NIL; pieces.len()];
        for &b in vs.iter().filter(|&&b| bidx[b as usize] != NIL) {
            let reach = path_minima(&adj, &w, b, |k| edge_piece[k as usize] != p32);
            for (k, e) in t.edges.iter().enumerate() {
                let q = edge_piece[k];
                if q != p32 && (reach[e.a as usize] != NIL || e.a == b) {
                    behind[q as usize] = b;
                }
            }
        }
        for &v in vs.iter().filter(|&&v| bidx[v as usize] == NIL) {
            let full = path_minima(&adj, &w, v, |k| edge_piece[k as usize] == p32);
            within[v as usize] = vs.iter().map(|&x| full[x as usize]).collect();
            route[v as usize] = behind.iter().map(|&b| if b == NIL { (NIL, NIL) } else { (b, full[b as usize]) }).collect();
        }
    }

    stats.pieces = pieces.len();
    stats.max_piece = piece_verts.iter().map(|v| v.len()).max().unwrap_or(0);
    stats.boundary = bverts.len();
    stats.array_words = best.iter().map(Vec::len).sum::<usize>()
        + within.iter().map(Vec::len).sum::<usize>()
        + 2 * route.iter().map(Vec::len).sum::<usize>()
        + 3 * n;
    MinCutOracle { tree: t, stats, w, bidx, piece_of, pos, best, within, route }
}

impl MinCutOracle {
    /// Tree edge of least weight between two local vertices, its weight,
    /// and the number of array entries read to find both.
    pub fn query_counted(&self, u: u32, v: u32) -> Result<(usize, Weight, u32), CutError> {
        if u == v {
            return Err(CutError::SameVertex);
        }
        if u as usize >= self.bidx.len() || v as usize >= self.bidx.len() {
            return Err(CutError::UnknownVertex(u.max(v)));
        }
        let (u, v) = (u as usize, v as usize);
        // each array entry read is counted; route entries are pairs
        let bu = self.bidx[u];
        if bu != NIL {
            return Ok(self.finish(self.best[bu as usize][v], 2));
        }
        let bv = self.bidx[v];
        if bv != NIL {
            return Ok(self.finish(self.best[bv as usize][u], 3));
        }
        let (pu, pv) = (self.piece_of[u], self.piece_of[v]);
        if pu == pv {
            return Ok(self.finish(self.within[u][self.pos[v] as usize], 6));
        }
        let (b, e1) = self.route[u][pv as usize];
        let e2 = self.best[self.bidx[b as usize] as usize][v];
        let (w1, w2) = (self.w[e1 as usize], self.w[e2 as usize]);
        Ok(if (w1, e1) <= (w2, e2) { (e1 as usize, w1, 10) } else { (e2 as usize, w2, 10) })
    }

    fn finish(&self, e: u32, reads: u32) -> (usize, Weight, u32) {
        (e as usize, self.w[e as usize], reads + 1)
    }

    fn locals(&self, u: u32, v: u32) -> Result<(u32, u32), CutError> {
        Ok((self.tree.local(u)?, self.tree.local(v)?))
    }
}

/// Weight of a minimum cut between two vertices, by global id.
pub fn query_weight(o: &MinCutOracle, u: u32, v: u32) -> Result<Weight, CutError> {
    let (a, b) = o.locals(u, v)?;
    Ok(o.query_counted(a, b)?.1)
}

/// Edge ids of a minimum cut between two vertices, by global id.
pub fn query_cut(o: &MinCutOracle, u: u32, v: u32) -> Result<Vec<u32>, CutError> {
    let (a, b) = o.locals(u, v)?;
    o.tree.cut_edges(o.query_counted(a, b)?.0)
}
