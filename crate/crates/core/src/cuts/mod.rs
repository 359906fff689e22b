//! Cuts through duality: the minimum cycle basis of the dual is a set of
//! minimum cuts of the primal, and its region tree is a Gomory-Hu tree.

mod oracle;

use std::collections::VecDeque;
use std::sync::Arc;

use thiserror::Error;

use crate::mcb::{recursive_gmcb, ImplicitMcb, McbError};
use crate::planar::{PlanarError, PlanarGraph, Weight};

pub use oracle::{build_mincut_oracle, query_cut, query_weight, MinCutOracle, OracleStats};

const NIL: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("query needs two distinct vertices")]
    SameVertex,
    #[error("no vertex with id {0}")]
    UnknownVertex(u32),
    #[error(transparent)]
    Mcb(#[from] McbError),
}

impl From<PlanarError> for CutError {
    fn from(_: PlanarError) -> Self {
        CutError::Disconnected
    }
}

/// Sorted weights of the basis cycles.
pub fn weight_vector(imcb: &ImplicitMcb) -> Vec<Weight> {
    let mut w: Vec<Weight> = imcb.triples.iter().map(|t| t.w).collect();
    w.sort_unstable();
    w
}

/// All-pairs min cuts in implicit form: the basis of the simplified dual.
#[derive(Clone, Debug)]
pub struct Apmc {
    /// The dual with loops and parallel edges subdivided.
    pub dual: PlanarGraph,
    /// Primal edge id behind each dual edge.
    pub origin: Vec<u32>,
    /// Primal local vertex enclosed by each dual face.
    pub face_vertex: Vec<u32>,
    pub imcb: ImplicitMcb,
}

impl Apmc {
    /// Primal edge ids of the cut given by basis cycle `t`, sorted.
    pub fn cut_edges(&self, t: usize) -> Result<Vec<u32>, CutError> {
        let c = self.imcb.expand_cycle(t)?;
        let mut out: Vec<u32> = c.edges.iter().map(|&e| self.origin[e as usize]).collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

pub fn apmc(g: &PlanarGraph) -> Result<Apmc, CutError> {
    let dg = g.dual_graph()?;
    let (dual, from) = dg.simplify_multigraph();
    // Dual dart 2k runs like primal dart 2 * from[k], and the dual face on
    // its left surrounds the head of that primal dart.
    let mut face_vertex = vec![NIL; dual.num_faces()];
    for k in 0..dual.m() as u32 {
        for s in 0..2 {
            let head = g.head(2 * from[k as usize] + s);
            let f = dual.face_of(2 * k + s) as usize;
            if face_vertex[f] != NIL && face_vertex[f] != head {
                return Err(McbError::Invariant("dual face surrounds two vertices".into()).into());
            }
            face_vertex[f] = head;
        }
    }
    let imcb = recursive_gmcb(&dual)?;
    let origin = from.iter().map(|&e| g.edge(e).id).collect();
    Ok(Apmc { dual, origin, face_vertex, imcb })
}

/// What a tree edge's cut is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutLink {
    /// A basis cycle of the dual.
    Triple(u32),
    /// A single bridge, by primal edge id.
    Edge(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhEdge {
    /// Local vertex indices.
    pub a: u32,
    pub b: u32,
    pub w: Weight,
    pub link: CutLink,
}

#[derive(Clone, Debug)]
pub struct GomoryHuTree {
    /// Global id of each tree node; node `i` is local vertex `i`.
    pub vids: Vec<u32>,
    pub edges: Vec<GhEdge>,
    cuts: Option<Arc<Apmc>>,
}

/// Gomory-Hu tree of a connected plane graph, read off the region tree of
/// the dual basis.
pub fn gomory_hu(g: &PlanarGraph) -> Result<GomoryHuTree, CutError> {
    if !g.is_connected() {
        return Err(CutError::Disconnected);
    }
    let vids = g.vids().to_vec();
    if g.m() + 1 == g.n() {
        // every min cut of a tree is one of its edges
        let edges = g
            .edges()
            .iter()
            .map(|e| GhEdge { a: e.u, b: e.v, w: e.w, link: CutLink::Edge(e.id) })
            .collect();
        return Ok(GomoryHuTree { vids, edges, cuts: None });
    }
    let ap = apmc(g)?;
    let regions = &ap.imcb.regions;
    let mut kids: Vec<Vec<u32>> = vec![Vec::new(); regions.len()];
    for (x, r) in regions.iter().enumerate() {
        if let Some(p) = r.parent {
            kids[p as usize].push(x as u32);
        }
    }
    // Each step takes the set holding the parent region and splits off the
    // regions inside cycle c. Sets already hanging off the old set lie
    // outside c, so they stay with the parent's part and the new edge joins
    // c's part to it. A set is resolved to its vertex once it holds a single
    // region, through that region's face.
    let vertex_of = |x: u32| ap.face_vertex[regions[x as usize].face as usize];
    let mut edges = Vec::with_capacity(regions.len().saturating_sub(1));
    let mut stack = vec![0u32];
    while let Some(x) = stack.pop() {
        for &c in kids[x as usize].iter().rev() {
            let t = regions[c as usize].triple.ok_or_else(|| McbError::Invariant("region without cycle".into()))?;
            edges.push(GhEdge { a: vertex_of(c), b: vertex_of(x), w: ap.imcb.triples[t as usize].w, link: CutLink::Triple(t) });
            stack.push(c);
        }
    }
    Ok(GomoryHuTree { vids, edges, cuts: Some(Arc::new(ap)) })
}

impl GomoryHuTree {
    pub fn n(&self) -> usize {
        self.vids.len()
    }

    pub fn local(&self, gid: u32) -> Result<u32, CutError> {
        self.vids.binary_search(&gid).map(|i| i as u32).map_err(|_| CutError::UnknownVertex(gid))
    }

    /// Primal edge ids of the cut linked to tree edge `k`, sorted.
    pub fn cut_edges(&self, k: usize) -> Result<Vec<u32>, CutError> {
        match (self.edges[k].link, &self.cuts) {
            (CutLink::Edge(e), _) => Ok(vec![e]),
            (CutLink::Triple(t), Some(ap)) => ap.cut_edges(t as usize),
            (CutLink::Triple(_), None) => Err(McbError::Invariant("tree edge links a missing basis".into()).into()),
        }
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<(u32, u32)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.a as usize].push((e.b, k as u32));
            adj[e.b as usize].push((e.a, k as u32));
        }
        adj
    }

    /// Tree edge of least weight on the path between two local vertices,
    /// by walking the path.
    pub fn path_min_naive(&self, u: u32, v: u32) -> Option<usize> {
        let adj = self.adjacency();
        let mut via = vec![NIL; self.n()];
        let mut seen = vec![false; self.n()];
        seen[u as usize] = true;
        let mut q = VecDeque::from([u]);
        while let Some(x) = q.pop_front() {
            for &(y, k) in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    via[y as usize] = k;
                    q.push_back(y);
                }
            }
        }
        let mut best: Option<usize> = None;
        let mut x = v;
        while x != u {
            let k = via[x as usize];
            if k == NIL {
                return None;
            }
            let e = &self.edges[k as usize];
            if best.map_or(true, |b| e.w < self.edges[b].w) {
                best = Some(k as usize);
            }
            x = if e.a == x { e.b } else { e.a };
        }
        best
    }

    /// Local vertices on the side of `a` when tree edge `k` is removed.
    pub fn side_of_edge(&self, k: usize) -> Vec<bool> {
        let adj = self.adjacency();
        let mut side = vec![false; self.n()];
        let start = self.edges[k].a;
        side[start as usize] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(y, kk) in &adj[x as usize] {
                if kk as usize != k && !side[y as usize] {
                    side[y as usize] = true;
                    stack.push(y);
                }
            }
        }
        side
    }
}

/// Local edges with exactly one end in `side`.
pub fn crossing_edges(g: &PlanarGraph, side: &[bool]) -> Vec<u32> {
    (0..g.m() as u32)
        .filter(|&e| side[g.edge(e).u as usize] != side[g.edge(e).v as usize])
        .collect()
}

/// Whether removing the given edge ids leaves local vertices `s` and `t`
/// in different components.
pub fn separates(g: &PlanarGraph, removed: &[u32], s: u32, t: u32) -> bool {
    let mut gone = vec![false; g.m()];
    for &id in removed {
        if let Some(e) = g.local_edge(id) {
            gone[e as usize] = true;
        }
    }
    let mut seen = vec![false; g.n()];
    seen[s as usize] = true;
    let mut stack = vec![s];
    while let Some(x) = stack.pop() {
        for &d in g.darts(x) {
            let y = g.head(d);
            if !gone[(d >> 1) as usize] && !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    !seen[t as usize]
}

/// Min s-t cut weight by shortest augmenting paths; `s` and `t` are global
/// vertex ids.
pub fn maxflow_reference(g: &PlanarGraph, s: u32, t: u32) -> Result<Weight, CutError> {
    let s = g.local_vertex(s).ok_or(CutError::UnknownVertex(s))?;
    let t = g.local_vertex(t).ok_or(CutError::UnknownVertex(t))?;
    if s == t {
        return Err(CutError::SameVertex);
    }
    // residual capacity per dart; an undirected edge is two opposite arcs
    let mut res: Vec<Weight> = (0..2 * g.m() as u32).map(|d| g.weight(d >> 1)).collect();
    let mut total = 0;
    loop {
        let mut via = vec![NIL; g.n()];
        let mut seen = vec![false; g.n()];
        seen[s as usize] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            if x == t {
                break;
            }
            for &d in g.darts(x) {
                let y = g.head(d);
                if res[d as usize] > 0 && !seen[y as usize] {
                    seen[y as usize] = true;
                    via[y as usize] = d;
                    q.push_back(y);
                }
            }
        }
        if !seen[t as usize] {
            return Ok(total);
        }
        let mut f = Weight::MAX;
        let mut x = t;
        while x != s {
            let d = via[x as usize];
            f = f.min(res[d as usize]);
            x = g.tail(d);
        }
        let mut x = t;
        while x != s {
            let d = via[x as usize];
            res[d as usize] -= f;
            res[(d ^ 1) as usize] += f;
            x = g.tail(d);
        }
        total += f;
    }
}

#[cfg(test)]
mod tests;
