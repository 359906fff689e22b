//! The recursive greedy algorithm for the minimum cycle basis of a plane
//! graph, in implicit form.
//!
//! A balanced Jordan-curve separator splits the graph in two; each side is
//! solved recursively per connected component, and the results are merged
//! with the Horton cycles rooted at the separator vertices. The merge keeps
//! one contracted and one pruned dual forest per separator vertex so that
//! each candidate is tested in constant time.
//!
//! The output lists every basis cycle as a triple `(tree, edge, weight)`:
//! the cycle is `edge` plus the two tree paths from its ends to the root.

mod check;
mod delta;
mod lca;
mod merge;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dual_forest::ForestError;
use crate::gmcb_oracle::{greedy_run, Cycle, CycleBasis, OracleError};
use crate::lexsp::lex_sp_tree;
use crate::planar::{PlanarGraph, UnionFind, Weight};
use crate::separator::{cycle_separator, SeparatorConfig, SeparatorError};

pub use delta::wedge_contains;
pub use lca::EulerLca;

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McbError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("separator failed: {0}")]
    Separator(#[from] SeparatorError),
    #[error("base case failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("dual forest operation failed: {0}")]
    Forest(#[from] ForestError),
    #[error("no triple {0}")]
    UnknownTriple(usize),
    #[error("wedge legs coincide")]
    DegenerateWedge,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

#[derive(Clone, Debug)]
pub struct McbConfig {
    /// Graphs with at most this many vertices go to the greedy oracle.
    pub n0: usize,
    pub separator: SeparatorConfig,
    /// Run the from-scratch invariant checks after every merge step on
    /// levels with at most `instrument_max_n` vertices.
    pub instrument: bool,
    pub instrument_max_n: usize,
}

impl Default for McbConfig {
    fn default() -> Self {
        McbConfig { n0: 32, separator: SeparatorConfig::default(), instrument: false, instrument_max_n: 32 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct McbStats {
    pub merges: u64,
    pub base_cases: u64,
    pub separator_fallbacks: u64,
    pub max_depth: u32,
    pub boundary_vertices: u64,
    pub horton_candidates: u64,
    pub horton_accepted: u64,
    pub rec_accepted: u64,
    pub rec_rejected: u64,
    pub rec_passive: u64,
    pub rec_cross: u64,
    pub tie_groups_expanded: u64,
    pub forest_relabelled: u64,
    pub forest_split_steps: u64,
    pub forest_pruned: u64,
    pub instrumented_checks: u64,
}

/// A shortest path tree kept for cycle expansion. Vertices are those of the
/// graph it was grown in, by sorted global id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeRec {
    vids: Arc<Vec<u32>>,
    root: u32,
    parent: Vec<u32>,
    /// Global edge id to the parent.
    pedge: Vec<u32>,
}

impl TreeRec {
    /// `vids` sorted ascending; `parent` and `pedge` are indexed like
    /// `vids`, with `u32::MAX` at the root.
    pub fn from_parts(vids: Arc<Vec<u32>>, root: u32, parent: Vec<u32>, pedge: Vec<u32>) -> Self {
        TreeRec { vids, root, parent, pedge }
    }

    pub fn root_gid(&self) -> u32 {
        self.vids[self.root as usize]
    }

    pub fn len(&self) -> usize {
        self.vids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vids.is_empty()
    }

    pub fn vertex_gids(&self) -> &[u32] {
        &self.vids
    }

    pub fn local(&self, gid: u32) -> Option<u32> {
        self.vids.binary_search(&gid).ok().map(|i| i as u32)
    }

    /// `(parent gid, edge gid)` of a vertex, `None` at the root.
    pub fn parent_of(&self, gid: u32) -> Option<(u32, u32)> {
        let x = self.local(gid)? as usize;
        (self.parent[x] != NIL).then(|| (self.vids[self.parent[x] as usize], self.pedge[x]))
    }

    pub(crate) fn parent_local(&self) -> &[u32] {
        &self.parent
    }

    pub(crate) fn pedge(&self) -> &[u32] {
        &self.pedge
    }

    /// Vertices and edges (global ids) of the cycle closed by edge `e` with
    /// ends `a`, `b`. `None` if an end is not in the tree or the tree paths
    /// meet below the root.
    pub fn cycle_sets(&self, e: u32, a: u32, b: u32) -> Option<(Vec<u32>, Vec<u32>)> {
        let (mut x, mut y) = (self.local(a)?, self.local(b)?);
        let mut vs = Vec::new();
        let mut es = vec![e];
        while x != self.root {
            vs.push(self.vids[x as usize]);
            es.push(self.pedge[x as usize]);
            x = self.parent[x as usize];
        }
        while y != self.root {
            vs.push(self.vids[y as usize]);
            es.push(self.pedge[y as usize]);
            y = self.parent[y as usize];
        }
        vs.push(self.root_gid());
        vs.sort_unstable();
        es.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) || es.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((vs, es))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub tree: u32,
    pub edge: u32,
    pub w: Weight,
}

/// A node of the region tree. Node 0 is the unbounded region; node `i + 1`
/// is the region just inside basis cycle `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionNode {
    pub parent: Option<u32>,
    /// The one face of the input graph left in this region.
    pub face: u32,
    pub triple: Option<u32>,
    /// Faces on the inner and outer side of the region the cycle split,
    /// when it was accepted.
    pub int_birth: u32,
    pub ext_birth: u32,
}

/// The implicit basis: shortest path trees, one triple per basis cycle in
/// greedy order, and the region tree.
#[derive(Clone, Debug)]
pub struct ImplicitMcb {
    pub trees: Vec<Arc<TreeRec>>,
    pub triples: Vec<Triple>,
    pub regions: Vec<RegionNode>,
    pub stats: McbStats,
    edge_ends: HashMap<u32, (u32, u32)>,
}

/// Per-level result kept for the merge one level up.
#[derive(Clone, Debug)]
pub(crate) struct RecResult {
    pub trees: Vec<Arc<TreeRec>>,
    pub cycles: Vec<CycleRec>,
    pub nodes: Vec<NodeRec>,
    /// Region node of every local face.
    pub face_node: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct CycleRec {
    pub tree: u32,
    pub edge: u32,
    pub w: Weight,
    pub len: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct NodeRec {
    pub parent: u32,
    pub face: u32,
    pub int_birth: u32,
    pub ext_birth: u32,
}

/// Birth counts from a final region tree whose nodes are numbered in
/// acceptance order: undo the splits from the last one back, uniting each
/// node with its parent.
pub(crate) fn births(parent: &[u32]) -> Vec<(u32, u32)> {
    let n = parent.len();
    let mut uf = UnionFind::new(n);
    let mut size = vec![1u32; n];
    let mut out = vec![(0, 0); n];
    for x in (1..n).rev() {
        let (a, b) = (uf.find(x as u32), uf.find(parent[x]));
        out[x] = (size[a as usize], size[b as usize]);
        uf.union(a, b);
        let r = uf.find(a);
        size[r as usize] = size[a as usize] + size[b as usize];
    }
    out
}

impl RecResult {
    fn trivial(g: &PlanarGraph) -> Self {
        let ext = g.ext_face(0).unwrap_or(0);
        RecResult {
            trees: Vec::new(),
            cycles: Vec::new(),
            nodes: vec![NodeRec { parent: NIL, face: ext, int_birth: 0, ext_birth: 0 }],
            face_node: vec![0; g.num_faces()],
        }
    }

    fn finish(mut self, num_faces: usize) -> Result<Self, McbError> {
        let parent: Vec<u32> = self.nodes.iter().map(|n| n.parent).collect();
        for (x, (i, e)) in births(&parent).into_iter().enumerate().skip(1) {
            self.nodes[x].int_birth = i;
            self.nodes[x].ext_birth = e;
        }
        self.face_node = vec![NIL; num_faces];
        for (x, n) in self.nodes.iter().enumerate() {
            let slot = self
                .face_node
                .get_mut(n.face as usize)
                .ok_or_else(|| McbError::Invariant(format!("node {x} has no face")))?;
            if *slot != NIL {
                return Err(McbError::Invariant(format!("face {} owned twice", n.face)));
            }
            *slot = x as u32;
        }
        if self.face_node.contains(&NIL) {
            return Err(McbError::Invariant("a face has no region node".into()));
        }
        Ok(self)
    }
}

pub(crate) fn tree_rec(g: &PlanarGraph, vids: &Arc<Vec<u32>>, sp: &crate::lexsp::SpTree) -> TreeRec {
    TreeRec {
        vids: vids.clone(),
        root: sp.root,
        // derived from the parent edges, which trees kept by a merge drop
        parent: sp
            .parent_edge
            .iter()
            .enumerate()
            .map(|(x, &e)| if e == NIL { NIL } else { g.edge(e).u ^ g.edge(e).v ^ x as u32 })
            .collect(),
        pedge: sp.parent_edge.iter().map(|&e| if e == NIL { NIL } else { g.edge(e).id }).collect(),
    }
}

fn base_case(g: &PlanarGraph, stats: &mut McbStats) -> Result<RecResult, McbError> {
    stats.base_cases += 1;
    let run = greedy_run(g)?;
    let vids = Arc::new(g.vids().to_vec());
    let mut tree_of_root: HashMap<u32, u32> = HashMap::new();
    let mut res = RecResult::trivial(g);
    res.nodes[0].face = run.root_face;
    for (i, c) in run.basis.cycles.iter().enumerate() {
        let (root, e) = c.origin.expect("Horton cycles carry their origin");
        let t = match tree_of_root.get(&root) {
            Some(&t) => t,
            None => {
                let local = g.local_vertex(root).expect("root in graph");
                let sp = lex_sp_tree(g, local).map_err(|_| McbError::Disconnected)?.into_tree();
                res.trees.push(Arc::new(tree_rec(g, &vids, &sp)));
                let t = res.trees.len() as u32 - 1;
                tree_of_root.insert(root, t);
                t
            }
        };
        res.cycles.push(CycleRec { tree: t, edge: e, w: c.weight, len: c.len() as u32 });
        res.nodes.push(NodeRec {
            parent: run.parent[i].map_or(0, |p| p + 1),
            face: run.region_face[i],
            int_birth: 0,
            ext_birth: 0,
        });
    }
    res.finish(g.num_faces())
}

pub(crate) fn solve(g: &PlanarGraph, cfg: &McbConfig, stats: &mut McbStats, depth: u32) -> Result<RecResult, McbError> {
    stats.max_depth = stats.max_depth.max(depth);
    if g.m() + 1 == g.n() {
        return Ok(RecResult::trivial(g).finish(g.num_faces())?);
    }
    if g.n() <= cfg.n0 {
        return base_case(g, stats);
    }
    let sep = match cycle_separator(g, &cfg.separator) {
        Ok(s) => s,
        Err(SeparatorError::TooSmall) => {
            stats.separator_fallbacks += 1;
            return base_case(g, stats);
        }
        Err(e) => return Err(e.into()),
    };
    let comps = merge::split_components(g, &sep);
    let mut solved = Vec::with_capacity(comps.len());
    for k in comps {
        let res = solve(&k, cfg, stats, depth + 1)?;
        solved.push((k, res));
    }
    stats.merges += 1;
    stats.boundary_vertices += sep.vj.len() as u64;
    merge::merge(g, &sep, solved, cfg, stats)
}

/// Implicit minimum cycle basis of a connected plane graph.
pub fn recursive_gmcb(g: &PlanarGraph) -> Result<ImplicitMcb, McbError> {
    recursive_gmcb_with(g, &McbConfig::default())
}

pub fn recursive_gmcb_with(g: &PlanarGraph, cfg: &McbConfig) -> Result<ImplicitMcb, McbError> {
    if !g.is_connected() {
        return Err(McbError::Disconnected);
    }
    let mut stats = McbStats::default();
    let res = solve(g, cfg, &mut stats, 0)?;
    let mut regions: Vec<RegionNode> = res
        .nodes
        .iter()
        .enumerate()
        .map(|(x, n)| RegionNode {
            parent: (n.parent != NIL).then_some(n.parent),
            face: n.face,
            triple: x.checked_sub(1).map(|t| t as u32),
            int_birth: n.int_birth,
            ext_birth: n.ext_birth,
        })
        .collect();
    regions[0].int_birth = 0;
    regions[0].ext_birth = 0;
    Ok(ImplicitMcb {
        trees: res.trees,
        triples: res.cycles.iter().map(|c| Triple { tree: c.tree, edge: c.edge, w: c.w }).collect(),
        regions,
        stats,
        edge_ends: edge_ends(g),
    })
}

fn edge_ends(g: &PlanarGraph) -> HashMap<u32, (u32, u32)> {
    g.edges().iter().map(|e| (e.id, (g.vid(e.u), g.vid(e.v)))).collect()
}

impl ImplicitMcb {
    /// Reassemble from stored parts; `g` supplies edge ends for expansion.
    pub fn from_parts(
        g: &PlanarGraph,
        trees: Vec<Arc<TreeRec>>,
        triples: Vec<Triple>,
        regions: Vec<RegionNode>,
    ) -> Self {
        ImplicitMcb { trees, triples, regions, stats: McbStats::default(), edge_ends: edge_ends(g) }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Stored integers: tree arrays, triples and region records.
    pub fn storage_words(&self) -> usize {
        self.trees.iter().map(|t| 2 * t.len() + 1).sum::<usize>() + 3 * self.triples.len() + 5 * self.regions.len()
    }

    pub fn total_weight(&self) -> Weight {
        self.triples.iter().map(|t| t.w).sum()
    }

    /// The explicit cycle of triple `t`, in time proportional to its length.
    pub fn expand_cycle(&self, t: usize) -> Result<Cycle, McbError> {
        let tr = self.triples.get(t).ok_or(McbError::UnknownTriple(t))?;
        let tree = self.trees.get(tr.tree as usize).ok_or(McbError::UnknownTriple(t))?;
        let &(a, b) = self.edge_ends.get(&tr.edge).ok_or(McbError::UnknownTriple(t))?;
        let (vertices, edges) = tree.cycle_sets(tr.edge, a, b).ok_or(McbError::UnknownTriple(t))?;
        Ok(Cycle { edges, vertices, weight: tr.w, origin: Some((tree.root_gid(), tr.edge)) })
    }

    pub fn explicit_mcb(&self) -> Result<CycleBasis, McbError> {
        let cycles = (0..self.triples.len()).map(|t| self.expand_cycle(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(CycleBasis::new(cycles))
    }
}

pub fn expand_cycle(imcb: &ImplicitMcb, t: usize) -> Result<Cycle, McbError> {
    imcb.expand_cycle(t)
}

pub fn explicit_mcb(imcb: &ImplicitMcb) -> Result<CycleBasis, McbError> {
    imcb.explicit_mcb()
}
