//! Merging the two sides of a separator.
//!
//! Regions of the current partial basis hold face entries: white entries
//! are faces of the graph, black ones stand for a child region (inner) or
//! for everything outside the region (outer). Every boundary vertex `v`
//! owns a contracted and a pruned dual forest with one tree per region that
//! touches `v`; `a_c` and `a_p` map (entry, boundary vertex) to the entry's
//! vertex in those forests.
//!
//! Candidates are Horton cycles rooted at boundary vertices plus the
//! recursive cycles that avoid the separator, in the shared tie order.

use std::collections::HashMap;
use std::sync::Arc;

use super::delta::Where;
use super::*;
use crate::dual_forest::DualForest;
use crate::lexsp::SpTree;
use crate::separator::{JPiece, SeparatorResult, Side};

/// Connected parts of each side that carry at least one cycle.
pub(super) fn split_components(g: &PlanarGraph, sep: &SeparatorResult) -> Vec<PlanarGraph> {
    let mut out = Vec::new();
    for side in [Side::Int, Side::Ext] {
        let mut uf = UnionFind::new(g.n());
        for (e, ed) in g.edges().iter().enumerate() {
            if sep.edge_side[e] == side {
                uf.union(ed.u, ed.v);
            }
        }
        let mut groups: Vec<Vec<u32>> = Vec::new();
        let mut slot: HashMap<u32, usize> = HashMap::new();
        for (e, ed) in g.edges().iter().enumerate() {
            if sep.edge_side[e] == side {
                let r = uf.find(ed.u);
                let i = *slot.entry(r).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[i].push(e as u32);
            }
        }
        for es in groups {
            let mut mask = vec![false; g.m()];
            for &e in &es {
                mask[e as usize] = true;
            }
            let k = g.subgraph(&mask, &[]);
            if k.m() >= k.n() {
                out.push(k);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Kind {
    White(u32),
    /// Stands for the region of a child node.
    Inner(u32),
    Outer,
}

#[derive(Clone, Copy, Debug)]
pub(super) struct FEntry {
    pub region: u32,
    pub kind: Kind,
    pub absorbed: u32,
}

impl FEntry {
    pub fn white(&self) -> bool {
        matches!(self.kind, Kind::White(_))
    }
}

#[derive(Clone, Debug)]
pub(super) struct Region {
    pub white: u32,
    pub node: u32,
    pub delta: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum PRef {
    Root,
    /// The region holding this inner entry at the end.
    Entry(u32),
    /// A node of a recursive result, resolved at the end.
    Explicit(u32, u32),
}

#[derive(Clone, Copy, Debug)]
pub(super) struct GNode {
    pub parent: PRef,
    pub face: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum St {
    Active,
    Passive,
    Cross,
}

/// Per boundary vertex: its lex tree in the current graph and the static
/// dual tree of the non-tree edges, rooted at the external face.
pub(super) struct BTree {
    pub sp: SpTree,
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
    /// Child of the root above each vertex.
    pub top: Vec<u32>,
    /// Dual parent edge of each face.
    pub fpe: Vec<u32>,
}

impl BTree {
    fn new(g: &PlanarGraph, root: u32) -> Result<Self, McbError> {
        let sp = lex_sp_tree(g, root).map_err(|_| McbError::Disconnected)?.into_tree();
        let n = g.n();
        let mut start = vec![0u32; n + 1];
        for &p in &sp.parent {
            if p != NIL {
                start[p as usize + 1] += 1;
            }
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut kids = vec![0u32; n.saturating_sub(1)];
        let mut fill = start.clone();
        for (x, &p) in sp.parent.iter().enumerate() {
            if p != NIL {
                kids[fill[p as usize] as usize] = x as u32;
                fill[p as usize] += 1;
            }
        }
        let (mut tin, mut tout, mut top) = (vec![0u32; n], vec![0u32; n], vec![NIL; n]);
        let mut clock = 0;
        let mut stack = vec![(root, start[root as usize])];
        tin[root as usize] = clock;
        clock += 1;
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if *next < start[x as usize + 1] {
                let c = kids[*next as usize];
                *next += 1;
                tin[c as usize] = clock;
                clock += 1;
                top[c as usize] = if x == root { c } else { top[x as usize] };
                stack.push((c, start[c as usize]));
            } else {
                tout[x as usize] = clock;
                clock += 1;
                stack.pop();
            }
        }
        let nf = g.num_faces();
        let ext = g.ext_face(0).expect("connected graph has an external face");
        let mut fpe = vec![NIL; nf];
        let mut seen = vec![false; nf];
        seen[ext as usize] = true;
        let mut queue = std::collections::VecDeque::from([ext]);
        while let Some(f) = queue.pop_front() {
            for &d in &g.faces()[f as usize].darts {
                let e = d >> 1;
                let ed = g.edge(e);
                if sp.parent_edge[ed.u as usize] == e || sp.parent_edge[ed.v as usize] == e {
                    continue;
                }
                let h = g.face_of(d ^ 1);
                if !seen[h as usize] {
                    seen[h as usize] = true;
                    fpe[h as usize] = e;
                    queue.push_back(h);
                }
            }
        }
        // parents follow from the parent edges
        let mut sp = sp;
        sp.parent = Vec::new();
        Ok(BTree { sp, tin, tout, top, fpe })
    }

    pub fn parent(&self, g: &PlanarGraph, x: u32) -> u32 {
        let ed = g.edge(self.sp.parent_edge[x as usize]);
        ed.u ^ ed.v ^ x
    }

    pub fn is_tree_edge(&self, g: &PlanarGraph, e: u32) -> bool {
        let ed = g.edge(e);
        self.sp.parent_edge[ed.u as usize] == e || self.sp.parent_edge[ed.v as usize] == e
    }

    pub fn anc(&self, a: u32, b: u32) -> bool {
        self.tin[a as usize] <= self.tin[b as usize] && self.tout[b as usize] <= self.tout[a as usize]
    }

    /// Horton cycle of `e` is simple.
    fn simple(&self, g: &PlanarGraph, e: u32) -> bool {
        let ed = g.edge(e);
        ed.u == self.sp.root || ed.v == self.sp.root || self.top[ed.u as usize] != self.top[ed.v as usize]
    }
}

/// State kept for one component of one side.
pub(super) struct KState {
    pub g: PlanarGraph,
    pub res: RecResult,
    pub lca: EulerLca,
    pub kids_start: Vec<u32>,
    pub kids: Vec<u32>,
    /// Face of the current graph for each component face; `NIL` for the
    /// face holding the separator curve.
    pub gface: Vec<u32>,
    pub rfj: u32,
    pub in_bp: Vec<bool>,
    pub state: Vec<St>,
    pub considered: Vec<bool>,
    pub accepted: Vec<bool>,
    pub black: Vec<u32>,
    pub gnode: Vec<u32>,
    /// Bottommost node on the curve path not yet marked cross.
    pub bottom: u32,
}

impl KState {
    pub fn parent(&self, x: u32) -> u32 {
        self.res.nodes[x as usize].parent
    }

    pub fn children(&self, x: u32) -> &[u32] {
        &self.kids[self.kids_start[x as usize] as usize..self.kids_start[x as usize + 1] as usize]
    }

    pub fn on_p(&self, x: u32) -> bool {
        self.lca.is_ancestor(x, self.rfj)
    }

    /// Face of the current graph for component dart `d`.
    fn g_dart(g: &PlanarGraph, k: &PlanarGraph, d: u32) -> u32 {
        2 * g.local_edge(k.edge(d >> 1).id).expect("component edge in graph") + (d & 1)
    }
}

/// Packed to 4-byte alignment: there are many of these at once.
#[derive(Clone, Copy, Debug)]
#[repr(C, packed(4))]
struct Cand {
    w: Weight,
    len: u32,
    a: u32,
    b: u32,
}

const REC: u32 = 1 << 31;

pub(super) struct Merge<'a> {
    pub g: &'a PlanarGraph,
    pub vj: Vec<u32>,
    pub bidx: Vec<u32>,
    pub pieces: Vec<JPiece>,
    pub bt: Vec<BTree>,
    pub cf: Vec<DualForest>,
    pub pf: Vec<DualForest>,
    pub entries: Vec<FEntry>,
    pub a_c: Vec<u32>,
    pub a_p: Vec<u32>,
    pub regions: Vec<Region>,
    pub nodes: Vec<GNode>,
    pub cycles: Vec<CycleRec>,
    pub comps: Vec<KState>,
    /// Component and component edge of every edge; `NIL` when none.
    pub edge_comp: Vec<(u32, u32)>,
    /// Pairs of black entries made by each Horton insertion.
    pub pairs: Vec<(u32, u32)>,
    /// Horton cycles accepted so far, as local edge lists.
    pub accepted_h: Vec<Vec<u32>>,
    pub out_trees: Vec<Arc<TreeRec>>,
    h_tree: Vec<u32>,
    k_tree: Vec<Vec<u32>>,
    emark: Vec<u32>,
    epoch: u32,
    scratch: Vec<u32>,
    vids: Arc<Vec<u32>>,
    dim: usize,
    instrument: bool,
    stats: &'a mut McbStats,
}

pub(super) fn merge(
    g: &PlanarGraph,
    sep: &SeparatorResult,
    solved: Vec<(PlanarGraph, RecResult)>,
    cfg: &McbConfig,
    stats: &mut McbStats,
) -> Result<RecResult, McbError> {
    let mut m = Merge::new(g, sep, solved, cfg, stats)?;
    let cands = m.candidates()?;
    m.run(cands)?;
    m.finish()
}

impl<'a> Merge<'a> {
    fn new(
        g: &'a PlanarGraph,
        sep: &SeparatorResult,
        solved: Vec<(PlanarGraph, RecResult)>,
        cfg: &'a McbConfig,
        stats: &'a mut McbStats,
    ) -> Result<Self, McbError> {
        let r = sep.vj.len();
        let mut bidx = vec![NIL; g.n()];
        for (i, &v) in sep.vj.iter().enumerate() {
            bidx[v as usize] = i as u32;
        }
        let nf = g.num_faces();
        let mut m = Merge {
            g,
            vj: sep.vj.clone(),
            bidx,
            pieces: sep.pieces.clone(),
            bt: Vec::with_capacity(r),
            cf: Vec::with_capacity(r),
            pf: Vec::with_capacity(r),
            entries: (0..nf as u32).map(|f| FEntry { region: 0, kind: Kind::White(f), absorbed: NIL }).collect(),
            a_c: Vec::new(),
            a_p: Vec::new(),
            regions: vec![Region { white: nf as u32, node: 0, delta: (0..r as u32).collect() }],
            nodes: vec![GNode { parent: PRef::Root, face: NIL }],
            cycles: Vec::new(),
            comps: Vec::new(),
            edge_comp: vec![(NIL, NIL); g.m()],
            pairs: Vec::new(),
            accepted_h: Vec::new(),
            out_trees: Vec::new(),
            h_tree: vec![NIL; r],
            k_tree: Vec::new(),
            emark: vec![0; nf],
            epoch: 0,
            scratch: Vec::new(),
            vids: Arc::new(g.vids().to_vec()),
            dim: g.m() + 1 - g.n(),
            instrument: cfg.instrument && g.n() <= cfg.instrument_max_n,
            stats,
        };
        for (k, res) in solved {
            let c = m.comps.len() as u32;
            let ks = m.component_state(k, res)?;
            for ke in 0..ks.g.m() as u32 {
                let ge = g.local_edge(ks.g.edge(ke).id).expect("component edge in graph");
                m.edge_comp[ge as usize] = (c, ke);
            }
            m.k_tree.push(vec![NIL; ks.res.trees.len()]);
            m.comps.push(ks);
        }
        let ext = g.ext_face(0).expect("external face");
        for j in 0..r {
            let bt = BTree::new(g, m.vj[j])?;
            let mut links = Vec::with_capacity(nf);
            for f in 0..nf as u32 {
                if f == ext {
                    continue;
                }
                let e = bt.fpe[f as usize];
                let (a, b) = (g.face_of(2 * e), g.face_of(2 * e + 1));
                links.push((f, if a == f { b } else { a }, e));
            }
            let faces: Vec<u32> = (0..nf as u32).collect();
            let white = vec![true; nf];
            let forest = DualForest::new(&faces, &white, &links, g.m());
            m.pf.push(forest.clone());
            m.cf.push(forest);
            m.bt.push(bt);
        }
        m.a_c = vec![NIL; nf * r];
        for f in 0..nf {
            for j in 0..r {
                m.a_c[f * r + j] = f as u32;
            }
        }
        m.a_p = m.a_c.clone();
        Ok(m)
    }

    fn component_state(&self, k: PlanarGraph, res: RecResult) -> Result<KState, McbError> {
        let g = self.g;
        let parent: Vec<u32> = res.nodes.iter().map(|n| n.parent).collect();
        let lca = EulerLca::new(&parent);
        let nn = parent.len();
        let mut kids_start = vec![0u32; nn + 1];
        for &p in &parent {
            if p != NIL {
                kids_start[p as usize + 1] += 1;
            }
        }
        for i in 0..nn {
            kids_start[i + 1] += kids_start[i];
        }
        let mut kids = vec![0u32; nn.saturating_sub(1)];
        let mut fill = kids_start.clone();
        for (x, &p) in parent.iter().enumerate() {
            if p != NIL {
                kids[fill[p as usize] as usize] = x as u32;
                fill[p as usize] += 1;
            }
        }
        let mut gface: Vec<u32> = (0..k.num_faces())
            .map(|kf| g.face_of(KState::g_dart(g, &k, k.faces()[kf].darts[0])))
            .collect();
        // the face of the component that holds the separator curve
        let z = (0..k.n() as u32)
            .find(|&z| self.bidx[g.local_vertex(k.vid(z)).unwrap() as usize] != NIL)
            .ok_or_else(|| McbError::Invariant("component misses the separator".into()))?;
        let gz = g.local_vertex(k.vid(z)).unwrap();
        let d = self.pieces[self.bidx[gz as usize] as usize].start_corner;
        if g.tail(d) != gz {
            return Err(McbError::Invariant("piece corner not at its vertex".into()));
        }
        let deg = g.degree(gz) as u32;
        let pos = g.rot_pos(d);
        let best = k
            .darts(z)
            .iter()
            .copied()
            .min_by_key(|&kd| (pos + deg - g.rot_pos(KState::g_dart(g, &k, kd))) % deg)
            .ok_or_else(|| McbError::Invariant("separator vertex isolated in component".into()))?;
        let fj = k.face_of(best);
        gface[fj as usize] = NIL;
        let rfj = res.face_node[fj as usize];
        // cycles through separator vertices are dropped
        let mut in_bp = vec![false; nn];
        let mut marks: Vec<Option<Vec<bool>>> = vec![None; res.trees.len()];
        for (i, c) in res.cycles.iter().enumerate() {
            let t = c.tree as usize;
            if marks[t].is_none() {
                marks[t] = Some(self.touch_marks(&res.trees[t]));
            }
            let mk = marks[t].as_ref().unwrap();
            let ge = g.local_edge(c.edge).expect("cycle edge in graph");
            let ed = g.edge(ge);
            let tr = &res.trees[t];
            let (a, b) = (tr.local(g.vid(ed.u)).unwrap(), tr.local(g.vid(ed.v)).unwrap());
            in_bp[i + 1] = !mk[a as usize] && !mk[b as usize];
        }
        Ok(KState {
            lca,
            kids_start,
            kids,
            gface,
            rfj,
            in_bp,
            state: vec![St::Active; nn],
            considered: vec![false; nn],
            accepted: vec![false; nn],
            black: vec![NIL; nn],
            gnode: vec![NIL; nn],
            bottom: rfj,
            g: k,
            res,
        })
    }

    /// Tree vertices that are separator vertices or lie below one.
    fn touch_marks(&self, tr: &TreeRec) -> Vec<bool> {
        let n = tr.len();
        let mut state = vec![0u8; n]; // 0 unknown, 1 clear, 2 marked
        let parent = tr.parent_local();
        let mut path = Vec::new();
        for s in 0..n {
            let mut x = s as u32;
            while state[x as usize] == 0 {
                let gl = self.g.local_vertex(tr.vertex_gids()[x as usize]).unwrap();
                if self.bidx[gl as usize] != NIL {
                    state[x as usize] = 2;
                    break;
                }
                path.push(x);
                if parent[x as usize] == NIL {
                    break;
                }
                x = parent[x as usize];
            }
            let v = if state[x as usize] == 0 { 1 } else { state[x as usize] };
            for y in path.drain(..) {
                state[y as usize] = v;
            }
        }
        state.into_iter().map(|s| s == 2).collect()
    }

    fn candidates(&mut self) -> Result<Vec<Cand>, McbError> {
        let g = self.g;
        let mut out = Vec::new();
        for (j, bt) in self.bt.iter_mut().enumerate() {
            for e in 0..g.m() as u32 {
                if bt.is_tree_edge(g, e) || !bt.simple(g, e) {
                    continue;
                }
                let ed = g.edge(e);
                let (du, dv) = (bt.sp.dist[ed.u as usize], bt.sp.dist[ed.v as usize]);
                out.push(Cand { w: du.w + dv.w + ed.w, len: du.hops + dv.hops + 1, a: j as u32, b: e });
            }
            bt.sp.dist = Vec::new();
        }
        self.stats.horton_candidates += out.len() as u64;
        for (c, ks) in self.comps.iter().enumerate() {
            for (i, cy) in ks.res.cycles.iter().enumerate() {
                if ks.in_bp[i + 1] {
                    out.push(Cand { w: cy.w, len: cy.len, a: c as u32 | REC, b: i as u32 });
                }
            }
        }
        out.sort_unstable_by_key(|c| (c.w, c.len));
        Ok(out)
    }

    /// Sorted vertex and edge ids of a candidate.
    fn sets(&self, c: &Cand) -> (Vec<u32>, Vec<u32>) {
        let g = self.g;
        if c.a & REC != 0 {
            let ks = &self.comps[(c.a & !REC) as usize];
            let cy = ks.res.cycles[c.b as usize];
            let ed = g.edge(g.local_edge(cy.edge).unwrap());
            ks.res.trees[cy.tree as usize]
                .cycle_sets(cy.edge, g.vid(ed.u), g.vid(ed.v))
                .expect("recursive cycles are simple")
        } else {
            let sp = &self.bt[c.a as usize].sp;
            let ed = g.edge(c.b);
            let mut vs = Vec::new();
            let mut es = vec![ed.id];
            for mut x in [ed.u, ed.v] {
                while x != sp.root {
                    vs.push(g.vid(x));
                    es.push(g.edge(sp.parent_edge[x as usize]).id);
                    x = self.bt[c.a as usize].parent(g, x);
                }
            }
            vs.push(g.vid(sp.root));
            vs.sort_unstable();
            es.sort_unstable();
            (vs, es)
        }
    }

    fn run(&mut self, cands: Vec<Cand>) -> Result<(), McbError> {
        let mut i = 0;
        while i < cands.len() && self.cycles.len() < self.dim {
            let mut j = i + 1;
            while j < cands.len() && (cands[j].w, cands[j].len) == (cands[i].w, cands[i].len) {
                j += 1;
            }
            if j - i == 1 {
                self.process(&cands[i])?;
            } else {
                self.stats.tie_groups_expanded += 1;
                let mut keyed: Vec<(Vec<u32>, Vec<u32>, Cand)> = cands[i..j]
                    .iter()
                    .map(|c| {
                        let (v, e) = self.sets(c);
                        (v, e, *c)
                    })
                    .collect();
                keyed.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
                keyed.dedup_by(|a, b| a.1 == b.1);
                for (_, _, c) in keyed {
                    if self.cycles.len() == self.dim {
                        break;
                    }
                    self.process(&c)?;
                }
            }
            i = j;
        }
        if self.cycles.len() != self.dim {
            return Err(McbError::Invariant(format!("basis has {} of {} cycles", self.cycles.len(), self.dim)));
        }
        Ok(())
    }

    fn process(&mut self, c: &Cand) -> Result<(), McbError> {
        if c.a & REC == 0 {
            let (j, e) = (c.a, c.b);
            let ok = self.pf[j as usize].contains_edge(e) && self.live_at(j, e);
            if self.instrument {
                self.stats.instrumented_checks += 1;
                check::split_test(self, j, e, ok)?;
            }
            if ok {
                self.insert_horton(j, e, c.w, c.len)?;
            }
            return Ok(());
        }
        let (k, i) = ((c.a & !REC) as usize, c.b);
        let x = i + 1;
        match self.comps[k].state[x as usize] {
            St::Cross => self.stats.rec_cross += 1,
            St::Passive => {
                let ks = &self.comps[k];
                let face = ks.gface[ks.res.nodes[x as usize].face as usize];
                let parent = PRef::Explicit(k as u32, ks.parent(x));
                self.stats.rec_passive += 1;
                self.comps[k].considered[x as usize] = true;
                self.push_rec_cycle(k, i, parent, face);
            }
            St::Active => {
                self.comps[k].considered[x as usize] = true;
                let ok = if self.comps[k].on_p(x) { self.rec_mirrored(k, x)? } else { self.rec_normal(k, x)? };
                if ok {
                    self.stats.rec_accepted += 1;
                    self.comps[k].accepted[x as usize] = true;
                    if self.instrument {
                        self.stats.instrumented_checks += 1;
                        check::structures(self)?;
                    }
                } else {
                    self.stats.rec_rejected += 1;
                }
            }
        }
        Ok(())
    }

    /// The pruned-forest edge of `e` at `j` lies in a region that still has
    /// `j` on its boundary, not in a part cut off earlier.
    fn live_at(&self, j: u32, e: u32) -> bool {
        let pf = &self.pf[j as usize];
        let Some(k) = pf.edge_of_static(e) else { return false };
        let en = self.entries[pf.face(pf.edge_ends(k).0) as usize];
        en.absorbed == NIL && self.regions[en.region as usize].delta.binary_search(&j).is_ok()
    }

    fn new_node(&mut self, parent: PRef, face: u32) -> u32 {
        self.nodes.push(GNode { parent, face });
        self.nodes.len() as u32 - 1
    }

    fn new_entry(&mut self, region: u32, kind: Kind) -> u32 {
        self.entries.push(FEntry { region, kind, absorbed: NIL });
        let r = self.vj.len();
        self.a_c.extend(std::iter::repeat(NIL).take(r));
        self.a_p.extend(std::iter::repeat(NIL).take(r));
        self.emark.push(0);
        self.entries.len() as u32 - 1
    }

    fn bump(&mut self) -> u32 {
        self.epoch += 1;
        self.epoch
    }

    fn push_rec_cycle(&mut self, k: usize, i: u32, parent: PRef, face: u32) -> u32 {
        let cy = self.comps[k].res.cycles[i as usize];
        let t = &mut self.k_tree[k][cy.tree as usize];
        if *t == NIL {
            self.out_trees.push(self.comps[k].res.trees[cy.tree as usize].clone());
            *t = self.out_trees.len() as u32 - 1;
        }
        let tree = *t;
        self.cycles.push(CycleRec { tree, ..cy });
        let x = self.new_node(parent, face);
        self.comps[k].gnode[i as usize + 1] = x;
        x
    }

    #[inline]
    fn ac(&self, f: u32, j: u32) -> u32 {
        self.a_c[f as usize * self.vj.len() + j as usize]
    }

    #[inline]
    fn ap(&self, f: u32, j: u32) -> u32 {
        let x = self.a_p[f as usize * self.vj.len() + j as usize];
        if x != NIL && self.pf[j as usize].alive(x) {
            x
        } else {
            NIL
        }
    }

    fn set_ac(&mut self, f: u32, j: u32, x: u32) {
        let r = self.vj.len();
        self.a_c[f as usize * r + j as usize] = x;
    }

    fn set_ap(&mut self, f: u32, j: u32, x: u32) {
        let r = self.vj.len();
        self.a_p[f as usize * r + j as usize] = x;
    }

    /// Contract the entries `ms` to the new entry `ne` in both forests of
    /// boundary vertex `j`.
    fn contract_at(&mut self, j: u32, ms: &[u32], ne: u32) -> Result<(), McbError> {
        let mut xs = std::mem::take(&mut self.scratch);
        xs.clear();
        xs.extend(ms.iter().map(|&f| self.ac(f, j)));
        if xs.contains(&NIL) {
            return Err(McbError::Invariant("contracted entry missing from a dual tree".into()));
        }
        let v = self.cf[j as usize].contract_vertices(&xs, ne, false)?;
        self.set_ac(ne, j, v);
        xs.clear();
        xs.extend(ms.iter().map(|&f| self.ap(f, j)).filter(|&x| x != NIL));
        for &f in ms {
            self.set_ac(f, j, NIL);
            self.set_ap(f, j, NIL);
        }
        if !xs.is_empty() {
            let pf = &mut self.pf[j as usize];
            let v = pf.contract_vertices(&xs, ne, false)?;
            pf.prune(&[v]);
            if pf.alive(v) {
                self.set_ap(ne, j, v);
            }
        }
        self.scratch = xs;
        Ok(())
    }

    /// Contract everything outside the marked entries `s` to the new entry
    /// `ne` at `j`: the edges leaving `s` are cut and re-attached to a new
    /// vertex. The cut-off part is never read at `j` again.
    fn cut_at(&mut self, j: u32, s: &[u32], ep: u32, ne: u32) -> Result<(), McbError> {
        let ju = j as usize;
        for pruned in [false, true] {
            let f = if pruned { &self.pf[ju] } else { &self.cf[ju] };
            let mut cut = Vec::new();
            for &en in s {
                let x = if pruned { self.ap(en, j) } else { self.ac(en, j) };
                if x == NIL {
                    continue;
                }
                for (k, z) in f.neighbors(x) {
                    if self.emark[f.face(z) as usize] != ep {
                        cut.push((k, x, z, f.static_of(k), f.edge_ends(k).0 == x));
                    }
                }
            }
            if cut.is_empty() {
                if !pruned {
                    return Err(McbError::Invariant("region side without crossing edge".into()));
                }
                continue;
            }
            let f = if pruned { &mut self.pf[ju] } else { &mut self.cf[ju] };
            for c in &cut {
                f.delete_edge(c.0)?;
            }
            // crossing edges keep their static ids and orientation, as under
            // contraction
            let v = f.add_vertex(ne, false);
            f.insert_edge_with(cut[0].1, v, cut[0].3, !cut[0].4)?;
            for c in &cut[1..] {
                f.insert_edge_with(v, c.1, c.3, c.4)?;
            }
            if pruned {
                // keeps the cut-off part pruned as well
                let ends: Vec<u32> = cut.iter().map(|c| c.2).collect();
                f.prune(&ends);
                f.prune(&[v]);
                if f.alive(v) {
                    self.set_ap(ne, j, v);
                }
            } else {
                self.set_ac(ne, j, v);
            }
        }
        Ok(())
    }

    fn insert_horton(&mut self, j: u32, e: u32, w: Weight, len: u32) -> Result<(), McbError> {
        let g = self.g;
        self.stats.horton_accepted += 1;
        let k = self.cf[j as usize].edge_of_static(e).ok_or_else(|| McbError::Invariant("tested edge gone".into()))?;
        let (ce, _) = self.cf[j as usize].edge_ends(k);
        let r = self.entries[self.cf[j as usize].face(ce) as usize].region;
        let delta = self.regions[r as usize].delta.clone();
        let cls = self.classify(j, e, &delta)?;
        if self.instrument {
            check::delta_sets(self, j, e, &cls)?;
        }
        let split = self.cf[j as usize].delete_edge(k)?;
        let int_small = split.small_is_child_side;
        let s: Vec<u32> = split.small_vertices.iter().map(|&x| self.cf[j as usize].face(x)).collect();
        let s_white = s.iter().filter(|&&f| self.entries[f as usize].white()).count() as u32;
        let r_white = self.regions[r as usize].white;
        let (w_int, w_ext) = if int_small { (s_white, r_white - s_white) } else { (r_white - s_white, s_white) };
        if w_int == 0 || w_ext == 0 {
            return Err(McbError::Invariant("accepted cycle leaves a side without faces".into()));
        }
        // regions: r1 inside, r2 outside; the smaller side moves
        let rn = self.regions.len() as u32;
        self.regions.push(Region { white: 0, node: NIL, delta: Vec::new() });
        for &f in &s {
            self.entries[f as usize].region = rn;
        }
        let (r1, r2) = if int_small { (rn, r) } else { (r, rn) };
        let old_node = self.regions[r as usize].node;
        let fo = self.new_entry(r1, Kind::Outer);
        let x = self.new_node(PRef::Entry(NIL), NIL);
        let fi = self.new_entry(r2, Kind::Inner(x));
        self.nodes[x as usize].parent = PRef::Entry(fi);
        self.pairs.push((fo, fi));
        if self.h_tree[j as usize] == NIL {
            self.out_trees.push(Arc::new(tree_rec(g, &self.vids, &self.bt[j as usize].sp)));
            self.h_tree[j as usize] = self.out_trees.len() as u32 - 1;
        }
        self.cycles.push(CycleRec { tree: self.h_tree[j as usize], edge: g.edge(e).id, w, len });
        let mut d1 = Vec::new();
        let mut d2 = Vec::new();
        for &(jj, wh) in &cls {
            match wh {
                Where::Int => d1.push(jj),
                Where::Ext => d2.push(jj),
                Where::On => {
                    d1.push(jj);
                    d2.push(jj);
                }
            }
        }
        self.regions[r1 as usize] = Region { white: w_int, node: x, delta: d1 };
        self.regions[r2 as usize] = Region { white: w_ext, node: old_node, delta: d2 };
        let ep = self.bump();
        for &f in &s {
            self.emark[f as usize] = ep;
        }
        for &(jj, wh) in &cls {
            match wh {
                Where::On => {
                    let (u_int, u_ext) = if jj == j {
                        (split.child_end, split.parent_end)
                    } else {
                        let start = self.ac(s[0], jj);
                        let (ke, a, b) = crossing(&self.cf[jj as usize], start, |y| {
                            self.emark[self.cf[jj as usize].face(y) as usize] == ep
                        })
                        .ok_or_else(|| McbError::Invariant("no crossing edge".into()))?;
                        self.cf[jj as usize].delete_edge(ke)?;
                        if int_small {
                            (a, b)
                        } else {
                            (b, a)
                        }
                    };
                    let cfj = &mut self.cf[jj as usize];
                    let va = cfj.add_vertex(fo, false);
                    cfj.insert_edge(u_int, va, NIL)?;
                    let vb = cfj.add_vertex(fi, false);
                    cfj.insert_edge(u_ext, vb, NIL)?;
                    self.set_ac(fo, jj, va);
                    self.set_ac(fi, jj, vb);
                    // pruned forest: the crossing edge goes, new leaves would be pruned
                    let start = s.iter().map(|&f| self.ap(f, jj)).find(|&x| x != NIL);
                    let start = start.ok_or_else(|| McbError::Invariant("side without live vertex".into()))?;
                    let pfj = &self.pf[jj as usize];
                    let (ke, a, b) = crossing(pfj, start, |y| self.emark[pfj.face(y) as usize] == ep)
                        .ok_or_else(|| McbError::Invariant("no crossing edge in pruned tree".into()))?;
                    let pfj = &mut self.pf[jj as usize];
                    pfj.delete_edge(ke)?;
                    pfj.prune(&[a, b]);
                }
                Where::Int | Where::Ext => {
                    // contract the side not holding jj
                    let take_inner = wh == Where::Ext;
                    let ne = if take_inner { fi } else { fo };
                    if take_inner == int_small {
                        self.contract_at(jj, &s, ne)?;
                    } else {
                        self.cut_at(jj, &s, ep, ne)?;
                    }
                }
            }
        }
        let mut local = vec![e];
        let bt = &self.bt[j as usize];
        for mut y in [g.edge(e).u, g.edge(e).v] {
            while y != bt.sp.root {
                local.push(bt.sp.parent_edge[y as usize]);
                y = bt.parent(g, y);
            }
        }
        self.mark_crossing(e);
        if self.instrument {
            self.accepted_h.push(local);
            self.stats.instrumented_checks += 1;
            check::structures(self)?;
            check::crossing(self)?;
        }
        Ok(())
    }

    /// Mark recursive cycles that cross the Horton cycle through `e`.
    fn mark_crossing(&mut self, e: u32) {
        let (c, ke) = self.edge_comp[e as usize];
        if c == NIL {
            return;
        }
        let ks = &mut self.comps[c as usize];
        let (f1, f2) = (ks.g.face_of(2 * ke), ks.g.face_of(2 * ke + 1));
        let (n1, n2) = (ks.res.face_node[f1 as usize], ks.res.face_node[f2 as usize]);
        let a1 = ks.lca.lca(n1, n2);
        let a2 = ks.lca.lca(n1, ks.rfj);
        let a3 = ks.lca.lca(n2, ks.rfj);
        // enclosing both sides of e but not the curve
        let mut x = a1;
        while x != 0 && !ks.on_p(x) {
            match ks.state[x as usize] {
                St::Cross => break,
                St::Active => ks.state[x as usize] = St::Cross,
                St::Passive => {}
            }
            x = ks.parent(x);
        }
        // enclosing the curve but neither side of e
        let stop = if ks.lca.depth(a2) >= ks.lca.depth(a3) { a2 } else { a3 };
        let mut b = ks.bottom;
        while b != 0 && ks.lca.depth(b) > ks.lca.depth(stop) {
            if ks.state[b as usize] == St::Active {
                ks.state[b as usize] = St::Cross;
            }
            b = ks.parent(b);
        }
        ks.bottom = b;
    }

    /// Absorb the not yet considered part of the subtree below `y` into
    /// `ms`, passivating on the way; considered nodes contribute their
    /// black entry and stop the search.
    fn absorb_below(&mut self, k: usize, y: u32, ms: &mut Vec<u32>, whites: &mut u32) -> Result<(), McbError> {
        let mut stack = vec![y];
        while let Some(z) = stack.pop() {
            let ks = &mut self.comps[k];
            if !ks.in_bp[z as usize] {
                return Err(McbError::Invariant("absorbed cycle touches the separator".into()));
            }
            if ks.considered[z as usize] {
                if !ks.accepted[z as usize] {
                    return Err(McbError::Invariant("rejected cycle inside an accepted one".into()));
                }
                ms.push(ks.black[z as usize]);
                let gn = ks.gnode[z as usize];
                let p = ks.parent(z);
                self.nodes[gn as usize].parent = PRef::Explicit(k as u32, p);
                continue;
            }
            ks.state[z as usize] = St::Passive;
            let f = ks.gface[ks.res.nodes[z as usize].face as usize];
            ms.push(f);
            *whites += 1;
            stack.extend_from_slice(ks.children(z));
        }
        Ok(())
    }

    fn absorb(&mut self, r: u32, ms: &[u32], ne: u32, whites: u32) -> Result<(), McbError> {
        for &f in ms {
            let en = &mut self.entries[f as usize];
            if en.region != r || en.absorbed != NIL {
                return Err(McbError::Invariant("absorbed entry outside its region".into()));
            }
            en.absorbed = ne;
        }
        self.regions[r as usize].white -= whites;
        for i in 0..self.regions[r as usize].delta.len() {
            let jj = self.regions[r as usize].delta[i];
            self.contract_at(jj, ms, ne)?;
        }
        Ok(())
    }

    /// A recursive cycle with the curve outside.
    fn rec_normal(&mut self, k: usize, x: u32) -> Result<bool, McbError> {
        let ks = &self.comps[k];
        let fx = ks.gface[ks.res.nodes[x as usize].face as usize];
        let en = self.entries[fx as usize];
        if !en.white() || en.absorbed != NIL {
            return Err(McbError::Invariant("face of an active cycle is gone".into()));
        }
        let r = en.region;
        if self.regions[r as usize].white <= ks.res.nodes[x as usize].int_birth {
            return Ok(false);
        }
        let mut ms = vec![fx];
        let mut whites = 1;
        for c in self.comps[k].children(x).to_vec() {
            self.absorb_below(k, c, &mut ms, &mut whites)?;
        }
        if self.instrument && whites != self.comps[k].res.nodes[x as usize].int_birth {
            return Err(McbError::Invariant("absorbed faces differ from the birth count".into()));
        }
        let i = x - 1;
        let gx = self.push_rec_cycle(k, i, PRef::Entry(NIL), fx);
        let bc = self.new_entry(r, Kind::Inner(gx));
        self.nodes[gx as usize].parent = PRef::Entry(bc);
        self.comps[k].black[x as usize] = bc;
        self.absorb(r, &ms, bc, whites)
            .map(|_| true)
    }

    /// A recursive cycle with the curve inside: absorb the outside.
    fn rec_mirrored(&mut self, k: usize, x: u32) -> Result<bool, McbError> {
        let ks = &self.comps[k];
        let p = ks.parent(x);
        let fp = ks.gface[ks.res.nodes[p as usize].face as usize];
        let en = self.entries[fp as usize];
        if !en.white() || en.absorbed != NIL {
            return Err(McbError::Invariant("face outside an active cycle is gone".into()));
        }
        let r = en.region;
        if self.regions[r as usize].white <= ks.res.nodes[x as usize].ext_birth {
            return Ok(false);
        }
        let mut ms = Vec::new();
        let mut whites = 0;
        let (mut prev, mut a) = (x, p);
        loop {
            let ks = &self.comps[k];
            let fa = ks.gface[ks.res.nodes[a as usize].face as usize];
            ms.push(fa);
            whites += 1;
            for c in ks.children(a).to_vec() {
                if c != prev {
                    self.absorb_below(k, c, &mut ms, &mut whites)?;
                }
            }
            let ks = &mut self.comps[k];
            if a == 0 {
                break;
            }
            if ks.considered[a as usize] {
                if !ks.accepted[a as usize] {
                    return Err(McbError::Invariant("rejected cycle around an accepted one".into()));
                }
                ms.push(ks.black[a as usize]);
                let gn = ks.gnode[a as usize];
                self.nodes[gn as usize].face = fa;
                break;
            }
            if !ks.in_bp[a as usize] {
                return Err(McbError::Invariant("absorbed cycle touches the separator".into()));
            }
            ks.state[a as usize] = St::Passive;
            prev = a;
            a = ks.parent(a);
        }
        if self.instrument && whites != self.comps[k].res.nodes[x as usize].ext_birth {
            return Err(McbError::Invariant("absorbed faces differ from the birth count".into()));
        }
        let i = x - 1;
        let gx = self.push_rec_cycle(k, i, PRef::Explicit(k as u32, p), NIL);
        let ob = self.new_entry(r, Kind::Outer);
        self.comps[k].black[x as usize] = ob;
        self.regions[r as usize].node = gx;
        self.absorb(r, &ms, ob, whites).map(|_| true)
    }

    fn finish(mut self) -> Result<RecResult, McbError> {
        let g = self.g;
        for f in 0..g.num_faces() {
            let en = self.entries[f];
            if en.absorbed != NIL {
                continue;
            }
            let node = self.regions[en.region as usize].node;
            let slot = &mut self.nodes[node as usize].face;
            if *slot != NIL && *slot != f as u32 {
                return Err(McbError::Invariant(format!("region node {node} keeps two faces")));
            }
            *slot = f as u32;
        }
        let ext = g.ext_face(0).unwrap();
        if self.nodes[0].face == NIL {
            self.nodes[0].face = ext;
        }
        if self.nodes[0].face != ext {
            return Err(McbError::Invariant("root region does not keep the external face".into()));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for (x, n) in self.nodes.iter().enumerate() {
            let parent = match n.parent {
                PRef::Root => NIL,
                PRef::Entry(b) => {
                    let en = self.entries[b as usize];
                    if en.absorbed != NIL {
                        return Err(McbError::Invariant(format!("parent entry of node {x} absorbed")));
                    }
                    self.regions[en.region as usize].node
                }
                PRef::Explicit(_, 0) => 0,
                PRef::Explicit(k, y) => {
                    let gn = self.comps[k as usize].gnode[y as usize];
                    if gn == NIL {
                        return Err(McbError::Invariant(format!("parent of node {x} not in the basis")));
                    }
                    gn
                }
            };
            if x > 0 && (parent == NIL || parent as usize == x) {
                return Err(McbError::Invariant(format!("node {x} has no parent")));
            }
            nodes.push(NodeRec { parent, face: n.face, int_birth: 0, ext_birth: 0 });
        }
        for f in self.cf.iter().chain(self.pf.iter()) {
            self.stats.forest_relabelled += f.work.relabelled;
            self.stats.forest_split_steps += f.work.split_steps;
            self.stats.forest_pruned += f.work.pruned;
        }
        let res = RecResult { trees: self.out_trees, cycles: self.cycles, nodes, face_node: Vec::new() };
        res.finish(g.num_faces())
    }
}

/// Search from `start` through vertices satisfying `inside` for the edge
/// leaving that set: `(edge, inside end, outside end)`.
fn crossing(f: &DualForest, start: u32, inside: impl Fn(u32) -> bool) -> Option<(u32, u32, u32)> {
    let mut stack = vec![(start, NIL)];
    while let Some((y, from)) = stack.pop() {
        for (k, z) in f.neighbors(y) {
            if k == from {
                continue;
            }
            if !inside(z) {
                return Some((k, y, z));
            }
            stack.push((z, k));
        }
    }
    None
}
