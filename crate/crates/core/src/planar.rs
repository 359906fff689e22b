//! Plane embedded graphs: rotation systems, face tracing, duals and
//! multigraph simplification.
//!
//! Vertices carry global ids (`1..=n` for a freshly built graph) that
//! survive every subgraph extraction, so lexicographic tie breaking sees the
//! same indices at every recursion level. Edges also keep a global id.
//! Locally, edge `e` owns the two darts `2e` (u to v) and `2e + 1` (v to u),
//! and the face of a dart is the face on its left.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

pub type Weight = u64;

/// Coordinates are fixed point with six decimals.
pub const COORD_SCALE: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanarError {
    #[error("embedding is not plane: {0}")]
    EulerViolation(String),
    #[error("vertices {0} and {1} share coordinates")]
    DuplicateVertex(u32, u32),
    #[error("edge {0} has negative weight {1}")]
    NegativeWeight(usize, i64),
    #[error("edge {0} references unknown vertex {1}")]
    UnknownVertex(usize, u32),
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edges {0} and {1} are parallel")]
    ParallelEdge(usize, usize),
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Point from plain integer units, scaled to fixed point.
    pub fn units(x: i64, y: i64) -> Self {
        Point { x: x * COORD_SCALE, y: y * COORD_SCALE }
    }
}

/// Exact orientation of `c` relative to the directed line `a -> b`.
pub fn orient(a: Point, b: Point, c: Point) -> i128 {
    let abx = (b.x - a.x) as i128;
    let aby = (b.y - a.y) as i128;
    let acx = (c.x - a.x) as i128;
    let acy = (c.y - a.y) as i128;
    abx * acy - aby * acx
}

/// Counterclockwise angular order of direction vectors, starting at angle 0.
pub fn angle_cmp(a: (i64, i64), b: (i64, i64)) -> Ordering {
    fn half(d: (i64, i64)) -> u8 {
        if d.1 > 0 || (d.1 == 0 && d.0 > 0) {
            0
        } else {
            1
        }
    }
    match half(a).cmp(&half(b)) {
        Ordering::Equal => {
            let cross = a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
            0.cmp(&cross)
        }
        o => o,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Local endpoints.
    pub u: u32,
    pub v: u32,
    pub w: Weight,
    /// Global edge id.
    pub id: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Darts in walk order; the face lies to the left of each.
    pub darts: Vec<u32>,
    pub external: bool,
    pub comp: u32,
}

/// A plane graph given by a combinatorial rotation system, optionally with
/// straight-line coordinates.
#[derive(Clone, Debug)]
pub struct PlanarGraph {
    vid: Vec<u32>,
    coords: Option<Vec<Point>>,
    edges: Vec<Edge>,
    rot_start: Vec<u32>,
    rot: Vec<u32>,
    rot_pos: Vec<u32>,
    face_of: Vec<u32>,
    faces: Vec<Face>,
    comp_of: Vec<u32>,
    comp_ext: Vec<Option<u32>>,
    identity_ids: bool,
}

/// How the external face of each component is chosen after tracing.
enum ExtRule<'a> {
    Geometric,
    /// Darts whose left face is external, at most one per component.
    Darts(&'a [u32]),
    /// Inherited from the faces of a parent graph.
    Parent(&'a PlanarGraph, &'a [u32]),
}

#[inline]
pub fn twin(d: u32) -> u32 {
    d ^ 1
}

#[inline]
pub fn dart_edge(d: u32) -> u32 {
    d >> 1
}

impl PlanarGraph {
    /// Build from points (vertex `i + 1` sits at `points[i]`) and weighted
    /// edges over 1-based vertex ids. Edge ids follow input order.
    pub fn build_embedding(
        points: &[Point],
        weighted_edges: &[(u32, u32, i64)],
    ) -> Result<PlanarGraph, PlanarError> {
        let n = points.len();
        let mut seen: HashMap<Point, u32> = HashMap::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if let Some(&j) = seen.get(p) {
                return Err(PlanarError::DuplicateVertex(j, i as u32 + 1));
            }
            seen.insert(*p, i as u32 + 1);
        }
        let mut edges = Vec::with_capacity(weighted_edges.len());
        let mut pairs: HashMap<(u32, u32), usize> = HashMap::with_capacity(weighted_edges.len());
        for (i, &(u, v, w)) in weighted_edges.iter().enumerate() {
            for x in [u, v] {
                if x == 0 || x as usize > n {
                    return Err(PlanarError::UnknownVertex(i, x));
                }
            }
            if u == v {
                return Err(PlanarError::SelfLoop(i));
            }
            if w < 0 {
                return Err(PlanarError::NegativeWeight(i, w));
            }
            let key = (u.min(v), u.max(v));
            if let Some(&j) = pairs.get(&key) {
                return Err(PlanarError::ParallelEdge(j, i));
            }
            pairs.insert(key, i);
            edges.push(Edge { u: u - 1, v: v - 1, w: w as Weight, id: i as u32 });
        }
        let mut rotation: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (e, ed) in edges.iter().enumerate() {
            rotation[ed.u as usize].push(2 * e as u32);
            rotation[ed.v as usize].push(2 * e as u32 + 1);
        }
        for (v, darts) in rotation.iter_mut().enumerate() {
            let p = points[v];
            darts.sort_by(|&a, &b| {
                let ha = points[other_end(&edges, a, v as u32) as usize];
                let hb = points[other_end(&edges, b, v as u32) as usize];
                angle_cmp((ha.x - p.x, ha.y - p.y), (hb.x - p.x, hb.y - p.y)).then(a.cmp(&b))
            });
        }
        let vid = (1..=n as u32).collect();
        let g = PlanarGraph::assemble(vid, Some(points.to_vec()), edges, rotation, ExtRule::Geometric);
        g.check_euler()?;
        if let Some((a, b)) = find_crossing(points, &g.edges) {
            return Err(PlanarError::EulerViolation(format!(
                "edges {} and {} cross",
                g.edges[a].id, g.edges[b].id
            )));
        }
        Ok(g)
    }

    /// Build from an explicit rotation system. `ext_darts` names darts whose
    /// left face is external (one per component; components without one get
    /// their first traced face). Vertex ids are `1..=n`, edge ids follow
    /// input order.
    pub fn from_rotation(
        n: usize,
        edges: &[(u32, u32, Weight)],
        rotation: Vec<Vec<u32>>,
        ext_darts: &[u32],
    ) -> Result<PlanarGraph, PlanarError> {
        let edges: Vec<Edge> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v, w))| Edge { u, v, w, id: i as u32 })
            .collect();
        let vid = (1..=n as u32).collect();
        let g = PlanarGraph::assemble(vid, None, edges, rotation, ExtRule::Darts(ext_darts));
        g.check_euler()?;
        Ok(g)
    }

    fn assemble(
        vid: Vec<u32>,
        coords: Option<Vec<Point>>,
        edges: Vec<Edge>,
        rotation: Vec<Vec<u32>>,
        rule: ExtRule<'_>,
    ) -> PlanarGraph {
        let n = vid.len();
        let m = edges.len();
        let identity_ids = vid.iter().enumerate().all(|(i, &g)| g as usize == i + 1)
            && edges.iter().enumerate().all(|(i, e)| e.id as usize == i);
        let mut rot_start = Vec::with_capacity(n + 1);
        let mut rot = Vec::with_capacity(2 * m);
        let mut rot_pos = vec![0u32; 2 * m];
        rot_start.push(0);
        for darts in &rotation {
            for (k, &d) in darts.iter().enumerate() {
                rot_pos[d as usize] = k as u32;
                rot.push(d);
            }
            rot_start.push(rot.len() as u32);
        }
        let mut g = PlanarGraph {
            vid,
            coords,
            edges,
            rot_start,
            rot,
            rot_pos,
            face_of: vec![u32::MAX; 2 * m],
            faces: Vec::new(),
            comp_of: vec![u32::MAX; n],
            comp_ext: Vec::new(),
            identity_ids,
        };
        g.label_components();
        g.trace_all_faces();
        g.choose_external(rule);
        g
    }

    fn label_components(&mut self) {
        let n = self.n();
        let mut c = 0u32;
        let mut stack = Vec::new();
        let mut comp_of = vec![u32::MAX; n];
        for s in 0..n {
            if comp_of[s] != u32::MAX {
                continue;
            }
            comp_of[s] = c;
            stack.push(s as u32);
            while let Some(x) = stack.pop() {
                for &d in self.darts(x) {
                    let y = self.head(d);
                    if comp_of[y as usize] == u32::MAX {
                        comp_of[y as usize] = c;
                        stack.push(y);
                    }
                }
            }
            c += 1;
        }
        self.comp_of = comp_of;
        self.comp_ext = vec![None; c as usize];
    }

    fn trace_all_faces(&mut self) {
        for d0 in 0..self.face_of.len() as u32 {
            if self.face_of[d0 as usize] != u32::MAX {
                continue;
            }
            let f = self.faces.len() as u32;
            let mut darts = Vec::new();
            let mut d = d0;
            loop {
                self.face_of[d as usize] = f;
                darts.push(d);
                d = self.face_next(d);
                if d == d0 {
                    break;
                }
            }
            let comp = self.comp_of[self.tail(d0) as usize];
            self.faces.push(Face { darts, external: false, comp });
        }
    }

    fn choose_external(&mut self, rule: ExtRule<'_>) {
        let nc = self.comp_ext.len();
        let mut ext: Vec<Option<u32>> = vec![None; nc];
        match rule {
            ExtRule::Geometric => {
                let pts = self.coords.as_ref().expect("geometric rule needs coordinates");
                let mut low: Vec<Option<u32>> = vec![None; nc];
                for v in 0..self.n() {
                    let c = self.comp_of[v] as usize;
                    let better = match low[c] {
                        None => true,
                        Some(b) => pts[v] < pts[b as usize],
                    };
                    if better {
                        low[c] = Some(v as u32);
                    }
                }
                for c in 0..nc {
                    let p = low[c].unwrap();
                    let darts = self.darts(p);
                    if darts.is_empty() {
                        continue;
                    }
                    let west = (-1i64, 0i64);
                    let o = pts[p as usize];
                    let mut pick = *darts.last().unwrap();
                    for &d in darts {
                        let h = pts[self.head(d) as usize];
                        if angle_cmp((h.x - o.x, h.y - o.y), west) == Ordering::Less {
                            pick = d;
                        }
                    }
                    ext[c] = Some(self.face_of[pick as usize]);
                }
            }
            ExtRule::Darts(darts) => {
                for &d in darts {
                    let f = self.face_of[d as usize];
                    let c = self.faces[f as usize].comp as usize;
                    if ext[c].is_none() {
                        ext[c] = Some(f);
                    }
                }
            }
            ExtRule::Parent(parent, parent_dart) => {
                ext = self.external_from_parent(parent, parent_dart);
            }
        }
        // Fallback for components not covered: their first face.
        for (f, face) in self.faces.iter().enumerate() {
            let c = face.comp as usize;
            if ext[c].is_none() {
                ext[c] = Some(f as u32);
            }
        }
        for c in 0..nc {
            if let Some(f) = ext[c] {
                self.faces[f as usize].external = true;
            }
        }
        self.comp_ext = ext;
    }

    /// External faces inherited from a parent embedding. Parent faces are
    /// merged across edges missing from this graph; the resulting classes
    /// are the faces of the whole subgraph. A breadth-first walk from the
    /// class holding the parent's external faces alternates classes and
    /// components; each component's external face is the one bordering the
    /// class it was reached from.
    fn external_from_parent(&self, parent: &PlanarGraph, parent_dart: &[u32]) -> Vec<Option<u32>> {
        let nf = parent.faces.len();
        let mut uf = UnionFind::new(nf + 1);
        let root = nf as u32;
        for (f, face) in parent.faces.iter().enumerate() {
            if face.external {
                uf.union(f as u32, root);
            }
        }
        let mut present = vec![false; parent.m()];
        for &pd in parent_dart.iter().step_by(2) {
            present[dart_edge(pd) as usize] = true;
        }
        for e in 0..parent.m() {
            if !present[e] {
                uf.union(parent.face_of[2 * e], parent.face_of[2 * e + 1]);
            }
        }
        // class -> list of (component, own face)
        let mut by_class: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        let mut comp_classes: Vec<Vec<u32>> = vec![Vec::new(); self.comp_ext.len()];
        for d in 0..self.face_of.len() {
            let class = uf.find(parent.face_of[parent_dart[d] as usize]);
            let f = self.face_of[d];
            let c = self.faces[f as usize].comp;
            let list = by_class.entry(class).or_default();
            if !list.iter().any(|&(cc, _)| cc == c) {
                list.push((c, f));
                comp_classes[c as usize].push(class);
            }
        }
        let mut ext = vec![None; self.comp_ext.len()];
        let mut seen_class: HashMap<u32, ()> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        let start = uf.find(root);
        queue.push_back(start);
        seen_class.insert(start, ());
        while let Some(class) = queue.pop_front() {
            if let Some(list) = by_class.get(&class) {
                for &(c, f) in list {
                    if ext[c as usize].is_some() {
                        continue;
                    }
                    ext[c as usize] = Some(f);
                    for &cl in &comp_classes[c as usize] {
                        if seen_class.insert(cl, ()).is_none() {
                            queue.push_back(cl);
                        }
                    }
                }
            }
        }
        ext
    }

    /// Euler's formula on every component; isolated vertices count one face.
    fn check_euler(&self) -> Result<(), PlanarError> {
        let nc = self.comp_ext.len();
        let mut nv = vec![0i64; nc];
        let mut ne = vec![0i64; nc];
        let mut nf = vec![0i64; nc];
        for v in 0..self.n() {
            nv[self.comp_of[v] as usize] += 1;
        }
        for e in &self.edges {
            ne[self.comp_of[e.u as usize] as usize] += 1;
        }
        for f in &self.faces {
            nf[f.comp as usize] += 1;
        }
        for c in 0..nc {
            let faces = if ne[c] == 0 { 1 } else { nf[c] };
            if nv[c] - ne[c] + faces != 2 {
                return Err(PlanarError::EulerViolation(format!(
                    "component {} has n={} m={} f={}",
                    c, nv[c], ne[c], faces
                )));
            }
        }
        Ok(())
    }

    /// Subgraph on the chosen local edges plus extra local vertices. Ids,
    /// weights, coordinates and the restricted rotation are inherited.
    pub fn subgraph(&self, edge_mask: &[bool], extra_vertices: &[u32]) -> PlanarGraph {
        let n = self.n();
        let mut keep_v = vec![false; n];
        for &v in extra_vertices {
            keep_v[v as usize] = true;
        }
        for (e, ed) in self.edges.iter().enumerate() {
            if edge_mask[e] {
                keep_v[ed.u as usize] = true;
                keep_v[ed.v as usize] = true;
            }
        }
        let mut new_v = vec![u32::MAX; n];
        let mut vid = Vec::new();
        let mut coords = self.coords.as_ref().map(|_| Vec::new());
        for v in 0..n {
            if keep_v[v] {
                new_v[v] = vid.len() as u32;
                vid.push(self.vid[v]);
                if let (Some(c), Some(src)) = (coords.as_mut(), self.coords.as_ref()) {
                    c.push(src[v]);
                }
            }
        }
        let mut new_e = vec![u32::MAX; self.m()];
        let mut edges = Vec::new();
        let mut parent_dart = Vec::new();
        for (e, ed) in self.edges.iter().enumerate() {
            if edge_mask[e] {
                new_e[e] = edges.len() as u32;
                edges.push(Edge { u: new_v[ed.u as usize], v: new_v[ed.v as usize], w: ed.w, id: ed.id });
                parent_dart.push(2 * e as u32);
                parent_dart.push(2 * e as u32 + 1);
            }
        }
        let mut rotation = vec![Vec::new(); vid.len()];
        for v in 0..n {
            if !keep_v[v] {
                continue;
            }
            let r = &mut rotation[new_v[v] as usize];
            for &d in self.darts(v as u32) {
                let e = dart_edge(d) as usize;
                if edge_mask[e] {
                    r.push(2 * new_e[e] + (d & 1));
                }
            }
        }
        let rule = if coords.is_some() {
            ExtRule::Geometric
        } else {
            ExtRule::Parent(self, &parent_dart)
        };
        PlanarGraph::assemble(vid, coords, edges, rotation, rule)
    }

    // ----- accessors -----

    pub fn n(&self) -> usize {
        self.vid.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn num_components(&self) -> usize {
        self.comp_ext.len()
    }

    pub fn comp_of(&self, v: u32) -> u32 {
        self.comp_of[v as usize]
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    /// Global id of a local vertex.
    #[inline]
    pub fn vid(&self, v: u32) -> u32 {
        self.vid[v as usize]
    }

    pub fn vids(&self) -> &[u32] {
        &self.vid
    }

    /// Local index of a global vertex id.
    pub fn local_vertex(&self, gid: u32) -> Option<u32> {
        if self.identity_ids {
            return (gid >= 1 && (gid as usize) <= self.n()).then(|| gid - 1);
        }
        self.vid.binary_search(&gid).ok().map(|i| i as u32)
    }

    /// Local index of a global edge id.
    pub fn local_edge(&self, gid: u32) -> Option<u32> {
        if self.identity_ids {
            return ((gid as usize) < self.m()).then_some(gid);
        }
        self.edges.binary_search_by_key(&gid, |e| e.id).ok().map(|i| i as u32)
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: u32) -> &Edge {
        &self.edges[e as usize]
    }

    #[inline]
    pub fn weight(&self, e: u32) -> Weight {
        self.edges[e as usize].w
    }

    #[inline]
    pub fn tail(&self, d: u32) -> u32 {
        let e = &self.edges[(d >> 1) as usize];
        if d & 1 == 0 {
            e.u
        } else {
            e.v
        }
    }

    #[inline]
    pub fn head(&self, d: u32) -> u32 {
        self.tail(d ^ 1)
    }

    /// Darts leaving `v` in counterclockwise order.
    #[inline]
    pub fn darts(&self, v: u32) -> &[u32] {
        &self.rot[self.rot_start[v as usize] as usize..self.rot_start[v as usize + 1] as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.rot_start[v as usize + 1] - self.rot_start[v as usize]) as usize
    }

    /// Position of `d` within the rotation of its tail.
    #[inline]
    pub fn rot_pos(&self, d: u32) -> u32 {
        self.rot_pos[d as usize]
    }

    #[inline]
    pub fn rot_next(&self, d: u32) -> u32 {
        let v = self.tail(d);
        let s = self.darts(v);
        s[(self.rot_pos[d as usize] as usize + 1) % s.len()]
    }

    #[inline]
    pub fn rot_prev(&self, d: u32) -> u32 {
        let v = self.tail(d);
        let s = self.darts(v);
        s[(self.rot_pos[d as usize] as usize + s.len() - 1) % s.len()]
    }

    /// Next dart on the walk of the face left of `d`.
    #[inline]
    pub fn face_next(&self, d: u32) -> u32 {
        self.rot_prev(d ^ 1)
    }

    /// Face on the left of `d`. The corner between `d` and `rot_next(d)` at
    /// the tail of `d` also belongs to this face.
    #[inline]
    pub fn face_of(&self, d: u32) -> u32 {
        self.face_of[d as usize]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// External face of a component, `None` for an isolated vertex.
    pub fn ext_face(&self, comp: u32) -> Option<u32> {
        self.comp_ext[comp as usize]
    }

    /// Dart from local `u` to local `v`, if adjacent.
    pub fn dart_between(&self, u: u32, v: u32) -> Option<u32> {
        self.darts(u).iter().copied().find(|&d| self.head(d) == v)
    }

    /// Face trace as a list (same data as [`faces`](Self::faces)).
    pub fn trace_faces(&self) -> Vec<Face> {
        self.faces.clone()
    }

    /// Components as sorted lists of global vertex ids, ordered by their
    /// smallest id.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let mut comps: Vec<Vec<u32>> = vec![Vec::new(); self.num_components()];
        for v in 0..self.n() {
            comps[self.comp_of[v] as usize].push(self.vid[v]);
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// The dual of a connected graph.
    pub fn dual_graph(&self) -> Result<DualGraph, PlanarError> {
        if !self.is_connected() {
            return Err(PlanarError::Disconnected);
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, ed)| (self.face_of[2 * e], self.face_of[2 * e + 1], ed.w))
            .collect();
        let rotation = self.faces.iter().map(|f| f.darts.clone()).collect();
        // The dual face left of dart d surrounds the head of d.
        let ext = if self.n() > 0 && self.degree(0) > 0 { vec![self.darts(0)[0] ^ 1] } else { vec![] };
        Ok(DualGraph { num_vertices: self.faces.len(), edges, rotation, ext_darts: ext })
    }

    /// Sum of edge weights of a set of local edges.
    pub fn weight_of(&self, edges: &[u32]) -> Weight {
        edges.iter().map(|&e| self.weight(e)).sum()
    }
}

fn other_end(edges: &[Edge], d: u32, v: u32) -> u32 {
    let e = &edges[(d >> 1) as usize];
    if e.u == v {
        e.v
    } else {
        e.u
    }
}

/// A plane multigraph in combinatorial form; the dual is the main source.
/// Dual vertex `f` is face `f` of the primal; dual edge `e` crosses primal
/// edge `e` and dart `d` of the dual runs from the face left of primal dart
/// `d` to the face on its right.
#[derive(Clone, Debug)]
pub struct DualGraph {
    pub num_vertices: usize,
    /// Per primal edge: (left face of dart 2e, right face, weight).
    pub edges: Vec<(u32, u32, Weight)>,
    /// Dual darts around each dual vertex in counterclockwise order.
    pub rotation: Vec<Vec<u32>>,
    /// A dart whose left face is taken as external.
    pub ext_darts: Vec<u32>,
}

impl DualGraph {
    pub fn degree(&self, f: u32) -> usize {
        self.rotation[f as usize].len()
    }

    /// Replace parallel edges and loops by subdivided paths so the result
    /// is a simple plane graph. Returns the graph and, per new edge, the
    /// dual edge it came from.
    pub fn simplify_multigraph(&self) -> (PlanarGraph, Vec<u32>) {
        simplify_multigraph(self.num_vertices, &self.edges, &self.rotation, &self.ext_darts)
    }
}

/// See [`DualGraph::simplify_multigraph`]. Every extra copy of a parallel
/// class is split once into weights `floor(w/2), ceil(w/2)`; every loop
/// becomes a triangle with weights `floor(w/2)` and the halves of
/// `ceil(w/2)`.
pub fn simplify_multigraph(
    n: usize,
    edges: &[(u32, u32, Weight)],
    rotation: &[Vec<u32>],
    ext_darts: &[u32],
) -> (PlanarGraph, Vec<u32>) {
    let mut out: Vec<(u32, u32, Weight)> = Vec::with_capacity(edges.len());
    let mut origin: Vec<u32> = Vec::with_capacity(edges.len());
    // For each old dart: the new dart replacing it at its tail.
    let mut repl = vec![0u32; 2 * edges.len()];
    let mut extra_rot: Vec<Vec<u32>> = Vec::new();
    let mut next_v = n as u32;
    let mut seen: HashMap<(u32, u32), ()> = HashMap::new();
    let push = |out: &mut Vec<(u32, u32, Weight)>, origin: &mut Vec<u32>, a: u32, b: u32, w: Weight, o: u32| {
        out.push((a, b, w));
        origin.push(o);
        2 * (out.len() as u32 - 1)
    };
    for (e, &(a, b, w)) in edges.iter().enumerate() {
        let e32 = e as u32;
        if a == b {
            let x = next_v;
            let y = next_v + 1;
            next_v += 2;
            let h = w - w / 2;
            let d1 = push(&mut out, &mut origin, a, x, w / 2, e32);
            let d2 = push(&mut out, &mut origin, x, y, h / 2, e32);
            let d3 = push(&mut out, &mut origin, y, a, h - h / 2, e32);
            repl[2 * e] = d1;
            repl[2 * e + 1] = d3 ^ 1;
            extra_rot.push(vec![d1 ^ 1, d2]);
            extra_rot.push(vec![d2 ^ 1, d3]);
        } else if seen.insert((a.min(b), a.max(b)), ()).is_none() {
            let d = push(&mut out, &mut origin, a, b, w, e32);
            repl[2 * e] = d;
            repl[2 * e + 1] = d ^ 1;
        } else {
            let x = next_v;
            next_v += 1;
            let d1 = push(&mut out, &mut origin, a, x, w / 2, e32);
            let d2 = push(&mut out, &mut origin, x, b, w - w / 2, e32);
            repl[2 * e] = d1;
            repl[2 * e + 1] = d2 ^ 1;
            extra_rot.push(vec![d1 ^ 1, d2]);
        }
    }
    let mut rot: Vec<Vec<u32>> = rotation
        .iter()
        .map(|ds| ds.iter().map(|&d| repl[d as usize]).collect())
        .collect();
    rot.extend(extra_rot);
    let ext: Vec<u32> = ext_darts.iter().map(|&d| repl[d as usize]).collect();
    let g = PlanarGraph::from_rotation(next_v as usize, &out, rot, &ext)
        .expect("subdividing a plane multigraph keeps it plane");
    (g, origin)
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the larger index as root so a sentinel at the end stays root
        if ra < rb {
            self.parent[ra as usize] = rb;
        } else {
            self.parent[rb as usize] = ra;
        }
        true
    }
}

/// Grid-bucketed search for two segments that meet anywhere other than a
/// shared endpoint.
fn find_crossing(points: &[Point], edges: &[Edge]) -> Option<(usize, usize)> {
    let m = edges.len();
    if m < 2 {
        return None;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let side = ((m as f64).sqrt().ceil() as i64).max(1);
    let cw = ((x1 - x0) / side + 1).max(1);
    let ch = ((y1 - y0) / side + 1).max(1);
    let cell = |p: Point| (((p.x - x0) / cw).min(side - 1), ((p.y - y0) / ch).min(side - 1));
    let mut grid: Vec<Vec<u32>> = vec![Vec::new(); (side * side) as usize];
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = (cell(points[e.u as usize]), cell(points[e.v as usize]));
        for cx in a.0.min(b.0)..=a.0.max(b.0) {
            for cy in a.1.min(b.1)..=a.1.max(b.1) {
                grid[(cx * side + cy) as usize].push(i as u32);
            }
        }
    }
    for bucket in &grid {
        for (k, &i) in bucket.iter().enumerate() {
            for &j in &bucket[k + 1..] {
                if segments_conflict(points, &edges[i as usize], &edges[j as usize]) {
                    return Some((i as usize, j as usize));
                }
            }
        }
    }
    None
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0 && p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

pub(crate) fn segments_conflict(pts: &[Point], e: &Edge, f: &Edge) -> bool {
    let (a, b, c, d) = (pts[e.u as usize], pts[e.v as usize], pts[f.u as usize], pts[f.v as usize]);
    let shared = [e.u, e.v].iter().find(|&&x| x == f.u || x == f.v).copied();
    if let Some(s) = shared {
        let p = pts[s as usize];
        let q = if e.u == s { b } else { a };
        let r = if f.u == s { d } else { c };
        // Overlap only when collinear and pointing the same way.
        return orient(p, q, r) == 0
            && ((q.x - p.x) as i128 * (r.x - p.x) as i128 + (q.y - p.y) as i128 * (r.y - p.y) as i128) > 0;
    }
    let o1 = orient(a, b, c).signum();
    let o2 = orient(a, b, d).signum();
    let o3 = orient(c, d, a).signum();
    let o4 = orient(c, d, b).signum();
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    on_segment(a, b, c) || on_segment(a, b, d) || on_segment(c, d, a) || on_segment(c, d, b)
}
