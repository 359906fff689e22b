//! Contracted and pruned dual trees.
//!
//! One `DualForest` holds every contracted dual tree `T̃_R(v)` of a single
//! boundary vertex `v`, one tree per region. Vertices stand for faces of
//! their region (elementary faces are white, child regions are black).
//! Each vertex keeps its incident edges in a doubly linked list whose head
//! is the parent edge, so contracting an edge splices two lists in O(1)
//! after relabelling the shorter one. Deleting an edge runs two searches in
//! lockstep from its ends and stops as soon as one side is exhausted.
//!
//! Edges made from the static dual tree keep a two-way link to the static
//! edge, which is what makes `contains_edge` constant time.

use std::cell::RefCell;
use std::collections::HashMap;

use thiserror::Error;

pub const NIL: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("edges do not span a connected subtree")]
    NotASubtree,
    #[error("edge is not in the forest")]
    EdgeAbsent,
    #[error("both vertices are in the same tree")]
    SameTree,
    #[error("vertex {0} is not alive")]
    DeadVertex(u32),
}

/// `bits` packs the list length with the flags below.
#[derive(Clone, Copy, Debug)]
struct Vert {
    head: u32,
    tail: u32,
    face: u32,
    tree: u32,
    bits: u32,
}

const WHITE: u32 = 1 << 31;
const ALIVE: u32 = 1 << 30;
/// The head entry is the parent edge.
const PARENT: u32 = 1 << 29;
const LEN: u32 = PARENT - 1;

impl Vert {
    fn fresh(face: u32, tree: u32, white: bool) -> Self {
        Vert { head: NIL, tail: NIL, face, tree, bits: ALIVE | if white { WHITE } else { 0 } }
    }

    fn len(&self) -> u32 {
        self.bits & LEN
    }

    fn set_len(&mut self, l: u32) {
        self.bits = (self.bits & !LEN) | l;
    }

    fn white(&self) -> bool {
        self.bits & WHITE != 0
    }

    fn alive(&self) -> bool {
        self.bits & ALIVE != 0
    }

    fn has_parent(&self) -> bool {
        self.bits & PARENT != 0
    }

    fn set_flag(&mut self, flag: u32, on: bool) {
        if on {
            self.bits |= flag;
        } else {
            self.bits &= !flag;
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    next: u32,
    prev: u32,
    owner: u32,
}

/// Result of `delete_edge`: the smaller side got a fresh tree id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub small_tree: u32,
    pub large_tree: u32,
    /// Vertices of the smaller side.
    pub small_vertices: Vec<u32>,
    /// Whether the smaller side is the one that held entry `2k`, the side
    /// that was the child when the edge was made.
    pub small_is_child_side: bool,
    pub child_end: u32,
    pub parent_end: u32,
}

/// Work counters for the amortization checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForestWork {
    pub relabelled: u64,
    pub split_steps: u64,
    pub pruned: u64,
}

/// Vertex marks shared by every forest on the thread. The forests of one
/// merge can hold many vertices each, so they do not keep their own.
#[derive(Default)]
struct Marks {
    mark: Vec<u32>,
    epoch: u32,
}

impl Marks {
    fn bump(&mut self, n: usize) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        if self.mark.len() < n {
            self.mark.resize(n, 0);
        }
        self.epoch
    }
}

thread_local! {
    static MARK: RefCell<Marks> = RefCell::new(Marks::default());
}

#[derive(Clone, Debug, Default)]
pub struct DualForest {
    verts: Vec<Vert>,
    entries: Vec<Entry>,
    edge_alive: Vec<bool>,
    edge_static: Vec<u32>,
    static_edge: Vec<u32>,
    tree_size: Vec<u32>,
    scratch: Vec<u32>,
    pub work: ForestWork,
}

impl DualForest {
    /// Build from `faces.len()` vertices, vertex `i` standing for
    /// `faces[i]`. `links` holds `(child, parent, static id)` triples;
    /// vertices without a parent link are roots. `num_static` bounds the
    /// static ids.
    pub fn new(faces: &[u32], white: &[bool], links: &[(u32, u32, u32)], num_static: usize) -> Self {
        let n = faces.len();
        let mut f = DualForest {
            verts: (0..n)
                .map(|i| Vert::fresh(faces[i], NIL, white[i]))
                .collect(),
            entries: Vec::with_capacity(2 * links.len()),
            edge_alive: Vec::with_capacity(links.len()),
            edge_static: Vec::with_capacity(links.len()),
            static_edge: vec![NIL; num_static],
            tree_size: Vec::new(),
            scratch: Vec::new(),
            work: ForestWork::default(),
        };
        // parent edges first so they land at the heads
        for &(c, _, s) in links {
            let k = f.new_edge(s);
            f.push_front(c, 2 * k);
            f.verts[c as usize].set_flag(PARENT, true);
        }
        for (k, &(_, p, _)) in links.iter().enumerate() {
            f.push_back(p, 2 * k as u32 + 1);
        }
        for x in 0..n as u32 {
            if f.verts[x as usize].tree == NIL && !f.verts[x as usize].has_parent() {
                let t = f.tree_size.len() as u32;
                f.tree_size.push(0);
                let comp = f.component(x);
                for &y in &comp {
                    f.verts[y as usize].tree = t;
                }
                f.tree_size[t as usize] = comp.len() as u32;
            }
        }
        f
    }

    fn new_edge(&mut self, stat: u32) -> u32 {
        let k = self.edge_alive.len() as u32;
        self.edge_alive.push(true);
        self.edge_static.push(stat);
        if stat != NIL {
            self.static_edge[stat as usize] = k;
        }
        for _ in 0..2 {
            self.entries.push(Entry { next: NIL, prev: NIL, owner: NIL });
        }
        k
    }

    fn push_front(&mut self, x: u32, e: u32) {
        let v = &mut self.verts[x as usize];
        let old = v.head;
        v.head = e;
        if old == NIL {
            v.tail = e;
        }
        v.bits += 1;
        self.entries[e as usize] = Entry { next: old, prev: NIL, owner: x };
        if old != NIL {
            self.entries[old as usize].prev = e;
        }
    }

    fn push_back(&mut self, x: u32, e: u32) {
        let v = &mut self.verts[x as usize];
        let old = v.tail;
        v.tail = e;
        if old == NIL {
            v.head = e;
        }
        v.bits += 1;
        self.entries[e as usize] = Entry { next: NIL, prev: old, owner: x };
        if old != NIL {
            self.entries[old as usize].next = e;
        }
    }

    fn unlink(&mut self, e: u32) {
        let Entry { next, prev, owner } = self.entries[e as usize];
        let v = &mut self.verts[owner as usize];
        if prev == NIL {
            v.head = next;
        } else {
            self.entries[prev as usize].next = next;
        }
        if next == NIL {
            v.tail = prev;
        } else {
            self.entries[next as usize].prev = prev;
        }
        v.bits -= 1;
    }

    pub fn num_vertices(&self) -> usize {
        self.verts.len()
    }

    pub fn alive(&self, x: u32) -> bool {
        self.verts.get(x as usize).is_some_and(|v| v.alive())
    }

    pub fn face(&self, x: u32) -> u32 {
        self.verts[x as usize].face
    }

    pub fn is_white(&self, x: u32) -> bool {
        self.verts[x as usize].white()
    }

    pub fn tree_of(&self, x: u32) -> u32 {
        self.verts[x as usize].tree
    }

    pub fn tree_size(&self, t: u32) -> u32 {
        self.tree_size[t as usize]
    }

    pub fn degree(&self, x: u32) -> u32 {
        self.verts[x as usize].len()
    }

    /// Live edge standing for a static dual edge.
    pub fn edge_of_static(&self, stat: u32) -> Option<u32> {
        match self.static_edge.get(stat as usize) {
            Some(&k) if k != NIL => Some(k),
            _ => None,
        }
    }

    /// Static id of forest edge `k`, `NIL` when it has none.
    pub fn static_of(&self, k: u32) -> u32 {
        self.edge_static[k as usize]
    }

    pub fn contains_edge(&self, stat: u32) -> bool {
        self.edge_of_static(stat).is_some()
    }

    pub fn edge_alive(&self, k: u32) -> bool {
        self.edge_alive.get(k as usize).copied().unwrap_or(false)
    }

    /// `(child side, parent side)` as they were when the edge was made.
    pub fn edge_ends(&self, k: u32) -> (u32, u32) {
        (self.entries[2 * k as usize].owner, self.entries[2 * k as usize + 1].owner)
    }

    pub fn parent(&self, x: u32) -> Option<u32> {
        let v = &self.verts[x as usize];
        v.has_parent().then(|| self.entries[(v.head ^ 1) as usize].owner)
    }

    /// `(edge, neighbour)` pairs, parent first.
    pub fn neighbors(&self, x: u32) -> Neighbors<'_> {
        Neighbors { f: self, e: self.verts[x as usize].head }
    }

    /// All vertices of the tree holding `x`, by depth-first search.
    pub fn component(&self, x: u32) -> Vec<u32> {
        let mut out = vec![x];
        let mut stack = vec![(x, NIL)];
        while let Some((y, from)) = stack.pop() {
            for (k, z) in self.neighbors(y) {
                if k != from {
                    out.push(z);
                    stack.push((z, k));
                }
            }
        }
        out
    }

    pub fn add_vertex(&mut self, face: u32, white: bool) -> u32 {
        let x = self.verts.len() as u32;
        let t = self.tree_size.len() as u32;
        self.tree_size.push(1);
        self.verts.push(Vert::fresh(face, t, white));
        x
    }

    /// Re-tag a vertex with a face.
    pub fn set_face(&mut self, x: u32, face: u32, white: bool) {
        let v = &mut self.verts[x as usize];
        v.face = face;
        v.set_flag(WHITE, white);
    }

    fn kill_edge(&mut self, k: u32) {
        self.edge_alive[k as usize] = false;
        let s = self.edge_static[k as usize];
        if s != NIL {
            self.static_edge[s as usize] = NIL;
            self.edge_static[k as usize] = NIL;
        }
    }

    /// Contract the edges `ec` into one vertex tagged `face`. Lists are
    /// spliced shorter into longer and the parent edge stays at the head.
    pub fn contract_edges(&mut self, ec: &[u32], face: u32, white: bool) -> Result<u32, ForestError> {
        if ec.is_empty() {
            return Err(ForestError::NotASubtree);
        }
        // connectivity of the edge set, checked before anything changes
        let mut uf: HashMap<u32, u32> = HashMap::new();
        fn find(uf: &mut HashMap<u32, u32>, x: u32) -> u32 {
            let mut r = x;
            while let Some(&p) = uf.get(&r) {
                if p == r {
                    break;
                }
                r = p;
            }
            uf.insert(x, r);
            r
        }
        let mut classes = 0i64;
        for &k in ec {
            if !self.edge_alive(k) {
                return Err(ForestError::EdgeAbsent);
            }
            let (a, b) = self.edge_ends(k);
            for x in [a, b] {
                if !uf.contains_key(&x) {
                    uf.insert(x, x);
                    classes += 1;
                }
            }
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            if ra == rb {
                return Err(ForestError::NotASubtree);
            }
            uf.insert(ra, rb);
            classes -= 1;
        }
        if classes != 1 {
            return Err(ForestError::NotASubtree);
        }
        let mut last = NIL;
        for &k in ec {
            last = self.merge_along(k);
        }
        self.set_face(last, face, white);
        Ok(last)
    }

    /// Merge the two ends of edge `k`; returns the surviving vertex.
    fn merge_along(&mut self, k: u32) -> u32 {
        let (a, b) = (self.entries[2 * k as usize].owner, self.entries[2 * k as usize + 1].owner);
        let (c, p) = if self.verts[a as usize].has_parent() && self.verts[a as usize].head == 2 * k {
            (a, b)
        } else {
            debug_assert!(self.verts[b as usize].has_parent() && self.verts[b as usize].head == 2 * k + 1);
            (b, a)
        };
        self.unlink(2 * k);
        self.unlink(2 * k + 1);
        self.kill_edge(k);
        let t = self.verts[c as usize].tree;
        self.tree_size[t as usize] -= 1;
        // survivor list = p's entries then c's entries
        let (lc, lp) = (self.verts[c as usize].len(), self.verts[p as usize].len());
        let (keep, gone) = if lp >= lc { (p, c) } else { (c, p) };
        let mut e = self.verts[gone as usize].head;
        while e != NIL {
            self.entries[e as usize].owner = keep;
            e = self.entries[e as usize].next;
        }
        self.work.relabelled += self.verts[gone as usize].len() as u64;
        let (ph, pt) = (self.verts[p as usize].head, self.verts[p as usize].tail);
        let (ch, ct) = (self.verts[c as usize].head, self.verts[c as usize].tail);
        let (head, tail) = match (ph == NIL, ch == NIL) {
            (true, _) => (ch, ct),
            (_, true) => (ph, pt),
            _ => {
                self.entries[pt as usize].next = ch;
                self.entries[ch as usize].prev = pt;
                (ph, ct)
            }
        };
        let has_parent = self.verts[p as usize].has_parent();
        let v = &mut self.verts[keep as usize];
        v.head = head;
        v.tail = tail;
        v.set_len(lc + lp);
        v.set_flag(PARENT, has_parent);
        let g = &mut self.verts[gone as usize];
        g.set_flag(ALIVE, false);
        g.head = NIL;
        g.tail = NIL;
        g.set_len(0);
        keep
    }

    /// Contract a set of vertices spanning a subtree. A single vertex is
    /// re-tagged in place.
    pub fn contract_vertices(&mut self, xs: &[u32], face: u32, white: bool) -> Result<u32, ForestError> {
        for &x in xs {
            if !self.alive(x) {
                return Err(ForestError::DeadVertex(x));
            }
        }
        let mut ec = std::mem::take(&mut self.scratch);
        ec.clear();
        MARK.with(|m| {
            let mut m = m.borrow_mut();
            let ep = m.bump(self.verts.len());
            for &x in xs {
                m.mark[x as usize] = ep;
            }
            for &x in xs {
                if let Some(p) = self.parent(x) {
                    if m.mark[p as usize] == ep {
                        ec.push(self.verts[x as usize].head >> 1);
                    }
                }
            }
        });
        if xs.is_empty() || ec.len() + 1 != xs.len() {
            self.scratch = ec;
            return Err(ForestError::NotASubtree);
        }
        let mut last = xs[0];
        // the marks already show the edges span one subtree
        for &k in &ec {
            last = self.merge_along(k);
        }
        self.scratch = ec;
        self.set_face(last, face, white);
        Ok(last)
    }

    /// Remove edge `k`. The side found exhausted first by two lockstep
    /// searches gets a fresh tree id.
    pub fn delete_edge(&mut self, k: u32) -> Result<Split, ForestError> {
        if !self.edge_alive(k) {
            return Err(ForestError::EdgeAbsent);
        }
        let (a, b) = self.edge_ends(k);
        let (c, _) = if self.verts[a as usize].has_parent() && self.verts[a as usize].head == 2 * k {
            (a, b)
        } else {
            (b, a)
        };
        self.unlink(2 * k);
        self.unlink(2 * k + 1);
        self.kill_edge(k);
        self.verts[c as usize].set_flag(PARENT, false);
        // lockstep searches; each step advances one adjacency entry
        let mut sides = [Search::new(self, a), Search::new(self, b)];
        let small = loop {
            let mut done = None;
            for (i, s) in sides.iter_mut().enumerate() {
                self.work.split_steps += 1;
                if !s.step(self) {
                    done = Some(i);
                    break;
                }
            }
            if let Some(i) = done {
                break i;
            }
        };
        let small_vertices = std::mem::take(&mut sides[small].seen);
        let old = self.verts[a as usize].tree;
        let fresh = self.tree_size.len() as u32;
        self.tree_size.push(small_vertices.len() as u32);
        self.tree_size[old as usize] -= small_vertices.len() as u32;
        for &x in &small_vertices {
            self.verts[x as usize].tree = fresh;
        }
        Ok(Split {
            small_tree: fresh,
            large_tree: old,
            small_is_child_side: small == 0,
            small_vertices,
            child_end: a,
            parent_end: b,
        })
    }

    /// Make `x` the root of its tree by moving parent edges to the heads
    /// along the path to the old root.
    pub fn reroot(&mut self, x: u32) {
        let mut path = vec![x];
        let mut y = x;
        while let Some(p) = self.parent(y) {
            path.push(p);
            y = p;
        }
        // edges on the path flip direction, top down
        for i in (0..path.len() - 1).rev() {
            let (c, p) = (path[i], path[i + 1]);
            let e = self.verts[c as usize].head;
            self.verts[c as usize].set_flag(PARENT, false);
            // the entry of this edge at p moves to p's head
            let at_p = e ^ 1;
            self.unlink(at_p);
            self.push_front(p, at_p);
            self.verts[p as usize].set_flag(PARENT, true);
        }
        self.verts[x as usize].set_flag(PARENT, false);
    }

    /// Join the trees of `u1` and `u2` with a new edge. `u2` becomes the
    /// child; entry `2k` is at `u2`.
    pub fn insert_edge(&mut self, u1: u32, u2: u32, stat: u32) -> Result<u32, ForestError> {
        self.insert_edge_with(u1, u2, stat, true)
    }

    /// As `insert_edge`, with entry `2k` at `u2` only if `even_at_child`.
    /// Lets a re-attached edge keep its static orientation.
    pub fn insert_edge_with(&mut self, u1: u32, u2: u32, stat: u32, even_at_child: bool) -> Result<u32, ForestError> {
        for x in [u1, u2] {
            if !self.alive(x) {
                return Err(ForestError::DeadVertex(x));
            }
        }
        let (t1, t2) = (self.tree_of(u1), self.tree_of(u2));
        if t1 == t2 {
            return Err(ForestError::SameTree);
        }
        if self.verts[u2 as usize].has_parent() {
            self.reroot(u2);
        }
        let (keep, gone, rep) =
            if self.tree_size[t1 as usize] >= self.tree_size[t2 as usize] { (t1, t2, u2) } else { (t2, t1, u1) };
        for x in self.component(rep) {
            self.verts[x as usize].tree = keep;
        }
        self.work.relabelled += self.tree_size[gone as usize] as u64;
        self.tree_size[keep as usize] += self.tree_size[gone as usize];
        self.tree_size[gone as usize] = 0;
        let k = self.new_edge(stat);
        let (a, b) = if even_at_child { (2 * k, 2 * k + 1) } else { (2 * k + 1, 2 * k) };
        self.push_front(u2, a);
        self.verts[u2 as usize].set_flag(PARENT, true);
        self.push_back(u1, b);
        Ok(k)
    }

    fn remove_leaf(&mut self, x: u32) -> Option<u32> {
        let v = self.verts[x as usize];
        let t = v.tree;
        self.tree_size[t as usize] -= 1;
        self.verts[x as usize].set_flag(ALIVE, false);
        self.work.pruned += 1;
        if v.len() == 0 {
            return None;
        }
        let e = v.head;
        let y = self.entries[(e ^ 1) as usize].owner;
        let y_child = !v.has_parent();
        self.unlink(e);
        self.unlink(e ^ 1);
        self.kill_edge(e >> 1);
        if y_child {
            self.verts[y as usize].set_flag(PARENT, false);
        }
        Some(y)
    }

    /// Remove black vertices of degree at most one, starting from `seeds`
    /// and following the vertices they expose.
    pub fn prune(&mut self, seeds: &[u32]) {
        let mut stack = std::mem::take(&mut self.scratch);
        stack.clear();
        stack.extend_from_slice(seeds);
        while let Some(x) = stack.pop() {
            let v = &self.verts[x as usize];
            if v.alive() && !v.white() && v.len() <= 1 {
                if let Some(y) = self.remove_leaf(x) {
                    stack.push(y);
                }
            }
        }
        self.scratch = stack;
    }

    /// Full consistency check, for instrumented runs and tests.
    pub fn validate(&self, pruned: bool) -> Result<(), String> {
        let mut count: HashMap<u32, u32> = HashMap::new();
        for (x, v) in self.verts.iter().enumerate() {
            if !v.alive() {
                continue;
            }
            *count.entry(v.tree).or_insert(0) += 1;
            let mut len = 0;
            let mut e = v.head;
            let mut prev = NIL;
            while e != NIL {
                let en = self.entries[e as usize];
                if en.owner != x as u32 || en.prev != prev || !self.edge_alive[(e >> 1) as usize] {
                    return Err(format!("bad entry {e} at vertex {x}"));
                }
                let y = self.entries[(e ^ 1) as usize].owner;
                if !self.verts[y as usize].alive() || self.verts[y as usize].tree != v.tree {
                    return Err(format!("edge {} leaves tree at {x}", e >> 1));
                }
                len += 1;
                prev = e;
                e = en.next;
            }
            if len != v.len() || prev != v.tail {
                return Err(format!("length or tail mismatch at {x}"));
            }
            if pruned && !v.white() && v.len() <= 1 {
                return Err(format!("black vertex {x} of degree {}", v.len()));
            }
        }
        for (t, &c) in &count {
            if self.tree_size[*t as usize] != c {
                return Err(format!("tree {t} size {} but {c} vertices", self.tree_size[*t as usize]));
            }
        }
        // every tree is acyclic and connected along parent pointers
        for (x, v) in self.verts.iter().enumerate() {
            if !v.alive() {
                continue;
            }
            let mut y = x as u32;
            let mut steps = 0;
            while let Some(p) = self.parent(y) {
                y = p;
                steps += 1;
                if steps > self.verts.len() {
                    return Err(format!("parent cycle through {x}"));
                }
            }
            let comp = self.component(x as u32);
            if comp.len() as u32 != self.tree_size[v.tree as usize] {
                return Err(format!("tree of {x} is not connected or not a tree"));
            }
        }
        for (s, &k) in self.static_edge.iter().enumerate() {
            if k != NIL && (!self.edge_alive[k as usize] || self.edge_static[k as usize] != s as u32) {
                return Err(format!("stale static link {s}"));
            }
        }
        Ok(())
    }
}

pub struct Neighbors<'a> {
    f: &'a DualForest,
    e: u32,
}

impl Iterator for Neighbors<'_> {
    type Item = (u32, u32);
    fn next(&mut self) -> Option<(u32, u32)> {
        if self.e == NIL {
            return None;
        }
        let e = self.e;
        self.e = self.f.entries[e as usize].next;
        Some((e >> 1, self.f.entries[(e ^ 1) as usize].owner))
    }
}

struct Search {
    /// (vertex, next entry to look at, edge we came by)
    stack: Vec<(u32, u32, u32)>,
    seen: Vec<u32>,
}

impl Search {
    fn new(f: &DualForest, x: u32) -> Self {
        Search { stack: vec![(x, f.verts[x as usize].head, NIL)], seen: vec![x] }
    }

    /// Discover one more vertex; false once the side is exhausted.
    fn step(&mut self, f: &DualForest) -> bool {
        loop {
            let Some(top) = self.stack.last_mut() else { return false };
            let e = top.1;
            if e == NIL {
                self.stack.pop();
                continue;
            }
            top.1 = f.entries[e as usize].next;
            if e >> 1 == top.2 {
                continue;
            }
            let y = f.entries[(e ^ 1) as usize].owner;
            self.stack.push((y, f.verts[y as usize].head, e >> 1));
            self.seen.push(y);
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn path3() -> DualForest {
        // a(0) - b(1) - c(2), rooted at a
        DualForest::new(&[0, 1, 2], &[true; 3], &[(1, 0, 0), (2, 1, 1)], 2)
    }

    fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> Vec<(u32, u32, u32)> {
        (1..n).map(|i| (i as u32, rng.gen_range(0..i) as u32, i as u32 - 1)).collect()
    }

    /// Canonical form of a forest: per tree, the set of faces and the set of
    /// face pairs joined by an edge.
    fn canon(f: &DualForest) -> BTreeSet<(Vec<u32>, Vec<(u32, u32)>)> {
        let mut out = BTreeSet::new();
        let mut done = vec![false; f.num_vertices()];
        for x in 0..f.num_vertices() as u32 {
            if !f.alive(x) || done[x as usize] {
                continue;
            }
            let comp = f.component(x);
            let mut faces: Vec<u32> = comp.iter().map(|&y| f.face(y)).collect();
            faces.sort();
            let mut es = Vec::new();
            for &y in &comp {
                done[y as usize] = true;
                for (_, z) in f.neighbors(y) {
                    let (a, b) = (f.face(y), f.face(z));
                    if a < b {
                        es.push((a, b));
                    }
                }
            }
            es.sort();
            out.insert((faces, es));
        }
        out
    }

    /// Naive quotient of a single tree: relabel faces by class and keep
    /// the edges whose ends land in different classes.
    fn naive_quotient(
        n: usize,
        edges: &[(u32, u32)],
        class: &dyn Fn(u32) -> u32,
    ) -> BTreeSet<(Vec<u32>, Vec<(u32, u32)>)> {
        let faces: BTreeSet<u32> = (0..n as u32).map(class).collect();
        let mut es: Vec<(u32, u32)> = edges
            .iter()
            .map(|&(a, b)| (class(a), class(b)))
            .filter(|(a, b)| a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        es.sort();
        BTreeSet::from([(faces.into_iter().collect(), es)])
    }

    #[test]
    fn test_contract_path_edge() {
        let mut f = path3();
        let k = f.edge_of_static(0).unwrap();
        let x = f.contract_edges(&[k], 9, false).unwrap();
        assert_eq!(f.face(x), 9);
        assert_eq!(f.degree(x), 1);
        let nb: Vec<u32> = f.neighbors(x).map(|(_, z)| f.face(z)).collect();
        assert_eq!(nb, vec![2]);
        assert!(!f.contains_edge(0));
        assert!(f.contains_edge(1));
        f.validate(false).unwrap();
    }

    #[test]
    fn test_contract_star() {
        let links: Vec<(u32, u32, u32)> = (1..5).map(|i| (i, 0, i - 1)).collect();
        let mut f = DualForest::new(&[0, 1, 2, 3, 4], &[true; 5], &links, 4);
        let ks: Vec<u32> = (0..4).map(|s| f.edge_of_static(s).unwrap()).collect();
        let x = f.contract_edges(&ks, 7, false).unwrap();
        assert_eq!(f.degree(x), 0);
        assert_eq!(f.tree_size(f.tree_of(x)), 1);
        f.validate(false).unwrap();
    }

    #[test]
    fn test_contract_rejects_disconnected_edges() {
        let links: Vec<(u32, u32, u32)> = vec![(1, 0, 0), (2, 1, 1), (3, 2, 2)];
        let mut f = DualForest::new(&[0, 1, 2, 3], &[true; 4], &links, 3);
        assert_eq!(f.contract_edges(&[0, 2], 5, false), Err(ForestError::NotASubtree));
        assert_eq!(f.contract_vertices(&[0, 2], 5, false), Err(ForestError::NotASubtree));
        f.validate(false).unwrap();
    }

    #[test]
    fn test_contract_random_subtrees_match_quotient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..=64);
            let links = random_tree(&mut rng, n);
            let faces: Vec<u32> = (0..n as u32).collect();
            let mut f = DualForest::new(&faces, &vec![true; n], &links, n);
            // grow a random connected subtree
            let start = rng.gen_range(0..n as u32);
            let mut set = vec![start];
            let target = rng.gen_range(1..=n);
            let adj: Vec<Vec<u32>> = {
                let mut a = vec![Vec::new(); n];
                for &(c, p, _) in &links {
                    a[c as usize].push(p);
                    a[p as usize].push(c);
                }
                a
            };
            while set.len() < target {
                let x = set[rng.gen_range(0..set.len())];
                let y = adj[x as usize][rng.gen_range(0..adj[x as usize].len())];
                if !set.contains(&y) {
                    set.push(y);
                }
            }
            let new_face = 1000;
            f.contract_vertices(&set, new_face, false).unwrap();
            f.validate(false).unwrap();
            let in_set: Vec<bool> = (0..n as u32).map(|x| set.contains(&x)).collect();
            let pairs: Vec<(u32, u32)> = links.iter().map(|&(c, p, _)| (c, p)).collect();
            let want = naive_quotient(n, &pairs, &|x| if in_set[x as usize] { new_face } else { x });
            assert_eq!(canon(&f), want);
            for &(c, p, s) in &links {
                assert_eq!(f.contains_edge(s), !(in_set[c as usize] && in_set[p as usize]));
            }
        }
    }

    #[test]
    fn test_delete_path_edge() {
        let mut f = path3();
        let k = f.edge_of_static(0).unwrap();
        let s = f.delete_edge(k).unwrap();
        assert_eq!(s.small_vertices, vec![0]);
        assert_eq!(f.tree_size(s.small_tree), 1);
        assert_eq!(f.tree_size(s.large_tree), 2);
        assert!(!f.contains_edge(0));
        assert_eq!(f.delete_edge(k), Err(ForestError::EdgeAbsent));
        f.validate(false).unwrap();
    }

    #[test]
    fn test_delete_star_leaf() {
        let links: Vec<(u32, u32, u32)> = (1..5).map(|i| (i, 0, i - 1)).collect();
        let mut f = DualForest::new(&[0, 1, 2, 3, 4], &[true; 5], &links, 4);
        let s = f.delete_edge(f.edge_of_static(2).unwrap()).unwrap();
        assert_eq!(s.small_vertices, vec![3]);
        assert!(s.small_is_child_side);
        assert_eq!(f.tree_size(s.large_tree), 4);
        f.validate(false).unwrap();
    }

    #[test]
    fn test_delete_random_matches_naive_split() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(2..=64);
            let links = random_tree(&mut rng, n);
            let faces: Vec<u32> = (0..n as u32).collect();
            let mut f = DualForest::new(&faces, &vec![true; n], &links, n);
            let s = rng.gen_range(0..n - 1) as u32;
            let (c, _, _) = links[s as usize];
            // naive: descendants of c
            let mut below = vec![false; n];
            below[c as usize] = true;
            for &(x, p, _) in &links {
                // links are in increasing child order, parents precede
                if below[p as usize] && x != c {
                    below[x as usize] = true;
                }
            }
            let sp = f.delete_edge(f.edge_of_static(s).unwrap()).unwrap();
            f.validate(false).unwrap();
            let side_c: BTreeSet<u32> = (0..n as u32).filter(|&x| below[x as usize]).collect();
            let small: BTreeSet<u32> = sp.small_vertices.iter().copied().collect();
            assert!(small.len() * 2 <= n);
            if sp.small_is_child_side {
                assert_eq!(small, side_c);
            } else {
                assert_eq!(small.len(), n - side_c.len());
                assert!(small.is_disjoint(&side_c));
            }
            assert_eq!(f.tree_size(sp.small_tree) as usize, small.len());
        }
    }

    #[test]
    fn test_insert_edge() {
        let mut f = DualForest::new(&[0, 1], &[true; 2], &[], 1);
        let k = f.insert_edge(0, 1, NIL).unwrap();
        assert_eq!(f.tree_size(f.tree_of(0)), 2);
        assert_eq!(f.parent(1), Some(0));
        assert_eq!(f.insert_edge(0, 1, NIL), Err(ForestError::SameTree));
        assert_eq!(f.edge_ends(k), (1, 0));
        f.validate(false).unwrap();
        // path + singleton at its end
        let mut g = path3();
        let x = g.add_vertex(3, true);
        g.insert_edge(2, x, NIL).unwrap();
        assert_eq!(g.tree_size(g.tree_of(0)), 4);
        assert_eq!(g.component(0).len(), 4);
        g.validate(false).unwrap();
    }

    #[test]
    fn test_insert_random_counts_add() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (n1, n2) = (rng.gen_range(1..30), rng.gen_range(1..30));
            let mut links = random_tree(&mut rng, n1);
            for (c, p, s) in random_tree(&mut rng, n2) {
                links.push((c + n1 as u32, p + n1 as u32, s + n1 as u32));
            }
            let n = n1 + n2;
            let faces: Vec<u32> = (0..n as u32).collect();
            let mut f = DualForest::new(&faces, &vec![true; n], &links, n + 1);
            let u1 = rng.gen_range(0..n1) as u32;
            let u2 = rng.gen_range(n1..n) as u32;
            f.insert_edge(u1, u2, n as u32).unwrap();
            f.validate(false).unwrap();
            assert_eq!(f.tree_size(f.tree_of(u1)) as usize, n);
            assert_eq!(f.tree_of(u1), f.tree_of(u2));
            assert!(f.contains_edge(n as u32));
            let edges: usize = (0..n as u32).map(|x| f.degree(x) as usize).sum::<usize>() / 2;
            assert_eq!(edges, n - 1);
        }
    }

    #[test]
    fn test_prune_path_and_white_tree() {
        let mut f = DualForest::new(&[0, 1, 2], &[true, false, false], &[(1, 0, 0), (2, 1, 1)], 2);
        f.prune(&[2]);
        assert!(f.alive(0) && !f.alive(1) && !f.alive(2));
        assert_eq!(f.degree(0), 0);
        f.validate(true).unwrap();
        let mut g = path3();
        g.prune(&[0, 1, 2]);
        assert!((0..3).all(|x| g.alive(x)));
        g.validate(true).unwrap();
    }

    #[test]
    fn test_prune_random_matches_fixpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let n = rng.gen_range(1..=64);
            let links = random_tree(&mut rng, n);
            let white: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.3)).collect();
            let faces: Vec<u32> = (0..n as u32).collect();
            let mut f = DualForest::new(&faces, &white, &links, n);
            let leaves: Vec<u32> = (0..n as u32).filter(|&x| f.degree(x) <= 1).collect();
            f.prune(&leaves);
            f.validate(true).unwrap();
            // naive global fixpoint
            let mut alive = vec![true; n];
            let mut deg: Vec<usize> = (0..n as u32).map(|x| links.iter().filter(|l| l.0 == x || l.1 == x).count()).collect();
            loop {
                let Some(x) = (0..n).find(|&x| alive[x] && !white[x] && deg[x] <= 1) else { break };
                alive[x] = false;
                for &(c, p, _) in &links {
                    if c as usize == x && alive[p as usize] {
                        deg[p as usize] -= 1;
                    }
                    if p as usize == x && alive[c as usize] {
                        deg[c as usize] -= 1;
                    }
                }
            }
            for x in 0..n {
                assert_eq!(f.alive(x as u32), alive[x], "vertex {x}");
            }
            for &(c, p, s) in &links {
                assert_eq!(f.contains_edge(s), alive[c as usize] && alive[p as usize]);
            }
        }
    }

    #[test]
    fn test_contains_edge_lifecycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let links = random_tree(&mut rng, 20);
        let faces: Vec<u32> = (0..20).collect();
        let mut f = DualForest::new(&faces, &[true; 20], &links, 19);
        assert!((0..19).all(|s| f.contains_edge(s)));
        f.contract_edges(&[f.edge_of_static(3).unwrap()], 50, false).unwrap();
        assert!(!f.contains_edge(3));
        f.delete_edge(f.edge_of_static(5).unwrap()).unwrap();
        assert!(!f.contains_edge(5));
        f.validate(false).unwrap();
    }

    #[test]
    fn test_reroot_keeps_tree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let n = rng.gen_range(2..40);
            let links = random_tree(&mut rng, n);
            let faces: Vec<u32> = (0..n as u32).collect();
            let mut f = DualForest::new(&faces, &vec![true; n], &links, n);
            let before = canon(&f);
            let x = rng.gen_range(0..n) as u32;
            f.reroot(x);
            assert_eq!(f.parent(x), None);
            f.validate(false).unwrap();
            assert_eq!(canon(&f), before);
        }
    }

    #[test]
    fn test_merge_work_is_n_log_n() {
        // contract a path one edge at a time; shorter-into-longer keeps the
        // relabelling work within n log n
        let n = 4096usize;
        let links: Vec<(u32, u32, u32)> = (1..n).map(|i| (i as u32, (i - 1) as u32 / 2, i as u32 - 1)).collect();
        let faces: Vec<u32> = (0..n as u32).collect();
        let mut f = DualForest::new(&faces, &vec![true; n], &links, n);
        for s in (0..n as u32 - 1).rev() {
            let k = f.edge_of_static(s).unwrap();
            f.contract_edges(&[k], s, true).unwrap();
        }
        let bound = (2 * n) as u64 * (n as f64).log2().ceil() as u64;
        assert!(f.work.relabelled <= bound, "{} > {}", f.work.relabelled, bound);
        f.validate(false).unwrap();
    }
}
