//! IMCB v1: an implicit minimum cycle basis.
//!
//! ```text
//! IMCB 1
//! trees <k>
//! tree <index> <root id> <size>
//! x <vertex id> <parent id|-> <parent edge id|->     size lines per tree
//! triples <c>
//! c <tree> <edge id> <weight>
//! regions <r>
//! r <parent|-> <face> <triple|-> <inner birth> <outer birth>
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use super::{num, opt_num, opt_str, syntax, Lines, ParseError};
use crate::mcb::{ImplicitMcb, RegionNode, TreeRec, Triple};
use crate::planar::PlanarGraph;

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImcbDocument {
    pub trees: Vec<Arc<TreeRec>>,
    pub triples: Vec<Triple>,
    pub regions: Vec<RegionNode>,
}

impl ImcbDocument {
    pub fn from_mcb(imcb: &ImplicitMcb) -> Self {
        ImcbDocument { trees: imcb.trees.clone(), triples: imcb.triples.clone(), regions: imcb.regions.clone() }
    }

    /// Attach to the graph the basis was computed for.
    pub fn into_mcb(self, g: &PlanarGraph) -> Result<ImplicitMcb, ParseError> {
        let dim = g.m() + 1 - g.n();
        if self.triples.len() != dim {
            return Err(ParseError::Mismatch(format!("{} triples for a cycle space of dimension {dim}", self.triples.len())));
        }
        if self.regions.len() != dim + 1 {
            return Err(ParseError::Mismatch(format!("{} regions for {dim} cycles", self.regions.len())));
        }
        for (i, t) in self.triples.iter().enumerate() {
            if t.tree as usize >= self.trees.len() || g.local_edge(t.edge).is_none() {
                return Err(ParseError::Mismatch(format!("triple {i} names a missing tree or edge")));
            }
        }
        let imcb = ImplicitMcb::from_parts(g, self.trees, self.triples, self.regions);
        for t in 0..imcb.len() {
            imcb.expand_cycle(t).map_err(|e| ParseError::Mismatch(format!("triple {t}: {e}")))?;
        }
        Ok(imcb)
    }
}

pub fn serialize_imcb(d: &ImcbDocument) -> String {
    let mut out = format!("IMCB 1\ntrees {}\n", d.trees.len());
    for (t, tree) in d.trees.iter().enumerate() {
        let vids = tree.vertex_gids();
        out.push_str(&format!("tree {t} {} {}\n", tree.root_gid(), tree.len()));
        for (x, (&p, &e)) in tree.parent_local().iter().zip(tree.pedge()).enumerate() {
            let p = (p != NIL).then(|| vids[p as usize]);
            let e = (e != NIL).then_some(e);
            out.push_str(&format!("x {} {} {}\n", vids[x], opt_str(p), opt_str(e)));
        }
    }
    out.push_str(&format!("triples {}\n", d.triples.len()));
    for t in &d.triples {
        out.push_str(&format!("c {} {} {}\n", t.tree, t.edge, t.w));
    }
    out.push_str(&format!("regions {}\n", d.regions.len()));
    for r in &d.regions {
        out.push_str(&format!(
            "r {} {} {} {} {}\n",
            opt_str(r.parent),
            r.face,
            opt_str(r.triple),
            r.int_birth,
            r.ext_birth
        ));
    }
    out
}

pub fn parse_imcb(text: &str) -> Result<ImcbDocument, ParseError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.record("IMCB", 1)?;
    if f[0] != "1" {
        return Err(syntax(line, format!("unsupported version `{}`", f[0])));
    }
    let (line, f) = lines.record("trees", 1)?;
    let k: usize = num(line, f[0], "tree count")?;
    // trees grown in the same graph share one vertex list
    let mut shared: HashMap<Vec<u32>, Arc<Vec<u32>>> = HashMap::new();
    let mut trees = Vec::with_capacity(k);
    for t in 0..k {
        let (line, f) = lines.record("tree", 3)?;
        if num::<usize>(line, f[0], "tree index")? != t {
            return Err(syntax(line, format!("expected tree {t}")));
        }
        let root: u32 = num(line, f[1], "root id")?;
        let size: usize = num(line, f[2], "tree size")?;
        let mut rows = Vec::with_capacity(size);
        for _ in 0..size {
            let (line, f) = lines.record("x", 3)?;
            let v: u32 = num(line, f[0], "vertex id")?;
            if rows.last().is_some_and(|&(_, u, _, _)| u >= v) {
                return Err(syntax(line, "vertex ids must increase".into()));
            }
            rows.push((line, v, opt_num(line, f[1], "parent id")?, opt_num(line, f[2], "edge id")?));
        }
        let vids: Vec<u32> = rows.iter().map(|r| r.1).collect();
        let local = |line: usize, gid: u32| -> Result<u32, ParseError> {
            vids.binary_search(&gid).map(|i| i as u32).map_err(|_| syntax(line, format!("vertex {gid} not in tree {t}")))
        };
        let root_local = local(line, root)?;
        let mut parent = Vec::with_capacity(size);
        let mut pedge = Vec::with_capacity(size);
        for &(line, v, p, e) in &rows {
            if (v == root) != p.is_none() || p.is_none() != e.is_none() {
                return Err(syntax(line, "only the root lacks a parent".into()));
            }
            parent.push(match p {
                Some(p) => local(line, p)?,
                None => NIL,
            });
            pedge.push(e.unwrap_or(NIL));
        }
        let vids = shared.entry(vids).or_insert_with_key(|v| Arc::new(v.clone())).clone();
        trees.push(Arc::new(TreeRec::from_parts(vids, root_local, parent, pedge)));
    }
    let (line, f) = lines.record("triples", 1)?;
    let c: usize = num(line, f[0], "triple count")?;
    let mut triples = Vec::with_capacity(c);
    for _ in 0..c {
        let (line, f) = lines.record("c", 3)?;
        let tree: u32 = num(line, f[0], "tree index")?;
        if tree as usize >= k {
            return Err(syntax(line, format!("no tree {tree}")));
        }
        triples.push(Triple { tree, edge: num(line, f[1], "edge id")?, w: num(line, f[2], "weight")? });
    }
    let (line, f) = lines.record("regions", 1)?;
    let r: usize = num(line, f[0], "region count")?;
    let mut regions = Vec::with_capacity(r);
    for i in 0..r {
        let (line, f) = lines.record("r", 5)?;
        let parent = opt_num(line, f[0], "parent region")?;
        let triple = opt_num(line, f[2], "triple index")?;
        if parent.is_some_and(|p| p as usize >= r) || triple.is_some_and(|t| t as usize >= c) {
            return Err(syntax(line, "reference out of range".into()));
        }
        if (i == 0) != parent.is_none() {
            return Err(syntax(line, "exactly the first region is the root".into()));
        }
        regions.push(RegionNode {
            parent,
            face: num(line, f[1], "face")?,
            triple,
            int_birth: num(line, f[3], "birth count")?,
            ext_birth: num(line, f[4], "birth count")?,
        });
    }
    lines.finish()?;
    Ok(ImcbDocument { trees, triples, regions })
}
