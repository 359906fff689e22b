//! From-scratch checks of the merge state, run after every step on small
//! levels when instrumentation is on. Each check rebuilds what the
//! incremental structures claim and compares.

use std::collections::{HashMap, VecDeque};

use super::delta::Where;
use super::merge::{Kind, Merge, St};
use super::{McbError, NIL};
use crate::gmcb_oracle::interior_faces;

fn bad(msg: String) -> McbError {
    McbError::Invariant(msg)
}

/// Interior face mask of a cycle given by global edge ids.
fn mask_of(m: &Merge, gids: &[u32]) -> Vec<bool> {
    let local: Vec<u32> = gids.iter().map(|&id| m.g.local_edge(id).expect("edge in graph")).collect();
    interior_faces(m.g, &local)
}

fn pack(mask: &[bool]) -> Vec<u64> {
    let mut v = vec![0u64; mask.len().div_ceil(64)];
    for (i, &b) in mask.iter().enumerate() {
        if b {
            v[i / 64] |= 1 << (i % 64);
        }
    }
    v
}

/// Whether `v` lies in the span of `rows` over GF(2).
fn in_span(rows: &[Vec<u64>], v: &[u64]) -> bool {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let lead = |x: &[u64]| x.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize);
    let reduce = |basis: &[(usize, Vec<u64>)], mut x: Vec<u64>| {
        for (p, b) in basis {
            if x[p / 64] >> (p % 64) & 1 == 1 {
                x.iter_mut().zip(b).for_each(|(a, c)| *a ^= c);
            }
        }
        x
    };
    for r in rows {
        let x = reduce(&basis, r.clone());
        if let Some(p) = lead(&x) {
            for (_, b) in basis.iter_mut() {
                if b[p / 64] >> (p % 64) & 1 == 1 {
                    b.iter_mut().zip(&x).for_each(|(a, c)| *a ^= c);
                }
            }
            basis.push((p, x));
        }
    }
    lead(&reduce(&basis, v.to_vec())).is_none()
}

fn basis_masks(m: &Merge) -> Vec<Vec<u64>> {
    m.cycles
        .iter()
        .map(|c| {
            let ed = m.g.edge(m.g.local_edge(c.edge).unwrap());
            let tr = &m.out_trees[c.tree as usize];
            let (_, es) = tr.cycle_sets(c.edge, m.g.vid(ed.u), m.g.vid(ed.v)).expect("simple cycle");
            pack(&mask_of(m, &es))
        })
        .collect()
}

fn horton_local(m: &Merge, j: u32, e: u32) -> Vec<u32> {
    let bt = &m.bt[j as usize];
    let mut out = vec![e];
    for mut y in [m.g.edge(e).u, m.g.edge(e).v] {
        while y != bt.sp.root {
            out.push(bt.sp.parent_edge[y as usize]);
            y = bt.parent(m.g, y);
        }
    }
    out
}

/// The constant-time test agrees with independence over GF(2).
pub(super) fn split_test(m: &Merge, j: u32, e: u32, got: bool) -> Result<(), McbError> {
    let mask = interior_faces(m.g, &horton_local(m, j, e));
    let want = !in_span(&basis_masks(m), &pack(&mask));
    if got != want {
        return Err(bad(format!("split test at root {j} edge {e}: forest says {got}, span says {want}")));
    }
    Ok(())
}

/// Sides of the boundary vertices agree with the interior faces.
pub(super) fn delta_sets(m: &Merge, j: u32, e: u32, cls: &[(u32, Where)]) -> Result<(), McbError> {
    let g = m.g;
    let local = horton_local(m, j, e);
    let mask = interior_faces(g, &local);
    let mut on_c = vec![false; g.n()];
    for &le in &local {
        on_c[g.edge(le).u as usize] = true;
        on_c[g.edge(le).v as usize] = true;
    }
    for &(jj, wh) in cls {
        let v = m.vj[jj as usize];
        let want = if on_c[v as usize] {
            Where::On
        } else if mask[g.face_of(g.darts(v)[0]) as usize] {
            Where::Int
        } else {
            Where::Ext
        };
        if want != wh {
            return Err(bad(format!("boundary vertex {jj} classified {wh:?}, is {want:?}")));
        }
    }
    Ok(())
}

/// Live entry standing for face or entry `f`.
fn chain_top(m: &Merge, mut f: u32) -> u32 {
    while m.entries[f as usize].absorbed != NIL {
        f = m.entries[f as usize].absorbed;
    }
    f
}

/// Forest, region and entry bookkeeping, rebuilt from scratch.
pub(super) fn structures(m: &Merge) -> Result<(), McbError> {
    let r = m.vj.len();
    for (j, (c, p)) in m.cf.iter().zip(&m.pf).enumerate() {
        c.validate(false).map_err(|s| bad(format!("contracted forest {j}: {s}")))?;
        p.validate(true).map_err(|s| bad(format!("pruned forest {j}: {s}")))?;
    }
    let mut white = vec![0u32; m.regions.len()];
    for (f, en) in m.entries.iter().enumerate() {
        if en.absorbed != NIL {
            continue;
        }
        if en.white() {
            white[en.region as usize] += 1;
        }
        let delta = &m.regions[en.region as usize].delta;
        for j in 0..r {
            // mappings outside the region's boundary set are never read
            if !delta.contains(&(j as u32)) {
                continue;
            }
            let x = m.a_c[f * r + j];
            if x == NIL || !m.cf[j].alive(x) || m.cf[j].face(x) != f as u32 {
                return Err(bad(format!("entry {f} maps to a stale vertex at {j}")));
            }
        }
    }
    for (i, reg) in m.regions.iter().enumerate() {
        if reg.white != white[i] {
            return Err(bad(format!("region {i} counts {} white faces, has {}", reg.white, white[i])));
        }
    }
    // region adjacency through the Horton pairs
    let mut adj: HashMap<u32, Vec<(u32, u32, u32)>> = HashMap::new();
    for &(fo, fi) in &m.pairs {
        let (a, b) = (chain_top(m, fo), chain_top(m, fi));
        let (ra, rb) = (m.entries[a as usize].region, m.entries[b as usize].region);
        adj.entry(ra).or_default().push((rb, a, b));
        adj.entry(rb).or_default().push((ra, b, a));
    }
    for (ri, reg) in m.regions.iter().enumerate() {
        if reg.white == 0 {
            continue;
        }
        let ri = ri as u32;
        // first-hop entry in this region towards every other region
        let mut hop: HashMap<u32, u32> = HashMap::new();
        let mut queue = VecDeque::new();
        for &(q, mine, _) in adj.get(&ri).map(|v| v.as_slice()).unwrap_or(&[]) {
            if let std::collections::hash_map::Entry::Vacant(v) = hop.entry(q) {
                v.insert(mine);
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            let h = hop[&q];
            for &(q2, _, _) in adj.get(&q).map(|v| v.as_slice()).unwrap_or(&[]) {
                if q2 != ri && !hop.contains_key(&q2) {
                    hop.insert(q2, h);
                    queue.push_back(q2);
                }
            }
        }
        let rep = |f: u32| -> Result<u32, McbError> {
            let t = chain_top(m, f);
            let q = m.entries[t as usize].region;
            if q == ri {
                Ok(t)
            } else {
                hop.get(&q).copied().ok_or_else(|| bad(format!("region {q} unreachable from {ri}")))
            }
        };
        for &j in &reg.delta {
            let ju = j as usize;
            let bt = &m.bt[ju];
            let mut want = Vec::new();
            let mut want_stat: HashMap<u32, (u32, u32)> = HashMap::new();
            for (f, &e) in bt.fpe.iter().enumerate() {
                if e == NIL {
                    continue;
                }
                let (a, b) = (m.g.face_of(2 * e), m.g.face_of(2 * e + 1));
                let (x, y) = (rep(a)?, rep(b)?);
                if x != y {
                    want.push((x.min(y), x.max(y)));
                    // static child side first
                    let (c, p) = if a == f as u32 { (x, y) } else { (y, x) };
                    want_stat.insert(e, (c, p));
                }
            }
            want.sort_unstable();
            // the region's tree in the contracted forest, by entries
            let live: Vec<u32> = (0..m.entries.len() as u32)
                .filter(|&f| m.entries[f as usize].absorbed == NIL && m.entries[f as usize].region == ri)
                .collect();
            let start = m.a_c[live[0] as usize * r + ju];
            let comp = m.cf[ju].component(start);
            if comp.len() != live.len() {
                return Err(bad(format!("region {ri} has {} entries, its tree at {j} {}", live.len(), comp.len())));
            }
            // edges as entry pairs; static ids must name the same pair
            let tree_edges = |f: &crate::dual_forest::DualForest, comp: &[u32]| -> Result<Vec<(u32, u32)>, McbError> {
                let mut es = Vec::new();
                for &x in comp {
                    for (k, y) in f.neighbors(x) {
                        let (a, b) = (f.face(x), f.face(y));
                        if a < b {
                            es.push((a, b));
                            let st = f.static_of(k);
                            let (c, p) = f.edge_ends(k);
                            if st != NIL && want_stat.get(&st) != Some(&(f.face(c), f.face(p))) {
                                return Err(bad(format!("static edge {st} joins {a} and {b} at {j}")));
                            }
                        }
                    }
                }
                es.sort_unstable();
                Ok(es)
            };
            let got = tree_edges(&m.cf[ju], &comp)?;
            if got != want {
                return Err(bad(format!("region {ri} tree at {j}: {got:?}, quotient {want:?}")));
            }
            // naive pruning of the quotient
            let mut alive: HashMap<u32, Vec<u32>> = live.iter().map(|&f| (f, Vec::new())).collect();
            for &(a, b) in &want {
                alive.get_mut(&a).unwrap().push(b);
                alive.get_mut(&b).unwrap().push(a);
            }
            loop {
                let leaf = alive
                    .iter()
                    .find(|(&f, nb)| !m.entries[f as usize].white() && nb.len() <= 1)
                    .map(|(&f, _)| f);
                let Some(f) = leaf else { break };
                let nb = alive.remove(&f).unwrap();
                for y in nb {
                    alive.get_mut(&y).unwrap().retain(|&z| z != f);
                }
            }
            let mut want_p: Vec<(u32, u32)> = want
                .iter()
                .copied()
                .filter(|(a, b)| alive.contains_key(a) && alive.contains_key(b))
                .collect();
            want_p.sort_unstable();
            let mut live_p: Vec<u32> = Vec::new();
            for &f in &live {
                let x = m.a_p[f as usize * r + ju];
                if x != NIL && m.pf[ju].alive(x) {
                    if m.pf[ju].face(x) != f {
                        return Err(bad(format!("pruned vertex of entry {f} at {j} is stale")));
                    }
                    live_p.push(f);
                }
            }
            let mut want_v: Vec<u32> = alive.keys().copied().collect();
            want_v.sort_unstable();
            if live_p != want_v {
                return Err(bad(format!("region {ri} pruned tree at {j} keeps {live_p:?}, want {want_v:?}")));
            }
            if !live_p.is_empty() {
                let start = m.a_p[live_p[0] as usize * r + ju];
                let comp = m.pf[ju].component(start);
                if comp.len() != live_p.len() {
                    return Err(bad(format!("region {ri} pruned tree at {j} is not one tree")));
                }
                let got = tree_edges(&m.pf[ju], &comp)?;
                if got != want_p {
                    return Err(bad(format!("region {ri} pruned tree at {j}: {got:?}, want {want_p:?}")));
                }
            }
        }
    }
    // node records point at live entries of the right kind
    for (f, en) in m.entries.iter().enumerate() {
        if let Kind::Inner(x) = en.kind {
            if x as usize >= m.nodes.len() {
                return Err(bad(format!("inner entry {f} names node {x}")));
            }
        }
    }
    Ok(())
}

/// Unconsidered recursive cycles are marked crossing exactly when they
/// cross an accepted Horton cycle.
pub(super) fn crossing(m: &Merge) -> Result<(), McbError> {
    let g = m.g;
    let hs: Vec<Vec<bool>> = m.accepted_h.iter().map(|es| interior_faces(g, es)).collect();
    let crosses = |a: &[bool], b: &[bool]| {
        let (mut both, mut a_only, mut b_only) = (false, false, false);
        for (&x, &y) in a.iter().zip(b) {
            both |= x && y;
            a_only |= x && !y;
            b_only |= y && !x;
        }
        both && a_only && b_only
    };
    for (k, ks) in m.comps.iter().enumerate() {
        for x in 1..ks.res.nodes.len() {
            if !ks.in_bp[x] || ks.considered[x] {
                continue;
            }
            let cy = ks.res.cycles[x - 1];
            let ed = g.edge(g.local_edge(cy.edge).unwrap());
            let tr = &ks.res.trees[cy.tree as usize];
            let (_, es) = tr.cycle_sets(cy.edge, g.vid(ed.u), g.vid(ed.v)).expect("simple cycle");
            let mask = mask_of(m, &es);
            let hit = hs.iter().any(|h| crosses(h, &mask));
            let st = ks.state[x];
            if hit != (st == St::Cross) {
                return Err(bad(format!("component {k} node {x} is {st:?} but crossing is {hit}")));
            }
        }
    }
    Ok(())
}
