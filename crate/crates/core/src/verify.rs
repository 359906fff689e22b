//! Cross checks of the fast algorithms against the slow references. The
//! `verify` command and the acceptance tests both report through these.

use std::time::Instant;

use crate::cuts::{build_mincut_oracle, crossing_edges, gomory_hu, maxflow_reference, query_cut, separates, GomoryHuTree};
use crate::gmcb_oracle::{check_isometric, check_nested, gf2_extract, horton_cycles, CycleBasis};
use crate::io::gen::{gen_random_planar, RandomPlanar};
use crate::mcb::{recursive_gmcb, ImplicitMcb};
use crate::planar::PlanarGraph;

/// Largest per-query read count the oracle may report.
pub const MAX_QUERY_READS: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn from(name: &'static str, r: Result<String, String>) -> Self {
        match r {
            Ok(detail) => Check { name, ok: true, detail },
            Err(detail) => Check { name, ok: false, detail },
        }
    }
}

/// Horton candidates from every vertex in the shared order, reduced by
/// GF(2) elimination.
pub fn gf2_reference(g: &PlanarGraph) -> Result<CycleBasis, String> {
    let roots: Vec<u32> = (0..g.n() as u32).collect();
    let mut cand = horton_cycles(g, &roots).map_err(|e| e.to_string())?;
    cand.sort_by(|a, b| a.order(b));
    cand.dedup_by(|a, b| a.edges == b.edges);
    gf2_extract(&cand, g.m() + 1 - g.n()).map_err(|e| e.to_string())
}

/// Total weight, sorted weights and edge-set family against the reference.
pub fn check_mcb(g: &PlanarGraph, imcb: &ImplicitMcb) -> Check {
    Check::from("mcb", (|| {
        let got = imcb.explicit_mcb().map_err(|e| e.to_string())?;
        let want = gf2_reference(g)?;
        if got.total_weight != want.total_weight {
            return Err(format!("total weight {} != {}", got.total_weight, want.total_weight));
        }
        if got.weights() != want.weights() {
            return Err("weight multisets differ".into());
        }
        if got.edge_family() != want.edge_family() {
            return Err("edge-set families differ".into());
        }
        Ok(format!("weights match oracle ({} cycles, total {})", got.cycles.len(), got.total_weight))
    })())
}

pub fn check_structure(g: &PlanarGraph, basis: &CycleBasis) -> Check {
    let nested = check_nested(g, basis);
    let bad = basis.cycles.iter().filter(|c| !check_isometric(g, c)).count();
    let ok = nested && bad == 0;
    let detail = if ok { "nested and isometric".to_string() } else { format!("nested: {nested}, non-isometric cycles: {bad}") };
    Check { name: "structure", ok, detail }
}

/// Path minima for every pair equal max-flow, and every tree edge's linked
/// cut is exactly the cut its removal induces.
pub fn check_gomory_hu(g: &PlanarGraph, t: &GomoryHuTree) -> Check {
    Check::from("gomory-hu", (|| {
        if t.edges.len() + 1 != g.n() {
            return Err(format!("{} tree edges for {} vertices", t.edges.len(), g.n()));
        }
        for k in 0..t.edges.len() {
            let side = t.side_of_edge(k);
            let local = crossing_edges(g, &side);
            let want: Vec<u32> = local.iter().map(|&e| g.edge(e).id).collect();
            let got = t.cut_edges(k).map_err(|e| e.to_string())?;
            if got != want || g.weight_of(&local) != t.edges[k].w {
                return Err(format!("tree edge {k} does not match its induced cut"));
            }
        }
        let mut pairs = 0;
        for u in 0..g.n() as u32 {
            for v in u + 1..g.n() as u32 {
                let k = t.path_min_naive(u, v).ok_or("tree is disconnected")?;
                let flow = maxflow_reference(g, g.vid(u), g.vid(v)).map_err(|e| e.to_string())?;
                if t.edges[k].w != flow {
                    return Err(format!("pair ({}, {}): tree says {}, max-flow {flow}", g.vid(u), g.vid(v), t.edges[k].w));
                }
                pairs += 1;
            }
        }
        Ok(format!("{pairs} pairs match max-flow"))
    })())
}

/// Oracle answers equal tree path minima, stay within the read budget, and
/// report valid cuts of the right weight.
pub fn check_oracle(g: &PlanarGraph, t: &GomoryHuTree) -> Check {
    Check::from("oracle", (|| {
        let o = build_mincut_oracle(t.clone());
        let mut max_reads = 0;
        for u in 0..g.n() as u32 {
            for v in 0..g.n() as u32 {
                if u == v {
                    continue;
                }
                let (_, w, reads) = o.query_counted(u, v).map_err(|e| e.to_string())?;
                max_reads = max_reads.max(reads);
                let want = t.edges[t.path_min_naive(u, v).ok_or("tree is disconnected")?].w;
                if w != want || reads > MAX_QUERY_READS {
                    return Err(format!("pair ({}, {}): {w} in {reads} reads, path minimum {want}", g.vid(u), g.vid(v)));
                }
                if u < v {
                    let cut = query_cut(&o, g.vid(u), g.vid(v)).map_err(|e| e.to_string())?;
                    let local: Vec<u32> = cut.iter().filter_map(|&e| g.local_edge(e)).collect();
                    if local.len() != cut.len() || g.weight_of(&local) != w || !separates(g, &cut, u, v) {
                        return Err(format!("pair ({}, {}): reported cut is invalid", g.vid(u), g.vid(v)));
                    }
                }
            }
        }
        Ok(format!("all queries exact, at most {max_reads} reads"))
    })())
}

/// Every check on one connected graph.
pub fn verify_all(g: &PlanarGraph) -> Vec<Check> {
    let imcb = match recursive_gmcb(g) {
        Ok(m) => m,
        Err(e) => return vec![Check { name: "mcb", ok: false, detail: e.to_string() }],
    };
    let mut out = vec![check_mcb(g, &imcb)];
    match imcb.explicit_mcb() {
        Ok(b) => out.push(check_structure(g, &b)),
        Err(e) => out.push(Check { name: "structure", ok: false, detail: e.to_string() }),
    }
    match gomory_hu(g) {
        Ok(t) => {
            out.push(check_gomory_hu(g, &t));
            out.push(check_oracle(g, &t));
        }
        Err(e) => out.push(Check { name: "gomory-hu", ok: false, detail: e.to_string() }),
    }
    out
}

/// One point of a scaling series.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    /// Wall time of the weighted run.
    pub seconds: f64,
    /// Integers stored by the weighted implicit basis.
    pub storage_words: usize,
    /// Total explicit length of the basis with unit weights.
    pub unweighted_length: u64,
    /// Peak resident memory of the process so far, if known.
    pub peak_rss_kb: Option<u64>,
}

/// Time the recursive algorithm on a random graph, then rerun it with unit
/// weights and expand that basis.
pub fn bench_point(n: usize, seed: u64) -> Result<BenchRow, String> {
    let spec = gen_random_planar(RandomPlanar::new(n, seed)).map_err(|e| e.to_string())?;
    let g = spec.build().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let imcb = recursive_gmcb(&g).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    let storage_words = imcb.storage_words();
    drop(imcb);
    let g1 = spec.unweighted().build().map_err(|e| e.to_string())?;
    let unit = recursive_gmcb(&g1).map_err(|e| e.to_string())?;
    let mut unweighted_length = 0;
    for t in 0..unit.len() {
        unweighted_length += unit.expand_cycle(t).map_err(|e| e.to_string())?.len() as u64;
    }
    Ok(BenchRow { n, m: g.m(), seconds, storage_words, unweighted_length, peak_rss_kb: peak_rss_kb() })
}

/// `VmHWM` from `/proc/self/status`.
pub fn peak_rss_kb() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
