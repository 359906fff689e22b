//! `pmcb`: minimum cycle bases, Gomory-Hu trees and min-cut queries for
//! plane graphs stored as PLG files.
//!
//! Exit status is 0 on success, 1 when `verify` finds a mismatch and 2 on
//! usage, input or parse errors.

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use pmcb_core::cuts::{build_mincut_oracle, gomory_hu, query_cut, query_weight, weight_vector, CutLink};
use pmcb_core::io::gen::{gen_lower_bound, gen_random_planar, GraphSpec, RandomPlanar};
use pmcb_core::io::imcb::{serialize_imcb, ImcbDocument};
use pmcb_core::io::plg::{parse_plg, serialize_plg};
use pmcb_core::mcb::recursive_gmcb;
use pmcb_core::planar::PlanarGraph;
use pmcb_core::verify::{bench_point, fit_exponent, verify_all};

#[derive(Parser)]
#[command(name = "pmcb", version, about = "Minimum cycle bases and min cuts of plane graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    LowerBound,
    Random,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph as PLG to standard output.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Defaults to $PMCB_SEED, then 1.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 16)]
        max_weight: u64,
        /// Probability of dropping each non-tree edge.
        #[arg(long, default_value_t = 0.0)]
        thin: f64,
        /// Set every weight to 1.
        #[arg(long)]
        unweighted: bool,
    },
    /// Minimum cycle basis, as an IMCB document or as explicit cycles.
    #[command(group(ArgGroup::new("form").args(["implicit", "explicit"])))]
    Mcb {
        file: String,
        #[arg(long)]
        implicit: bool,
        #[arg(long)]
        explicit: bool,
    },
    /// Sorted weights of the basis cycles.
    WeightVector { file: String },
    /// Gomory-Hu tree as a weighted edge list with cut links.
    GomoryHu { file: String },
    /// Min-cut weight between two vertices, and optionally the cut.
    Oracle {
        file: String,
        #[arg(long, num_args = 2, value_names = ["U", "V"], required = true)]
        query: Vec<u32>,
        #[arg(long)]
        cut: bool,
    },
    /// Check every result against the slow references.
    Verify { file: String },
    /// Time the recursive algorithm on random graphs.
    Bench {
        /// Run the doubling series 2^from .. 2^to.
        #[arg(long)]
        series: bool,
        #[arg(long, default_value_t = 10)]
        from: u32,
        #[arg(long, default_value_t = 14)]
        to: u32,
        /// Single size when not running a series.
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Failure with its exit status.
struct Fail(u8, String);

fn input(msg: impl ToString) -> Fail {
    Fail(2, msg.to_string())
}

fn default_seed(seed: Option<u64>) -> Result<u64, Fail> {
    match (seed, std::env::var("PMCB_SEED")) {
        (Some(s), _) => Ok(s),
        (None, Ok(s)) => s.trim().parse().map_err(|_| input(format!("PMCB_SEED is not an integer: `{s}`"))),
        (None, Err(_)) => Ok(1),
    }
}

fn load(path: &str) -> Result<PlanarGraph, Fail> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| input(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| input(format!("{path}: {e}")))?;
    }
    let spec = parse_plg(&text).map_err(|e| input(format!("{path}: {e}")))?;
    spec.build().map_err(|e| input(format!("{path}: {e}")))
}

fn run(cmd: Cmd, out: &mut String) -> Result<u8, Fail> {
    match cmd {
        Cmd::Gen { family, n, seed, max_weight, thin, unweighted } => {
            let spec: GraphSpec = match family {
                Family::LowerBound => gen_lower_bound(n).map_err(input)?,
                Family::Random => {
                    if !(0.0..1.0).contains(&thin) {
                        return Err(input("--thin must be in [0, 1)"));
                    }
                    let cfg = RandomPlanar { n, seed: default_seed(seed)?, max_weight, thin };
                    gen_random_planar(cfg).map_err(input)?
                }
            };
            let spec = if unweighted { spec.unweighted() } else { spec };
            out.push_str(&serialize_plg(&spec));
        }
        Cmd::Mcb { file, explicit, .. } => {
            let g = load(&file)?;
            let imcb = recursive_gmcb(&g).map_err(input)?;
            if explicit {
                let basis = imcb.explicit_mcb().map_err(input)?;
                out.push_str(&format!("cycles {} weight {} length {}\n", basis.cycles.len(), basis.total_weight, basis.total_length));
                for c in &basis.cycles {
                    let es: Vec<String> = c.edges.iter().map(u32::to_string).collect();
                    out.push_str(&format!("{} {}\n", c.weight, es.join(" ")));
                }
            } else {
                out.push_str(&serialize_imcb(&ImcbDocument::from_mcb(&imcb)));
            }
        }
        Cmd::WeightVector { file } => {
            let g = load(&file)?;
            let w = weight_vector(&recursive_gmcb(&g).map_err(input)?);
            let w: Vec<String> = w.iter().map(u64::to_string).collect();
            out.push_str(&format!("{}\n", w.join(" ")));
        }
        Cmd::GomoryHu { file } => {
            let g = load(&file)?;
            let t = gomory_hu(&g).map_err(input)?;
            out.push_str(&format!("GH 1\nedges {}\n", t.edges.len()));
            for e in &t.edges {
                let link = match e.link {
                    CutLink::Triple(k) => format!("triple {k}"),
                    CutLink::Edge(k) => format!("edge {k}"),
                };
                out.push_str(&format!("g {} {} {} {link}\n", t.vids[e.a as usize], t.vids[e.b as usize], e.w));
            }
        }
        Cmd::Oracle { file, query, cut } => {
            let g = load(&file)?;
            let o = build_mincut_oracle(gomory_hu(&g).map_err(input)?);
            let (u, v) = (query[0], query[1]);
            out.push_str(&format!("{}\n", query_weight(&o, u, v).map_err(input)?));
            if cut {
                let es: Vec<String> = query_cut(&o, u, v).map_err(input)?.iter().map(u32::to_string).collect();
                out.push_str(&format!("{}\n", es.join(" ")));
            }
        }
        Cmd::Verify { file } => {
            let g = load(&file)?;
            if !g.is_connected() {
                return Err(input("graph is disconnected"));
            }
            let checks = verify_all(&g);
            for c in &checks {
                out.push_str(&format!("{} {}: {}\n", if c.ok { "ok" } else { "FAIL" }, c.name, c.detail));
            }
            return Ok(if checks.iter().all(|c| c.ok) { 0 } else { 1 });
        }
        Cmd::Bench { series, from, to, n, seed } => {
            let seed = default_seed(seed)?;
            let sizes: Vec<usize> = if series { (from..=to).map(|k| 1usize << k).collect() } else { vec![n] };
            println!("n m seconds storage_words unweighted_length peak_rss_kb");
            let mut rows = Vec::new();
            for n in sizes {
                let r = bench_point(n, seed).map_err(input)?;
                let line = format!(
                    "{} {} {:.3} {} {} {}\n",
                    r.n,
                    r.m,
                    r.seconds,
                    r.storage_words,
                    r.unweighted_length,
                    r.peak_rss_kb.map_or("-".into(), |k| k.to_string())
                );
                // rows can take a while; show them as they finish
                print!("{line}");
                let _ = std::io::stdout().flush();
                rows.push(r);
            }
            if rows.len() >= 2 {
                let fit = |f: &dyn Fn(&pmcb_core::verify::BenchRow) -> f64| {
                    fit_exponent(&rows.iter().map(|r| (r.n as f64, f(r))).collect::<Vec<_>>())
                };
                println!("exponent time {:.3}", fit(&|r| r.seconds));
                println!("exponent storage {:.3}", fit(&|r| r.storage_words as f64));
                println!("exponent unweighted_length {:.3}", fit(&|r| r.unweighted_length as f64));
            }
            return Ok(0);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let mut out = String::new();
    match run(cli.cmd, &mut out) {
        Ok(code) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(Fail(code, msg)) => {
            eprintln!("pmcb: {msg}");
            ExitCode::from(code)
        }
    }
}
