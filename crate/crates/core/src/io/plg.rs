//! PLG v1: a plane straight-line graph.
//!
//! ```text
//! PLG 1
//! size <n> <m>
//! v <id> <x> <y>      n lines, ids 1..n in order
//! e <u> <v> <w>       m lines
//! ```
//!
//! Coordinates are decimals with six places, weights non-negative integers.

use super::gen::GraphSpec;
use super::{num, syntax, Lines, ParseError};
use crate::planar::{Point, COORD_SCALE};

pub fn format_coord(c: i64) -> String {
    let sign = if c < 0 { "-" } else { "" };
    let a = c.unsigned_abs();
    let s = COORD_SCALE as u64;
    format!("{sign}{}.{:06}", a / s, a % s)
}

/// Exact parse of a decimal with at most six fractional digits.
pub fn parse_coord(line: usize, s: &str) -> Result<i64, ParseError> {
    let bad = || syntax(line, format!("bad coordinate `{s}`"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() || frac.len() > 6 || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let whole: i64 = int.parse().map_err(|_| bad())?;
    let frac_val: i64 = if frac.is_empty() { 0 } else { frac.parse::<i64>().map_err(|_| bad())? * 10i64.pow(6 - frac.len() as u32) };
    let v = whole.checked_mul(COORD_SCALE).and_then(|x| x.checked_add(frac_val)).ok_or_else(bad)?;
    Ok(if neg { -v } else { v })
}

pub fn serialize_plg(d: &GraphSpec) -> String {
    let mut out = format!("PLG 1\nsize {} {}\n", d.points.len(), d.edges.len());
    for (i, p) in d.points.iter().enumerate() {
        out.push_str(&format!("v {} {} {}\n", i + 1, format_coord(p.x), format_coord(p.y)));
    }
    for &(u, v, w) in &d.edges {
        out.push_str(&format!("e {u} {v} {w}\n"));
    }
    out
}

pub fn parse_plg(text: &str) -> Result<GraphSpec, ParseError> {
    let mut lines = Lines::new(text);
    let (line, f) = lines.record("PLG", 1)?;
    if f[0] != "1" {
        return Err(syntax(line, format!("unsupported version `{}`", f[0])));
    }
    let (line, f) = lines.record("size", 2)?;
    let n: usize = num(line, f[0], "vertex count")?;
    let m: usize = num(line, f[1], "edge count")?;
    let mut points = Vec::with_capacity(n);
    for i in 1..=n {
        let (line, f) = lines.record("v", 3)?;
        let id: usize = num(line, f[0], "vertex id")?;
        if id != i {
            return Err(syntax(line, format!("expected vertex id {i}, found {id}")));
        }
        points.push(Point::new(parse_coord(line, f[1])?, parse_coord(line, f[2])?));
    }
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, f) = lines.record("e", 3)?;
        let u: u32 = num(line, f[0], "vertex id")?;
        let v: u32 = num(line, f[1], "vertex id")?;
        if u == 0 || v == 0 || u as usize > n || v as usize > n {
            return Err(syntax(line, format!("edge ({u}, {v}) leaves 1..{n}")));
        }
        let w: u64 = num(line, f[2], "weight")?;
        let w = i64::try_from(w).map_err(|_| syntax(line, format!("weight {w} too large")))?;
        edges.push((u, v, w));
    }
    lines.finish()?;
    Ok(GraphSpec { points, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen::{gen_lower_bound, gen_random_planar, RandomPlanar};

    fn t3() -> GraphSpec {
        GraphSpec {
            points: vec![Point::units(0, 0), Point::units(1, 0), Point::units(0, 1)],
            edges: vec![(1, 2, 1), (2, 3, 1), (3, 1, 1)],
        }
    }

    #[test]
    fn test_triangle_round_trip_bytes() {
        let s = serialize_plg(&t3());
        assert_eq!(s, "PLG 1\nsize 3 3\nv 1 0.000000 0.000000\nv 2 1.000000 0.000000\nv 3 0.000000 1.000000\ne 1 2 1\ne 2 3 1\ne 3 1 1\n");
        let d = parse_plg(&s).unwrap();
        assert_eq!(d, t3());
        assert_eq!(serialize_plg(&d), s);
    }

    #[test]
    fn test_generated_round_trip() {
        for d in [gen_lower_bound(9).unwrap(), gen_random_planar(RandomPlanar::new(70, 5)).unwrap()] {
            let s = serialize_plg(&d);
            assert_eq!(parse_plg(&s).unwrap(), d);
        }
    }

    #[test]
    fn test_coords_exact() {
        assert_eq!(format_coord(-1), "-0.000001");
        assert_eq!(format_coord(-2_500_000), "-2.500000");
        assert_eq!(parse_coord(1, "-0.000001"), Ok(-1));
        assert_eq!(parse_coord(1, "3.5"), Ok(3_500_000));
        assert_eq!(parse_coord(1, "7"), Ok(7_000_000));
        assert!(parse_coord(1, "0.0000001").is_err());
        assert!(parse_coord(1, "1e3").is_err());
        assert!(parse_coord(1, ".5").is_err());
    }

    #[test]
    fn test_truncated_reports_line() {
        let s = serialize_plg(&t3());
        let cut: String = s.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert_eq!(parse_plg(&cut), Err(ParseError::Truncated { line: 7 }));
    }

    #[test]
    fn test_malformed_lines() {
        let bad = "PLG 1\nsize 2 1\nv 1 0 0\nv 2 1 0\ne 1 3 4\n";
        assert!(matches!(parse_plg(bad), Err(ParseError::Syntax { line: 5, .. })));
        let bad = "PLG 1\n# comment\nsize 2 1\nv 1 0 0\nv 2 x 0\ne 1 2 4\n";
        assert!(matches!(parse_plg(bad), Err(ParseError::Syntax { line: 5, .. })));
        let bad = "PLG 1\nsize 2 1\nv 1 0 0\nv 2 1 0\ne 1 2 -4\n";
        assert!(matches!(parse_plg(bad), Err(ParseError::Syntax { line: 5, .. })));
        let bad = "PLG 2\n";
        assert!(matches!(parse_plg(bad), Err(ParseError::Syntax { line: 1, .. })));
        let bad = "PLG 1\nsize 1 0\nv 1 0 0\nv 2 0 0\n";
        assert!(matches!(parse_plg(bad), Err(ParseError::Syntax { line: 4, .. })));
    }
}
