//! Which side of a new Horton cycle each separator vertex falls on.

use super::merge::Merge;
use super::{McbError, NIL};
use crate::planar::PlanarGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum Where {
    Int,
    Ext,
    On,
}

/// Whether the wedge swept counterclockwise from dart `r2` to dart `l2`
/// lies inside the wedge swept from `r1` to `l1`. All four darts leave
/// `center`.
pub fn wedge_contains(g: &PlanarGraph, center: u32, r1: u32, l1: u32, r2: u32, l2: u32) -> Result<bool, McbError> {
    if [r1, l1, r2, l2].iter().any(|&d| g.tail(d) != center) {
        return Err(McbError::Invariant("wedge dart does not leave its center".into()));
    }
    if r1 == l1 || r2 == l2 {
        return Err(McbError::DegenerateWedge);
    }
    let deg = g.degree(center) as u32;
    let base = g.rot_pos(r1);
    let rel = |d: u32| (g.rot_pos(d) + deg - base) % deg;
    Ok(rel(r2) <= rel(l2) && rel(l2) <= rel(l1))
}

/// The dart leaving `x` along edge `e`.
fn dart_from(g: &PlanarGraph, e: u32, x: u32) -> u32 {
    if g.edge(e).u == x {
        2 * e
    } else {
        2 * e + 1
    }
}

impl Merge<'_> {
    /// Side of the cycle closed by `e` in the tree of boundary vertex `j`,
    /// for each boundary vertex in `list`.
    pub(super) fn classify(&self, j: u32, e: u32, list: &[u32]) -> Result<Vec<(u32, Where)>, McbError> {
        let g = self.g;
        let r = self.vj.len();
        let bt = &self.bt[j as usize];
        let (u1, u2) = (g.edge(e).u, g.edge(e).v);
        let on = |i: usize| {
            let x = self.vj[i];
            bt.anc(x, u1) || bt.anc(x, u2)
        };
        let left_is_int = bt.fpe[g.face_of(2 * e) as usize] == e;
        let mut out = Vec::with_capacity(list.len());
        for &jj in list {
            if on(jj as usize) {
                out.push((jj, Where::On));
                continue;
            }
            let mut i2 = (jj as usize + 1) % r;
            while !on(i2) {
                i2 = (i2 + 1) % r;
            }
            let x = self.vj[i2];
            let c = self.pieces[(i2 + r - 1) % r].end_corner;
            let bx = &self.bt[i2];
            // first dart of the tree path from x down to u
            let down = |u: u32| {
                let t = bx.top[u as usize];
                dart_from(g, bx.sp.parent_edge[t as usize], x)
            };
            let up = || dart_from(g, bt.sp.parent_edge[x as usize], x);
            let (dp, dq) = if x == bt.sp.root {
                let to_u2 = if x == u2 { 2 * e + 1 } else { down(u2) };
                let to_u1 = if x == u1 { 2 * e } else { down(u1) };
                (to_u2, to_u1)
            } else if bt.anc(x, u1) {
                (up(), if x == u1 { 2 * e } else { down(u1) })
            } else {
                (if x == u2 { 2 * e + 1 } else { down(u2) }, up())
            };
            debug_assert!(bt.sp.parent_edge[x as usize] != NIL || x == bt.sp.root);
            let left = wedge_contains(g, x, dq, dp, c, g.rot_next(c))?;
            out.push((jj, if left == left_is_int { Where::Int } else { Where::Ext }));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn test_wedge_against_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let k = rng.gen_range(3..9);
            let mut pts = vec![Point::new(0, 0)];
            let mut ang = Vec::new();
            while pts.len() <= k {
                let p = Point::new(rng.gen_range(-20..=20), rng.gen_range(-20..=20));
                let a = (p.y as f64).atan2(p.x as f64);
                if p == pts[0] || ang.iter().any(|&b: &f64| (a - b).abs() < 1e-9) {
                    continue;
                }
                pts.push(p);
                ang.push(a);
            }
            let edges: Vec<(u32, u32, i64)> = (2..=k as u32 + 1).map(|v| (1, v, 1)).collect();
            let g = PlanarGraph::build_embedding(&pts, &edges).unwrap();
            let darts: Vec<u32> = (0..k as u32).map(|e| 2 * e).collect();
            // ccw angle from r to d in [0, 2pi)
            let pos = |r: usize, d: usize| (ang[d] - ang[r]).rem_euclid(std::f64::consts::TAU);
            for r1 in 0..k {
                for l1 in 0..k {
                    for r2 in 0..k {
                        for l2 in 0..k {
                            let got = wedge_contains(&g, 0, darts[r1], darts[l1], darts[r2], darts[l2]);
                            if r1 == l1 || r2 == l2 {
                                assert_eq!(got, Err(McbError::DegenerateWedge));
                                continue;
                            }
                            let want = pos(r1, r2) <= pos(r1, l2) && pos(r1, l2) <= pos(r1, l1);
                            assert_eq!(got.unwrap(), want, "{r1} {l1} {r2} {l2}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn test_wedge_rejects_foreign_dart() {
        let pts = [Point::new(0, 0), Point::new(1, 0), Point::new(0, 1)];
        let g = PlanarGraph::build_embedding(&pts, &[(1, 2, 1), (1, 3, 1)]).unwrap();
        assert!(matches!(wedge_contains(&g, 0, 0, 1, 0, 2), Err(McbError::Invariant(_))));
    }
}
