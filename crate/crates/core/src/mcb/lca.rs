//! Lowest common ancestors by Euler tour and a sparse table of minima.

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct EulerLca {
    first: Vec<u32>,
    /// `table[k][i]`: tour position of the shallowest node in
    /// `tour[i .. i + 2^k]`.
    table: Vec<Vec<u32>>,
    tour: Vec<u32>,
    depth: Vec<u32>,
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
}

impl EulerLca {
    /// `parent[root] == u32::MAX`; node 0 must be the root.
    pub fn new(parent: &[u32]) -> Self {
        let n = parent.len();
        let mut start = vec![0u32; n + 1];
        for &p in parent {
            if p != NIL {
                start[p as usize + 1] += 1;
            }
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut kids = vec![0u32; n.saturating_sub(1)];
        let mut fill = start.clone();
        for (x, &p) in parent.iter().enumerate() {
            if p != NIL {
                kids[fill[p as usize] as usize] = x as u32;
                fill[p as usize] += 1;
            }
        }
        let mut depth = vec![0u32; n];
        let mut first = vec![0u32; n];
        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut tour = Vec::with_capacity(2 * n);
        let mut clock = 0;
        let mut stack: Vec<(u32, u32)> = Vec::new();
        if n > 0 {
            stack.push((0, start[0]));
            first[0] = 0;
            tour.push(0);
            tin[0] = clock;
            clock += 1;
        }
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if *next < start[x as usize + 1] {
                let c = kids[*next as usize];
                *next += 1;
                depth[c as usize] = depth[x as usize] + 1;
                first[c as usize] = tour.len() as u32;
                tour.push(c);
                tin[c as usize] = clock;
                clock += 1;
                stack.push((c, start[c as usize]));
            } else {
                stack.pop();
                tout[x as usize] = clock;
                clock += 1;
                if let Some(&(p, _)) = stack.last() {
                    tour.push(p);
                }
            }
        }
        let len = tour.len();
        let mut table = vec![(0..len as u32).collect::<Vec<u32>>()];
        let mut k = 1;
        while (1 << k) <= len {
            let prev = &table[k - 1];
            let half = 1 << (k - 1);
            let row: Vec<u32> = (0..=len - (1 << k))
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + half]);
                    if depth[tour[a as usize] as usize] <= depth[tour[b as usize] as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            table.push(row);
            k += 1;
        }
        EulerLca { first, table, tour, depth, tin, tout }
    }

    pub fn depth(&self, x: u32) -> u32 {
        self.depth[x as usize]
    }

    /// Whether `a` is an ancestor of `b` or equal to it.
    pub fn is_ancestor(&self, a: u32, b: u32) -> bool {
        self.tin[a as usize] <= self.tin[b as usize] && self.tout[b as usize] <= self.tout[a as usize]
    }

    pub fn lca(&self, a: u32, b: u32) -> u32 {
        let (mut i, mut j) = (self.first[a as usize] as usize, self.first[b as usize] as usize);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let k = usize::BITS - 1 - (j - i + 1).leading_zeros();
        let (x, y) = (self.table[k as usize][i], self.table[k as usize][j + 1 - (1 << k)]);
        let (x, y) = (self.tour[x as usize], self.tour[y as usize]);
        if self.depth[x as usize] <= self.depth[y as usize] {
            x
        } else {
            y
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive(parent: &[u32], mut a: u32, mut b: u32) -> u32 {
        let depth = |mut x: u32| {
            let mut d = 0;
            while parent[x as usize] != NIL {
                x = parent[x as usize];
                d += 1;
            }
            d
        };
        while depth(a) > depth(b) {
            a = parent[a as usize];
        }
        while depth(b) > depth(a) {
            b = parent[b as usize];
        }
        while a != b {
            a = parent[a as usize];
            b = parent[b as usize];
        }
        a
    }

    #[test]
    fn test_lca_matches_naive_walk() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.gen_range(1..80);
            let parent: Vec<u32> =
                (0..n).map(|i| if i == 0 { NIL } else { rng.gen_range(0..i) as u32 }).collect();
            let l = EulerLca::new(&parent);
            for a in 0..n as u32 {
                for b in 0..n as u32 {
                    assert_eq!(l.lca(a, b), naive(&parent, a, b));
                    assert_eq!(l.is_ancestor(a, b), naive(&parent, a, b) == a);
                }
            }
        }
    }

    #[test]
    fn test_single_node() {
        let l = EulerLca::new(&[NIL]);
        assert_eq!(l.lca(0, 0), 0);
        assert_eq!(l.depth(0), 0);
    }
}
