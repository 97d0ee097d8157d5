//! Brute-force enumeration of closed non-backtracking paths.
//!
//! This is the slow reference layer for every zeta identity: closed paths are
//! generated one by one by depth-first search and classified, never counted
//! through matrix algebra.
//!
//! A closed path of length `j` at `x` is recorded by its vertex sequence
//! `x = v_0, v_1, ..., v_j = x`. It is *proper* when `v_{i+1} != v_{i-1}` for
//! all interior `i`, has a *tail* when its last edge reverses its first one
//! (`v_{j-1} == v_1`), is *reduced* when proper without tail, and *primitive*
//! when the cyclic sequence `v_0 .. v_{j-1}` is not a power of a shorter one.

use serde::Serialize;

use crate::graph::Graph;

/// Which family of closed paths a [`PathCounts`] table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Reduced closed paths, `N_j(x)`.
    Reduced,
    /// Primitive reduced closed paths, `P_j(x)`.
    Primitive,
    /// Proper closed paths with tail, `t_j(x)`.
    Tailed,
}

/// Per-vertex counts for lengths `1..=max_len`; `per_vertex[x][j - 1]` is the
/// count for length `j` at `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCounts {
    pub kind: PathKind,
    pub per_vertex: Vec<Vec<u64>>,
}

impl PathCounts {
    pub fn max_len(&self) -> usize {
        self.per_vertex.first().map_or(0, Vec::len)
    }

    pub fn at(&self, x: usize, j: usize) -> u64 {
        self.per_vertex[x][j - 1]
    }

    /// Sum over all vertices for length `j`.
    pub fn total(&self, j: usize) -> u64 {
        self.per_vertex.iter().map(|c| c[j - 1]).sum()
    }
}

/// All closed-path statistics of one root, for lengths `1..=max_len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedPathProfile {
    pub reduced: Vec<u64>,
    pub primitive: Vec<u64>,
    pub tailed: Vec<u64>,
    /// Primitive reduced paths whose vertex sequence is the lexicographically
    /// smallest of its rotations; each prime cycle has exactly one such
    /// representative over all roots.
    pub rotation_minimal: Vec<u64>,
}

/// Enumerates every proper closed path of length at most `max_len` at `x`.
pub fn closed_path_profile(g: &Graph, x: usize, max_len: usize) -> ClosedPathProfile {
    let dist: Vec<usize> = g
        .distances_from(x)
        .into_iter()
        .map(|d| d.unwrap_or(usize::MAX))
        .collect();
    let mut search = Search {
        g,
        root: x,
        max_len,
        dist,
        seq: Vec::with_capacity(max_len + 1),
        failure: vec![0; max_len + 1],
        profile: ClosedPathProfile {
            reduced: vec![0; max_len],
            primitive: vec![0; max_len],
            tailed: vec![0; max_len],
            rotation_minimal: vec![0; max_len],
        },
    };
    if max_len > 0 {
        search.seq.push(x);
        search.extend();
    }
    search.profile
}

struct Search<'a> {
    g: &'a Graph,
    root: usize,
    max_len: usize,
    dist: Vec<usize>,
    seq: Vec<usize>,
    failure: Vec<usize>,
    profile: ClosedPathProfile,
}

impl Search<'_> {
    fn extend(&mut self) {
        let len = self.seq.len() - 1;
        let cur = self.seq[len];
        let prev = if len > 0 {
            Some(self.seq[len - 1])
        } else {
            None
        };
        for &next in self.g.neighbors(cur) {
            if Some(next) == prev || self.dist[next] > self.max_len - len - 1 {
                continue;
            }
            if next == self.root {
                self.record(len + 1);
            }
            if len + 1 < self.max_len {
                self.seq.push(next);
                self.extend();
                self.seq.pop();
            }
        }
    }

    /// `self.seq` holds `v_0 .. v_{j-1}` and the path closes with `v_j = root`.
    fn record(&mut self, j: usize) {
        if self.seq[j - 1] == self.seq[1] {
            self.profile.tailed[j - 1] += 1;
            return;
        }
        self.profile.reduced[j - 1] += 1;
        if smallest_period(&self.seq[..j], &mut self.failure) == j {
            self.profile.primitive[j - 1] += 1;
            if is_minimal_rotation(&self.seq[..j]) {
                self.profile.rotation_minimal[j - 1] += 1;
            }
        }
    }
}

/// Smallest `p` dividing `s.len()` with `s` a power of its length-`p` prefix.
fn smallest_period(s: &[usize], failure: &mut [usize]) -> usize {
    let n = s.len();
    failure[0] = 0;
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = failure[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        failure[i] = k;
    }
    let p = n - failure[n - 1];
    if n.is_multiple_of(p) {
        p
    } else {
        n
    }
}

fn is_minimal_rotation(s: &[usize]) -> bool {
    let n = s.len();
    (1..n).all(|r| {
        let rotated = s[r..].iter().chain(&s[..r]);
        s.iter().cmp(rotated) != std::cmp::Ordering::Greater
    })
}

/// `N_j(x)`: reduced closed paths of length `j` starting at `x`.
pub fn count_reduced_closed(g: &Graph, x: usize, j: usize) -> u64 {
    closed_path_profile(g, x, j)
        .reduced
        .get(j.wrapping_sub(1))
        .copied()
        .unwrap_or(0)
}

/// `P_j(x)`: primitive reduced closed paths of length `j` starting at `x`.
pub fn count_primitive_reduced(g: &Graph, x: usize, j: usize) -> u64 {
    closed_path_profile(g, x, j)
        .primitive
        .get(j.wrapping_sub(1))
        .copied()
        .unwrap_or(0)
}

/// `t_j(x)`: proper closed paths with tail of length `j` starting at `x`.
pub fn count_tailed(g: &Graph, x: usize, j: usize) -> u64 {
    closed_path_profile(g, x, j)
        .tailed
        .get(j.wrapping_sub(1))
        .copied()
        .unwrap_or(0)
}

/// Reduced, primitive and tailed counts for every vertex.
#[derive(Clone, Debug)]
pub struct PathCensus {
    pub reduced: PathCounts,
    pub primitive: PathCounts,
    pub tailed: PathCounts,
    pub prime_cycles: PrimeCycleTable,
}

pub fn path_census(g: &Graph, max_len: usize) -> PathCensus {
    let profiles: Vec<ClosedPathProfile> = (0..g.vertex_count())
        .map(|x| closed_path_profile(g, x, max_len))
        .collect();
    let table = |kind, f: fn(&ClosedPathProfile) -> &Vec<u64>| PathCounts {
        kind,
        per_vertex: profiles.iter().map(|p| f(p).clone()).collect(),
    };
    let entries = (1..=max_len)
        .filter_map(|j| {
            let count: u64 = profiles.iter().map(|p| p.rotation_minimal[j - 1]).sum();
            (count > 0).then_some((j, count))
        })
        .collect();
    PathCensus {
        reduced: table(PathKind::Reduced, |p| &p.reduced),
        primitive: table(PathKind::Primitive, |p| &p.primitive),
        tailed: table(PathKind::Tailed, |p| &p.tailed),
        prime_cycles: PrimeCycleTable { entries },
    }
}

/// Number of prime cycles (rotation classes of primitive reduced closed
/// paths) for each length that has any.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PrimeCycleTable {
    pub entries: Vec<(usize, u64)>,
}

impl PrimeCycleTable {
    pub fn count(&self, j: usize) -> u64 {
        self.entries.iter().find(|e| e.0 == j).map_or(0, |e| e.1)
    }
}

pub fn prime_cycle_table(g: &Graph, j_max: usize) -> PrimeCycleTable {
    path_census(g, j_max).prime_cycles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    #[test]
    fn triangle_counts() {
        let c3 = generators::cycle(3).unwrap();
        for j in 1..=9 {
            let expect = if j % 3 == 0 { 2 } else { 0 };
            assert_eq!(count_reduced_closed(&c3, 0, j), expect, "j={j}");
            assert_eq!(count_tailed(&c3, 1, j), 0);
        }
        assert_eq!(count_primitive_reduced(&c3, 0, 3), 2);
        assert_eq!(count_primitive_reduced(&c3, 0, 6), 0);
    }

    #[test]
    fn trees_have_no_reduced_paths() {
        let p5 = generators::path(5).unwrap();
        let census = path_census(&p5, 8);
        for j in 1..=8 {
            assert_eq!(census.reduced.total(j), 0);
            assert_eq!(census.primitive.total(j), 0);
            assert_eq!(census.tailed.total(j), 0);
        }
        assert!(census.prime_cycles.entries.is_empty());
    }

    #[test]
    fn hexagon() {
        let c6 = generators::cycle(6).unwrap();
        assert_eq!(count_primitive_reduced(&c6, 2, 6), 2);
        assert_eq!(prime_cycle_table(&c6, 6).entries, vec![(6, 2)]);
        assert_eq!(
            prime_cycle_table(&generators::cycle(3).unwrap(), 6).entries,
            vec![(3, 2)]
        );
    }

    #[test]
    fn pendant_triangle_tails() {
        let g = generators::triangle_with_pendant();
        assert_eq!(count_tailed(&g, 3, 5), 2);
        assert_eq!(count_reduced_closed(&g, 3, 5), 0);
    }

    #[test]
    fn grid_squares() {
        let torus = generators::torus(7, 2).unwrap();
        let ball = torus.ball(0, 3).unwrap();
        assert_eq!(count_reduced_closed(&ball.graph, ball.root, 4), 8);
    }

    #[test]
    fn period_detection() {
        let mut f = vec![0; 8];
        assert_eq!(smallest_period(&[1, 2, 1, 2], &mut f), 2);
        assert_eq!(smallest_period(&[1, 2, 1], &mut f), 3);
        assert_eq!(smallest_period(&[5], &mut f), 1);
        assert!(is_minimal_rotation(&[0, 1, 2]));
        assert!(!is_minimal_rotation(&[1, 2, 0]));
    }
}
