//! Standard graph families and seeded random graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges)
}

/// The `d`-dimensional discrete torus of side `n` (vertices in row-major
/// order). Requires `n >= 3` so the result is simple.
pub fn torus(n: usize, d: usize) -> Result<Graph> {
    if n < 3 || d == 0 {
        return Err(Error::Domain(format!(
            "torus needs side >= 3 and d >= 1, got n={n}, d={d}"
        )));
    }
    let count = n.pow(d as u32);
    let mut edges = Vec::with_capacity(count * d);
    for v in 0..count {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (v / stride) % n;
            let w = v - coord * stride + ((coord + 1) % n) * stride;
            edges.push((v, w));
            stride *= n;
        }
    }
    Graph::from_edges(count, &edges)
}

/// A triangle `0-1-2` with a pendant vertex `3` attached to `0`.
pub fn triangle_with_pendant() -> Graph {
    Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (3, 0)]).expect("valid")
}

/// Seeded random connected graph on `n` vertices with maximal degree at most
/// `max_degree` (`max_degree >= 2` when `n > 2`). A random spanning tree is
/// grown first, then `extra_edges` further edges are attempted.
pub fn random_connected(
    n: usize,
    max_degree: usize,
    extra_edges: usize,
    seed: u64,
) -> Result<Graph> {
    if n == 0 || (n > 2 && max_degree < 2) || (n == 2 && max_degree < 1) {
        return Err(Error::Domain(format!(
            "cannot build connected graph n={n}, D={max_degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree = vec![0usize; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    for i in 1..n {
        let v = order[i];
        let candidates: Vec<usize> = order[..i]
            .iter()
            .copied()
            .filter(|&u| degree[u] < max_degree)
            .collect();
        let u = candidates[rng.gen_range(0..candidates.len())];
        edges.push((u.min(v), u.max(v)));
        degree[u] += 1;
        degree[v] += 1;
    }
    for _ in 0..extra_edges * 4 {
        if edges.len() >= n - 1 + extra_edges {
            break;
        }
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        let e = (u.min(v), u.max(v));
        if u == v || degree[u] >= max_degree || degree[v] >= max_degree || edges.contains(&e) {
            continue;
        }
        edges.push(e);
        degree[u] += 1;
        degree[v] += 1;
    }
    Graph::from_edges(n, &edges)
}

/// Seeded uniform-ish random `k`-regular simple graph via the configuration
/// model with rejection. `n * k` must be even.
pub fn random_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if !(n * k).is_multiple_of(2) || k >= n {
        return Err(Error::Domain(format!(
            "no simple {k}-regular graph on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..10_000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * k / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || edges.contains(&(u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        return Graph::from_edges(n, &edges);
    }
    Err(Error::Domain(format!(
        "failed to sample a simple {k}-regular graph on {n} vertices"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_is_four_regular() {
        let t = torus(5, 2).unwrap();
        assert_eq!(t.vertex_count(), 25);
        assert_eq!(t.regular_degree(), Some(4));
        assert_eq!(t.edge_count(), 50);
        assert!(torus(2, 2).is_err());
    }

    #[test]
    fn random_graphs_respect_bounds() {
        for seed in 0..20 {
            let g = random_connected(10, 4, 6, seed).unwrap();
            assert!(g.is_connected());
            assert!(g.max_degree() <= 4);
            let r = random_regular(20, 3, seed).unwrap();
            assert_eq!(r.regular_degree(), Some(3));
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        assert_eq!(
            random_connected(9, 3, 5, 7).unwrap(),
            random_connected(9, 3, 5, 7).unwrap()
        );
    }
}
