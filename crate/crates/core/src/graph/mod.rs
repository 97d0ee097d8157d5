//! Finite simple graphs with bounded degree, rooted balls, canonical keys of
//! rooted balls, proper edge colorings and the local-topology comparisons
//! built on top of them.

mod ball;
mod canon;
mod coloring;
pub mod generators;
pub mod io;

pub use ball::RootedBall;
pub use canon::{canonical_key, BallClassKey, DecodedBall};
pub use coloring::{
    count_injections, greedy_edge_coloring, invariance_discrepancy, similarity_radius, ColoredBall,
    ColoredGraph, ColoredGraphRooted, LocalKeys, Similarity,
};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A finite simple undirected graph stored as sorted adjacency lists.
///
/// Every undirected edge `{u, v}` appears as `v` in the list of `u` and as `u`
/// in the list of `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list.
    ///
    /// Rejects self-loops, repeated edges (in either orientation), vertex ids
    /// outside `0..vertex_count` and the empty vertex set.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(u.min(w[0]), u.max(w[0])));
            }
        }
        Ok(Graph { adjacency })
    }

    /// Builds a graph from adjacency lists that are already known to be
    /// symmetric, loop-free and duplicate-free (sorting is still applied).
    pub(crate) fn from_adjacency_unchecked(mut adjacency: Vec<Vec<usize>>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Graph { adjacency }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// The degree bound `D`, taken as the maximal vertex degree.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    /// Breadth-first distances from `x`; `None` for unreachable vertices.
    pub fn distances_from(&self, x: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Returns `Some(k)` when every vertex has degree `k`.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.degree(0);
        self.adjacency.iter().all(|l| l.len() == k).then_some(k)
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut adjacency = vec![Vec::new(); self.vertex_count()];
        for (v, list) in self.adjacency.iter().enumerate() {
            adjacency[perm[v]] = list.iter().map(|&w| perm[w]).collect();
        }
        Graph::from_adjacency_unchecked(adjacency)
    }

    /// Induced subgraph on `vertices`, relabeled to `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let adjacency = vertices
            .iter()
            .map(|&v| {
                self.neighbors(v)
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        Graph::from_adjacency_unchecked(adjacency)
    }

    /// The combinatorial `r`-ball around `x`. See [`RootedBall`].
    pub fn ball(&self, x: usize, r: usize) -> Result<RootedBall> {
        self.check_vertex(x)?;
        Ok(RootedBall::around(self, x, r).0)
    }

    /// The adjacency matrix as a dense row-major 0/1 table.
    pub fn adjacency_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0; n]; n];
        for (u, list) in self.adjacency.iter().enumerate() {
            for &v in list {
                m[u][v] = 1;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_path() {
        let c3 = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(c3.max_degree(), 2);
        assert_eq!(c3.edge_count(), 3);
        assert_eq!(c3.neighbors(0), &[1, 2]);
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(p4.max_degree(), 2);
        assert_eq!(p4.degree(0), 1);
        assert!(p4.is_connected());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            Graph::from_edges(3, &[(0, 0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(Error::VertexOutOfRange {
                vertex: 3,
                count: 3
            })
        ));
        assert!(matches!(Graph::from_edges(0, &[]), Err(Error::EmptyGraph)));
    }

    #[test]
    fn isolated_vertices_allowed() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(g.degree(2), 0);
        assert!(!g.is_connected());
        assert_eq!(g.distances_from(0), vec![Some(0), Some(1), None]);
    }
}
