use std::collections::VecDeque;

use super::Graph;

/// A connected rooted graph in which every vertex lies within `radius` of
/// the root. Vertices are relabeled in breadth-first order, so the root is
/// always vertex 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedBall {
    pub graph: Graph,
    pub root: usize,
    pub radius: usize,
}

impl RootedBall {
    /// Extracts the induced `r`-ball around `x` and returns it together with
    /// the original vertex id of every ball vertex.
    pub(crate) fn around(g: &Graph, x: usize, r: usize) -> (RootedBall, Vec<usize>) {
        let mut seen = vec![false; g.vertex_count()];
        let mut order = vec![x];
        seen[x] = true;
        let mut queue = VecDeque::from([(x, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    queue.push_back((w, d + 1));
                }
            }
        }
        let ball = RootedBall {
            graph: g.induced(&order),
            root: 0,
            radius: r,
        };
        (ball, order)
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Maximal distance of a vertex from the root.
    pub fn eccentricity(&self) -> usize {
        self.graph
            .distances_from(self.root)
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }

    /// Whether the ball is acyclic.
    pub fn is_tree(&self) -> bool {
        self.graph.edge_count() + 1 == self.graph.vertex_count()
    }

    /// The sub-ball of smaller radius around the same root.
    pub fn shrink(&self, r: usize) -> RootedBall {
        let r = r.min(self.radius);
        RootedBall::around(&self.graph, self.root, r).0
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::generators;

    #[test]
    fn radius_one_in_c6_is_three_path() {
        let c6 = generators::cycle(6).unwrap();
        let b = c6.ball(4, 1).unwrap();
        assert_eq!(b.vertex_count(), 3);
        assert_eq!(b.graph.edge_count(), 2);
        assert_eq!(b.graph.degree(b.root), 2);
    }

    #[test]
    fn radius_zero_is_single_vertex() {
        let k4 = generators::complete(4).unwrap();
        let b = k4.ball(2, 0).unwrap();
        assert_eq!(b.vertex_count(), 1);
        assert_eq!(b.root, 0);
    }

    #[test]
    fn p4_endpoint_radius_two() {
        let p4 = generators::path(4).unwrap();
        let b = p4.ball(0, 2).unwrap();
        assert_eq!(b.vertex_count(), 3);
        assert_eq!(b.graph.degree(b.root), 1);
        assert_eq!(b.eccentricity(), 2);
        assert!(b.is_tree());
    }

    #[test]
    fn invalid_root_rejected() {
        let p4 = generators::path(4).unwrap();
        assert!(p4.ball(9, 1).is_err());
    }
}
