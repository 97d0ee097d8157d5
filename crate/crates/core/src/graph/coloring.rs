use std::collections::{BTreeMap, VecDeque};

use super::canon::validate_coloring;
use super::{canonical_key, BallClassKey, Graph, RootedBall};
use crate::error::{Error, Result};

/// A graph with a proper edge coloring in `1..=palette`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    graph: Graph,
    /// `colors[v][k]` is the color of the edge to `graph.neighbors(v)[k]`.
    colors: Vec<Vec<u32>>,
    palette: u32,
    degree_bound: usize,
}

impl ColoredGraph {
    /// Wraps `graph` with the given per-adjacency colors.
    ///
    /// `degree_bound` defaults to the maximal degree; the palette (largest
    /// color used) must not exceed `2 * degree_bound - 1`.
    pub fn new(graph: Graph, colors: Vec<Vec<u32>>, degree_bound: Option<usize>) -> Result<Self> {
        validate_coloring(&graph, &colors)?;
        let degree_bound = degree_bound.unwrap_or_else(|| graph.max_degree());
        if graph.max_degree() > degree_bound {
            return Err(Error::DegreeBound {
                bound: degree_bound,
                witness: format!("max degree {}", graph.max_degree()),
            });
        }
        let palette = colors.iter().flatten().copied().max().unwrap_or(0);
        if colors.iter().flatten().any(|&c| c == 0) {
            return Err(Error::ImproperColoring("colors start at 1".into()));
        }
        if palette as usize > (2 * degree_bound).saturating_sub(1) {
            return Err(Error::ImproperColoring(format!(
                "palette {palette} exceeds 2D-1 = {}",
                (2 * degree_bound).saturating_sub(1)
            )));
        }
        Ok(ColoredGraph {
            graph,
            colors,
            palette,
            degree_bound,
        })
    }

    /// Builds from colors listed parallel to `graph.edges()` order or to an
    /// explicit edge list.
    pub fn from_edge_colors(
        graph: Graph,
        edges: &[(usize, usize)],
        colors: &[u32],
    ) -> Result<Self> {
        if edges.len() != colors.len() {
            return Err(Error::ImproperColoring(
                "colors must be parallel to edges".into(),
            ));
        }
        let mut table: Vec<Vec<u32>> = (0..graph.vertex_count())
            .map(|v| vec![0; graph.degree(v)])
            .collect();
        for (&(u, v), &c) in edges.iter().zip(colors) {
            let a = graph.neighbors(u).binary_search(&v).map_err(|_| {
                Error::ImproperColoring(format!("colored pair {u}-{v} is not an edge"))
            })?;
            let b = graph.neighbors(v).binary_search(&u).expect("symmetric");
            table[u][a] = c;
            table[v][b] = c;
        }
        ColoredGraph::new(graph, table, None)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn colors(&self) -> &[Vec<u32>] {
        &self.colors
    }

    /// Number of colors `N` (largest color in use).
    pub fn palette(&self) -> u32 {
        self.palette
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn color(&self, u: usize, v: usize) -> Option<u32> {
        let k = self.graph.neighbors(u).binary_search(&v).ok()?;
        Some(self.colors[u][k])
    }

    /// The unique neighbor of `v` across an edge of color `c`, if any. This
    /// is the involution `J_c` restricted to vertices where it is defined.
    pub fn neighbor_by_color(&self, v: usize, c: u32) -> Option<usize> {
        self.colors[v]
            .iter()
            .position(|&x| x == c)
            .map(|k| self.graph.neighbors(v)[k])
    }

    /// Edge colors listed parallel to `graph().edges()`.
    pub fn edge_colors(&self) -> Vec<u32> {
        self.graph
            .edges()
            .map(|(u, v)| self.color(u, v).expect("edge"))
            .collect()
    }

    /// The colored `r`-ball around `x`.
    pub fn ball(&self, x: usize, r: usize) -> Result<ColoredBall> {
        self.graph.check_vertex(x)?;
        let (ball, order) = RootedBall::around(&self.graph, x, r);
        let colors = (0..ball.vertex_count())
            .map(|i| {
                ball.graph
                    .neighbors(i)
                    .iter()
                    .map(|&j| self.color(order[i], order[j]).expect("induced edge"))
                    .collect()
            })
            .collect();
        Ok(ColoredBall { ball, colors })
    }
}

/// A rooted ball together with the colors inherited from its host graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBall {
    pub ball: RootedBall,
    pub colors: Vec<Vec<u32>>,
}

impl ColoredBall {
    pub fn key(&self) -> BallClassKey {
        canonical_key(&self.ball, Some(&self.colors)).expect("host coloring is proper")
    }

    /// The same colored graph rooted at another of its vertices.
    pub fn reroot(&self, root: usize) -> ColoredGraphRooted<'_> {
        ColoredGraphRooted {
            graph: &self.ball.graph,
            colors: &self.colors,
            root,
        }
    }
}

/// Borrowed view of a rooted colored graph used by [`count_injections`].
#[derive(Clone, Copy, Debug)]
pub struct ColoredGraphRooted<'a> {
    pub graph: &'a Graph,
    pub colors: &'a [Vec<u32>],
    pub root: usize,
}

/// Greedy proper edge coloring with at most `2D - 1` colors.
///
/// Edges are processed in `(min endpoint, max endpoint)` order and receive
/// the smallest color unused at both endpoints. An edge meets at most
/// `2(D - 1)` other edges, so `2D - 1` colors always suffice.
pub fn greedy_edge_coloring(g: &Graph) -> ColoredGraph {
    let mut colors: Vec<Vec<u32>> = (0..g.vertex_count())
        .map(|v| vec![0; g.degree(v)])
        .collect();
    for (u, v) in g.edges() {
        let used = |x: usize, colors: &Vec<Vec<u32>>| -> Vec<u32> {
            colors[x].iter().copied().filter(|&c| c != 0).collect()
        };
        let (cu, cv) = (used(u, &colors), used(v, &colors));
        let c = (1u32..)
            .find(|c| !cu.contains(c) && !cv.contains(c))
            .expect("unbounded");
        let a = g.neighbors(u).binary_search(&v).expect("edge");
        let b = g.neighbors(v).binary_search(&u).expect("edge");
        colors[u][a] = c;
        colors[v][b] = c;
    }
    ColoredGraph::new(g.clone(), colors, None).expect("greedy coloring is proper")
}

/// Number of vertices `v` of `g` such that a color-preserving injection of
/// the rooted graph `h` into `(g, v)` exists.
///
/// Colors make the injection unique: starting from the root, every edge of
/// `h` forces the image of its far endpoint, so each candidate `v` is checked
/// by a single traversal.
pub fn count_injections(h: ColoredGraphRooted<'_>, g: &ColoredGraph) -> Result<usize> {
    validate_coloring(h.graph, h.colors)?;
    h.graph.check_vertex(h.root)?;
    let hn = h.graph.vertex_count();
    let dist = h.graph.distances_from(h.root);
    if dist.iter().any(Option::is_none) {
        return Err(Error::Domain("injected graph must be connected".into()));
    }
    let mut image = vec![usize::MAX; hn];
    let mut used = vec![false; g.graph.vertex_count()];
    let mut count = 0;
    for v in 0..g.graph.vertex_count() {
        if injects_at(h, g, v, &mut image, &mut used) {
            count += 1;
        }
        for &w in &image {
            if w != usize::MAX {
                used[w] = false;
            }
        }
        image.fill(usize::MAX);
    }
    Ok(count)
}

fn injects_at(
    h: ColoredGraphRooted<'_>,
    g: &ColoredGraph,
    v: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    image[h.root] = v;
    used[v] = true;
    let mut queue = VecDeque::from([h.root]);
    while let Some(a) = queue.pop_front() {
        for (k, &b) in h.graph.neighbors(a).iter().enumerate() {
            let Some(target) = g.neighbor_by_color(image[a], h.colors[a][k]) else {
                return false;
            };
            if image[b] == usize::MAX {
                if used[target] {
                    return false;
                }
                image[b] = target;
                used[target] = true;
                queue.push_back(b);
            } else if image[b] != target {
                return false;
            }
        }
    }
    true
}

/// Largest difference `|#inj((H,x), g) - #inj((H,y), g)|` over all colored
/// balls `H` of radius at most `r` in `g` and all root pairs `x, y` of `H`.
///
/// On a finite properly colored graph this is always zero: the unique
/// injection of `(H, x)` carries `y` to a well-defined vertex, which gives a
/// bijection between the two sets of injections.
pub fn invariance_discrepancy(g: &ColoredGraph, r: usize) -> usize {
    let mut shapes: BTreeMap<BallClassKey, ColoredBall> = BTreeMap::new();
    for x in 0..g.graph.vertex_count() {
        for s in 0..=r {
            let b = g.ball(x, s).expect("valid vertex");
            shapes.entry(b.key()).or_insert(b);
        }
    }
    let mut worst = 0;
    for shape in shapes.values() {
        let counts: Vec<usize> = (0..shape.ball.vertex_count())
            .map(|root| count_injections(shape.reroot(root), g).expect("ball of g is proper"))
            .collect();
        let (lo, hi) = (counts.iter().min(), counts.iter().max());
        if let (Some(lo), Some(hi)) = (lo, hi) {
            worst = worst.max(hi - lo);
        }
    }
    worst
}

/// Graphs that expose canonical keys of their rooted balls.
pub trait LocalKeys {
    fn vertex_count(&self) -> usize;
    fn ball_key(&self, x: usize, r: usize) -> Result<BallClassKey>;
}

impl LocalKeys for Graph {
    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }

    fn ball_key(&self, x: usize, r: usize) -> Result<BallClassKey> {
        canonical_key(&self.ball(x, r)?, None)
    }
}

impl LocalKeys for ColoredGraph {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn ball_key(&self, x: usize, r: usize) -> Result<BallClassKey> {
        Ok(self.ball(x, r)?.key())
    }
}

/// Result of comparing two rooted balls radius by radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Similarity {
    /// Balls agree up to exactly this radius and differ at the next one.
    Exactly(usize),
    /// Balls agree at every radius up to the search bound.
    AtLeast(usize),
}

impl Similarity {
    pub fn radius(self) -> usize {
        match self {
            Similarity::Exactly(r) | Similarity::AtLeast(r) => r,
        }
    }

    /// The pseudo-ultrametric value `2^-c`, with `c` capped at the search
    /// bound.
    pub fn distance(self) -> f64 {
        0.5f64.powi(self.radius() as i32)
    }
}

/// Largest `r <= r_max` such that the `r`-balls around `x` and `y` are
/// isomorphic as rooted (colored) graphs.
pub fn similarity_radius<G: LocalKeys>(
    g: &G,
    x: usize,
    y: usize,
    r_max: usize,
) -> Result<Similarity> {
    if x == y {
        return Ok(Similarity::AtLeast(r_max));
    }
    for r in 1..=r_max {
        if g.ball_key(x, r)? != g.ball_key(y, r)? {
            return Ok(Similarity::Exactly(r - 1));
        }
    }
    Ok(Similarity::AtLeast(r_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    fn is_proper(c: &ColoredGraph) -> bool {
        (0..c.graph().vertex_count()).all(|v| {
            let mut row = c.colors()[v].clone();
            row.sort_unstable();
            row.windows(2).all(|w| w[0] != w[1])
        })
    }

    #[test]
    fn greedy_colors_small_cycles() {
        let c3 = greedy_edge_coloring(&generators::cycle(3).unwrap());
        assert_eq!(c3.palette(), 3);
        assert!(is_proper(&c3));
        let c4 = greedy_edge_coloring(&generators::cycle(4).unwrap());
        assert_eq!(c4.palette(), 2);
        let edge = greedy_edge_coloring(&generators::path(2).unwrap());
        assert_eq!(edge.palette(), 1);
    }

    #[test]
    fn injection_counts() {
        let g = greedy_edge_coloring(&generators::cycle(3).unwrap());
        // single color-1 edge rooted at an endpoint
        let h = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let colors = vec![vec![1], vec![1]];
        let rooted = ColoredGraphRooted {
            graph: &h,
            colors: &colors,
            root: 0,
        };
        assert_eq!(count_injections(rooted, &g).unwrap(), 2);

        let point = Graph::from_edges(1, &[]).unwrap();
        let none: Vec<Vec<u32>> = vec![vec![]];
        let rooted = ColoredGraphRooted {
            graph: &point,
            colors: &none,
            root: 0,
        };
        assert_eq!(count_injections(rooted, &g).unwrap(), 3);

        let absent = vec![vec![4], vec![4]];
        let rooted = ColoredGraphRooted {
            graph: &h,
            colors: &absent,
            root: 0,
        };
        assert_eq!(count_injections(rooted, &g).unwrap(), 0);
    }

    #[test]
    fn improper_injection_source_rejected() {
        let g = greedy_edge_coloring(&generators::cycle(3).unwrap());
        let h = generators::path(3).unwrap();
        let colors = vec![vec![1], vec![1, 1], vec![1]];
        let rooted = ColoredGraphRooted {
            graph: &h,
            colors: &colors,
            root: 0,
        };
        assert!(matches!(
            count_injections(rooted, &g),
            Err(Error::ImproperColoring(_))
        ));
    }

    #[test]
    fn invariance_on_small_graphs() {
        let c3 = greedy_edge_coloring(&generators::cycle(3).unwrap());
        assert_eq!(invariance_discrepancy(&c3, 1), 0);
        let p4 = greedy_edge_coloring(&generators::path(4).unwrap());
        assert_eq!(invariance_discrepancy(&p4, 2), 0);
        let k4 = greedy_edge_coloring(&generators::complete(4).unwrap());
        assert_eq!(invariance_discrepancy(&k4, 3), 0);
    }

    #[test]
    fn similarity_of_colored_path_ends() {
        let p3 = generators::path(3).unwrap();
        let colored = ColoredGraph::from_edge_colors(p3, &[(0, 1), (1, 2)], &[1, 2]).unwrap();
        let s = similarity_radius(&colored, 0, 2, 4).unwrap();
        assert_eq!(s, Similarity::Exactly(0));
        assert_eq!(s.distance(), 1.0);
        assert_eq!(
            similarity_radius(&colored, 1, 1, 4).unwrap(),
            Similarity::AtLeast(4)
        );
    }

    #[test]
    fn similarity_in_uncolored_cycle() {
        let c6 = generators::cycle(6).unwrap();
        assert_eq!(
            similarity_radius(&c6, 0, 3, 2).unwrap(),
            Similarity::AtLeast(2)
        );
    }

    #[test]
    fn palette_bound_enforced() {
        let edge = generators::path(2).unwrap();
        assert!(ColoredGraph::from_edge_colors(edge, &[(0, 1)], &[2]).is_err());
    }
}
