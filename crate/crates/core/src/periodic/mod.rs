//! Periodic graphs given by voltage graphs: a finite quotient whose edges
//! carry group labels. The cover has vertices `(f, gamma)` and an edge
//! `(f, gamma) ~ (g, gamma * lambda)` for every labeled edge `(f, g, lambda)`.

mod group;
mod io;

pub use group::{Free, FreeWord, Group, Letter, Zd};
pub use io::{parse_voltage_json, AnyVoltageGraph, VoltageJson};

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, RootedBall};
use crate::paths::closed_path_profile;
use crate::series::TruncatedSeries;
use crate::zeta::{
    log_zeta_by_recursion, recursion_order, LogZeta, MeasureMode, RecursionWindow, ZetaCoefficients,
};

/// A voltage graph over the group `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct VoltageGraph<G: Group> {
    group: G,
    /// `adjacency[f]` lists `(g, lambda)` for each labeled edge leaving `f`.
    adjacency: Vec<Vec<(usize, G::Element)>>,
    stabilizers: Vec<u64>,
    degree_bound: Option<usize>,
}

impl<G: Group> VoltageGraph<G> {
    /// Builds a voltage graph from undirected labeled edges; each edge
    /// `(f, g, lambda)` also yields `(g, f, lambda^{-1})`. Listing both
    /// orientations of one edge is allowed.
    pub fn new(
        group: G,
        vertex_count: usize,
        edges: &[(usize, usize, G::Element)],
        stabilizers: Option<Vec<u64>>,
        degree_bound: Option<usize>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut adjacency: Vec<Vec<(usize, G::Element)>> = vec![Vec::new(); vertex_count];
        // explicitly listed orientations; a listed mirror collapses into its edge
        let mut seen: HashMap<(usize, usize, G::Element), usize> = HashMap::new();
        for (i, (f, g, lambda)) in edges.iter().enumerate() {
            for v in [*f, *g] {
                if v >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: v,
                        count: vertex_count,
                    });
                }
            }
            group.validate(lambda)?;
            if f == g && group.is_identity(lambda) {
                return Err(Error::Voltage(format!(
                    "edge {i} ({f}, {f}, identity) is a loop in the cover"
                )));
            }
            let inv = group.inverse(lambda);
            let forward = (*f, *g, lambda.clone());
            let backward = (*g, *f, inv.clone());
            match (seen.get(&forward), seen.get(&backward)) {
                (Some(&j), _) => {
                    return Err(Error::Voltage(format!(
                        "edge {i} repeats edge {j}: ({f}, {g}, {}) would be a multi-edge",
                        group.format(lambda)
                    )))
                }
                (None, Some(_)) => continue,
                (None, None) => {}
            }
            seen.insert(forward, i);
            adjacency[*f].push((*g, lambda.clone()));
            adjacency[*g].push((*f, inv));
        }
        let stabilizers = stabilizers.unwrap_or_else(|| vec![1; vertex_count]);
        if stabilizers.len() != vertex_count || stabilizers.contains(&0) {
            return Err(Error::Voltage(
                "stabilizer orders must be positive, one per vertex".into(),
            ));
        }
        let vg = VoltageGraph {
            group,
            adjacency,
            stabilizers,
            degree_bound,
        };
        if let Some(bound) = degree_bound {
            if let Some(f) = (0..vertex_count).find(|&f| vg.cover_degree(f) > bound) {
                return Err(Error::DegreeBound {
                    bound,
                    witness: format!(
                        "quotient vertex {f} has cover degree {}",
                        vg.cover_degree(f)
                    ),
                });
            }
        }
        Ok(vg)
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    /// `|F|`.
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Labeled edges leaving `f`, in insertion order.
    pub fn labeled_edges(&self, f: usize) -> &[(usize, G::Element)] {
        &self.adjacency[f]
    }

    /// Undirected labeled edges, one orientation each.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, G::Element)> {
        let mut out = Vec::new();
        let mut used: HashMap<(usize, usize, G::Element), ()> = HashMap::new();
        for (f, list) in self.adjacency.iter().enumerate() {
            for (g, lambda) in list {
                if used.contains_key(&(f, *g, lambda.clone())) {
                    continue;
                }
                used.insert((*g, f, self.group.inverse(lambda)), ());
                out.push((f, *g, lambda.clone()));
            }
        }
        out
    }

    pub fn stabilizers(&self) -> &[u64] {
        &self.stabilizers
    }

    pub fn is_free(&self) -> bool {
        self.stabilizers.iter().all(|&s| s == 1)
    }

    pub fn declared_degree_bound(&self) -> Option<usize> {
        self.degree_bound
    }

    /// Degree of `(f, gamma)` in the cover, for any `gamma`.
    pub fn cover_degree(&self, f: usize) -> usize {
        self.adjacency[f].len()
    }

    pub fn max_cover_degree(&self) -> usize {
        (0..self.vertex_count())
            .map(|f| self.cover_degree(f))
            .max()
            .unwrap_or(0)
    }

    /// `sum_f 1 / |Gamma_f|`.
    pub fn total_mass(&self) -> BigRational {
        self.stabilizers
            .iter()
            .map(|&s| BigRational::new(1.into(), BigInt::from(s)))
            .sum()
    }

    /// The `r`-ball of the cover around `(f, identity)`.
    pub fn unfold(&self, f: usize, r: usize) -> Result<PeriodicBall<G>> {
        self.unfold_limited(f, r, usize::MAX)
            .map(|b| b.expect("unbounded unfold"))
    }

    /// As [`VoltageGraph::unfold`], but gives up (returning `None`) once the
    /// ball would exceed `max_vertices`.
    pub fn unfold_limited(
        &self,
        f: usize,
        r: usize,
        max_vertices: usize,
    ) -> Result<Option<PeriodicBall<G>>> {
        if f >= self.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: f,
                count: self.vertex_count(),
            });
        }
        let root = (f, self.group.identity());
        let mut index: HashMap<(usize, G::Element), usize> = HashMap::from([(root.clone(), 0)]);
        let mut labels = vec![root];
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((v, d)) = queue.pop_front() {
            if d == r {
                continue;
            }
            let (base, gamma) = labels[v].clone();
            for (g, lambda) in &self.adjacency[base] {
                let key = (*g, self.group.compose(&gamma, lambda));
                if !index.contains_key(&key) {
                    if labels.len() == max_vertices {
                        return Ok(None);
                    }
                    index.insert(key.clone(), labels.len());
                    queue.push_back((labels.len(), d + 1));
                    labels.push(key);
                }
            }
        }
        let adjacency = labels
            .iter()
            .map(|(base, gamma)| {
                self.adjacency[*base]
                    .iter()
                    .filter_map(|(g, lambda)| {
                        index.get(&(*g, self.group.compose(gamma, lambda))).copied()
                    })
                    .collect()
            })
            .collect();
        let graph = Graph::from_adjacency_unchecked(adjacency);
        Ok(Some(PeriodicBall {
            ball: RootedBall {
                graph,
                root: 0,
                radius: r,
            },
            labels,
        }))
    }
}

/// A ball of the cover whose vertices remember their cover coordinates.
#[derive(Clone, Debug)]
pub struct PeriodicBall<G: Group> {
    pub ball: RootedBall,
    /// `labels[v] = (f, gamma)`; the root is vertex 0 with label
    /// `(f, identity)`.
    pub labels: Vec<(usize, G::Element)>,
}

/// Unfolding radius that makes closed paths of length `j` at the root exact.
pub fn locality_radius(j: usize) -> usize {
    j.div_ceil(2) + 1
}

/// `N_j = sum_{f in F} N_j(f) / |Gamma_f|`, each `N_j(f)` counted on an
/// unfolded ball; `P_j` likewise. The mode tag is `Counting` since the
/// trace sums over `F` rather than averaging.
pub fn periodic_coefficients<G: Group>(
    vg: &VoltageGraph<G>,
    order: usize,
) -> Result<ZetaCoefficients> {
    let mut nbar = vec![BigRational::zero(); order];
    let mut pbar = vec![BigRational::zero(); order];
    for f in 0..vg.vertex_count() {
        let ball = vg.unfold(f, locality_radius(order))?;
        let profile = closed_path_profile(&ball.ball.graph, 0, order);
        let weight = BigRational::new(1.into(), BigInt::from(vg.stabilizers[f]));
        for j in 0..order {
            nbar[j] += weight.clone() * BigInt::from(profile.reduced[j]);
            pbar[j] += weight.clone() * BigInt::from(profile.primitive[j]);
        }
    }
    Ok(ZetaCoefficients {
        mode: MeasureMode::Counting,
        nbar,
        pbar: Some(pbar),
    })
}

/// `exp(sum_j N_j u^j / j)` from [`periodic_coefficients`].
pub fn periodic_zeta_series<G: Group>(
    vg: &VoltageGraph<G>,
    order: usize,
) -> Result<TruncatedSeries> {
    Ok(TruncatedSeries::Exact(
        periodic_coefficients(vg, order)?.zeta_series(),
    ))
}

/// Vertex budget for the unfolds of [`periodic_log_zeta`].
pub const MAX_UNFOLD_VERTICES: usize = 250_000;

/// `log Z(u)` of the periodic graph by the proper-path recursion on unfolds.
///
/// The order is chosen for a log-tail below `target`, then lowered if the
/// unfolds needed for it would exceed [`MAX_UNFOLD_VERTICES`]; the returned
/// tail bound reflects the order actually used.
pub fn periodic_log_zeta<G: Group>(
    vg: &VoltageGraph<G>,
    u: Complex64,
    target: f64,
    cap: usize,
) -> Result<LogZeta> {
    let d = vg.max_cover_degree();
    if d > 1 && u.norm() >= 1.0 / (d as f64 - 1.0) {
        return Err(Error::OutsideDisc {
            modulus: u.norm(),
            limit: 1.0 / (d as f64 - 1.0),
        });
    }
    let mass = vg.total_mass().to_f64().unwrap_or(f64::INFINITY);
    let mut order = recursion_order(d, mass, u.norm(), target, cap);
    let balls = loop {
        let r = locality_radius(order);
        let per_root = MAX_UNFOLD_VERTICES / vg.vertex_count();
        let balls: Option<Vec<_>> = (0..vg.vertex_count())
            .map(|f| vg.unfold_limited(f, r, per_root))
            .collect::<Result<_>>()?;
        match balls {
            Some(b) => break b,
            None if order > 1 => order = (order / 2).max(1),
            None => return Err(Error::Domain("cover grows too fast to unfold".into())),
        }
    };
    let windows: Vec<RecursionWindow<'_>> = balls
        .iter()
        .enumerate()
        .map(|(f, b)| RecursionWindow {
            graph: &b.ball.graph,
            root: 0,
            weight: 1.0 / vg.stabilizers[f] as f64,
        })
        .collect();
    Ok(log_zeta_by_recursion(&windows, u, d, order))
}

/// The `Z^d` lattice: one vertex, one loop label per unit vector.
pub fn lattice(d: usize) -> VoltageGraph<Zd> {
    let group = Zd { dim: d };
    let edges: Vec<_> = (0..d).map(|i| (0, 0, group.unit(i))).collect();
    VoltageGraph::new(group, 1, &edges, None, None).expect("lattice is valid")
}

/// The honeycomb lattice with two vertices per cell.
pub fn honeycomb() -> VoltageGraph<Zd> {
    let group = Zd { dim: 2 };
    let edges = vec![(0, 1, vec![0, 0]), (0, 1, vec![1, 0]), (0, 1, vec![0, 1])];
    VoltageGraph::new(group, 2, &edges, None, None).expect("honeycomb is valid")
}

/// The ladder `Z x {0, 1}` under translation.
pub fn ladder() -> VoltageGraph<Zd> {
    let group = Zd { dim: 1 };
    let edges = vec![(0, 0, vec![1]), (1, 1, vec![1]), (0, 1, vec![0])];
    VoltageGraph::new(group, 2, &edges, None, None).expect("ladder is valid")
}

/// Cayley graph of the free group of the given rank: a `2 rank`-regular tree.
pub fn free_cayley(rank: usize) -> VoltageGraph<Free> {
    let group = Free { rank };
    let edges: Vec<_> = (0..rank).map(|k| (0, 0, group.generator(k))).collect();
    VoltageGraph::new(group, 1, &edges, None, None).expect("Cayley graph is valid")
}
