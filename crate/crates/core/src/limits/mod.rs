//! Ball statistics of finite graphs, limit coefficients computed from
//! them, and the convergence experiment runner.

mod report;

pub use report::{ConvergenceReport, ConvergenceRow, CsvRow};

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{canonical_key, generators, io, BallClassKey, Graph, RootedBall};
use crate::paths::{closed_path_profile, count_reduced_closed};
use crate::periodic::{
    locality_radius, periodic_coefficients, periodic_log_zeta, AnyVoltageGraph, Group, VoltageGraph,
};
use crate::sofic::SoficFamily;
use crate::zeta::{
    coefficients_by_trace, complex_exp_m1, log_zeta_finite, MeasureMode, ZetaCoefficients,
    LOG_TAIL_TARGET, MAX_RECURSION_ORDER,
};

/// Frequencies of rooted `r`-ball classes, keyed canonically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallDistribution {
    pub radius: usize,
    pub degree_bound: usize,
    pub entries: BTreeMap<BallClassKey, BigRational>,
    /// One representative ball per key.
    pub representatives: BTreeMap<BallClassKey, RootedBall>,
}

impl BallDistribution {
    /// A distribution from weighted balls; weights are normalized to sum 1.
    pub fn from_weighted_balls(
        radius: usize,
        balls: impl IntoIterator<Item = (RootedBall, BigRational)>,
    ) -> Result<Self> {
        let mut entries: BTreeMap<BallClassKey, BigRational> = BTreeMap::new();
        let mut representatives = BTreeMap::new();
        let mut degree_bound = 0;
        let mut total = BigRational::zero();
        for (ball, w) in balls {
            let key = canonical_key(&ball, None)?;
            degree_bound = degree_bound.max(ball.graph.max_degree());
            total += w.clone();
            *entries.entry(key.clone()).or_insert_with(BigRational::zero) += w;
            representatives.entry(key).or_insert(ball);
        }
        if total.is_zero() {
            return Err(Error::EmptyGraph);
        }
        for v in entries.values_mut() {
            *v /= total.clone();
        }
        Ok(BallDistribution {
            radius,
            degree_bound,
            entries,
            representatives,
        })
    }

    /// A single class with frequency 1.
    pub fn point_mass(ball: RootedBall) -> Result<Self> {
        let one = BigRational::from_integer(1.into());
        Self::from_weighted_balls(ball.radius, [(ball, one)])
    }

    pub fn frequency(&self, key: &BallClassKey) -> BigRational {
        self.entries
            .get(key)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn class_count(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> BigRational {
        self.entries.values().cloned().sum()
    }

    /// The distribution at a smaller radius, obtained by shrinking every
    /// representative.
    pub fn coarsen(&self, radius: usize) -> Result<Self> {
        if radius > self.radius {
            return Err(Error::RadiusTooSmall {
                have: self.radius,
                need: radius,
            });
        }
        let balls = self
            .entries
            .iter()
            .map(|(k, p)| (self.representatives[k].shrink(radius), p.clone()));
        Self::from_weighted_balls(radius, balls)
    }
}

/// `p(G, alpha) = |{v : B_r(v) = alpha}| / |V|`.
pub fn ball_distribution(g: &Graph, r: usize) -> Result<BallDistribution> {
    let one = BigRational::from_integer(1.into());
    let balls = (0..g.vertex_count())
        .map(|x| g.ball(x, r).map(|b| (b, one.clone())))
        .collect::<Result<Vec<_>>>()?;
    BallDistribution::from_weighted_balls(r, balls)
}

/// Frequencies `|F_alpha| / |F|` of the cover balls around the fundamental
/// domain, weighted by `1 / |Gamma_f|`.
pub fn periodic_ball_distribution<G: Group>(
    vg: &VoltageGraph<G>,
    r: usize,
) -> Result<BallDistribution> {
    let balls = (0..vg.vertex_count())
        .map(|f| {
            let w = BigRational::new(1.into(), BigInt::from(vg.stabilizers()[f]));
            vg.unfold(f, r).map(|b| (b.ball, w))
        })
        .collect::<Result<Vec<_>>>()?;
    BallDistribution::from_weighted_balls(r, balls)
}

/// `N_j(alpha)` at the root of the ball.
pub fn nj_of_class(b: &RootedBall, j: usize) -> Result<u64> {
    let need = locality_radius(j);
    if b.radius < need {
        return Err(Error::RadiusTooSmall {
            have: b.radius,
            need,
        });
    }
    Ok(count_reduced_closed(&b.graph, b.root, j))
}

/// `N_j = sum_alpha p(alpha) N_j(alpha)`, in normalized mode.
pub fn limit_coefficients(d: &BallDistribution, order: usize) -> Result<ZetaCoefficients> {
    let need = locality_radius(order);
    if d.radius < need {
        return Err(Error::RadiusTooSmall {
            have: d.radius,
            need,
        });
    }
    let mut nbar = vec![BigRational::zero(); order];
    let mut pbar = vec![BigRational::zero(); order];
    for (key, p) in &d.entries {
        let ball = &d.representatives[key];
        let profile = closed_path_profile(&ball.graph, ball.root, order);
        for j in 0..order {
            nbar[j] += p.clone() * BigInt::from(profile.reduced[j]);
            pbar[j] += p.clone() * BigInt::from(profile.primitive[j]);
        }
    }
    Ok(ZetaCoefficients {
        mode: MeasureMode::Normalized,
        nbar,
        pbar: Some(pbar),
    })
}

/// Total variation `1/2 sum_alpha |p(alpha) - q(alpha)|`.
pub fn distribution_distance(p: &BallDistribution, q: &BallDistribution) -> Result<BigRational> {
    if p.radius != q.radius {
        return Err(Error::RadiusMismatch(p.radius, q.radius));
    }
    let mut sum = BigRational::zero();
    for (k, a) in &p.entries {
        sum += (a - q.frequency(k)).abs();
    }
    for (k, b) in &q.entries {
        if !p.entries.contains_key(k) {
            sum += b.clone();
        }
    }
    Ok(sum / BigRational::from_integer(2.into()))
}

/// A sequence of finite graphs indexed by a size parameter.
#[derive(Clone, Debug)]
pub enum Family {
    Cycle(Vec<usize>),
    Torus { dim: usize, sizes: Vec<usize> },
    Sofic(SoficFamily),
    Files(Vec<PathBuf>),
}

impl Family {
    /// `(n, G_n)` in index order.
    pub fn members(&self) -> Result<Vec<(usize, Graph)>> {
        match self {
            Family::Cycle(sizes) => sizes
                .iter()
                .map(|&n| Ok((n, generators::cycle(n)?)))
                .collect(),
            Family::Torus { dim, sizes } => sizes
                .iter()
                .map(|&n| Ok((n, generators::torus(n, *dim)?)))
                .collect(),
            Family::Sofic(family) => family.members(),
            Family::Files(paths) => paths
                .iter()
                .enumerate()
                .map(|(i, p)| Ok((i, io::load(p)?.graph)))
                .collect(),
        }
    }
}

/// What a family is compared against.
#[derive(Clone, Debug)]
pub enum Limit {
    /// A periodic graph; finite members are compared through
    /// `Z_norm(G_n)^{tau(1)}` where `tau(1) = sum_f 1/|Gamma_f|`.
    Voltage(AnyVoltageGraph),
    /// A ball distribution; its zeta function is known only to the order
    /// its radius allows.
    Distribution(BallDistribution),
}

struct LimitData {
    nbar: Vec<BigRational>,
    mass: f64,
    logs: Vec<Complex64>,
    tails: Vec<f64>,
}

fn limit_data(limit: &Limit, order: usize, points: &[Complex64]) -> Result<LimitData> {
    match limit {
        Limit::Voltage(vg) => {
            fn go<G: Group>(
                vg: &VoltageGraph<G>,
                order: usize,
                points: &[Complex64],
            ) -> Result<LimitData> {
                let coeffs = periodic_coefficients(vg, order)?;
                let mass_q = vg.total_mass();
                let nbar = coeffs.nbar.iter().map(|n| n / mass_q.clone()).collect();
                let mut logs = Vec::new();
                let mut tails = Vec::new();
                for &u in points {
                    let l = periodic_log_zeta(vg, u, LOG_TAIL_TARGET, MAX_RECURSION_ORDER)?;
                    logs.push(l.log_value);
                    tails.push(l.tail_bound);
                }
                Ok(LimitData {
                    nbar,
                    mass: mass_q.to_f64().unwrap_or(f64::NAN),
                    logs,
                    tails,
                })
            }
            match vg {
                AnyVoltageGraph::Zd(v) => go(v, order, points),
                AnyVoltageGraph::Free(v) => go(v, order, points),
            }
        }
        Limit::Distribution(d) => {
            let coeffs = limit_coefficients(d, order)?;
            let model = crate::series::TailModel {
                degree_bound: d.degree_bound,
                total_mass: 1.0,
            };
            let log_series = coeffs.log_series().to_float();
            let logs = points.iter().map(|&u| log_series.eval(u)).collect();
            let tails = points
                .iter()
                .map(|&u| crate::zeta::log_tail_bound(model.degree_bound, 1.0, order, u.norm()))
                .collect();
            Ok(LimitData {
                nbar: coeffs.nbar,
                mass: 1.0,
                logs,
                tails,
            })
        }
    }
}

/// Runs a family against a limit: exact normalized coefficients per member,
/// `Z` deviations at each evaluation point, and their suprema.
pub fn converge_run(
    family: &Family,
    order: usize,
    limit: &Limit,
    eval_points: &[Complex64],
) -> Result<ConvergenceReport> {
    let members = family.members()?;
    for (_, g) in &members {
        let d = g.max_degree();
        if d > 1 {
            if let Some(u) = eval_points
                .iter()
                .find(|u| u.norm() * (d as f64 - 1.0) >= 1.0)
            {
                return Err(Error::OutsideDisc {
                    modulus: u.norm(),
                    limit: 1.0 / (d as f64 - 1.0),
                });
            }
        }
    }
    let lim = limit_data(limit, order, eval_points)?;
    let mut rows = Vec::with_capacity(members.len());
    for (n, g) in &members {
        let coeffs = coefficients_by_trace(g, order, MeasureMode::Normalized)?;
        let coeff_dev = coeffs
            .nbar
            .iter()
            .zip(&lim.nbar)
            .map(|(a, b)| (a - b).abs())
            .collect();
        let mut z = Vec::new();
        let mut z_dev = Vec::new();
        for (k, &u) in eval_points.iter().enumerate() {
            let l = log_zeta_finite(g, u, MeasureMode::Normalized)?;
            let scaled = l.log_value * lim.mass;
            z.push(scaled.exp());
            // |e^a - e^b| = |e^b| |expm1(a - b)|
            z_dev.push(lim.logs[k].exp().norm() * complex_exp_m1(scaled - lim.logs[k]).norm());
        }
        rows.push(ConvergenceRow {
            n: *n,
            vertices: g.vertex_count(),
            nbar: coeffs.nbar,
            coeff_dev,
            z,
            z_dev,
        });
    }
    Ok(ConvergenceReport::new(
        order,
        eval_points.to_vec(),
        lim.nbar,
        lim.logs.iter().map(|l| l.exp()).collect(),
        lim.tails,
        lim.mass,
        rows,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use crate::periodic::lattice;
    use crate::series::{int, ratio};
    use crate::zeta::coefficients_by_paths;

    #[test]
    fn simple_distributions() {
        let c6 = generators::cycle(6).unwrap();
        let d = ball_distribution(&c6, 1).unwrap();
        assert_eq!(d.class_count(), 1);
        assert_eq!(d.total(), int(1));
        let p4 = generators::path(4).unwrap();
        let d = ball_distribution(&p4, 1).unwrap();
        assert_eq!(d.class_count(), 2);
        assert!(d.entries.values().all(|p| *p == ratio(1, 2)));
        assert_eq!(ball_distribution(&p4, 0).unwrap().class_count(), 1);
    }

    #[test]
    fn nj_requires_radius() {
        let grid = generators::torus(9, 2).unwrap();
        assert_eq!(nj_of_class(&grid.ball(0, 3).unwrap(), 4).unwrap(), 8);
        assert!(matches!(
            nj_of_class(&grid.ball(0, 2).unwrap(), 4),
            Err(Error::RadiusTooSmall { have: 2, need: 3 })
        ));
    }

    #[test]
    fn frequency_route_matches_direct_route() {
        let g = generators::random_connected(9, 4, 5, 3).unwrap();
        let order = 8;
        let d = ball_distribution(&g, locality_radius(order)).unwrap();
        let limit = limit_coefficients(&d, order).unwrap();
        let direct = coefficients_by_paths(&g, order, MeasureMode::Normalized);
        assert_eq!(limit.nbar, direct.nbar);
    }

    #[test]
    fn coarsening_matches_direct() {
        let g = generators::random_connected(12, 3, 4, 8).unwrap();
        let fine = ball_distribution(&g, 3).unwrap();
        assert_eq!(fine.coarsen(1).unwrap(), ball_distribution(&g, 1).unwrap());
    }

    #[test]
    fn distances() {
        let a = ball_distribution(&generators::cycle(12).unwrap(), 1).unwrap();
        let b = ball_distribution(&generators::cycle(24).unwrap(), 1).unwrap();
        assert_eq!(distribution_distance(&a, &b).unwrap(), int(0));
        let p =
            BallDistribution::point_mass(generators::path(3).unwrap().ball(0, 1).unwrap()).unwrap();
        let q =
            BallDistribution::point_mass(generators::path(3).unwrap().ball(1, 1).unwrap()).unwrap();
        assert_eq!(distribution_distance(&p, &q).unwrap(), int(1));
        assert!(distribution_distance(
            &a,
            &ball_distribution(&generators::cycle(5).unwrap(), 2).unwrap()
        )
        .is_err());
    }

    #[test]
    fn torus_distribution_matches_grid() {
        let order = 6;
        let r = locality_radius(order);
        let torus = ball_distribution(&generators::torus(order + 2, 2).unwrap(), r).unwrap();
        let grid = periodic_ball_distribution(&lattice(2), r).unwrap();
        assert_eq!(
            limit_coefficients(&torus, order).unwrap().nbar,
            limit_coefficients(&grid, order).unwrap().nbar
        );
    }

    #[test]
    fn zero_point_gives_zero_deviation() {
        let report = converge_run(
            &Family::Cycle(vec![4, 5, 6]),
            4,
            &Limit::Voltage(lattice(1).into()),
            &[Complex64::new(0.0, 0.0)],
        )
        .unwrap();
        for row in &report.rows {
            assert_eq!(row.z_dev, vec![0.0]);
        }
    }
}
