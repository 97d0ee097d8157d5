//! Floating-point evaluation of zeta functions.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::{euler_characteristic, MeasureMode};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `R = (D + sqrt(D^2 + 4D)) / 2`, so that `||A_j|| <= R^j`.
pub fn growth_radius(degree_bound: usize) -> f64 {
    let d = degree_bound as f64;
    (d + (d * d + 4.0 * d).sqrt()) / 2.0
}

fn check_disc(u: Complex64, limit: f64) -> Result<()> {
    if u.norm() < limit {
        Ok(())
    } else {
        Err(Error::OutsideDisc {
            modulus: u.norm(),
            limit,
        })
    }
}

/// A finite graph with a distinguished root whose closed proper paths up
/// to the requested length agree with those of the graph being measured.
#[derive(Clone, Copy, Debug)]
pub struct RecursionWindow<'a> {
    pub graph: &'a Graph,
    pub root: usize,
    pub weight: f64,
}

/// `log Z(u)` summed to `order`, with a bound on the omitted log-tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogZeta {
    pub log_value: Complex64,
    pub order: usize,
    pub tail_bound: f64,
}

impl LogZeta {
    pub fn value(&self) -> Complex64 {
        self.log_value.exp()
    }

    /// `|Z(u) - 1|` without cancellation for tiny logs.
    pub fn deviation_from_one(&self) -> f64 {
        complex_exp_m1(self.log_value).norm()
    }
}

/// `exp(l) - 1`, accurate for small `|l|`.
pub fn complex_exp_m1(l: Complex64) -> Complex64 {
    // exp(l) - 1 = expm1(re) e^{i im} + (e^{i im} - 1)
    let phase = Complex64::from_polar(1.0, l.im);
    let half = (l.im / 2.0).sin();
    let phase_m1 = Complex64::new(-2.0 * half * half, l.im.sin());
    phase * l.re.exp_m1() + phase_m1
}

/// `sum_{j > K} a q^j / j` bounded by `a q^{K+1} / ((K+1)(1-q))`.
pub fn log_tail_bound(degree_bound: usize, total_mass: f64, order: usize, modulus: f64) -> f64 {
    if degree_bound <= 1 {
        return 0.0;
    }
    let d = degree_bound as f64;
    let q = (d - 1.0) * modulus;
    if q >= 1.0 {
        return f64::INFINITY;
    }
    let a = total_mass * d / (d - 1.0);
    a * q.powi(order as i32 + 1) / ((order as f64 + 1.0) * (1.0 - q))
}

/// Smallest order whose log-tail bound is below `target`, capped at `cap`.
pub fn recursion_order(
    degree_bound: usize,
    total_mass: f64,
    modulus: f64,
    target: f64,
    cap: usize,
) -> usize {
    (1..=cap)
        .find(|&k| log_tail_bound(degree_bound, total_mass, k, modulus) <= target)
        .unwrap_or(cap)
}

/// Default accuracy goal for the log-series route.
pub const LOG_TAIL_TARGET: f64 = 1e-30;
/// Default order cap for the log-series route.
pub const MAX_RECURSION_ORDER: usize = 600;

/// `log Z(u) = sum_{j <= K} N_j u^j / j` with `N_j = tau(A_j) - t_j`
/// evaluated per root by the vector form of the proper-path recursion.
///
/// Vectors are rescaled by `|u|^j`, so every quantity stays below
/// `D / (D-1) ((D-1)|u|)^j` and no cancellation blows up.
pub fn log_zeta_by_recursion(
    windows: &[RecursionWindow<'_>],
    u: Complex64,
    degree_bound: usize,
    order: usize,
) -> LogZeta {
    let total_mass: f64 = windows.iter().map(|w| w.weight).sum();
    let tail_bound = log_tail_bound(degree_bound, total_mass, order, u.norm());
    let s = u.norm();
    if s == 0.0 || order == 0 {
        return LogZeta {
            log_value: Complex64::new(0.0, 0.0),
            order,
            tail_bound,
        };
    }
    // c[j] = sum_x w_x a_j(x,x) s^j, e[j] = sum_x w_x (deg x - 2) a_j(x,x) s^j
    let mut c = vec![0.0f64; order + 1];
    let mut e = vec![0.0f64; order + 1];
    for w in windows {
        let g = w.graph;
        let n = g.vertex_count();
        let deg_root = g.degree(w.root) as f64;
        let mut prev2 = vec![0.0f64; n];
        prev2[w.root] = 1.0;
        let mut prev1 = vec![0.0f64; n];
        for &y in g.neighbors(w.root) {
            prev1[y] = s;
        }
        let mut next = vec![0.0f64; n];
        c[0] += w.weight;
        e[0] += w.weight * (deg_root - 2.0);
        for j in 2..=order {
            for y in 0..n {
                let a: f64 = g.neighbors(y).iter().map(|&z| prev1[z]).sum();
                let q = g.degree(y) as f64 - if j == 2 { 0.0 } else { 1.0 };
                next[y] = s * a - s * s * q * prev2[y];
            }
            std::mem::swap(&mut prev2, &mut prev1);
            std::mem::swap(&mut prev1, &mut next);
            let d = prev1[w.root];
            c[j] += w.weight * d;
            e[j] += w.weight * (deg_root - 2.0) * d;
        }
    }
    let phase = u / s;
    let mut tails = vec![0.0f64; order + 1];
    let mut log_value = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for j in 1..=order {
        if j >= 3 {
            tails[j] = s * s * (tails[j - 2] + e[j - 2]);
        }
        power *= phase;
        log_value += power * ((c[j] - tails[j]) / j as f64);
    }
    LogZeta {
        log_value,
        order,
        tail_bound,
    }
}

/// One window per vertex of a finite graph.
pub fn finite_windows(g: &Graph, mode: MeasureMode) -> Vec<RecursionWindow<'_>> {
    let w = mode.vertex_weight(g.vertex_count()).to_f64().unwrap_or(0.0);
    (0..g.vertex_count())
        .map(|root| RecursionWindow {
            graph: g,
            root,
            weight: w,
        })
        .collect()
}

/// `log Z(u)` of a finite graph with the order chosen for a log-tail below
/// [`LOG_TAIL_TARGET`]; requires `|u| < 1/(D-1)`.
pub fn log_zeta_finite(g: &Graph, u: Complex64, mode: MeasureMode) -> Result<LogZeta> {
    let d = g.max_degree();
    if d > 1 {
        check_disc(u, 1.0 / (d as f64 - 1.0))?;
    }
    let windows = finite_windows(g, mode);
    let mass: f64 = windows.iter().map(|w| w.weight).sum();
    let order = recursion_order(d, mass, u.norm(), LOG_TAIL_TARGET, MAX_RECURSION_ORDER);
    Ok(log_zeta_by_recursion(&windows, u, d, order))
}

/// `Z(u) = (1 - u^2)^chi / det_tau(I - uA + u^2 Q)` for `|u| < 1/R`.
///
/// In normalized mode the `|V|`-th root is taken on the principal branch and
/// checked against the log-series route; a disagreement is reported as a
/// domain error instead of returning a value on the wrong sheet.
pub fn det_formula_eval(g: &Graph, u: Complex64, mode: MeasureMode) -> Result<Complex64> {
    let n = g.vertex_count();
    check_disc(u, 1.0 / growth_radius(g.max_degree()))?;
    let one = Complex64::new(1.0, 0.0);
    let u2 = u * u;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let a: Complex64 = if g.has_edge(i, j) {
            u
        } else {
            Complex64::new(0.0, 0.0)
        };
        if i == j {
            one + u2 * (g.degree(i) as f64 - 1.0) - a
        } else {
            -a
        }
    });
    let det = m.lu().determinant();
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::Domain(format!(
            "det(I - uA + u^2 Q) vanishes at u = {u}"
        )));
    }
    let chi_count = euler_characteristic(g, MeasureMode::Counting).to_integer();
    let chi_count: i32 = chi_count
        .to_i32()
        .ok_or_else(|| Error::Domain("Euler characteristic out of range".into()))?;
    let one_minus_u2 = one - u2;
    match mode {
        MeasureMode::Counting => Ok(one_minus_u2.powi(chi_count) / det),
        MeasureMode::Normalized => {
            let log = (chi_count as f64 * one_minus_u2.ln() - det.ln()) / n as f64;
            let value = log.exp();
            let reference = log_zeta_finite(g, u, mode)?;
            let diff = (log - reference.log_value).norm();
            if diff > 1e-8 + reference.tail_bound {
                return Err(Error::Domain(format!(
                    "principal |V|-th root disagrees with the series branch at u = {u}"
                )));
            }
            Ok(value)
        }
    }
}

/// `Z(u) = (1-u^2)^{-(r-1) tau(I)/2} prod_lambda (1 - u lambda + r u^2)^{-w}`
/// for an `(r+1)`-regular graph, with `w = 1` or `1/|V|` per eigenvalue.
///
/// Powers use the principal logarithm; a factor on the cut `(-inf, 0]`
/// is a domain error.
pub fn regular_spectral_eval(g: &Graph, u: Complex64, mode: MeasureMode) -> Result<Complex64> {
    let degree = g.regular_degree().ok_or(Error::NotRegular)?;
    check_disc(u, 1.0 / growth_radius(degree))?;
    let n = g.vertex_count();
    let r = degree as f64 - 1.0;
    let adjacency = DMatrix::<f64>::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let eigenvalues: Vec<f64> = SymmetricEigen::new(adjacency)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    let w = mode.vertex_weight(n).to_f64().unwrap_or(0.0);
    let mass = mode.total_mass(n).to_f64().unwrap_or(0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut log = -(r - 1.0) * mass / 2.0 * (one - u * u).ln();
    for &lambda in eigenvalues.iter() {
        let z = one - u * lambda + r * u * u;
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::Domain(format!(
                "factor 1 - u({lambda}) + r u^2 on the branch cut"
            )));
        }
        log -= w * z.ln();
    }
    Ok(log.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triangle_closed_form() {
        let c3 = generators::cycle(3).unwrap();
        for u in [c(0.2, 0.0), c(0.1, 0.25), c(-0.3, 0.05)] {
            let expect = (c(1.0, 0.0) - u * u * u).powi(-2);
            let det = det_formula_eval(&c3, u, MeasureMode::Counting).unwrap();
            let spec = regular_spectral_eval(&c3, u, MeasureMode::Counting).unwrap();
            let series = log_zeta_finite(&c3, u, MeasureMode::Counting)
                .unwrap()
                .value();
            for v in [det, spec, series] {
                assert!((v - expect).norm() < 1e-12, "{v} vs {expect}");
            }
            let norm = det_formula_eval(&c3, u, MeasureMode::Normalized).unwrap();
            assert!((norm.powi(3) - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn single_edge_is_trivial() {
        let k2 = generators::path(2).unwrap();
        let z = det_formula_eval(&k2, c(0.3, 0.1), MeasureMode::Counting).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn disc_is_enforced() {
        let k4 = generators::complete(4).unwrap();
        let limit = 1.0 / growth_radius(3);
        assert!(matches!(
            det_formula_eval(&k4, c(limit * 1.01, 0.0), MeasureMode::Counting),
            Err(Error::OutsideDisc { .. })
        ));
        assert!(regular_spectral_eval(
            &generators::path(3).unwrap(),
            c(0.1, 0.0),
            MeasureMode::Counting
        )
        .is_err());
    }

    #[test]
    fn routes_agree_on_k4() {
        let k4 = generators::complete(4).unwrap();
        let u = c(0.12, -0.07);
        for mode in [MeasureMode::Counting, MeasureMode::Normalized] {
            let det = det_formula_eval(&k4, u, mode).unwrap();
            let spec = regular_spectral_eval(&k4, u, mode).unwrap();
            let series = log_zeta_finite(&k4, u, mode).unwrap().value();
            assert!((det - spec).norm() < 1e-12);
            assert!((det - series).norm() < 1e-12);
        }
    }

    #[test]
    fn deviation_is_accurate_for_tiny_logs() {
        let z = LogZeta {
            log_value: c(1e-30, 0.0),
            order: 1,
            tail_bound: 0.0,
        };
        assert!((z.deviation_from_one() - 1e-30).abs() < 1e-44);
    }
}
