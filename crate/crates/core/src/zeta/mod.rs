//! Zeta coefficients of finite graphs by three independent routes (path
//! enumeration, the proper-path matrix recursion, the determinant formula),
//! the Euler product, the Euler characteristic and numeric evaluation.

mod matrix;
pub mod numeric;

pub use matrix::IntMatrix;
pub use numeric::{
    complex_exp_m1, det_formula_eval, finite_windows, growth_radius, log_tail_bound,
    log_zeta_by_recursion, log_zeta_finite, recursion_order, regular_spectral_eval, LogZeta,
    RecursionWindow, LOG_TAIL_TARGET, MAX_RECURSION_ORDER,
};

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::paths::{path_census, PathCensus};
use crate::series::{Coefficient, Series, TailModel};

/// How the trace `tau` weighs vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// Plain matrix trace; each vertex has mass 1.
    Counting,
    /// Trace divided by `|V|`; each vertex has mass `1/|V|`.
    Normalized,
}

impl MeasureMode {
    /// Mass of a single vertex in a graph with `n` vertices.
    pub fn vertex_weight(self, n: usize) -> BigRational {
        match self {
            MeasureMode::Counting => BigRational::one(),
            MeasureMode::Normalized => BigRational::new(BigInt::one(), BigInt::from(n)),
        }
    }

    /// `tau(I)`.
    pub fn total_mass(self, n: usize) -> BigRational {
        match self {
            MeasureMode::Counting => BigRational::from_integer(BigInt::from(n)),
            MeasureMode::Normalized => BigRational::one(),
        }
    }

    fn tau(self, n: usize, trace: i128) -> BigRational {
        BigRational::from_integer(BigInt::from(trace)) * self.vertex_weight(n)
    }

    pub fn tail_model(self, g: &Graph) -> TailModel {
        TailModel {
            degree_bound: g.max_degree(),
            total_mass: self
                .total_mass(g.vertex_count())
                .to_f64()
                .unwrap_or(f64::INFINITY),
        }
    }
}

/// Coefficients `N_1 ..= N_J` of a zeta function, optionally with the
/// primitive counts `P_1 ..= P_J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaCoefficients {
    pub mode: MeasureMode,
    pub nbar: Vec<BigRational>,
    pub pbar: Option<Vec<BigRational>>,
}

impl ZetaCoefficients {
    pub fn order(&self) -> usize {
        self.nbar.len()
    }

    pub fn n(&self, j: usize) -> &BigRational {
        &self.nbar[j - 1]
    }

    /// `sum_j N_j u^j / j`.
    pub fn log_series(&self) -> Series<BigRational> {
        let mut c = vec![BigRational::zero(); self.order() + 1];
        for (j, nj) in self.nbar.iter().enumerate() {
            c[j + 1] = nj / BigRational::from_i64(j as i64 + 1);
        }
        Series::new(c)
    }

    /// `Z(u) = exp(sum_j N_j u^j / j)` truncated at the coefficient order.
    pub fn zeta_series(&self) -> Series<BigRational> {
        self.log_series()
            .exp()
            .expect("log series has zero constant term")
    }

    /// Checks `N_j = sum_{i | j} P_i` when primitive counts are present.
    pub fn divisor_identity_holds(&self) -> bool {
        let Some(p) = &self.pbar else { return true };
        (1..=self.order()).all(|j| {
            let sum: BigRational = (1..=j)
                .filter(|i| j % i == 0)
                .map(|i| p[i - 1].clone())
                .sum();
            sum == self.nbar[j - 1]
        })
    }
}

fn scaled(mode: MeasureMode, n: usize, count: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(count)) * mode.vertex_weight(n)
}

/// Coefficients from brute-force enumeration of reduced closed paths.
pub fn coefficients_by_paths(g: &Graph, order: usize, mode: MeasureMode) -> ZetaCoefficients {
    coefficients_from_census(g, &path_census(g, order), mode)
}

pub fn coefficients_from_census(
    g: &Graph,
    census: &PathCensus,
    mode: MeasureMode,
) -> ZetaCoefficients {
    let n = g.vertex_count();
    let order = census.reduced.max_len();
    ZetaCoefficients {
        mode,
        nbar: (1..=order)
            .map(|j| scaled(mode, n, census.reduced.total(j)))
            .collect(),
        pbar: Some(
            (1..=order)
                .map(|j| scaled(mode, n, census.primitive.total(j)))
                .collect(),
        ),
    }
}

/// `A_0 ..= A_J` with `A_0 = I`, `A_1 = A`, `A_2 = A^2 - Q - I` and
/// `A_j = A_{j-1} A - A_{j-2} Q`. Entry `(p, q)` of `A_j` counts proper
/// paths of length `j` from `p` to `q`.
pub fn proper_path_matrices(g: &Graph, order: usize) -> Result<Vec<IntMatrix>> {
    let n = g.vertex_count();
    let q = IntMatrix::degree_minus_identity(g).diagonal();
    let mut out = vec![IntMatrix::identity(n)];
    if order >= 1 {
        out.push(IntMatrix::adjacency(g));
    }
    if order >= 2 {
        let a2 = out[1]
            .times_adjacency(g)?
            .checked_sub(&IntMatrix::identity(n).times_diagonal(&q)?)?
            .checked_sub(&IntMatrix::identity(n))?;
        out.push(a2);
    }
    for j in 3..=order {
        let next = out[j - 1]
            .times_adjacency(g)?
            .checked_sub(&out[j - 2].times_diagonal(&q)?)?;
        out.push(next);
    }
    Ok(out)
}

/// `t_1 ..= t_J` from `t_1 = t_2 = 0`, `t_j = t_{j-2} + tau((Q - I) A_{j-2})`.
pub fn tail_counts_by_recursion(
    g: &Graph,
    order: usize,
    mode: MeasureMode,
) -> Result<Vec<BigRational>> {
    let mats = proper_path_matrices(g, order)?;
    Ok(tails_from_matrices(g, &mats, order, mode))
}

fn tails_from_matrices(
    g: &Graph,
    mats: &[IntMatrix],
    order: usize,
    mode: MeasureMode,
) -> Vec<BigRational> {
    let n = g.vertex_count();
    let mut t = vec![BigRational::zero(); order + 1];
    for j in 3..=order {
        let diag = mats[j - 2].diagonal();
        let trace: i128 = (0..n).map(|x| (g.degree(x) as i128 - 2) * diag[x]).sum();
        t[j] = t[j - 2].clone() + mode.tau(n, trace);
    }
    t.split_off(1)
}

/// Coefficients from `N_j = tau(A_j) - t_j`.
pub fn coefficients_by_trace(
    g: &Graph,
    order: usize,
    mode: MeasureMode,
) -> Result<ZetaCoefficients> {
    let n = g.vertex_count();
    let mats = proper_path_matrices(g, order)?;
    let tails = tails_from_matrices(g, &mats, order, mode);
    let nbar = (1..=order)
        .map(|j| mode.tau(n, mats[j].trace()) - tails[j - 1].clone())
        .collect();
    Ok(ZetaCoefficients {
        mode,
        nbar,
        pbar: None,
    })
}

/// `chi = tau(I - Q) / 2`; in counting mode this is `|V| - |E|`.
pub fn euler_characteristic(g: &Graph, mode: MeasureMode) -> BigRational {
    let n = g.vertex_count();
    let trace: i128 = (0..n).map(|v| 2 - g.degree(v) as i128).sum();
    mode.tau(n, trace) / BigRational::from_i64(2)
}

/// The zeta series from the determinant formula
/// `Z(u)^{-1} = (1 - u^2)^{-chi} det_tau(I - u A + u^2 Q)`, computed exactly.
///
/// With `X(u) = u A - u^2 Q`, `log det_tau(I - X) = -sum_k tau(X^k) / k`;
/// only traces of powers enter, so the non-commutativity of `A` and `Q`
/// never matters.
pub fn det_formula_series(
    g: &Graph,
    order: usize,
    mode: MeasureMode,
) -> Result<Series<BigRational>> {
    let n = g.vertex_count();
    let q = IntMatrix::degree_minus_identity(g).diagonal();
    let neg_q: Vec<i128> = q.iter().map(|x| -x).collect();
    // log Z = chi log(1 - u^2) + sum_k tau(X^k) / k
    let chi = euler_characteristic(g, mode);
    let one_minus_u2 = Series::one(order).sub(&Series::monomial(BigRational::one(), 2, order));
    let mut log_z = one_minus_u2.log()?.scale(&chi);
    // power[m] = coefficient of u^m in X^k; starts at X^0 = I
    let mut power: Vec<Option<IntMatrix>> = vec![None; order + 1];
    power[0] = Some(IntMatrix::identity(n));
    for k in 1..=order {
        let mut next: Vec<Option<IntMatrix>> = vec![None; order + 1];
        for m in k..=order.min(2 * k) {
            let mut acc: Option<IntMatrix> = None;
            if let Some(prev) = &power[m - 1] {
                acc = Some(prev.times_adjacency(g)?);
            }
            if m >= 2 {
                if let Some(prev) = &power[m - 2] {
                    let term = prev.times_diagonal(&neg_q)?;
                    acc = Some(match acc {
                        Some(a) => a.checked_add(&term)?,
                        None => term,
                    });
                }
            }
            next[m] = acc;
        }
        power = next;
        let inv_k = BigRational::new(BigInt::one(), BigInt::from(k));
        let mut c = vec![BigRational::zero(); order + 1];
        for (m, mat) in power.iter().enumerate() {
            if let Some(mat) = mat {
                c[m] = mode.tau(n, mat.trace()) * inv_k.clone();
            }
        }
        log_z = log_z.add(&Series::new(c));
    }
    log_z.exp()
}

/// `prod_{j <= J} (1 - u^j)^{-P_j / j}` truncated at order `J`.
///
/// In counting mode every exponent `P_j / j` is the number of prime cycles
/// of length `j` and must be an integer.
pub fn euler_product_series(
    g: &Graph,
    order: usize,
    mode: MeasureMode,
) -> Result<Series<BigRational>> {
    let coeffs = coefficients_by_paths(g, order, mode);
    euler_product_from(&coeffs)
}

pub fn euler_product_from(coeffs: &ZetaCoefficients) -> Result<Series<BigRational>> {
    let order = coeffs.order();
    let pbar = coeffs
        .pbar
        .as_ref()
        .ok_or_else(|| Error::Consistency("Euler product needs primitive counts".into()))?;
    let mut product = Series::one(order);
    for j in 1..=order {
        let exponent = &pbar[j - 1] / BigRational::from_i64(j as i64);
        if exponent.is_zero() {
            continue;
        }
        let factor = if exponent.is_integer() {
            let e = exponent
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Consistency("Euler exponent too large".into()))?;
            Series::one_minus_power_pow(j, e, order)?
        } else if coeffs.mode == MeasureMode::Counting {
            return Err(Error::Consistency(format!(
                "non-integer prime-cycle count {exponent} at length {j}"
            )));
        } else {
            let base = Series::one(order).sub(&Series::monomial(BigRational::one(), j, order));
            base.pow(&-exponent)?
        };
        product = product.mul(&factor);
    }
    Ok(product)
}

/// One row of [`BIdentityReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BIdentityRow {
    pub j: usize,
    /// `tau(B_j)` from the matrix recursion.
    pub trace_b: BigRational,
    /// `N_j - tau(Q - I)` for even `j`, `N_j` for odd `j`, with `N_j` from
    /// path enumeration.
    pub expected: BigRational,
}

impl BIdentityRow {
    pub fn holds(&self) -> bool {
        self.trace_b == self.expected
    }
}

#[derive(Clone, Debug)]
pub struct BIdentityReport {
    pub rows: Vec<BIdentityRow>,
}

impl BIdentityReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(BIdentityRow::holds)
    }
}

/// Verifies `tau(B_j)` against path counts for `1 <= j <= J`, where
/// `B_j = A_j - (Q - I) sum_{i=1}^{floor(j/2)} A_{j-2i}`.
pub fn b_identity_check(g: &Graph, order: usize, mode: MeasureMode) -> Result<BIdentityReport> {
    let n = g.vertex_count();
    let mats = proper_path_matrices(g, order)?;
    let coeffs = coefficients_by_paths(g, order, mode);
    let q_minus_i: Vec<i128> = (0..n).map(|v| g.degree(v) as i128 - 2).collect();
    let tau_q_minus_i = mode.tau(n, q_minus_i.iter().sum());
    let rows = (1..=order)
        .map(|j| {
            let mut trace = mats[j].trace();
            for i in 1..=j / 2 {
                let diag = mats[j - 2 * i].diagonal();
                trace -= (0..n).map(|x| q_minus_i[x] * diag[x]).sum::<i128>();
            }
            let mut expected = coeffs.n(j).clone();
            if j % 2 == 0 {
                expected -= tau_q_minus_i.clone();
            }
            BIdentityRow {
                j,
                trace_b: mode.tau(n, trace),
                expected,
            }
        })
        .collect();
    Ok(BIdentityReport { rows })
}

/// Spectral norms `||A_j||_2` next to the bound `R^j`.
pub fn proper_path_norms(g: &Graph, order: usize) -> Result<Vec<(usize, f64, f64)>> {
    let n = g.vertex_count();
    let r = growth_radius(g.max_degree());
    let mats = proper_path_matrices(g, order)?;
    Ok(mats
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let dense = DMatrix::from_row_slice(n, n, &m.to_f64_rows());
            let eig = SymmetricEigen::new(dense);
            let norm = eig
                .eigenvalues
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            (j, norm, r.powi(j as i32))
        })
        .collect())
}

/// Renders an exact rational as `p/q` (or `p` for integers).
pub fn rational_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Absolute difference of two rationals.
pub fn abs_diff(a: &BigRational, b: &BigRational) -> BigRational {
    (a - b).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;
    use crate::series::{int, ratio};

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&k| int(k)).collect()
    }

    #[test]
    fn triangle_coefficients() {
        let c3 = generators::cycle(3).unwrap();
        let by_paths = coefficients_by_paths(&c3, 6, MeasureMode::Counting);
        assert_eq!(by_paths.nbar, ints(&[0, 0, 6, 0, 0, 6]));
        let normalized = coefficients_by_paths(&c3, 6, MeasureMode::Normalized);
        assert_eq!(normalized.nbar, ints(&[0, 0, 2, 0, 0, 2]));
        let by_trace = coefficients_by_trace(&c3, 6, MeasureMode::Counting).unwrap();
        assert_eq!(by_trace.nbar, by_paths.nbar);
        assert!(by_paths.divisor_identity_holds());
    }

    #[test]
    fn tree_coefficients_vanish() {
        let p5 = generators::path(5).unwrap();
        for mode in [MeasureMode::Counting, MeasureMode::Normalized] {
            assert!(coefficients_by_paths(&p5, 8, mode)
                .nbar
                .iter()
                .all(Zero::is_zero));
            assert!(coefficients_by_trace(&p5, 8, mode)
                .unwrap()
                .nbar
                .iter()
                .all(Zero::is_zero));
            assert_eq!(euler_product_series(&p5, 8, mode).unwrap(), Series::one(8));
        }
    }

    #[test]
    fn proper_path_matrices_of_triangle() {
        let c3 = generators::cycle(3).unwrap();
        let mats = proper_path_matrices(&c3, 3).unwrap();
        assert_eq!(mats[0], IntMatrix::identity(3));
        assert_eq!(mats[2].trace(), 0);
        assert_eq!(mats[3].trace(), 6);
        assert!(tail_counts_by_recursion(&c3, 9, MeasureMode::Counting)
            .unwrap()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn tails_match_enumeration_on_pendant_triangle() {
        let g = generators::triangle_with_pendant();
        let t = tail_counts_by_recursion(&g, 9, MeasureMode::Counting).unwrap();
        let census = path_census(&g, 9);
        for j in 1..=9 {
            assert_eq!(t[j - 1], int(census.tailed.total(j) as i64), "j={j}");
        }
        assert_eq!(t[0], int(0));
        assert_eq!(t[1], int(0));
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(
            euler_characteristic(&generators::cycle(3).unwrap(), MeasureMode::Counting),
            int(0)
        );
        assert_eq!(
            euler_characteristic(&generators::path(3).unwrap(), MeasureMode::Counting),
            int(1)
        );
        assert_eq!(
            euler_characteristic(&generators::complete(4).unwrap(), MeasureMode::Counting),
            int(-2)
        );
        assert_eq!(
            euler_characteristic(&generators::complete(4).unwrap(), MeasureMode::Normalized),
            ratio(-1, 2)
        );
    }

    #[test]
    fn determinant_series_of_triangle() {
        let c3 = generators::cycle(3).unwrap();
        let z = det_formula_series(&c3, 9, MeasureMode::Counting).unwrap();
        assert_eq!(z, Series::one_minus_power_pow(3, 2, 9).unwrap());
        assert_eq!(z.coeff(0), int(1));
    }

    #[test]
    fn euler_product_of_triangle() {
        let c3 = generators::cycle(3).unwrap();
        let e = euler_product_series(&c3, 7, MeasureMode::Counting).unwrap();
        assert_eq!(e, Series::one_minus_power_pow(3, 2, 7).unwrap());
    }

    #[test]
    fn b_identities() {
        for g in [
            generators::cycle(3).unwrap(),
            generators::complete(4).unwrap(),
            generators::path(4).unwrap(),
        ] {
            for mode in [MeasureMode::Counting, MeasureMode::Normalized] {
                assert!(b_identity_check(&g, 8, mode).unwrap().all_pass());
            }
        }
    }

    #[test]
    fn norm_bound() {
        let k4 = generators::complete(4).unwrap();
        for (_, norm, bound) in proper_path_norms(&k4, 8).unwrap() {
            assert!(norm <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_string(&ratio(6, 4)), "3/2");
        assert_eq!(rational_string(&int(-7)), "-7");
        assert_eq!(parse_rational("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
    }
}
