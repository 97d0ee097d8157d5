//! A reduced-size run of the identity suite, for `ihara selftest`.

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::graph::{generators, greedy_edge_coloring, invariance_discrepancy, Graph};
use crate::limits::{converge_run, Family, Limit};
use crate::paths::path_census;
use crate::periodic::{free_cayley, lattice};
use crate::sofic::{sofic_outcome, ProviderSpec};
use crate::zeta::{
    b_identity_check, coefficients_by_trace, coefficients_from_census, det_formula_eval,
    det_formula_series, euler_characteristic, euler_product_from, growth_radius, proper_path_norms,
    regular_spectral_eval, tail_counts_by_recursion, MeasureMode,
};

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// The `i`-th graph of the seeded random suite: connected, at most 10
/// vertices, degree at most 4.
pub fn suite_graph(i: u64) -> Graph {
    let n = 3 + (i as usize * 7 + 3) % 8;
    let extra = (i as usize * 5) % (n + 1);
    generators::random_connected(n, 4, extra, 1000 + i).expect("suite parameters are valid")
}

type Check = std::result::Result<String, String>;

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const MODES: [MeasureMode; 2] = [MeasureMode::Counting, MeasureMode::Normalized];

/// Path counting, the trace route with its tail recursion, the `B_j`
/// identities and the determinant series all have to agree.
fn determinant_formula(graphs: &[Graph], order: usize) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let census = path_census(g, order);
        for mode in MODES {
            let paths = coefficients_from_census(g, &census, mode);
            let trace = coefficients_by_trace(g, order, mode).map_err(fail)?;
            if trace.nbar != paths.nbar {
                return Err(format!(
                    "graph {i}: trace route differs from path counts ({mode:?})"
                ));
            }
            if !b_identity_check(g, order, mode).map_err(fail)?.all_pass() {
                return Err(format!("graph {i}: B_j identity fails ({mode:?})"));
            }
            let det = det_formula_series(g, order, mode).map_err(fail)?;
            if det != paths.zeta_series() {
                return Err(format!("graph {i}: determinant series differs ({mode:?})"));
            }
        }
        let tails = tail_counts_by_recursion(g, order, MeasureMode::Counting).map_err(fail)?;
        for j in 1..=order {
            if tails[j - 1] != crate::series::int(census.tailed.total(j) as i64) {
                return Err(format!("graph {i}: t_{j} differs from enumeration"));
            }
        }
    }
    Ok(format!("{} graphs, order {order}", graphs.len()))
}

fn euler_product(graphs: &[Graph], order: usize) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let census = path_census(g, order);
        let coeffs = coefficients_from_census(g, &census, MeasureMode::Counting);
        if euler_product_from(&coeffs).map_err(fail)? != coeffs.zeta_series() {
            return Err(format!("graph {i}: Euler product differs"));
        }
        for j in 1..=order {
            if j as u64 * census.prime_cycles.count(j) != census.primitive.total(j) {
                return Err(format!("graph {i}: prime cycle count at length {j}"));
            }
        }
    }
    Ok(format!("{} graphs, order {order}", graphs.len()))
}

fn normalization_law(graphs: &[Graph], order: usize) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let counting = coefficients_by_trace(g, order, MeasureMode::Counting)
            .map_err(fail)?
            .zeta_series();
        let normalized = coefficients_by_trace(g, order, MeasureMode::Normalized)
            .map_err(fail)?
            .zeta_series();
        if normalized.powi(g.vertex_count() as i64).map_err(fail)? != counting {
            return Err(format!("graph {i}: Z_norm^|V| differs from Z"));
        }
    }
    Ok(format!("{} graphs", graphs.len()))
}

fn spectral_formula(count: u64, n: usize, points: usize) -> Check {
    let mut worst: f64 = 0.0;
    for s in 0..count {
        let g = generators::random_regular(n, 3, 77 + s).map_err(fail)?;
        let limit = 1.0 / growth_radius(3);
        for k in 0..points {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / points as f64;
            let u = Complex64::from_polar(0.9 * limit * (k + 1) as f64 / points as f64, angle);
            let det = det_formula_eval(&g, u, MeasureMode::Counting).map_err(fail)?;
            let spec = regular_spectral_eval(&g, u, MeasureMode::Counting).map_err(fail)?;
            worst = worst.max((det - spec).norm() / det.norm());
        }
    }
    if worst <= 1e-9 {
        Ok(format!("max relative difference {worst:.2e}"))
    } else {
        Err(format!("relative difference {worst:.2e} exceeds 1e-9"))
    }
}

fn convergence(max_torus: usize, order: usize) -> Check {
    let sizes: Vec<usize> = (4..=max_torus).collect();
    let report = converge_run(
        &Family::Torus { dim: 2, sizes },
        order,
        &Limit::Voltage(lattice(2).into()),
        &[Complex64::new(0.1, 0.05)],
    )
    .map_err(fail)?;
    for row in &report.rows {
        for j in 1..=order {
            if row.n >= j + 2 && !row.coeff_dev[j - 1].is_zero() {
                return Err(format!("torus {}: N_{j} deviates", row.n));
            }
        }
    }
    let cycles: Vec<usize> = (16..=32).collect();
    let report = converge_run(
        &Family::Cycle(cycles),
        order,
        &Limit::Voltage(lattice(1).into()),
        &[Complex64::new(0.5, 0.0)],
    )
    .map_err(fail)?;
    let devs: Vec<f64> = report.rows.iter().map(|r| r.z_dev[0]).collect();
    if devs.iter().any(|&d| d > 1e-3) || devs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(format!(
            "cycle deviations not small and decreasing: {devs:?}"
        ));
    }
    Ok(format!("torus 4..{max_torus}, cycles 16..32"))
}

fn sofic_construction(n: usize, big_n: usize) -> Check {
    let grid =
        sofic_outcome(&lattice(2).into(), 2, &ProviderSpec::Quotient { n }, 0.05).map_err(fail)?;
    if !grid.delta.max_deviation.is_zero() {
        return Err("quotient construction deviates from the grid".into());
    }
    let tree = sofic_outcome(
        &free_cayley(2).into(),
        1,
        &ProviderSpec::Random { n: big_n, seed: 42 },
        0.1,
    )
    .map_err(fail)?;
    let dev = tree.delta.max_deviation.to_f64().unwrap_or(1.0);
    if tree.good_index_fraction < 0.9 || dev >= 0.1 {
        return Err(format!(
            "random construction: good {} deviation {dev}",
            tree.good_index_fraction
        ));
    }
    Ok(format!(
        "good-index fraction {:.4}, deviation {dev:.4}",
        tree.good_index_fraction
    ))
}

fn invariance(count: u64) -> Check {
    for s in 0..count {
        let g = suite_graph(500 + s);
        let colored = greedy_edge_coloring(&g);
        let d = invariance_discrepancy(&colored, 2);
        if d != 0 {
            return Err(format!("graph {s}: discrepancy {d}"));
        }
    }
    Ok(format!("{count} colored graphs"))
}

fn bounds(graphs: &[Graph], order: usize) -> Check {
    for (i, g) in graphs.iter().enumerate() {
        let d = g.max_degree() as u64;
        let census = path_census(g, order);
        for x in 0..g.vertex_count() {
            for j in 1..=order {
                let bound = d * d.saturating_sub(1).pow(j as u32 - 1);
                if census.reduced.at(x, j) > bound {
                    return Err(format!("graph {i}: N_{j}({x}) above D(D-1)^(j-1)"));
                }
            }
        }
        for (j, norm, bound) in proper_path_norms(g, order).map_err(fail)? {
            if norm > bound * (1.0 + 1e-12) {
                return Err(format!("graph {i}: ||A_{j}|| above R^{j}"));
            }
        }
        let chi = euler_characteristic(g, MeasureMode::Counting);
        if chi != crate::series::int(g.vertex_count() as i64 - g.edge_count() as i64) {
            return Err(format!("graph {i}: chi differs from |V| - |E|"));
        }
    }
    Ok(format!("{} graphs", graphs.len()))
}

/// Runs every check at reduced size, in a fixed order.
pub fn run_selftest() -> Vec<CheckResult> {
    let graphs: Vec<Graph> = (0..12).map(suite_graph).collect();
    let order = 10;
    type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);
    let checks: Vec<Named> = vec![
        (
            "determinant-formula",
            Box::new(|| determinant_formula(&graphs, order)),
        ),
        ("euler-product", Box::new(|| euler_product(&graphs, order))),
        (
            "normalization-law",
            Box::new(|| normalization_law(&graphs, order)),
        ),
        ("spectral-formula", Box::new(|| spectral_formula(5, 20, 8))),
        ("convergence", Box::new(|| convergence(10, 6))),
        (
            "sofic-construction",
            Box::new(|| sofic_construction(8, 600)),
        ),
        ("invariance", Box::new(|| invariance(10))),
        ("bounds", Box::new(|| bounds(&graphs, order))),
    ];
    checks
        .into_iter()
        .map(|(name, check)| match check() {
            Ok(detail) => CheckResult {
                name,
                passed: true,
                detail,
            },
            Err(detail) => CheckResult {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}
