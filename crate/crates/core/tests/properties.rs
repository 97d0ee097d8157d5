use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ihara::graph::{generators, greedy_edge_coloring, similarity_radius, Graph};
use ihara::limits::{
    ball_distribution, converge_run, distribution_distance, CsvRow, Family, Limit,
};
use ihara::paths::path_census;
use ihara::periodic::{lattice, periodic_coefficients};
use ihara::zeta::{
    coefficients_by_paths, coefficients_by_trace, det_formula_series, euler_characteristic,
    growth_radius, proper_path_norms, MeasureMode,
};

fn q(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (3usize..=9, 0usize..6, any::<u64>())
        .prop_map(|(n, extra, seed)| generators::random_connected(n, 4, extra, seed).unwrap())
}

fn mode() -> impl Strategy<Value = MeasureMode> {
    prop_oneof![Just(MeasureMode::Counting), Just(MeasureMode::Normalized)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_routes_agree(g in small_graph(), mode in mode(), order in 1usize..=10) {
        let paths = coefficients_by_paths(&g, order, mode);
        let trace = coefficients_by_trace(&g, order, mode).unwrap();
        prop_assert_eq!(&paths.nbar, &trace.nbar);
        prop_assert_eq!(det_formula_series(&g, order, mode).unwrap(), paths.zeta_series());
    }

    #[test]
    fn normalization_law(g in small_graph(), order in 1usize..=10) {
        let counting = coefficients_by_trace(&g, order, MeasureMode::Counting).unwrap().zeta_series();
        let normalized = coefficients_by_trace(&g, order, MeasureMode::Normalized).unwrap().zeta_series();
        prop_assert_eq!(normalized.powi(g.vertex_count() as i64).unwrap(), counting);
    }

    #[test]
    fn path_count_and_norm_bounds(g in small_graph()) {
        let order = 9;
        let d = g.max_degree() as u64;
        let census = path_census(&g, order);
        for x in 0..g.vertex_count() {
            for j in 1..=order {
                prop_assert!(census.reduced.at(x, j) <= d * (d - 1).pow(j as u32 - 1));
            }
        }
        let r = growth_radius(g.max_degree());
        for (j, norm, bound) in proper_path_norms(&g, order).unwrap() {
            prop_assert!((bound - r.powi(j as i32)).abs() <= 1e-9 * bound);
            prop_assert!(norm <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn euler_characteristic_is_v_minus_e(g in small_graph()) {
        let v = g.vertex_count() as i64;
        let e = g.edge_count() as i64;
        prop_assert_eq!(euler_characteristic(&g, MeasureMode::Counting), q(v - e));
        prop_assert_eq!(euler_characteristic(&g, MeasureMode::Normalized), q(v - e) / q(v));
    }

    #[test]
    fn divisor_identity(g in small_graph(), mode in mode()) {
        let order = 10;
        prop_assert!(coefficients_by_paths(&g, order, mode).divisor_identity_holds());
        let census = path_census(&g, order);
        for j in 1..=order {
            let sum: u64 = (1..=j).filter(|i| j % i == 0).map(|i| census.primitive.total(i)).sum();
            prop_assert_eq!(sum, census.reduced.total(j));
        }
    }

    #[test]
    fn ball_frequencies_sum_to_one(g in small_graph(), r in 0usize..4) {
        let d = ball_distribution(&g, r).unwrap();
        prop_assert_eq!(d.total(), BigRational::one());
        prop_assert!(d.entries.values().all(|p| *p > BigRational::zero()));
        prop_assert!(d.class_count() <= g.vertex_count());
    }

    #[test]
    fn coarsening_matches_direct_statistics(g in small_graph(), r in 1usize..4, drop in 1usize..4) {
        let smaller = r.saturating_sub(drop);
        let coarse = ball_distribution(&g, r).unwrap().coarsen(smaller).unwrap();
        let direct = ball_distribution(&g, smaller).unwrap();
        prop_assert_eq!(distribution_distance(&coarse, &direct).unwrap(), BigRational::zero());
        prop_assert_eq!(coarse.entries, direct.entries);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn csv_round_trip(start in 3usize..8, len in 1usize..6, order in 1usize..7, re in -0.2f64..0.2, im in -0.2f64..0.2) {
        let sizes: Vec<usize> = (start..start + len).collect();
        let report = converge_run(
            &Family::Torus { dim: 2, sizes },
            order,
            &Limit::Voltage(lattice(2).into()),
            &[Complex64::new(re, im)],
        ).unwrap();
        let parsed = CsvRow::parse_all(&report.to_csv().unwrap()).unwrap();
        prop_assert_eq!(parsed, report.csv_rows());
    }

    #[test]
    fn periodic_divisor_identity(d in 1usize..=3, order in 1usize..=6) {
        prop_assert!(periodic_coefficients(&lattice(d), order).unwrap().divisor_identity_holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn similarity_is_a_pseudo_ultrametric(g in small_graph()) {
        let colored = greedy_edge_coloring(&g);
        let n = g.vertex_count();
        let a = |x, y| similarity_radius(&colored, x, y, 4).unwrap().distance();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(a(x, y), a(y, x));
                for z in 0..n {
                    prop_assert!(a(x, y) <= a(x, z).max(a(z, y)));
                }
            }
        }
    }
}
