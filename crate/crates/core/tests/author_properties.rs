mod common;

use citerank_core::author_metrics::{
    authorrank, citation_coin, AuthorFlowMatrix, Authorship, FlowOptions, StochasticAuthorMatrix,
};
use citerank_core::citegraph::build_graph;
use citerank_core::paper_metrics::n_icit_papers;
use citerank_core::{EdgeFilter, MetricKind, SolverOptions};
use proptest::prelude::*;

fn matrices() -> impl Strategy<Value = (usize, Vec<(u32, u32, f64)>)> {
    (1usize..40).prop_flat_map(|n| {
        let entry = (0..n as u32, 0..n as u32, 0.0f64..5.0);
        (Just(n), prop::collection::vec(entry, 0..6 * n))
    })
}

fn triplets_of(flow: &AuthorFlowMatrix) -> Vec<(u32, u32, f64)> {
    let mut out = Vec::new();
    for a in 0..flow.n_authors() {
        let (cols, weights) = flow.row(a);
        out.extend(cols.iter().zip(weights).map(|(&b, &w)| (a as u32, b, w)));
    }
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stochastic_rows_sum_to_one((n, entries) in matrices()) {
        let flow = AuthorFlowMatrix::from_triplets(n, &entries).unwrap();
        let s = StochasticAuthorMatrix::new(&flow);
        for a in 0..n {
            let total: f64 = s.row(a).map(|(_, w)| w).sum();
            if s.is_dangling(a) {
                prop_assert_eq!(total, 0.0);
            } else {
                prop_assert!((total - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn coin_ignores_cycles(
        (n, entries) in matrices(),
        cycle in prop::collection::vec(any::<prop::sample::Index>(), 1..=5),
        delta in 1e-6f64..10.0,
    ) {
        let mut members: Vec<u32> = cycle.iter().map(|i| i.index(n) as u32).collect();
        members.dedup();
        let before = AuthorFlowMatrix::from_triplets(n, &entries).unwrap().net_flow();
        let mut injected = entries.clone();
        for k in 0..members.len() {
            injected.push((members[k], members[(k + 1) % members.len()], delta));
        }
        let after = AuthorFlowMatrix::from_triplets(n, &injected).unwrap().net_flow();
        prop_assert!(max_abs_diff(&before, &after) <= 1e-12);
    }

    #[test]
    fn coin_ignores_self_citations((n, entries) in matrices(), extra in prop::collection::vec(0.0f64..5.0, 40)) {
        let before = AuthorFlowMatrix::from_triplets(n, &entries).unwrap().net_flow();
        let mut changed: Vec<_> = entries.iter().copied().filter(|(a, b, _)| a != b).collect();
        changed.extend((0..n as u32).map(|a| (a, a, extra[a as usize])));
        let after = AuthorFlowMatrix::from_triplets(n, &changed).unwrap().net_flow();
        prop_assert!(max_abs_diff(&before, &after) <= 1e-12);
    }

    #[test]
    fn authorrank_matches_dense_solve((n, entries) in matrices()) {
        let flow = AuthorFlowMatrix::from_triplets(n, &entries).unwrap();
        let got = authorrank(&flow, &SolverOptions::authorrank()).unwrap();
        let err = common::max_rel_err(got.values(), &common::dense_authorrank(&flow, 0.9));
        prop_assert!(err <= 1e-8, "relative error {err:e}");
        prop_assert!((got.sum() - n as f64).abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn authorrank_order_survives_scaling((n, entries) in matrices(), scale in 1e-3f64..1e3) {
        let flow = AuthorFlowMatrix::from_triplets(n, &entries).unwrap();
        let scaled: Vec<_> = triplets_of(&flow).into_iter().map(|(a, b, w)| (a, b, w * scale)).collect();
        let scaled = AuthorFlowMatrix::from_triplets(n, &scaled).unwrap();
        let opts = SolverOptions::authorrank();
        let x = authorrank(&flow, &opts).unwrap();
        let y = authorrank(&scaled, &opts).unwrap();
        for i in 0..n {
            for j in 0..n {
                if x.values()[i] > x.values()[j] * (1.0 + 1e-9) {
                    prop_assert!(y.values()[i] > y.values()[j]);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn synthetic_datasets_conserve_credit(seed in 0u64..1_000, drop_self in any::<bool>()) {
        let d = common::synthetic(seed, 400);
        let filter = EdgeFilter { drop_self_citations: drop_self, ..Default::default() };
        let (g, _) = build_graph(&d, &filter);
        let authorship = Authorship::new(&d, &g).unwrap();
        let icit = n_icit_papers(&g).unwrap();

        let shared = authorship.share(MetricKind::Nicit, icit.values()).sum();
        let covered: f64 = (0..g.n_papers()).filter(|&v| authorship.n_aut(v) > 0).map(|v| icit.values()[v]).sum();
        prop_assert!((shared - covered).abs() <= 1e-9 * covered.max(1.0));

        let counted = citation_coin(&d, &g).unwrap();
        let flow = AuthorFlowMatrix::build(&d, &g, FlowOptions::default()).unwrap();
        let from_matrix = flow.citation_coin();
        prop_assert_eq!(counted.ids(), from_matrix.ids());
        prop_assert!(max_abs_diff(counted.values(), from_matrix.values()) <= 1e-12);
        prop_assert!(counted.sum().abs() <= 1e-9);
    }
}
