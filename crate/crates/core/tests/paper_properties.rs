mod common;

use citerank_core::paper_metrics::{n_icit_indexed, n_icit_papers, paperrank};
use citerank_core::{CitationGraph, SolverOptions};
use proptest::prelude::*;

/// Random edge lists over `2..max_n` nodes, loops removed.
fn graphs(max_n: usize) -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (2..max_n).prop_flat_map(|n| {
        let edge = (0..n as u32, 0..n as u32).prop_filter("no loops", |(a, b)| a != b);
        (Just(n), prop::collection::vec(edge, 0..4 * n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paperrank_totals_the_citation_count((n, edges) in graphs(60)) {
        let g = CitationGraph::from_edges(n, &edges, None, None).unwrap();
        let r = paperrank(&g, &SolverOptions::paperrank()).unwrap();
        let want = g.n_edges() as f64;
        prop_assert!((r.sum() - want).abs() <= 1e-9 * want.max(1.0));
        prop_assert!(r.values().iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn paperrank_matches_dense_solve((n, edges) in graphs(60), damping in 0.05f64..0.99) {
        let g = CitationGraph::from_edges(n, &edges, None, None).unwrap();
        prop_assume!(g.n_edges() > 0);
        let r = paperrank(&g, &SolverOptions::paperrank().with_damping(damping)).unwrap();
        let err = common::max_rel_err(r.values(), &common::dense_paperrank(&g, damping));
        prop_assert!(err <= 1e-8, "relative error {err:e}");
    }

    #[test]
    fn added_citation_never_lowers_the_cited_rank(
        (n, edges) in graphs(40),
        pick in any::<(prop::sample::Index, prop::sample::Index)>(),
    ) {
        let from = pick.0.index(n) as u32;
        let to = pick.1.index(n) as u32;
        prop_assume!(from != to && !edges.contains(&(from, to)));
        let opts = SolverOptions::paperrank().with_tolerance(1e-13);
        let before = paperrank(&CitationGraph::from_edges(n, &edges, None, None).unwrap(), &opts).unwrap();
        let mut more = edges.clone();
        more.push((from, to));
        let after = paperrank(&CitationGraph::from_edges(n, &more, None, None).unwrap(), &opts).unwrap();
        let (b, a) = (before.values()[to as usize], after.values()[to as usize]);
        prop_assert!(a >= b * (1.0 - 1e-9), "rank of {to} fell from {b} to {a}");
    }

    #[test]
    fn forward_and_reverse_adjacency_agree((n, edges) in graphs(60)) {
        let g = CitationGraph::from_edges(n, &edges, None, None).unwrap();
        for p in 0..n {
            for &q in g.references(p) {
                prop_assert!(g.citers(q as usize).contains(&(p as u32)));
            }
            for &q in g.citers(p) {
                prop_assert!(g.references(q as usize).contains(&(p as u32)));
            }
        }
    }

    #[test]
    fn individual_citations_total_the_citing_papers((n, edges) in graphs(60)) {
        let g = CitationGraph::from_edges(n, &edges, None, None).unwrap();
        let citing = (0..n).filter(|&v| g.indexed_ref_count(v) > 0).count() as f64;
        prop_assert!((n_icit_papers(&g).unwrap().sum() - citing).abs() <= 1e-9);
        prop_assert!((n_icit_indexed(&g).sum() - citing).abs() <= 1e-9);
    }
}
