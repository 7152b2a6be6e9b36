//! Per-paper indices: citation counts, individual citations, PaperRank and
//! its generation expansion, AuthorRank of papers and CitationCoin.
//!
//! Two reference counts are in play. Individual citations weight each
//! citation by the citing paper's declared bibliography size, while rank
//! transitions are normalized by the references actually indexed in the
//! graph.

mod generations;

use rayon::prelude::*;

pub use generations::{generation_expansion, GenerationProfiles, DEFAULT_MAX_GENERATION};

use crate::citegraph::CitationGraph;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricKind, MetricParams, MetricVector, SolverOptions};

/// Smallest number of nodes handed to one rayon task.
pub(crate) const PAR_MIN_LEN: usize = 4096;

pub(crate) fn paper_vector(graph: &CitationGraph, kind: MetricKind, values: Vec<f64>) -> MetricVector {
    let ids = graph.paper_ids().iter().map(|p| p.0).collect();
    MetricVector::new(kind, Entity::Paper, ids, values).with_window(graph.filter().window)
}

/// Number of citations received.
pub fn n_cit(graph: &CitationGraph) -> MetricVector {
    let values = (0..graph.n_papers()).map(|v| graph.n_cit(v) as f64).collect();
    paper_vector(graph, MetricKind::Ncit, values)
}

pub(crate) fn check_declared(graph: &CitationGraph) -> Result<()> {
    match (0..graph.n_papers()).find(|&v| graph.declared_ref_count(v) == 0 && graph.indexed_ref_count(v) > 0) {
        Some(v) => Err(Error::DataInconsistency {
            paper_id: graph.paper_id(v).0,
            message: "cites papers but declares no references".into(),
        }),
        None => Ok(()),
    }
}

/// Sum over citers of a per-citer weight.
fn pull(graph: &CitationGraph, weight: &[f64]) -> Vec<f64> {
    (0..graph.n_papers())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|v| graph.citers(v).iter().map(|&c| weight[c as usize]).sum())
        .collect()
}

/// Individual citations: each citation counts `1 / declared references` of
/// the citing paper.
pub fn n_icit_papers(graph: &CitationGraph) -> Result<MetricVector> {
    check_declared(graph)?;
    let weight: Vec<f64> = (0..graph.n_papers())
        .map(|v| match graph.declared_ref_count(v) {
            0 => 0.0,
            k => 1.0 / k as f64,
        })
        .collect();
    Ok(paper_vector(graph, MetricKind::Nicit, pull(graph, &weight)))
}

/// Individual citations normalized by indexed instead of declared
/// references; the first-order term of PaperRank in the damping.
pub fn n_icit_indexed(graph: &CitationGraph) -> MetricVector {
    let weight = inverse_out_degree(graph);
    paper_vector(graph, MetricKind::Nicit, pull(graph, &weight))
}

pub(crate) fn inverse_out_degree(graph: &CitationGraph) -> Vec<f64> {
    (0..graph.n_papers())
        .map(|v| match graph.indexed_ref_count(v) {
            0 => 0.0,
            k => 1.0 / k as f64,
        })
        .collect()
}

/// PaperRank by Jacobi iteration of `R = 1 + damping * pull(R / refs)`,
/// rescaled so the total equals the number of citations in the graph.
///
/// Papers without indexed references are dead ends: their mass leaves the
/// system and the final rescale absorbs the loss. Each component is a sum
/// over its citers in a fixed order, so results do not depend on the
/// thread count.
pub fn paperrank(graph: &CitationGraph, opts: &SolverOptions) -> Result<MetricVector> {
    opts.validate()?;
    let n = graph.n_papers();
    let total = graph.n_edges() as f64;
    let mut params = MetricParams {
        damping: Some(opts.damping),
        normalization: Some(total),
        tolerance: Some(opts.tolerance),
        iterations: Some(0),
        residual: Some(0.0),
    };
    if graph.n_edges() == 0 {
        return Ok(paper_vector(graph, MetricKind::PaperRank, vec![0.0; n]).with_params(params));
    }

    let inv_out = inverse_out_degree(graph);
    let damping = opts.damping;
    let mut rank = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut flow = vec![0.0; n];
    let mut change = f64::INFINITY;
    for iter in 1..=opts.max_iters {
        flow.par_iter_mut()
            .with_min_len(PAR_MIN_LEN)
            .zip(rank.par_iter().zip(inv_out.par_iter()))
            .for_each(|(f, (r, w))| *f = r * w);
        next.par_iter_mut()
            .with_min_len(PAR_MIN_LEN)
            .enumerate()
            .for_each(|(v, out)| {
                let s: f64 = graph.citers(v).iter().map(|&c| flow[c as usize]).sum();
                *out = 1.0 + damping * s;
            });
        change = next
            .par_iter()
            .with_min_len(PAR_MIN_LEN)
            .zip(rank.par_iter())
            .map(|(a, b)| (a - b).abs() / a)
            .reduce(|| 0.0, f64::max);
        std::mem::swap(&mut rank, &mut next);
        if change < opts.tolerance {
            log::debug!("paperrank converged after {iter} iterations, change {change:.3e}");
            params.iterations = Some(iter);
            params.residual = Some(change);
            let scale = total / rank.iter().sum::<f64>();
            rank.iter_mut().for_each(|r| *r *= scale);
            return Ok(paper_vector(graph, MetricKind::PaperRank, rank).with_params(params));
        }
    }
    Err(Error::NotConverged {
        solver: "paperrank",
        iterations: opts.max_iters,
        residual: change,
    })
}

/// Citations weighted by the AuthorRank of the citing authors, shared over
/// the citing paper's authors and declared references. Citers without
/// resolvable authors contribute nothing; authors missing from
/// `author_rank` count as zero.
pub fn authorrank_of_papers(
    dataset: &Dataset,
    graph: &CitationGraph,
    author_rank: &MetricVector,
) -> Result<MetricVector> {
    check_declared(graph)?;
    let papers = dataset.papers();
    let mut weight = vec![0.0; graph.n_papers()];
    for (v, w) in weight.iter_mut().enumerate() {
        let declared = graph.declared_ref_count(v);
        if declared == 0 {
            continue;
        }
        let paper = papers
            .get(graph.dataset_index(v))
            .filter(|p| p.paper_id == graph.paper_id(v))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("graph paper {} not found in dataset", graph.paper_id(v)))
            })?;
        let n_aut = paper.author_count();
        if n_aut == 0 {
            continue;
        }
        let rank_sum: f64 = paper
            .resolved_authors()
            .map(|a| author_rank.get(a.0).unwrap_or(0.0))
            .sum();
        *w = rank_sum / (n_aut as f64 * declared as f64);
    }
    Ok(paper_vector(
        graph,
        MetricKind::AuthorRankOfPapers,
        pull(graph, &weight),
    ))
}

/// Individual citations received minus one, the average a paper gives out
/// when its whole bibliography is indexed.
pub fn ccoin_papers(graph: &CitationGraph) -> Result<MetricVector> {
    let icit = n_icit_papers(graph)?;
    let values = icit.values().iter().map(|x| x - 1.0).collect();
    Ok(paper_vector(graph, MetricKind::CitationCoin, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ingest, IngestOptions};

    fn chain() -> CitationGraph {
        // A=0 <- B=1 <- C=2
        CitationGraph::from_edges(3, &[(2, 1), (1, 0)], Some(vec![2000, 2001, 2002]), None).unwrap()
    }

    #[test]
    fn citation_counts() {
        assert_eq!(n_cit(&chain()).values(), &[1.0, 1.0, 0.0]);
        let star = CitationGraph::from_edges(5, &[(1, 0), (2, 0), (3, 0), (4, 0)], None, None).unwrap();
        assert_eq!(n_cit(&star).get(0), Some(4.0));
        let empty = CitationGraph::from_edges(3, &[], None, None).unwrap();
        assert_eq!(n_cit(&empty).sum(), 0.0);
    }

    #[test]
    fn individual_citations_use_declared_counts() {
        let g = CitationGraph::from_edges(2, &[(1, 0)], None, Some(vec![0, 4])).unwrap();
        assert_eq!(n_icit_papers(&g).unwrap().get(0), Some(0.25));

        let g = CitationGraph::from_edges(3, &[(1, 0), (2, 0)], None, Some(vec![0, 2, 5])).unwrap();
        assert!((n_icit_papers(&g).unwrap().get(0).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn zero_declared_citer_is_an_error() {
        let g = CitationGraph::from_edges(2, &[(1, 0)], None, Some(vec![0, 0])).unwrap();
        match n_icit_papers(&g) {
            Err(Error::DataInconsistency { paper_id, .. }) => assert_eq!(paper_id, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ccoin_papers(&g).is_err());
    }

    #[test]
    fn chain_paperrank_at_half_damping() {
        let r = paperrank(&chain(), &SolverOptions::paperrank().with_damping(0.5)).unwrap();
        let scale = 2.0 / 4.25;
        let expected = [1.75 * scale, 1.5 * scale, 1.0 * scale];
        for (got, want) in r.values().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!((r.values()[0] - 0.8235).abs() < 1e-4);
        assert_eq!(r.params.normalization, Some(2.0));
    }

    #[test]
    fn no_citations_gives_zero_rank() {
        let g = CitationGraph::from_edges(1, &[], None, None).unwrap();
        let r = paperrank(&g, &SolverOptions::paperrank()).unwrap();
        assert_eq!(r.values(), &[0.0]);
    }

    #[test]
    fn non_convergence_is_reported() {
        let g = CitationGraph::from_edges(2, &[(0, 1), (1, 0)], None, None).unwrap();
        let opts = SolverOptions {
            max_iters: 3,
            ..SolverOptions::paperrank()
        };
        assert!(matches!(
            paperrank(&g, &opts),
            Err(Error::NotConverged { iterations: 3, .. })
        ));
        assert!(paperrank(&g, &SolverOptions::paperrank().with_damping(1.5)).is_err());
    }

    #[test]
    fn ccoin_is_icit_minus_one() {
        let g = CitationGraph::from_edges(2, &[(1, 0)], None, Some(vec![0, 4])).unwrap();
        assert_eq!(ccoin_papers(&g).unwrap().values(), &[-0.75, -1.0]);
    }

    #[test]
    fn authorrank_of_papers_by_hand() {
        let text = [
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":10,"date":"1990"}"#,
            r#"{"kind":"paper","id":11,"date":"1991","authors":[{"id":1},{"id":2}],"references":[10],"declared_ref_count":4}"#,
        ]
        .join("\n");
        let d = ingest(text.as_bytes(), IngestOptions::default()).unwrap().0;
        let (g, _) = crate::citegraph::build_graph(&d, &Default::default());
        let ranks = MetricVector::new(MetricKind::AuthorRank, Entity::Author, vec![1, 2], vec![3.0, 1.0]);
        let arp = authorrank_of_papers(&d, &g, &ranks).unwrap();
        assert_eq!(arp.values(), &[0.5, 0.0]);

        let uniform = MetricVector::new(MetricKind::AuthorRank, Entity::Author, vec![1, 2], vec![1.0, 1.0]);
        let arp = authorrank_of_papers(&d, &g, &uniform).unwrap();
        assert_eq!(arp.values(), n_icit_papers(&g).unwrap().values());
    }
}
