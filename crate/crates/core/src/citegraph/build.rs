use super::{CitationGraph, Csr, EdgeFilter, FilterReport};
use crate::dataset::{AuthorId, Dataset, PaperRecord};

const NOT_A_NODE: u32 = u32::MAX;

/// Build the citation graph of `dataset` under `filter`.
///
/// A reference is kept iff both endpoints lie in the window, the citing
/// paper is published (when `published_only`), the citing paper is not
/// older than the cited one at year granularity, and the two papers share
/// no author (when `drop_self_citations`). Same-year citations are causal.
pub fn build_graph(dataset: &Dataset, filter: &EdgeFilter) -> (CitationGraph, FilterReport) {
    let papers = dataset.papers();
    let in_window = |p: &PaperRecord| filter.window.is_none_or(|w| w.contains(p.date.year));

    let mut node_of = vec![NOT_A_NODE; papers.len()];
    let mut paper_ids = Vec::new();
    let mut dataset_index = Vec::new();
    for (i, p) in papers.iter().enumerate() {
        if in_window(p) {
            node_of[i] = paper_ids.len() as u32;
            paper_ids.push(p.paper_id);
            dataset_index.push(i as u32);
        }
    }
    let n = paper_ids.len();

    let sorted_authors = |p: &PaperRecord| -> Vec<AuthorId> {
        let mut a: Vec<AuthorId> = p.resolved_authors().collect();
        a.sort_unstable();
        a
    };

    let mut report = FilterReport::default();
    let upper: usize = dataset_index.iter().map(|&i| papers[i as usize].references.len()).sum();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets: Vec<u32> = Vec::with_capacity(upper);
    offsets.push(0);

    for (i, citing) in papers.iter().enumerate() {
        report.raw_edges += citing.references.len() as u64;
        if node_of[i] == NOT_A_NODE {
            report.window_excluded += citing.references.len() as u64;
            continue;
        }
        let citing_authors = if filter.drop_self_citations {
            sorted_authors(citing)
        } else {
            Vec::new()
        };
        for r in &citing.references {
            // Ingestion guarantees references resolve.
            let j = dataset.paper_index(*r).expect("unresolved reference in dataset");
            let cited = &papers[j];
            if node_of[j] == NOT_A_NODE {
                report.window_excluded += 1;
            } else if filter.published_only && !citing.published {
                report.unpublished_citers += 1;
            } else if citing.date.year < cited.date.year {
                report.acausal += 1;
            } else if filter.drop_self_citations && shares_author(&citing_authors, cited) {
                report.self_citations += 1;
            } else {
                targets.push(node_of[j]);
            }
        }
        offsets.push(targets.len());
    }
    report.kept_edges = targets.len() as u64;

    let dates = dataset_index.iter().map(|&i| papers[i as usize].date).collect();
    let declared = dataset_index
        .iter()
        .map(|&i| papers[i as usize].declared_ref_count)
        .collect();
    let graph = CitationGraph::assemble(
        paper_ids,
        dataset_index,
        dates,
        declared,
        Csr::from_raw(offsets, targets),
        *filter,
    );
    (graph, report)
}

fn shares_author(sorted: &[AuthorId], other: &PaperRecord) -> bool {
    other.resolved_authors().any(|a| sorted.binary_search(&a).is_ok())
}
