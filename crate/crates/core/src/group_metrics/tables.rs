use std::collections::BTreeMap;

use serde::Serialize;

use super::UNPUBLISHED_JOURNAL;
use crate::citegraph::{CitationGraph, DateWindow};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricVector};
use crate::paper_metrics::n_icit_papers;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffiliateRow {
    pub institution_id: u64,
    pub name: String,
    /// Active authors counted by their fractional affiliation.
    pub affiliates: f64,
    /// Affiliation-weighted metric sums, as percentages of the world total.
    pub metric_pct: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffiliateTable {
    pub window: DateWindow,
    pub metric_names: Vec<String>,
    pub active_authors: usize,
    /// Active authors with no affiliation on any paper in the window.
    pub unaffiliated_authors: usize,
    /// Rows ordered by institution id; institutions without active
    /// affiliates are left out.
    pub rows: Vec<AffiliateRow>,
}

/// Institutions ranked by their currently active authors.
///
/// An author is active when they wrote a paper inside `active`. Their
/// affiliation fractions (`1 / affiliations` per listed institution) are
/// averaged over those papers, skipping papers where they list none, and
/// each author metric is distributed with the same fractions.
pub fn affiliate_rank_table(
    dataset: &Dataset,
    author_metrics: &[(&str, &MetricVector)],
    active: DateWindow,
) -> Result<AffiliateTable> {
    if author_metrics.iter().any(|(_, m)| m.entity != Entity::Author) {
        return Err(Error::InvalidParameter("affiliate table needs author metrics".into()));
    }
    let n_inst = dataset.institutions().len();
    // author index -> (papers in window, papers with affiliations, fractions)
    let mut per_author: BTreeMap<usize, (usize, usize, BTreeMap<usize, f64>)> = BTreeMap::new();
    for paper in dataset.papers().iter().filter(|p| active.contains(p.date.year)) {
        for link in &paper.authors {
            let Some(a) = link.author_id.and_then(|id| dataset.author_index(id)) else {
                continue;
            };
            let entry = per_author.entry(a).or_default();
            entry.0 += 1;
            let insts: Vec<usize> = link
                .affiliation_ids
                .iter()
                .filter_map(|i| dataset.institution_index(*i))
                .collect();
            if insts.is_empty() {
                continue;
            }
            entry.1 += 1;
            for i in &insts {
                *entry.2.entry(*i).or_default() += 1.0 / insts.len() as f64;
            }
        }
    }

    let k = author_metrics.len();
    let mut affiliates = vec![0.0; n_inst];
    let mut sums = vec![vec![0.0; k]; n_inst];
    let mut unaffiliated = 0;
    for (&a, (_, with_aff, fractions)) in &per_author {
        if *with_aff == 0 {
            unaffiliated += 1;
            continue;
        }
        let author_id = dataset.authors()[a].author_id.0;
        let values: Vec<f64> = author_metrics
            .iter()
            .map(|(_, m)| m.get(author_id).unwrap_or(0.0))
            .collect();
        for (&i, &f) in fractions {
            let frac = f / *with_aff as f64;
            affiliates[i] += frac;
            for (s, v) in sums[i].iter_mut().zip(&values) {
                *s += frac * v;
            }
        }
    }

    let world: Vec<f64> = (0..k).map(|m| sums.iter().map(|row| row[m]).sum()).collect();
    let rows = (0..n_inst)
        .filter(|&i| affiliates[i] > 0.0)
        .map(|i| {
            let inst = &dataset.institutions()[i];
            AffiliateRow {
                institution_id: inst.institution_id.0,
                name: inst.name.clone(),
                affiliates: affiliates[i],
                metric_pct: sums[i]
                    .iter()
                    .zip(&world)
                    .map(|(s, w)| if *w != 0.0 { 100.0 * s / w } else { 0.0 })
                    .collect(),
            }
        })
        .collect();
    Ok(AffiliateTable {
        window: active,
        metric_names: author_metrics.iter().map(|(n, _)| n.to_string()).collect(),
        active_authors: per_author.len(),
        unaffiliated_authors: unaffiliated,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalRow {
    /// [`UNPUBLISHED_JOURNAL`] for papers without a journal.
    pub journal_id: u64,
    pub name: String,
    pub papers: usize,
    pub individual_citations: f64,
    pub icit_per_paper: f64,
    /// Individual citations received minus papers published.
    pub citation_coin: f64,
}

/// Per-journal totals over the papers of `graph`, ordered by journal id
/// with the unpublished bucket last.
pub fn journal_table(dataset: &Dataset, graph: &CitationGraph) -> Result<Vec<JournalRow>> {
    let icit = n_icit_papers(graph)?;
    let mut totals: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
    for v in 0..graph.n_papers() {
        let paper = &dataset.papers()[graph.dataset_index(v)];
        let key = paper.journal_id.map_or(UNPUBLISHED_JOURNAL, |j| j.0);
        let t = totals.entry(key).or_default();
        t.0 += 1;
        t.1 += icit.values()[v];
    }
    Ok(totals
        .into_iter()
        .map(|(id, (papers, icit))| JournalRow {
            journal_id: id,
            name: if id == UNPUBLISHED_JOURNAL {
                "unpublished".into()
            } else {
                dataset
                    .journal_name(crate::dataset::JournalId(id))
                    .unwrap_or_default()
                    .to_string()
            },
            papers,
            individual_citations: icit,
            icit_per_paper: icit / papers as f64,
            citation_coin: icit - papers as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citegraph::build_graph;
    use crate::group_metrics::tests::dataset;
    use crate::metric::MetricKind;

    #[test]
    fn averaged_affiliations() {
        let d = dataset(&[
            r#"{"kind":"institution","id":1,"name":"I1"}"#,
            r#"{"kind":"institution","id":2,"name":"I2"}"#,
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"2017","authors":[{"id":1,"affiliations":[1]}]}"#,
            r#"{"kind":"paper","id":2,"date":"2017","authors":[{"id":1,"affiliations":[1,2]},{"id":2}]}"#,
            r#"{"kind":"paper","id":3,"date":"2010","authors":[{"id":2,"affiliations":[2]}]}"#,
        ]);
        let m = MetricVector::new(MetricKind::Nicit, Entity::Author, vec![1, 2], vec![4.0, 1.0]);
        let t = affiliate_rank_table(&d, &[("nicit", &m)], DateWindow::since(2017)).unwrap();
        assert_eq!(t.active_authors, 2);
        assert_eq!(t.unaffiliated_authors, 1);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].affiliates, 0.75);
        assert_eq!(t.rows[1].affiliates, 0.25);
        assert_eq!(t.rows[0].metric_pct, vec![75.0]);
    }

    #[test]
    fn journal_rows() {
        let d = dataset(&[
            r#"{"kind":"journal","id":1,"name":"J"}"#,
            r#"{"kind":"paper","id":1,"date":"2000","journal":1}"#,
            r#"{"kind":"paper","id":2,"date":"2000","journal":1}"#,
            r#"{"kind":"paper","id":3,"date":"2001","references":[1,2]}"#,
            r#"{"kind":"paper","id":4,"date":"2001","references":[1]}"#,
            r#"{"kind":"paper","id":5,"date":"2001","references":[1]}"#,
            r#"{"kind":"paper","id":6,"date":"2001","references":[2]}"#,
            r#"{"kind":"paper","id":7,"date":"2001","references":[2]}"#,
        ]);
        let (g, _) = build_graph(&d, &Default::default());
        let rows = journal_table(&d, &g).unwrap();
        assert_eq!(rows[0].individual_citations, 5.0);
        assert_eq!(rows[0].icit_per_paper, 2.5);
        assert_eq!(rows[0].citation_coin, 3.0);
        assert_eq!(rows[1].journal_id, UNPUBLISHED_JOURNAL);
        assert_eq!(rows[1].citation_coin, -5.0);
        assert_eq!(rows.iter().map(|r| r.papers).sum::<usize>(), 7);
    }
}
