//! Per-author indices. Every paper's credit is shared equally among its
//! resolved authors; papers without any contribute to no author.

mod flow;
mod report;

use serde::Serialize;

pub use flow::{authorrank, AuthorFlowMatrix, FlowOptions, StochasticAuthorMatrix};
pub use report::{author_report, AuthorReport, CoAuthorFlow, YearActivity};

use crate::citegraph::CitationGraph;
use crate::dataset::{AuthorId, Dataset};
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricKind, MetricVector};
use crate::paper_metrics::{check_declared, n_icit_papers};

/// Papers of each author and authors of each paper, over the nodes of one
/// graph. Authors are indexed by their position in
/// [`Dataset::authors`](crate::dataset::Dataset::authors).
#[derive(Debug, Clone)]
pub struct Authorship {
    author_ids: Vec<u64>,
    paper_offsets: Vec<usize>,
    paper_authors: Vec<u32>,
    author_offsets: Vec<usize>,
    author_papers: Vec<u32>,
}

impl Authorship {
    pub fn new(dataset: &Dataset, graph: &CitationGraph) -> Result<Self> {
        let papers = dataset.papers();
        let n_authors = dataset.authors().len();
        let mut paper_offsets = Vec::with_capacity(graph.n_papers() + 1);
        let mut paper_authors = Vec::new();
        paper_offsets.push(0);
        for v in 0..graph.n_papers() {
            let paper = papers
                .get(graph.dataset_index(v))
                .filter(|p| p.paper_id == graph.paper_id(v))
                .ok_or_else(|| Error::InvalidParameter(format!("graph paper {} not in dataset", graph.paper_id(v))))?;
            for a in paper.resolved_authors() {
                let idx = dataset
                    .author_index(a)
                    .ok_or_else(|| Error::InvalidParameter(format!("author {a} not in dataset")))?;
                paper_authors.push(idx as u32);
            }
            paper_offsets.push(paper_authors.len());
        }

        let mut author_offsets = vec![0usize; n_authors + 1];
        for &a in &paper_authors {
            author_offsets[a as usize + 1] += 1;
        }
        for i in 0..n_authors {
            author_offsets[i + 1] += author_offsets[i];
        }
        let mut cursor = author_offsets.clone();
        let mut author_papers = vec![0u32; paper_authors.len()];
        for v in 0..graph.n_papers() {
            for &a in &paper_authors[paper_offsets[v]..paper_offsets[v + 1]] {
                author_papers[cursor[a as usize]] = v as u32;
                cursor[a as usize] += 1;
            }
        }
        Ok(Authorship {
            author_ids: dataset.authors().iter().map(|a| a.author_id.0).collect(),
            paper_offsets,
            paper_authors,
            author_offsets,
            author_papers,
        })
    }

    pub fn n_authors(&self) -> usize {
        self.author_ids.len()
    }

    pub fn n_papers(&self) -> usize {
        self.paper_offsets.len() - 1
    }

    pub fn author_ids(&self) -> &[u64] {
        &self.author_ids
    }

    pub fn author_index(&self, id: AuthorId) -> Option<usize> {
        self.author_ids.binary_search(&id.0).ok()
    }

    /// Author indices of graph node `v`.
    #[inline]
    pub fn authors_of(&self, v: usize) -> &[u32] {
        &self.paper_authors[self.paper_offsets[v]..self.paper_offsets[v + 1]]
    }

    #[inline]
    pub fn n_aut(&self, v: usize) -> usize {
        self.paper_offsets[v + 1] - self.paper_offsets[v]
    }

    /// Graph nodes written by author index `a`, ascending.
    #[inline]
    pub fn papers_of(&self, a: usize) -> &[u32] {
        &self.author_papers[self.author_offsets[a]..self.author_offsets[a + 1]]
    }

    /// Graph nodes with no resolved author.
    pub fn papers_without_authors(&self) -> usize {
        (0..self.n_papers()).filter(|&v| self.n_aut(v) == 0).count()
    }

    pub(crate) fn vector(&self, kind: MetricKind, values: Vec<f64>) -> MetricVector {
        MetricVector::new(kind, Entity::Author, self.author_ids.clone(), values)
    }

    /// Share a per-paper quantity equally among each paper's authors.
    pub fn share(&self, kind: MetricKind, per_paper: &[f64]) -> MetricVector {
        assert_eq!(
            per_paper.len(),
            self.n_papers(),
            "per-paper values must match the graph"
        );
        let mut values = vec![0.0; self.n_authors()];
        for (v, x) in per_paper.iter().enumerate() {
            let n = self.n_aut(v);
            if n == 0 {
                continue;
            }
            let part = x / n as f64;
            for &a in self.authors_of(v) {
                values[a as usize] += part;
            }
        }
        self.vector(kind, values)
    }

    /// Sum a per-paper quantity over each author's papers, unshared.
    pub fn total(&self, kind: MetricKind, per_paper: &[f64]) -> MetricVector {
        assert_eq!(
            per_paper.len(),
            self.n_papers(),
            "per-paper values must match the graph"
        );
        let values = (0..self.n_authors())
            .map(|a| self.papers_of(a).iter().map(|&v| per_paper[v as usize]).sum())
            .collect();
        self.vector(kind, values)
    }
}

/// Paper counts and citation counts per author.
#[derive(Debug, Clone, Serialize)]
pub struct AuthorCounts {
    pub npap: MetricVector,
    pub nipap: MetricVector,
    pub ncit: MetricVector,
    pub nicit: MetricVector,
    /// Graph papers that credit no author.
    pub papers_without_authors: usize,
}

pub fn author_counts(dataset: &Dataset, graph: &CitationGraph) -> Result<AuthorCounts> {
    let authorship = Authorship::new(dataset, graph)?;
    author_counts_with(&authorship, graph)
}

pub fn author_counts_with(authorship: &Authorship, graph: &CitationGraph) -> Result<AuthorCounts> {
    let n = graph.n_papers();
    let ones = vec![1.0; n];
    let cites: Vec<f64> = (0..n).map(|v| graph.n_cit(v) as f64).collect();
    let icit = n_icit_papers(graph)?;
    Ok(AuthorCounts {
        npap: authorship.total(MetricKind::Npap, &ones),
        nipap: authorship.share(MetricKind::Nipap, &ones),
        ncit: authorship.total(MetricKind::Ncit, &cites),
        nicit: authorship.share(MetricKind::Nicit, icit.values()),
        papers_without_authors: authorship.papers_without_authors(),
    })
}

/// Largest `h` such that `h` of the counts are at least `h`.
pub fn h_of(counts: &mut [usize]) -> usize {
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.iter().enumerate().take_while(|(i, &c)| c > *i).count()
}

pub fn h_index(dataset: &Dataset, graph: &CitationGraph) -> Result<MetricVector> {
    let authorship = Authorship::new(dataset, graph)?;
    Ok(h_index_with(&authorship, graph))
}

pub fn h_index_with(authorship: &Authorship, graph: &CitationGraph) -> MetricVector {
    let values = (0..authorship.n_authors())
        .map(|a| {
            let mut counts: Vec<usize> = authorship
                .papers_of(a)
                .iter()
                .map(|&v| graph.n_cit(v as usize))
                .collect();
            h_of(&mut counts) as f64
        })
        .collect();
    authorship.vector(MetricKind::HIndex, values)
}

/// PaperRank shared among each paper's authors. Papers in `paperrank`
/// missing from the dataset are skipped.
pub fn paperrank_of_authors(paperrank: &MetricVector, dataset: &Dataset) -> MetricVector {
    let mut values = vec![0.0; dataset.authors().len()];
    for (id, r) in paperrank.iter() {
        let Some(paper) = dataset.paper(crate::dataset::PaperId(id)) else {
            continue;
        };
        let n = paper.author_count();
        if n == 0 {
            continue;
        }
        for a in paper.resolved_authors() {
            if let Some(i) = dataset.author_index(a) {
                values[i] += r / n as f64;
            }
        }
    }
    let ids = dataset.authors().iter().map(|a| a.author_id.0).collect();
    MetricVector::new(MetricKind::PaperRank, Entity::Author, ids, values).with_window(paperrank.window)
}

/// CitationCoin per author: individual citations received minus given.
///
/// Only citations between papers that both credit an author take part, so
/// that every coin given is received by someone and the total is zero. This
/// is the column-minus-row sum of the author flow matrix, computed directly
/// from the graph.
pub fn citation_coin(dataset: &Dataset, graph: &CitationGraph) -> Result<MetricVector> {
    let authorship = Authorship::new(dataset, graph)?;
    citation_coin_with(&authorship, graph)
}

pub fn citation_coin_with(authorship: &Authorship, graph: &CitationGraph) -> Result<MetricVector> {
    check_declared(graph)?;
    let weight = |v: usize| 1.0 / graph.declared_ref_count(v) as f64;
    let mut net = vec![0.0; graph.n_papers()];
    for (v, slot) in net.iter_mut().enumerate() {
        if authorship.n_aut(v) == 0 {
            continue;
        }
        let mut received = 0.0;
        for &c in graph.citers(v) {
            if authorship.n_aut(c as usize) > 0 {
                received += weight(c as usize);
            }
        }
        let given = graph
            .references(v)
            .iter()
            .filter(|&&r| authorship.n_aut(r as usize) > 0)
            .count();
        if given > 0 {
            *slot = received - given as f64 * weight(v);
        } else {
            *slot = received;
        }
    }
    let mut coin = authorship.share(MetricKind::CitationCoin, &net);
    coin.window = graph.filter().window;
    Ok(coin)
}

/// CitationCoin counting only papers with above-average individual
/// citations, `N_icit - 1 > 0`, shared among authors.
pub fn citation_coin_plus(dataset: &Dataset, graph: &CitationGraph) -> Result<MetricVector> {
    let authorship = Authorship::new(dataset, graph)?;
    citation_coin_plus_with(&authorship, graph)
}

pub fn citation_coin_plus_with(authorship: &Authorship, graph: &CitationGraph) -> Result<MetricVector> {
    let icit = n_icit_papers(graph)?;
    let positive: Vec<f64> = icit.values().iter().map(|x| (x - 1.0).max(0.0)).collect();
    let mut plus = authorship.share(MetricKind::CitationCoinPlus, &positive);
    plus.window = graph.filter().window;
    Ok(plus)
}
