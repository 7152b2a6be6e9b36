//! Immutable compressed citation graph.
//!
//! Nodes are the dataset papers selected by the [`EdgeFilter`] window, in
//! ascending paper-id order. Edges point from the citing paper to the cited
//! one (the direction of a reference). Both directions are stored as CSR so
//! that PageRank-style solvers can pull from citers without a transpose.

mod build;
mod cache;
mod peel;

use serde::{Deserialize, Serialize};

pub use build::build_graph;
pub use cache::{build_graph_cached, dataset_fingerprint, GraphCache, CACHE_VERSION};
pub use peel::{prune_leaves, Peeling};

use crate::dataset::{PaperDate, PaperId};
use crate::error::{Error, Result};

/// Inclusive range of publication years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateWindow {
    pub first_year: i32,
    pub last_year: i32,
}

impl DateWindow {
    pub fn new(first_year: i32, last_year: i32) -> Result<Self> {
        if first_year > last_year {
            return Err(Error::InvalidParameter(format!(
                "empty window: {first_year} > {last_year}"
            )));
        }
        Ok(DateWindow { first_year, last_year })
    }

    /// Papers from `year` onwards.
    pub fn since(year: i32) -> Self {
        DateWindow {
            first_year: year,
            last_year: i32::MAX,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first_year..=self.last_year).contains(&year)
    }
}

/// Which citations to keep when building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeFilter {
    /// Drop citations between papers sharing at least one author.
    pub drop_self_citations: bool,
    /// Restrict the graph to papers inside the window (both endpoints).
    pub window: Option<DateWindow>,
    /// Keep only citations made by published papers.
    pub published_only: bool,
}

/// Edge accounting for one graph build. Every raw resolvable reference is
/// either kept or counted under exactly one deletion reason, checked in the
/// order window, unpublished citer, acausal, self-citation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub raw_edges: u64,
    pub kept_edges: u64,
    pub window_excluded: u64,
    pub unpublished_citers: u64,
    pub acausal: u64,
    pub self_citations: u64,
}

impl FilterReport {
    pub fn deletions(&self) -> u64 {
        self.window_excluded + self.unpublished_citers + self.acausal + self.self_citations
    }
}

/// Compressed sparse rows over `u32` node ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    pub(crate) fn from_raw(offsets: Vec<usize>, targets: Vec<u32>) -> Self {
        debug_assert_eq!(offsets.last().copied().unwrap_or(0), targets.len());
        Csr { offsets, targets }
    }

    /// Transpose with `n` rows in the result; rows come out sorted when the
    /// source rows are visited in order.
    pub(crate) fn transpose(&self, n: usize) -> Csr {
        let mut counts = vec![0usize; n + 1];
        for &t in &self.targets {
            counts[t as usize + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts.clone();
        let mut cursor = counts;
        let mut targets = vec![0u32; self.targets.len()];
        for row in 0..self.rows() {
            for &t in self.row(row) {
                let slot = &mut cursor[t as usize];
                targets[*slot] = row as u32;
                *slot += 1;
            }
        }
        Csr { offsets, targets }
    }

    pub fn rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }
}

/// The citation graph of a dataset (or of a window of it).
#[derive(Debug, Clone, PartialEq)]
pub struct CitationGraph {
    paper_ids: Vec<PaperId>,
    dataset_index: Vec<u32>,
    dates: Vec<PaperDate>,
    declared_ref_count: Vec<u32>,
    forward: Csr,
    reverse: Csr,
    topo_order: Vec<u32>,
    filter: EdgeFilter,
}

impl CitationGraph {
    pub(crate) fn assemble(
        paper_ids: Vec<PaperId>,
        dataset_index: Vec<u32>,
        dates: Vec<PaperDate>,
        declared_ref_count: Vec<u32>,
        forward: Csr,
        filter: EdgeFilter,
    ) -> Self {
        let n = paper_ids.len();
        let reverse = forward.transpose(n);
        let mut topo_order: Vec<u32> = (0..n as u32).collect();
        // Nodes are already in paper-id order, so a stable sort by year
        // yields (year, paper_id).
        topo_order.sort_by_key(|&v| dates[v as usize].year);
        CitationGraph {
            paper_ids,
            dataset_index,
            dates,
            declared_ref_count,
            forward,
            reverse,
            topo_order,
            filter,
        }
    }

    /// Build a graph directly from an edge list, with no causality or
    /// self-citation filtering. Node `i` gets paper id `i`.
    ///
    /// `years` and `declared` default to 2000 and the out-degree. Duplicate
    /// edges are merged; self-loops and out-of-range endpoints are rejected.
    /// Declared counts are taken as given, so metrics that divide by them
    /// check for consistency themselves.
    pub fn from_edges(
        n: usize,
        edges: &[(u32, u32)],
        years: Option<Vec<i32>>,
        declared: Option<Vec<u32>>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(from, to) in edges {
            if from as usize >= n || to as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({from}, {to}) out of range for {n} nodes"
                )));
            }
            if from == to {
                return Err(Error::InvalidParameter(format!("self-loop on node {from}")));
            }
            rows[from as usize].push(to);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(edges.len());
        offsets.push(0);
        for row in &mut rows {
            row.sort_unstable();
            row.dedup();
            targets.extend_from_slice(row);
            offsets.push(targets.len());
        }
        let forward = Csr::from_raw(offsets, targets);

        let years = years.unwrap_or_else(|| vec![2000; n]);
        if years.len() != n {
            return Err(Error::InvalidParameter("years length != n".into()));
        }
        let declared = match declared {
            Some(d) if d.len() != n => return Err(Error::InvalidParameter("declared length != n".into())),
            Some(d) => d,
            None => (0..n).map(|v| forward.degree(v) as u32).collect(),
        };
        Ok(Self::assemble(
            (0..n as u64).map(PaperId).collect(),
            (0..n as u32).collect(),
            years.into_iter().map(PaperDate::year).collect(),
            declared,
            forward,
            EdgeFilter::default(),
        ))
    }

    pub fn n_papers(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.forward.nnz()
    }

    pub fn is_empty(&self) -> bool {
        self.paper_ids.is_empty()
    }

    /// Papers cited by `node`.
    #[inline]
    pub fn references(&self, node: usize) -> &[u32] {
        self.forward.row(node)
    }

    /// Papers citing `node`.
    #[inline]
    pub fn citers(&self, node: usize) -> &[u32] {
        self.reverse.row(node)
    }

    /// Out-degree in this graph; normalizes rank transitions.
    #[inline]
    pub fn indexed_ref_count(&self, node: usize) -> usize {
        self.forward.degree(node)
    }

    /// Bibliography size; weights individual citations.
    #[inline]
    pub fn declared_ref_count(&self, node: usize) -> u32 {
        self.declared_ref_count[node]
    }

    #[inline]
    pub fn n_cit(&self, node: usize) -> usize {
        self.reverse.degree(node)
    }

    pub fn paper_id(&self, node: usize) -> PaperId {
        self.paper_ids[node]
    }

    pub fn paper_ids(&self) -> &[PaperId] {
        &self.paper_ids
    }

    /// Position of the node's record in [`crate::dataset::Dataset::papers`].
    pub fn dataset_index(&self, node: usize) -> usize {
        self.dataset_index[node] as usize
    }

    pub fn date(&self, node: usize) -> PaperDate {
        self.dates[node]
    }

    pub fn year(&self, node: usize) -> i32 {
        self.dates[node].year
    }

    pub fn node_of(&self, id: PaperId) -> Option<usize> {
        self.paper_ids.binary_search(&id).ok()
    }

    /// Nodes ordered oldest to newest, ties by paper id.
    pub fn topological_order(&self) -> &[u32] {
        &self.topo_order
    }

    pub fn filter(&self) -> &EdgeFilter {
        &self.filter
    }

    pub(crate) fn forward(&self) -> &Csr {
        &self.forward
    }

    pub(crate) fn declared_counts(&self) -> &[u32] {
        &self.declared_ref_count
    }

    pub(crate) fn dataset_indices(&self) -> &[u32] {
        &self.dataset_index
    }
}

/// Free-function form of [`CitationGraph::topological_order`].
pub fn topological_order(graph: &CitationGraph) -> Vec<u32> {
    graph.topo_order.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_topological_order() {
        // C(2002) -> B(2001) -> A(2000), ids A=0, B=1, C=2
        let g = CitationGraph::from_edges(3, &[(2, 1), (1, 0)], Some(vec![2000, 2001, 2002]), None).unwrap();
        assert_eq!(g.topological_order(), &[0, 1, 2]);
        assert_eq!(g.citers(0), &[1]);
        assert_eq!(g.references(2), &[1]);
    }

    #[test]
    fn same_year_cycle_orders_by_id() {
        let g = CitationGraph::from_edges(2, &[(0, 1), (1, 0)], Some(vec![2000, 2000]), None).unwrap();
        assert_eq!(g.topological_order(), &[0, 1]);
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn empty_graph() {
        let g = CitationGraph::from_edges(0, &[], None, None).unwrap();
        assert!(topological_order(&g).is_empty());
    }

    #[test]
    fn from_edges_validation() {
        assert!(CitationGraph::from_edges(2, &[(0, 2)], None, None).is_err());
        assert!(CitationGraph::from_edges(2, &[(1, 1)], None, None).is_err());
        let g = CitationGraph::from_edges(2, &[(1, 0), (1, 0)], None, None).unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn window_contains_is_inclusive() {
        let w = DateWindow::new(2000, 2010).unwrap();
        assert!(w.contains(2000) && w.contains(2010) && !w.contains(2011));
        assert!(DateWindow::new(2011, 2010).is_err());
    }
}
