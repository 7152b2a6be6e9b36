use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Authorship;
use crate::citegraph::CitationGraph;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricKind, MetricParams, MetricVector, SolverOptions};
use crate::paper_metrics::check_declared;

/// Rows built per parallel batch; bounds the transient per-row buffers.
const ROW_BATCH: usize = 4096;
/// Upper bound on the partial vectors used by the push iteration. Fixed so
/// that results do not depend on the thread count.
const MAX_PUSH_CHUNKS: usize = 64;
const MIN_CHUNK_NNZ: usize = 1 << 16;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Zero the diagonal: an author citing their own papers.
    pub remove_self: bool,
    /// Keep only the net flow of each pair, `max(w[a→b] - w[b→a], 0)`.
    pub antisymmetrize: bool,
}

/// Individual citations from author to author, as sparse rows: row `a`
/// holds what author `a` gives, column `b` what author `b` receives.
///
/// One citation from paper `p'` to paper `p` adds
/// `1 / (authors(p) * authors(p') * declared_refs(p'))` to every pair of
/// their authors.
#[derive(Debug, Clone, PartialEq)]
pub struct AuthorFlowMatrix {
    author_ids: Vec<u64>,
    offsets: Vec<usize>,
    cols: Vec<u32>,
    weights: Vec<f64>,
    pub self_citations_removed: bool,
    pub antisymmetrized: bool,
}

impl AuthorFlowMatrix {
    pub fn build(dataset: &Dataset, graph: &CitationGraph, opts: FlowOptions) -> Result<Self> {
        let authorship = Authorship::new(dataset, graph)?;
        Self::from_authorship(&authorship, graph, opts)
    }

    pub fn from_authorship(authorship: &Authorship, graph: &CitationGraph, opts: FlowOptions) -> Result<Self> {
        check_declared(graph)?;
        let n = authorship.n_authors();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);

        for start in (0..n).step_by(ROW_BATCH) {
            let end = (start + ROW_BATCH).min(n);
            let rows: Vec<(Vec<u32>, Vec<f64>)> = (start..end)
                .into_par_iter()
                .with_min_len(64)
                .map_init(
                    || Accumulator::new(n),
                    |acc, a| {
                        for &citing in authorship.papers_of(a) {
                            let citing = citing as usize;
                            let base =
                                1.0 / (authorship.n_aut(citing) as f64 * graph.declared_ref_count(citing) as f64);
                            for &cited in graph.references(citing) {
                                let cited = cited as usize;
                                let k = authorship.n_aut(cited);
                                if k == 0 {
                                    continue;
                                }
                                let w = base / k as f64;
                                for &b in authorship.authors_of(cited) {
                                    if opts.remove_self && b as usize == a {
                                        continue;
                                    }
                                    acc.add(b, w);
                                }
                            }
                        }
                        acc.drain()
                    },
                )
                .collect();
            for (c, w) in rows {
                cols.extend_from_slice(&c);
                weights.extend_from_slice(&w);
                offsets.push(cols.len());
            }
        }

        let m = AuthorFlowMatrix {
            author_ids: authorship.author_ids().to_vec(),
            offsets,
            cols,
            weights,
            self_citations_removed: opts.remove_self,
            antisymmetrized: false,
        };
        Ok(if opts.antisymmetrize { m.antisymmetrize() } else { m })
    }

    /// Matrix over authors `0..n` from `(giver, receiver, weight)` entries;
    /// repeated entries add up.
    pub fn from_triplets(n: usize, entries: &[(u32, u32, f64)]) -> Result<Self> {
        let mut sorted = entries.to_vec();
        for &(i, j, w) in &sorted {
            if i as usize >= n || j as usize >= n {
                return Err(Error::InvalidParameter(format!(
                    "entry ({i}, {j}) out of range for {n} authors"
                )));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "weight {w} at ({i}, {j}) is not a nonnegative number"
                )));
            }
        }
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut offsets = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (i, j, w) in sorted {
            if last == Some((i, j)) {
                *weights.last_mut().expect("entry exists") += w;
            } else {
                cols.push(j);
                weights.push(w);
                offsets[i as usize + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(AuthorFlowMatrix {
            author_ids: (0..n as u64).collect(),
            offsets,
            cols,
            weights,
            self_citations_removed: false,
            antisymmetrized: false,
        })
    }

    pub fn n_authors(&self) -> usize {
        self.author_ids.len()
    }

    pub fn author_ids(&self) -> &[u64] {
        &self.author_ids
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Receivers and weights given by author index `a`.
    #[inline]
    pub fn row(&self, a: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[a]..self.offsets[a + 1];
        (&self.cols[r.clone()], &self.weights[r])
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        let (c, w) = self.row(from);
        c.binary_search(&(to as u32)).map_or(0.0, |k| w[k])
    }

    /// Total given by each author.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_authors()).map(|a| self.row(a).1.iter().sum()).collect()
    }

    /// Total received by each author.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_authors()];
        for (&c, &w) in self.cols.iter().zip(&self.weights) {
            sums[c as usize] += w;
        }
        sums
    }

    /// Received minus given, per author.
    pub fn net_flow(&self) -> Vec<f64> {
        self.col_sums()
            .iter()
            .zip(self.row_sums())
            .map(|(r, g)| r - g)
            .collect()
    }

    /// CitationCoin from the matrix; equals the count-based
    /// [`citation_coin`](super::citation_coin) when built untruncated.
    pub fn citation_coin(&self) -> MetricVector {
        MetricVector::new(
            MetricKind::CitationCoin,
            Entity::Author,
            self.author_ids.clone(),
            self.net_flow(),
        )
    }

    pub fn remove_self(mut self) -> Self {
        let mut offsets = Vec::with_capacity(self.offsets.len());
        offsets.push(0);
        let mut write = 0;
        for a in 0..self.n_authors() {
            for k in self.offsets[a]..self.offsets[a + 1] {
                if self.cols[k] as usize != a {
                    self.cols[write] = self.cols[k];
                    self.weights[write] = self.weights[k];
                    write += 1;
                }
            }
            offsets.push(write);
        }
        self.cols.truncate(write);
        self.weights.truncate(write);
        self.offsets = offsets;
        self.self_citations_removed = true;
        self
    }

    /// Replace each pair by its net flow, clipped at zero.
    pub fn antisymmetrize(self) -> Self {
        let n = self.n_authors();
        let rows: Vec<(Vec<u32>, Vec<f64>)> = (0..n)
            .into_par_iter()
            .with_min_len(256)
            .map(|a| {
                let (c, w) = self.row(a);
                let mut cols = Vec::new();
                let mut weights = Vec::new();
                for (&b, &x) in c.iter().zip(w) {
                    let net = x - self.get(b as usize, a);
                    if net > 0.0 {
                        cols.push(b);
                        weights.push(net);
                    }
                }
                (cols, weights)
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for (c, w) in rows {
            cols.extend(c);
            weights.extend(w);
            offsets.push(cols.len());
        }
        AuthorFlowMatrix {
            author_ids: self.author_ids,
            offsets,
            cols,
            weights,
            self_citations_removed: true,
            antisymmetrized: true,
        }
    }
}

/// Dense scatter buffer remembering which slots were touched.
struct Accumulator {
    values: Vec<f64>,
    touched: Vec<u32>,
    seen: Vec<bool>,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            values: vec![0.0; n],
            touched: Vec::new(),
            seen: vec![false; n],
        }
    }

    #[inline]
    fn add(&mut self, i: u32, w: f64) {
        let i = i as usize;
        if !self.seen[i] {
            self.seen[i] = true;
            self.touched.push(i as u32);
        }
        self.values[i] += w;
    }

    fn drain(&mut self) -> (Vec<u32>, Vec<f64>) {
        self.touched.sort_unstable();
        let cols = std::mem::take(&mut self.touched);
        let weights = cols
            .iter()
            .map(|&i| {
                let i = i as usize;
                self.seen[i] = false;
                std::mem::take(&mut self.values[i])
            })
            .collect();
        (cols, weights)
    }
}

/// Row-normalized view of a flow matrix. Rows with no outgoing weight are
/// dangling and stand for the uniform distribution.
#[derive(Debug, Clone)]
pub struct StochasticAuthorMatrix<'a> {
    flow: &'a AuthorFlowMatrix,
    inv_row_sum: Vec<f64>,
    dangling: Vec<u32>,
}

impl<'a> StochasticAuthorMatrix<'a> {
    pub fn new(flow: &'a AuthorFlowMatrix) -> Self {
        let sums = flow.row_sums();
        let inv_row_sum = sums.iter().map(|&s| if s > 0.0 { 1.0 / s } else { 0.0 }).collect();
        let dangling = (0..sums.len() as u32).filter(|&a| sums[a as usize] <= 0.0).collect();
        StochasticAuthorMatrix {
            flow,
            inv_row_sum,
            dangling,
        }
    }

    pub fn n_authors(&self) -> usize {
        self.flow.n_authors()
    }

    pub fn dangling(&self) -> &[u32] {
        &self.dangling
    }

    pub fn is_dangling(&self, a: usize) -> bool {
        self.inv_row_sum[a] == 0.0
    }

    /// Transition probabilities out of author index `a`; empty when dangling.
    pub fn row(&self, a: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let (c, w) = self.flow.row(a);
        let inv = self.inv_row_sum[a];
        c.iter().zip(w).map(move |(&b, &x)| (b, x * inv))
    }
}

/// Row ranges holding roughly equal numbers of nonzeros.
fn push_chunks(flow: &AuthorFlowMatrix) -> Vec<(usize, usize)> {
    let n = flow.n_authors();
    let k = (flow.nnz() / MIN_CHUNK_NNZ).clamp(1, MAX_PUSH_CHUNKS);
    let per = flow.nnz().div_ceil(k).max(1);
    let mut chunks = Vec::with_capacity(k);
    let mut start = 0;
    while start < n {
        let target = flow.offsets[start] + per;
        let mut end = flow.offsets.partition_point(|&o| o < target).clamp(start + 1, n);
        if chunks.len() + 1 == k {
            end = n;
        }
        chunks.push((start, end));
        start = end;
    }
    chunks
}

/// AuthorRank: stationary distribution of the damped walk on the
/// row-normalized flow matrix, with dangling rows spread uniformly and a
/// constant `1 - damping` per author, scaled to total the number of authors.
///
/// Each iteration pushes rank along rows into a fixed set of partial
/// vectors that are summed in order, so the result does not depend on the
/// thread count.
pub fn authorrank(flow: &AuthorFlowMatrix, opts: &SolverOptions) -> Result<MetricVector> {
    opts.validate()?;
    let n = flow.n_authors();
    let total = n as f64;
    let mut params = MetricParams {
        damping: Some(opts.damping),
        normalization: Some(total),
        tolerance: Some(opts.tolerance),
        iterations: Some(0),
        residual: Some(0.0),
    };
    if n == 0 {
        return Ok(
            MetricVector::new(MetricKind::AuthorRank, Entity::Author, Vec::new(), Vec::new()).with_params(params),
        );
    }
    let stochastic = StochasticAuthorMatrix::new(flow);
    let chunks = push_chunks(flow);
    let damping = opts.damping;
    let mut partials = vec![vec![0.0; n]; chunks.len()];
    let mut rank = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut change = f64::INFINITY;

    for iter in 1..=opts.max_iters {
        let dangling_mass: f64 = stochastic.dangling.iter().map(|&a| rank[a as usize]).sum();
        partials.par_iter_mut().zip(&chunks).for_each(|(part, &(lo, hi))| {
            part.iter_mut().for_each(|x| *x = 0.0);
            for (a, (&r, &inv)) in (lo..hi).zip(rank[lo..hi].iter().zip(&stochastic.inv_row_sum[lo..hi])) {
                let out = r * inv;
                if out == 0.0 {
                    continue;
                }
                let (c, w) = flow.row(a);
                for (&b, &x) in c.iter().zip(w) {
                    part[b as usize] += out * x;
                }
            }
        });
        let base = (1.0 - damping) + damping * dangling_mass / total;
        next.par_iter_mut().with_min_len(4096).enumerate().for_each(|(b, x)| {
            let pushed: f64 = partials.iter().map(|p| p[b]).sum();
            *x = base + damping * pushed;
        });
        change = next
            .par_iter()
            .with_min_len(4096)
            .zip(rank.par_iter())
            .map(|(a, b)| (a - b).abs() / a)
            .reduce(|| 0.0, f64::max);
        std::mem::swap(&mut rank, &mut next);
        if change < opts.tolerance {
            log::debug!("authorrank converged after {iter} iterations, change {change:.3e}");
            params.iterations = Some(iter);
            params.residual = Some(change);
            let scale = total / rank.iter().sum::<f64>();
            rank.iter_mut().for_each(|r| *r *= scale);
            return Ok(
                MetricVector::new(MetricKind::AuthorRank, Entity::Author, flow.author_ids.clone(), rank)
                    .with_params(params),
            );
        }
    }
    Err(Error::NotConverged {
        solver: "authorrank",
        iterations: opts.max_iters,
        residual: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::author_metrics::tests::dataset;
    use crate::citegraph::build_graph;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn solo_citation_weight() {
        let d = dataset(&[
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"1990","authors":[{"id":1}]}"#,
            r#"{"kind":"paper","id":2,"date":"1991","authors":[{"id":2}],"references":[1],"declared_ref_count":2}"#,
        ]);
        let (g, _) = build_graph(&d, &Default::default());
        let m = AuthorFlowMatrix::build(&d, &g, FlowOptions::default()).unwrap();
        assert_eq!(m.get(1, 0), 0.5);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.net_flow(), vec![0.5, -0.5]);
    }

    #[test]
    fn self_citation_removed() {
        let d = dataset(&[
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"paper","id":1,"date":"1990","authors":[{"id":1}]}"#,
            r#"{"kind":"paper","id":2,"date":"1991","authors":[{"id":1}],"references":[1]}"#,
        ]);
        let (g, _) = build_graph(&d, &Default::default());
        let m = AuthorFlowMatrix::build(&d, &g, FlowOptions::default()).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        let opts = FlowOptions {
            remove_self: true,
            ..Default::default()
        };
        let m2 = AuthorFlowMatrix::build(&d, &g, opts).unwrap();
        assert_eq!(m2.get(0, 0), 0.0);
        assert_eq!(m2.nnz(), 0);
        assert_eq!(m.remove_self(), m2);
    }

    #[test]
    fn antisymmetrized_pair() {
        let m = AuthorFlowMatrix::from_triplets(2, &[(0, 1, 0.5), (1, 0, 0.2)])
            .unwrap()
            .antisymmetrize();
        assert!(close(m.get(0, 1), 0.3));
        assert_eq!(m.get(1, 0), 0.0);
        assert!(m.antisymmetrized);
    }

    #[test]
    fn triplets_merge_and_validate() {
        let m = AuthorFlowMatrix::from_triplets(3, &[(2, 0, 1.0), (0, 1, 0.5), (2, 0, 0.25)]).unwrap();
        assert_eq!(m.get(2, 0), 1.25);
        assert_eq!(m.nnz(), 2);
        assert!(AuthorFlowMatrix::from_triplets(2, &[(0, 2, 1.0)]).is_err());
        assert!(AuthorFlowMatrix::from_triplets(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn rows_are_stochastic() {
        let m = AuthorFlowMatrix::from_triplets(3, &[(0, 1, 3.0), (0, 2, 1.0), (1, 0, 0.1)]).unwrap();
        let s = StochasticAuthorMatrix::new(&m);
        for a in 0..2 {
            assert!(close(s.row(a).map(|(_, p)| p).sum::<f64>(), 1.0));
        }
        assert_eq!(s.dangling(), &[2]);
        assert!(s.is_dangling(2));
    }

    #[test]
    fn symmetric_pair_ranks_equal() {
        let m = AuthorFlowMatrix::from_triplets(2, &[(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
        let r = authorrank(&m, &SolverOptions::authorrank()).unwrap();
        assert!(close(r.values()[0], 1.0) && close(r.values()[1], 1.0));
    }

    #[test]
    fn lone_self_citer_ranks_one() {
        let m = AuthorFlowMatrix::from_triplets(1, &[(0, 0, 2.0)]).unwrap();
        let r = authorrank(&m, &SolverOptions::authorrank()).unwrap();
        assert!(close(r.values()[0], 1.0));
    }

    #[test]
    fn three_authors_with_dangling_row() {
        // B and C cite only A; A cites nobody. With d = 0.9 and a uniform
        // dangling row the system is
        //   a = 0.1 + 0.9 (b + c + a/3),  b = c = 0.1 + 0.9 a/3.
        let m = AuthorFlowMatrix::from_triplets(3, &[(1, 0, 1.0), (2, 0, 1.0)]).unwrap();
        let r = authorrank(&m, &SolverOptions::authorrank().with_tolerance(1e-14)).unwrap();
        let a = (0.1 + 0.18) / (1.0 - 0.3 - 0.54);
        let b = 0.1 + 0.3 * a;
        let scale = 3.0 / (a + 2.0 * b);
        assert!((r.values()[0] - a * scale).abs() < 1e-10);
        assert!((r.values()[1] - b * scale).abs() < 1e-10);
        assert!((r.sum() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn chunks_cover_all_rows() {
        let entries: Vec<(u32, u32, f64)> = (0..200_000u32).map(|i| (i % 1000, (i * 7) % 1000, 1.0)).collect();
        let m = AuthorFlowMatrix::from_triplets(1000, &entries).unwrap();
        let chunks = push_chunks(&m);
        assert_eq!(chunks.first().unwrap().0, 0);
        assert_eq!(chunks.last().unwrap().1, 1000);
        assert!(chunks.windows(2).all(|w| w[0].1 == w[1].0));
    }
}
