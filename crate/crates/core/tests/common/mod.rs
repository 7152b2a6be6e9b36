//! Fixtures and dense reference solvers shared by the integration tests.
#![allow(dead_code)]

use citerank_core::author_metrics::AuthorFlowMatrix;
use citerank_core::synth::{generate, SynthParams};
use citerank_core::{CitationGraph, Dataset};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Random graph on `n` nodes with out-degrees in `0..=max_out`. Acyclic
/// graphs only cite lower indices.
pub fn random_graph(rng: &mut impl Rng, n: usize, acyclic: bool, max_out: usize) -> CitationGraph {
    let mut edges = Vec::new();
    for v in 0..n {
        let limit = if acyclic { v } else { n - 1 };
        if limit == 0 {
            continue;
        }
        let k = rng.random_range(0..=max_out.min(limit));
        for _ in 0..k {
            let mut t = rng.random_range(0..limit);
            if !acyclic && t >= v {
                t += 1;
            }
            edges.push((v as u32, t as u32));
        }
    }
    CitationGraph::from_edges(n, &edges, None, None).unwrap()
}

/// Graph where every node cites between 1 and `max_out` others.
pub fn covered_graph(rng: &mut impl Rng, n: usize, max_out: usize) -> CitationGraph {
    let mut edges = Vec::new();
    for v in 0..n {
        let k = rng.random_range(1..=max_out.min(n - 1));
        for _ in 0..k {
            let mut t = rng.random_range(0..n - 1);
            if t >= v {
                t += 1;
            }
            edges.push((v as u32, t as u32));
        }
    }
    CitationGraph::from_edges(n, &edges, None, None).unwrap()
}

/// PaperRank from an LU solve of `(I - d Mᵀ) R = 1`, rescaled to the edge count.
pub fn dense_paperrank(g: &CitationGraph, damping: f64) -> Vec<f64> {
    let n = g.n_papers();
    let mut a = DMatrix::<f64>::identity(n, n);
    for v in 0..n {
        let refs = g.references(v);
        for &t in refs {
            a[(t as usize, v)] -= damping / refs.len() as f64;
        }
    }
    let r = a.lu().solve(&DVector::from_element(n, 1.0)).expect("nonsingular");
    let scale = g.n_edges() as f64 / r.sum();
    r.iter().map(|x| x * scale).collect()
}

/// AuthorRank from an LU solve of the damped walk with uniform dangling
/// completion, rescaled to total the number of authors.
pub fn dense_authorrank(flow: &AuthorFlowMatrix, damping: f64) -> Vec<f64> {
    let n = flow.n_authors();
    let mut a = DMatrix::<f64>::identity(n, n);
    for from in 0..n {
        let (cols, weights) = flow.row(from);
        let sum: f64 = weights.iter().sum();
        if sum > 0.0 {
            for (&to, &w) in cols.iter().zip(weights) {
                a[(to as usize, from)] -= damping * w / sum;
            }
        } else {
            for to in 0..n {
                a[(to, from)] -= damping / n as f64;
            }
        }
    }
    let x = a
        .lu()
        .solve(&DVector::from_element(n, 1.0 - damping))
        .expect("nonsingular");
    let scale = n as f64 / x.sum();
    x.iter().map(|v| v * scale).collect()
}

/// Largest per-component relative error of `got` against `want`.
pub fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    got.iter()
        .zip(want)
        .map(|(g, w)| if *w == 0.0 { g.abs() } else { ((g - w) / w).abs() })
        .fold(0.0, f64::max)
}

/// `Σ_i Σ_j |x_i - x_j| / (2 n Σ x)` by the double sum.
pub fn brute_gini(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().sum();
    let mut s = 0.0;
    for a in x {
        for b in x {
            s += (a - b).abs();
        }
    }
    s / (2.0 * n * total)
}

pub fn synthetic(seed: u64, n_papers: usize) -> Dataset {
    generate(&SynthParams {
        seed,
        n_papers,
        ..Default::default()
    })
    .unwrap()
    .0
}

pub fn synthetic_with(params: SynthParams) -> Dataset {
    generate(&params).unwrap().0
}
