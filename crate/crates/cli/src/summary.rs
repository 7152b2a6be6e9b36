use std::collections::BTreeMap;

use citerank_core::{EdgeFilter, FilterReport, IngestReport, MetricVector};
use serde::Serialize;

/// Machine-readable account of one run.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub command: &'static str,
    pub version: &'static str,
    pub threads: usize,
    pub elapsed_secs: f64,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub solvers: Vec<SolverSummary>,
    /// Gini coefficient of each written metric with no negative values.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub gini: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub citation_coin_closed_form_gap: Option<GapSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows_written: Option<usize>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, serde_json::Value>,
}

impl RunSummary {
    pub fn new(command: &'static str, threads: usize) -> Self {
        RunSummary {
            command,
            version: env!("CARGO_PKG_VERSION"),
            threads,
            elapsed_secs: 0.0,
            ok: true,
            error: None,
            ingest: None,
            graph: None,
            solvers: Vec::new(),
            gini: BTreeMap::new(),
            citation_coin_closed_form_gap: None,
            rows_written: None,
            notes: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GraphSummary {
    pub papers: usize,
    pub edges: usize,
    pub cache_hit: bool,
    pub filter: EdgeFilter,
    pub report: FilterReport,
}

#[derive(Debug, Serialize)]
pub struct SolverSummary {
    pub metric: &'static str,
    pub damping: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Distance between the computed author CitationCoin and
/// `N_icit - N_ipap`, which it equals when every reference is indexed.
#[derive(Debug, Serialize)]
pub struct GapSummary {
    pub authors: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
}

impl GapSummary {
    pub fn new(coin: &MetricVector, nicit: &MetricVector, nipap: &MetricVector) -> Self {
        let mut max_abs: f64 = 0.0;
        let mut total = 0.0;
        for (id, c) in coin.iter() {
            let gap = (c - (nicit.get(id).unwrap_or(0.0) - nipap.get(id).unwrap_or(0.0))).abs();
            max_abs = max_abs.max(gap);
            total += gap;
        }
        let authors = coin.len();
        GapSummary {
            authors,
            max_abs,
            mean_abs: if authors > 0 { total / authors as f64 } else { 0.0 },
        }
    }
}
