//! Citation-network bibliometrics.
//!
//! The pipeline is: [`dataset::ingest`] a JSONL dump, [`citegraph::build_graph`]
//! the time-ordered citation graph, then compute paper, author and group
//! metrics over it.

pub mod author_metrics;
pub mod citegraph;
pub mod dataset;
mod error;
pub mod group_metrics;
pub mod metric;
pub mod paper_metrics;
pub mod synth;

pub use citegraph::{build_graph, CitationGraph, DateWindow, EdgeFilter, FilterReport};
pub use dataset::{ingest, Dataset, IngestOptions, IngestReport, PaperDate, PaperId};
pub use error::{Error, Result};
pub use metric::{Entity, MetricKind, MetricParams, MetricVector, SolverOptions};
