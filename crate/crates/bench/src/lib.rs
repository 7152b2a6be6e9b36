//! Criterion benchmarks for citerank; see `benches/metrics.rs`.
