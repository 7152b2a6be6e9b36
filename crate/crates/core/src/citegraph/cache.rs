//! Binary cache of a built graph.
//!
//! Little-endian layout, version 1:
//!
//! ```text
//! offset  size        field
//! 0       8           magic "CRGRAPH\0"
//! 8       4           version (u32)
//! 12      4           flags (u32): bit0 drop_self_citations, bit1 published_only, bit2 window present
//! 16      4           window first_year (i32, 0 when absent)
//! 20      4           window last_year (i32, 0 when absent)
//! 24      8           dataset fingerprint (u64)
//! 32      8           n nodes (u64)
//! 40      8           m edges (u64)
//! 48      48          filter report: raw, kept, window, unpublished, acausal, self (6 x u64)
//! 96      24 * n      nodes: paper_id u64, dataset_index u32, year i32, month u8, day u8, pad u16, declared u32
//! ..      8 * (n+1)   forward offsets (u64)
//! ..      4 * m       forward targets (u32)
//! ```
//!
//! Month and day are stored as 0 when unknown. The reverse adjacency and the
//! topological order are rebuilt on load.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{build_graph, CitationGraph, Csr, DateWindow, EdgeFilter, FilterReport};
use crate::dataset::{Dataset, PaperDate, PaperId};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CRGRAPH\0";
pub const CACHE_VERSION: u32 = 1;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn mix(h: u64, word: u64) -> u64 {
    (h ^ word).wrapping_mul(FNV_PRIME)
}

/// Cheap content fingerprint of the parts of a dataset a graph depends on.
pub fn dataset_fingerprint(dataset: &Dataset) -> u64 {
    let mut h = mix(FNV_OFFSET, dataset.papers().len() as u64);
    for p in dataset.papers() {
        h = mix(h, p.paper_id.0);
        h = mix(h, p.date.year as u64);
        h = mix(h, p.declared_ref_count as u64);
        h = mix(h, p.published as u64);
        for r in &p.references {
            h = mix(h, r.0);
        }
        for a in p.resolved_authors() {
            h = mix(h, a.0 ^ 0x5555_5555_5555_5555);
        }
    }
    h
}

fn flags(filter: &EdgeFilter) -> u32 {
    (filter.drop_self_citations as u32)
        | ((filter.published_only as u32) << 1)
        | ((filter.window.is_some() as u32) << 2)
}

/// Reader/writer for the on-disk graph cache.
pub struct GraphCache;

impl GraphCache {
    pub fn store(path: &Path, graph: &CitationGraph, report: &FilterReport, fingerprint: u64) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        let filter = graph.filter();
        let (first, last) = filter.window.map_or((0, 0), |w| (w.first_year, w.last_year));
        w.write_all(MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&flags(filter).to_le_bytes())?;
        w.write_all(&first.to_le_bytes())?;
        w.write_all(&last.to_le_bytes())?;
        w.write_all(&fingerprint.to_le_bytes())?;
        w.write_all(&(graph.n_papers() as u64).to_le_bytes())?;
        w.write_all(&(graph.n_edges() as u64).to_le_bytes())?;
        for v in [
            report.raw_edges,
            report.kept_edges,
            report.window_excluded,
            report.unpublished_citers,
            report.acausal,
            report.self_citations,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        for v in 0..graph.n_papers() {
            let date = graph.date(v);
            w.write_all(&graph.paper_id(v).0.to_le_bytes())?;
            w.write_all(&graph.dataset_indices()[v].to_le_bytes())?;
            w.write_all(&date.year.to_le_bytes())?;
            w.write_all(&[date.month.unwrap_or(0), date.day.unwrap_or(0), 0, 0])?;
            w.write_all(&graph.declared_counts()[v].to_le_bytes())?;
        }
        for &o in graph.forward().offsets() {
            w.write_all(&(o as u64).to_le_bytes())?;
        }
        for &t in graph.forward().targets() {
            w.write_all(&t.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a cached graph. Returns `Ok(None)` when the file was built for a
    /// different filter or dataset, and an error when it is corrupt.
    pub fn load(path: &Path, filter: &EdgeFilter, fingerprint: u64) -> Result<Option<(CitationGraph, FilterReport)>> {
        let mut r = Reader(BufReader::new(File::open(path)?));
        let mut magic = [0u8; 8];
        r.0.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = r.u32()?;
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let stored_flags = r.u32()?;
        let first = r.i32()?;
        let last = r.i32()?;
        let stored_fp = r.u64()?;
        let window = (stored_flags & 4 != 0).then_some(DateWindow {
            first_year: first,
            last_year: last,
        });
        if stored_flags != flags(filter) || window != filter.window || stored_fp != fingerprint {
            return Ok(None);
        }
        let n = r.u64()? as usize;
        let m = r.u64()? as usize;
        let report = FilterReport {
            raw_edges: r.u64()?,
            kept_edges: r.u64()?,
            window_excluded: r.u64()?,
            unpublished_citers: r.u64()?,
            acausal: r.u64()?,
            self_citations: r.u64()?,
        };
        let mut paper_ids = Vec::with_capacity(n);
        let mut dataset_index = Vec::with_capacity(n);
        let mut dates = Vec::with_capacity(n);
        let mut declared = Vec::with_capacity(n);
        for _ in 0..n {
            paper_ids.push(PaperId(r.u64()?));
            dataset_index.push(r.u32()?);
            let year = r.i32()?;
            let mut md = [0u8; 4];
            r.0.read_exact(&mut md)?;
            dates.push(PaperDate {
                year,
                month: (md[0] != 0).then_some(md[0]),
                day: (md[1] != 0).then_some(md[1]),
            });
            declared.push(r.u32()?);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            offsets.push(r.u64()? as usize);
        }
        if offsets.first() != Some(&0) || offsets.last() != Some(&m) || offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Cache("inconsistent offsets".into()));
        }
        let mut targets = Vec::with_capacity(m);
        for _ in 0..m {
            let t = r.u32()?;
            if t as usize >= n {
                return Err(Error::Cache(format!("edge target {t} out of range")));
            }
            targets.push(t);
        }
        let graph = CitationGraph::assemble(
            paper_ids,
            dataset_index,
            dates,
            declared,
            Csr::from_raw(offsets, targets),
            *filter,
        );
        Ok(Some((graph, report)))
    }
}

struct Reader<R>(R);

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.0
            .read_exact(&mut b)
            .map_err(|e| Error::Cache(format!("truncated: {e}")))?;
        Ok(b)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
}

/// Build the graph, going through the cache at `path` when given: a valid
/// cache is loaded, otherwise the graph is built and the cache (re)written.
/// The flag tells whether the cache was hit.
pub fn build_graph_cached(
    dataset: &Dataset,
    filter: &EdgeFilter,
    path: Option<&Path>,
) -> Result<(CitationGraph, FilterReport, bool)> {
    let Some(path) = path else {
        let (g, r) = build_graph(dataset, filter);
        return Ok((g, r, false));
    };
    let fingerprint = dataset_fingerprint(dataset);
    if path.exists() {
        match GraphCache::load(path, filter, fingerprint) {
            Ok(Some((g, r))) => return Ok((g, r, true)),
            Ok(None) => log::info!("graph cache {} is stale, rebuilding", path.display()),
            Err(e) => log::warn!("ignoring unreadable graph cache {}: {e}", path.display()),
        }
    }
    let (g, r) = build_graph(dataset, filter);
    GraphCache::store(path, &g, &r, fingerprint)?;
    Ok((g, r, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ingest, IngestOptions};

    fn sample() -> Dataset {
        let text = [
            r#"{"kind":"paper","id":1,"date":"1990-03-04"}"#,
            r#"{"kind":"paper","id":2,"date":"1995","references":[1],"declared_ref_count":5}"#,
            r#"{"kind":"paper","id":3,"date":"2000-07","references":[1,2]}"#,
        ]
        .join("\n");
        ingest(text.as_bytes(), IngestOptions::default()).unwrap().0
    }

    #[test]
    fn store_then_load_round_trips() {
        let d = sample();
        let filter = EdgeFilter::default();
        let (g, r) = build_graph(&d, &filter);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        GraphCache::store(&path, &g, &r, dataset_fingerprint(&d)).unwrap();
        let (g2, r2) = GraphCache::load(&path, &filter, dataset_fingerprint(&d))
            .unwrap()
            .unwrap();
        assert_eq!(g, g2);
        assert_eq!(r, r2);
    }

    #[test]
    fn stale_cache_is_rejected() {
        let d = sample();
        let filter = EdgeFilter::default();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        let (_, _, hit) = build_graph_cached(&d, &filter, Some(&path)).unwrap();
        assert!(!hit);
        let (_, _, hit) = build_graph_cached(&d, &filter, Some(&path)).unwrap();
        assert!(hit);
        let other = EdgeFilter {
            drop_self_citations: true,
            ..filter
        };
        assert!(GraphCache::load(&path, &other, dataset_fingerprint(&d))
            .unwrap()
            .is_none());
        assert!(GraphCache::load(&path, &filter, 42).unwrap().is_none());
    }

    #[test]
    fn truncated_cache_is_an_error() {
        let d = sample();
        let (g, r) = build_graph(&d, &EdgeFilter::default());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        GraphCache::store(&path, &g, &r, 7).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(
            GraphCache::load(&path, &EdgeFilter::default(), 7),
            Err(Error::Cache(_))
        ));
    }
}
