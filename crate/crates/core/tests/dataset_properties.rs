mod common;

use citerank_core::dataset::{export_canonical, ingest, IngestOptions};
use citerank_core::synth::{write_fixture, SynthParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn export_then_ingest_is_identity(seed in 0u64..10_000, acausal in 0.0f64..0.2) {
        let d = common::synthetic_with(SynthParams { seed, n_papers: 300, acausal_fraction: acausal, ..Default::default() });
        let mut first = Vec::new();
        export_canonical(&d, &mut first).unwrap();
        let (again, report) = ingest(first.as_slice(), IngestOptions::default()).unwrap();
        prop_assert_eq!(report.dropped.total(), 0);
        let mut second = Vec::new();
        export_canonical(&again, &mut second).unwrap();
        prop_assert_eq!(first, second);
        prop_assert!(again.papers().iter().all(|p| p.declared_ref_count as usize >= p.references.len()));
    }

    #[test]
    fn report_counts_partition_the_input(
        seed in 0u64..10_000,
        garbage in prop::collection::vec(prop::sample::select(vec![
            "not json",
            r#"{"kind":"paper","id":1,"date":"1970"}"#,
            r#"{"kind":"paper","id":999999,"date":"someday"}"#,
            r#"{"kind":"paper","id":999998}"#,
            r#"{"kind":"unknown"}"#,
        ]), 0..10),
    ) {
        let mut text = Vec::new();
        write_fixture(&SynthParams { seed, n_papers: 50, ..Default::default() }, &mut text).unwrap();
        for line in &garbage {
            text.extend_from_slice(line.as_bytes());
            text.push(b'\n');
        }
        let (d, report) = ingest(text.as_slice(), IngestOptions::default()).unwrap();
        prop_assert_eq!(report.records_read, report.records_kept + report.dropped.total());
        prop_assert_eq!(d.papers().len(), 50);
    }
}

#[test]
fn reference_counts_follow_the_requested_mean() {
    let params = SynthParams {
        seed: 3,
        n_papers: 10_000,
        refs_mean: 20.0,
        ..Default::default()
    };
    let d = common::synthetic_with(params);
    let mean = d.papers().iter().map(|p| p.declared_ref_count as f64).sum::<f64>() / d.papers().len() as f64;
    assert!((mean - 20.0).abs() <= 2.0, "mean declared references {mean}");
}

#[test]
fn fixtures_are_time_ordered_unless_asked() {
    let d = common::synthetic(5, 3000);
    for p in d.papers() {
        for r in &p.references {
            assert!(d.paper(*r).unwrap().date.year <= p.date.year);
        }
    }
}
