//! Group-level aggregates: papers are split among institutions, towns,
//! countries, continents, journals or author genders, and any paper metric
//! is summed with those weights.

mod geo;
mod stats;
mod tables;
mod towns;
mod trends;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use geo::{GeoDenominator, GeoDenominators};
pub use stats::{gini, metric_correlations, pearson, spearman, Correlations};
pub use tables::{affiliate_rank_table, journal_table, AffiliateRow, AffiliateTable, JournalRow};
pub use towns::{cluster_towns, haversine_km, Town, TownClusters, DEFAULT_TOWN_RADIUS_KM, EARTH_RADIUS_KM};
pub use trends::{gender_stats, timeseries, trend_series, GenderShare, GenderStats, TimeSeries, TrendRow};

use crate::dataset::{Continent, Dataset, Gender, PaperId};
use crate::error::{Error, Result};
use crate::metric::{Entity, GroupedMetric, MetricKind, MetricVector};

/// Group id of the journal bucket for papers without a journal.
pub const UNPUBLISHED_JOURNAL: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    Institution,
    Town,
    Country,
    Continent,
    Journal,
    Gender,
}

impl GroupKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GroupKind::Institution => "institution",
            GroupKind::Town => "town",
            GroupKind::Country => "country",
            GroupKind::Continent => "continent",
            GroupKind::Journal => "journal",
            GroupKind::Gender => "gender",
        }
    }
}

/// How each paper of a dataset is split among groups.
///
/// Shares of a covered paper sum to one; papers with no resolvable group
/// have no shares and are counted in `uncovered_papers`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupingScheme {
    pub kind: GroupKind,
    group_ids: Vec<u64>,
    labels: Vec<String>,
    paper_ids: Vec<PaperId>,
    offsets: Vec<usize>,
    groups: Vec<u32>,
    shares: Vec<f64>,
    pub uncovered_papers: usize,
}

impl GroupingScheme {
    /// Assemble from per-paper weights over group indices. Weights are
    /// merged per group and normalized to sum to one. Integer-valued weights
    /// sum exactly, so each share is then a single rounded division.
    fn from_weights(
        kind: GroupKind,
        group_ids: Vec<u64>,
        labels: Vec<String>,
        dataset: &Dataset,
        mut weights_of: impl FnMut(usize) -> Vec<(u32, f64)>,
    ) -> Self {
        debug_assert!(group_ids.windows(2).all(|w| w[0] < w[1]));
        let n = dataset.papers().len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut groups = Vec::new();
        let mut shares = Vec::new();
        let mut uncovered = 0;
        offsets.push(0);
        for i in 0..n {
            let mut w = weights_of(i);
            w.sort_by_key(|e| e.0);
            let mut merged: Vec<(u32, f64)> = Vec::with_capacity(w.len());
            for (g, x) in w {
                match merged.last_mut() {
                    Some(last) if last.0 == g => last.1 += x,
                    _ => merged.push((g, x)),
                }
            }
            merged.retain(|e| e.1 > 0.0);
            let total: f64 = merged.iter().map(|e| e.1).sum();
            if total > 0.0 {
                for (g, x) in merged {
                    groups.push(g);
                    shares.push(x / total);
                }
            } else {
                uncovered += 1;
            }
            offsets.push(groups.len());
        }
        GroupingScheme {
            kind,
            group_ids,
            labels,
            paper_ids: dataset.papers().iter().map(|p| p.paper_id).collect(),
            offsets,
            groups,
            shares,
            uncovered_papers: uncovered,
        }
    }

    pub fn n_groups(&self) -> usize {
        self.group_ids.len()
    }

    pub fn group_ids(&self) -> &[u64] {
        &self.group_ids
    }

    pub fn label(&self, group: usize) -> &str {
        &self.labels[group]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_index(&self, id: u64) -> Option<usize> {
        self.group_ids.binary_search(&id).ok()
    }

    /// Group indices and shares of the paper at dataset position `index`.
    pub fn shares_at(&self, index: usize) -> (&[u32], &[f64]) {
        let r = self.offsets[index]..self.offsets[index + 1];
        (&self.groups[r.clone()], &self.shares[r])
    }

    pub fn shares_of(&self, paper: PaperId) -> Option<(&[u32], &[f64])> {
        self.paper_ids.binary_search(&paper).ok().map(|i| self.shares_at(i))
    }

    /// Share of `paper` attributed to group id `group`.
    pub fn share(&self, paper: PaperId, group: u64) -> f64 {
        let (Some((g, s)), Some(target)) = (self.shares_of(paper), self.group_index(group)) else {
            return 0.0;
        };
        g.iter().position(|&x| x as usize == target).map_or(0.0, |k| s[k])
    }

    pub fn paper_index(&self, paper: PaperId) -> Option<usize> {
        self.paper_ids.binary_search(&paper).ok()
    }

    pub fn n_papers(&self) -> usize {
        self.paper_ids.len()
    }

    /// Build the scheme of `kind`, clustering towns at `radius_km`.
    pub fn build(kind: GroupKind, dataset: &Dataset, radius_km: f64) -> Result<Self> {
        Ok(match kind {
            GroupKind::Institution => institution_shares(dataset),
            GroupKind::Town => town_shares(dataset, &cluster_towns(dataset.institutions(), radius_km)?),
            GroupKind::Country => country_shares(dataset),
            GroupKind::Continent => continent_shares(dataset),
            GroupKind::Journal => journal_shares(dataset),
            GroupKind::Gender => gender_shares(dataset),
        })
    }
}

/// Unnormalized institution weights of one dataset paper, as institution
/// index to weight. Each author link carries an equal part of the paper,
/// split evenly over its affiliations; links without affiliations drop out
/// and the rest is renormalized by the scheme.
///
/// Weights are `lcm / affiliations` over the least common multiple of the
/// affiliation counts, so they are integers and sum exactly.
fn institution_weights(dataset: &Dataset, paper: usize) -> Vec<(u32, f64)> {
    let p = &dataset.papers()[paper];
    let mut common: u64 = 1;
    for link in &p.authors {
        let k = link.affiliation_ids.len() as u64;
        if k > 0 {
            common = lcm(common, k).min(1 << 40);
        }
    }
    let mut out = Vec::new();
    for link in &p.authors {
        let part = common as f64 / link.affiliation_ids.len() as f64;
        for inst in &link.affiliation_ids {
            if let Some(i) = dataset.institution_index(*inst) {
                out.push((i as u32, part));
            }
        }
    }
    out
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

pub fn institution_shares(dataset: &Dataset) -> GroupingScheme {
    let ids = dataset.institutions().iter().map(|i| i.institution_id.0).collect();
    let labels = dataset.institutions().iter().map(|i| i.name.clone()).collect();
    GroupingScheme::from_weights(GroupKind::Institution, ids, labels, dataset, |p| {
        institution_weights(dataset, p)
    })
}

/// Institution weights mapped through `group_of` (institution index to
/// group index); unmapped institutions drop out.
fn mapped_scheme(
    kind: GroupKind,
    dataset: &Dataset,
    group_ids: Vec<u64>,
    labels: Vec<String>,
    group_of: &[Option<u32>],
) -> GroupingScheme {
    GroupingScheme::from_weights(kind, group_ids, labels, dataset, |p| {
        institution_weights(dataset, p)
            .into_iter()
            .filter_map(|(i, w)| group_of[i as usize].map(|g| (g, w)))
            .collect()
    })
}

pub fn town_shares(dataset: &Dataset, towns: &TownClusters) -> GroupingScheme {
    let ids = towns.towns.iter().map(|t| t.town_id).collect();
    let labels = towns.towns.iter().map(|t| t.name.clone()).collect();
    let group_of: Vec<Option<u32>> = towns.town_of.iter().map(|&t| Some(t)).collect();
    mapped_scheme(GroupKind::Town, dataset, ids, labels, &group_of)
}

/// Countries get ids `0..` in order of their codes.
pub fn country_shares(dataset: &Dataset) -> GroupingScheme {
    let codes: BTreeMap<&str, u32> = {
        let mut set: Vec<&str> = dataset
            .institutions()
            .iter()
            .filter_map(|i| i.country_code.as_deref())
            .collect();
        set.sort_unstable();
        set.dedup();
        set.into_iter().enumerate().map(|(k, c)| (c, k as u32)).collect()
    };
    let group_of: Vec<Option<u32>> = dataset
        .institutions()
        .iter()
        .map(|i| i.country_code.as_deref().map(|c| codes[c]))
        .collect();
    let ids = (0..codes.len() as u64).collect();
    let labels = codes.keys().map(|c| c.to_string()).collect();
    mapped_scheme(GroupKind::Country, dataset, ids, labels, &group_of)
}

/// Continents get ids by their position in [`Continent::ALL`].
pub fn continent_shares(dataset: &Dataset) -> GroupingScheme {
    let index = |c: Continent| Continent::ALL.iter().position(|&x| x == c).expect("listed continent") as u32;
    let group_of: Vec<Option<u32>> = dataset.institutions().iter().map(|i| i.continent.map(index)).collect();
    let ids = (0..Continent::ALL.len() as u64).collect();
    let labels = Continent::ALL.iter().map(|c| c.as_str().to_string()).collect();
    mapped_scheme(GroupKind::Continent, dataset, ids, labels, &group_of)
}

/// Each paper belongs wholly to its journal; papers without one go to the
/// [`UNPUBLISHED_JOURNAL`] bucket.
pub fn journal_shares(dataset: &Dataset) -> GroupingScheme {
    let mut ids: Vec<u64> = dataset.journals().keys().map(|j| j.0).collect();
    let mut labels: Vec<String> = dataset.journals().values().cloned().collect();
    ids.push(UNPUBLISHED_JOURNAL);
    labels.push("unpublished".into());
    let bucket = (ids.len() - 1) as u32;
    GroupingScheme::from_weights(GroupKind::Journal, ids.clone(), labels, dataset, |p| {
        let g = match dataset.papers()[p].journal_id {
            Some(j) => ids.binary_search(&j.0).map_or(bucket, |k| k as u32),
            None => bucket,
        };
        vec![(g, 1.0)]
    })
}

/// Papers split by the genders of their tagged authors; indeterminate and
/// untagged authors are ignored. Ids: 0 female, 1 male.
pub fn gender_shares(dataset: &Dataset) -> GroupingScheme {
    let ids = vec![0, 1];
    let labels = vec![Gender::Female.as_str().to_string(), Gender::Male.as_str().to_string()];
    GroupingScheme::from_weights(GroupKind::Gender, ids, labels, dataset, |p| {
        dataset.papers()[p]
            .resolved_authors()
            .filter_map(|a| match dataset.author(a)?.gender_tag? {
                Gender::Female => Some((0, 1.0)),
                Gender::Male => Some((1, 1.0)),
                Gender::Indeterminate => None,
            })
            .collect()
    })
}

fn grouped_kind(kind: MetricKind) -> Result<GroupedMetric> {
    Ok(match kind {
        MetricKind::Npap => GroupedMetric::Npap,
        MetricKind::Ncit => GroupedMetric::Ncit,
        MetricKind::Nicit => GroupedMetric::Nicit,
        MetricKind::PaperRank => GroupedMetric::PaperRank,
        MetricKind::AuthorRankOfPapers => GroupedMetric::AuthorRankOfPapers,
        MetricKind::CitationCoin => GroupedMetric::CitationCoin,
        other => {
            return Err(Error::InvalidParameter(format!(
                "{other:?} cannot be summed over groups"
            )))
        }
    })
}

/// Sum a paper metric over groups, weighting each paper by its shares.
/// Papers unknown to the scheme are skipped.
pub fn group_metric(scheme: &GroupingScheme, paper_metric: &MetricVector) -> Result<MetricVector> {
    if paper_metric.entity != Entity::Paper {
        return Err(Error::InvalidParameter("group metrics need a paper metric".into()));
    }
    let kind = grouped_kind(paper_metric.kind)?;
    let mut values = vec![0.0; scheme.n_groups()];
    for (id, x) in paper_metric.iter() {
        let Some((g, s)) = scheme.shares_of(PaperId(id)) else {
            continue;
        };
        for (&g, &s) in g.iter().zip(s) {
            values[g as usize] += s * x;
        }
    }
    Ok(
        MetricVector::new(MetricKind::Group(kind), Entity::Group, scheme.group_ids.clone(), values)
            .with_window(paper_metric.window)
            .with_params(paper_metric.params),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{ingest, IngestOptions};

    pub(crate) fn dataset(lines: &[&str]) -> Dataset {
        ingest(lines.join("\n").as_bytes(), IngestOptions::default()).unwrap().0
    }

    fn cern_paper() -> Dataset {
        dataset(&[
            r#"{"kind":"institution","id":1,"name":"CERN","country":"ch","continent":"europe"}"#,
            r#"{"kind":"institution","id":2,"name":"INFN-Pisa","country":"it","continent":"europe"}"#,
            r#"{"kind":"institution","id":3,"name":"Pisa U","country":"it","continent":"europe"}"#,
            r#"{"kind":"institution","id":4,"name":"INFN-Genova","country":"it","continent":"europe"}"#,
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"2018","authors":[{"id":1,"affiliations":[1,2,3]},{"id":2,"affiliations":[1,4]}]}"#,
        ])
    }

    #[test]
    fn two_author_affiliation_example() {
        let s = institution_shares(&cern_paper());
        let p = PaperId(1);
        assert!((s.share(p, 1) - 5.0 / 12.0).abs() < 1e-15);
        assert!((s.share(p, 4) - 0.25).abs() < 1e-15);
        assert!((s.share(p, 2) - 1.0 / 6.0).abs() < 1e-15);
        assert!((s.share(p, 3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn country_and_continent_follow_institutions() {
        let d = cern_paper();
        let c = country_shares(&d);
        assert_eq!(c.labels(), &["CH", "IT"]);
        assert!((c.share(PaperId(1), 0) - 5.0 / 12.0).abs() < 1e-15);
        assert!((c.share(PaperId(1), 1) - 7.0 / 12.0).abs() < 1e-15);
        let e = continent_shares(&d);
        let europe = Continent::ALL.iter().position(|&x| x == Continent::Europe).unwrap() as u64;
        assert!((e.share(PaperId(1), europe) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_affiliation_is_renormalized() {
        let d = dataset(&[
            r#"{"kind":"institution","id":1,"name":"A"}"#,
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"2018","authors":[{"id":1,"affiliations":[1]},{"id":2}]}"#,
            r#"{"kind":"paper","id":2,"date":"2018","authors":[{"id":2}]}"#,
        ]);
        let s = institution_shares(&d);
        assert_eq!(s.share(PaperId(1), 1), 1.0);
        assert_eq!(s.uncovered_papers, 1);
    }

    #[test]
    fn group_sum_of_icit() {
        let s = institution_shares(&cern_paper());
        let icit = MetricVector::new(MetricKind::Nicit, Entity::Paper, vec![1], vec![2.0]);
        let g = group_metric(&s, &icit).unwrap();
        assert!((g.get(1).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert!((g.sum() - 2.0).abs() < 1e-15);
        assert_eq!(g.kind, MetricKind::Group(GroupedMetric::Nicit));
        let h = MetricVector::new(MetricKind::HIndex, Entity::Author, vec![1], vec![2.0]);
        assert!(group_metric(&s, &h).is_err());
    }

    #[test]
    fn journals_and_genders() {
        let d = dataset(&[
            r#"{"kind":"journal","id":7,"name":"PRL"}"#,
            r#"{"kind":"author","id":1,"gender":"female"}"#,
            r#"{"kind":"author","id":2,"gender":"male"}"#,
            r#"{"kind":"author","id":3,"gender":"male"}"#,
            r#"{"kind":"author","id":4,"gender":"indeterminate"}"#,
            r#"{"kind":"paper","id":1,"date":"2018","journal":7,"authors":[{"id":1},{"id":2},{"id":3},{"id":4}]}"#,
            r#"{"kind":"paper","id":2,"date":"2018","authors":[{"id":4}]}"#,
        ]);
        let j = journal_shares(&d);
        assert_eq!(j.share(PaperId(1), 7), 1.0);
        assert_eq!(j.share(PaperId(2), UNPUBLISHED_JOURNAL), 1.0);
        let g = gender_shares(&d);
        assert!((g.share(PaperId(1), 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((g.share(PaperId(1), 1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.uncovered_papers, 1);
    }
}
