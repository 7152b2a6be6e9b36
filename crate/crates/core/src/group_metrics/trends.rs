use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::{GroupKind, GroupingScheme};
use crate::citegraph::CitationGraph;
use crate::dataset::{AuthorId, Dataset, Gender, PaperId, PaperRecord};
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricVector};

/// Yearly averages over the papers written that year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub year: i32,
    pub papers: usize,
    pub mean_declared_refs: f64,
    pub mean_authors: f64,
    pub mean_citations: f64,
    /// Citations from published papers only.
    pub mean_published_citations: f64,
    /// Authors active this year but not the year before, in percent of
    /// this year's active authors. Absent for the first year.
    pub author_births_pct: Option<f64>,
    /// Authors active the year before but not this year, in percent of the
    /// previous year's active authors. Absent for the first year.
    pub author_deaths_pct: Option<f64>,
}

#[derive(Default)]
struct YearTally {
    papers: usize,
    declared_refs: f64,
    authors: f64,
    citations: f64,
    published_citations: f64,
    active: HashSet<AuthorId>,
}

/// One row per year from the first to the last paper of `graph`, empty
/// years included. With `category`, only papers of that category count,
/// both as subjects and for author activity; citations may come from any
/// paper in the graph.
pub fn trend_series(dataset: &Dataset, graph: &CitationGraph, category: Option<&str>) -> Vec<TrendRow> {
    let papers = dataset.papers();
    let keep = |p: &PaperRecord| category.is_none_or(|c| p.has_category(c));
    let mut by_year: BTreeMap<i32, YearTally> = BTreeMap::new();
    for v in 0..graph.n_papers() {
        let paper = &papers[graph.dataset_index(v)];
        if !keep(paper) {
            continue;
        }
        let row = by_year.entry(paper.date.year).or_default();
        row.papers += 1;
        row.declared_refs += paper.declared_ref_count as f64;
        row.authors += paper.authors.len() as f64;
        row.citations += graph.n_cit(v) as f64;
        row.published_citations += graph
            .citers(v)
            .iter()
            .filter(|&&c| papers[graph.dataset_index(c as usize)].published)
            .count() as f64;
        row.active.extend(paper.resolved_authors());
    }
    let (Some(&first), Some(&last)) = (by_year.keys().next(), by_year.keys().next_back()) else {
        return Vec::new();
    };

    let empty = HashSet::new();
    let mut rows = Vec::with_capacity((last - first + 1) as usize);
    for year in first..=last {
        let active = by_year.get(&year).map_or(&empty, |r| &r.active);
        let (births, deaths) = if year == first {
            (None, None)
        } else {
            let before = by_year.get(&(year - 1)).map_or(&empty, |r| &r.active);
            let pct = |part: usize, whole: usize| {
                if whole == 0 {
                    0.0
                } else {
                    100.0 * part as f64 / whole as f64
                }
            };
            (
                Some(pct(active.difference(before).count(), active.len())),
                Some(pct(before.difference(active).count(), before.len())),
            )
        };
        let row = match by_year.get(&year) {
            Some(t) => {
                let n_f = t.papers as f64;
                TrendRow {
                    year,
                    papers: t.papers,
                    mean_declared_refs: t.declared_refs / n_f,
                    mean_authors: t.authors / n_f,
                    mean_citations: t.citations / n_f,
                    mean_published_citations: t.published_citations / n_f,
                    author_births_pct: births,
                    author_deaths_pct: deaths,
                }
            }
            None => TrendRow {
                year,
                papers: 0,
                mean_declared_refs: 0.0,
                mean_authors: 0.0,
                mean_citations: 0.0,
                mean_published_citations: 0.0,
                author_births_pct: births,
                author_deaths_pct: deaths,
            },
        };
        rows.push(row);
    }
    rows
}

/// Yearly share of a paper metric per group, among papers written that
/// year.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub kind: GroupKind,
    pub years: Vec<i32>,
    pub group_ids: Vec<u64>,
    pub labels: Vec<String>,
    /// `percent[g][y]`: group `g`'s percentage of the world total in
    /// `years[y]`.
    pub percent: Vec<Vec<f64>>,
    /// World total per year.
    pub world: Vec<f64>,
}

/// Percentages of a paper metric per group and year. With `category`, the
/// world is the papers of that category.
pub fn timeseries(
    scheme: &GroupingScheme,
    dataset: &Dataset,
    paper_metric: &MetricVector,
    category: Option<&str>,
) -> Result<TimeSeries> {
    if paper_metric.entity != Entity::Paper {
        return Err(Error::InvalidParameter("time series need a paper metric".into()));
    }
    let mut per_year: BTreeMap<i32, (f64, Vec<f64>)> = BTreeMap::new();
    for (id, x) in paper_metric.iter() {
        let Some(paper) = dataset.paper(PaperId(id)) else {
            continue;
        };
        if category.is_some_and(|c| !paper.has_category(c)) {
            continue;
        }
        let row = per_year
            .entry(paper.date.year)
            .or_insert_with(|| (0.0, vec![0.0; scheme.n_groups()]));
        row.0 += x;
        if let Some((g, s)) = scheme.shares_of(PaperId(id)) {
            for (&g, &s) in g.iter().zip(s) {
                row.1[g as usize] += s * x;
            }
        }
    }
    let years: Vec<i32> = per_year.keys().copied().collect();
    let world: Vec<f64> = per_year.values().map(|r| r.0).collect();
    let percent = (0..scheme.n_groups())
        .map(|g| {
            per_year
                .values()
                .map(|(w, v)| if *w != 0.0 { 100.0 * v[g] / w } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(TimeSeries {
        kind: scheme.kind,
        years,
        group_ids: scheme.group_ids().to_vec(),
        labels: scheme.labels().to_vec(),
        percent,
        world,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderShare {
    pub metric: String,
    pub female_pct: f64,
    pub male_pct: f64,
}

/// Gender balance among authors tagged female or male.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenderStats {
    pub tagged_authors: usize,
    pub female_authors_pct: Option<f64>,
    pub shares: Vec<GenderShare>,
    /// Female percentage of the individual citations received by tagged
    /// authors, by year of the cited paper.
    pub female_icit_by_year: Vec<(i32, f64)>,
}

/// `author_metrics` are split by the gender of each author;
/// `paper_icit` (individual citations per paper) gives the yearly series,
/// each paper's value shared equally among its authors.
pub fn gender_stats(
    dataset: &Dataset,
    author_metrics: &[(&str, &MetricVector)],
    paper_icit: &MetricVector,
    category: Option<&str>,
) -> GenderStats {
    let gender_of = |a: AuthorId| match dataset.author(a).and_then(|r| r.gender_tag) {
        Some(Gender::Female) => Some(true),
        Some(Gender::Male) => Some(false),
        _ => None,
    };
    let tagged: Vec<(u64, bool)> = dataset
        .authors()
        .iter()
        .filter_map(|a| gender_of(a.author_id).map(|f| (a.author_id.0, f)))
        .collect();
    if tagged.is_empty() {
        return GenderStats {
            tagged_authors: 0,
            female_authors_pct: None,
            shares: Vec::new(),
            female_icit_by_year: Vec::new(),
        };
    }
    let females = tagged.iter().filter(|t| t.1).count();
    let shares = author_metrics
        .iter()
        .map(|(name, m)| {
            let (mut f, mut male) = (0.0, 0.0);
            for &(id, is_f) in &tagged {
                let x = m.get(id).unwrap_or(0.0);
                if is_f {
                    f += x;
                } else {
                    male += x;
                }
            }
            let total = f + male;
            let pct = |x: f64| if total != 0.0 { 100.0 * x / total } else { 0.0 };
            GenderShare {
                metric: name.to_string(),
                female_pct: pct(f),
                male_pct: pct(male),
            }
        })
        .collect();

    let mut by_year: BTreeMap<i32, (f64, f64)> = BTreeMap::new();
    for (id, x) in paper_icit.iter() {
        let Some(paper) = dataset.paper(PaperId(id)) else {
            continue;
        };
        if category.is_some_and(|c| !paper.has_category(c)) {
            continue;
        }
        let n = paper.author_count();
        if n == 0 {
            continue;
        }
        let part = x / n as f64;
        let row = by_year.entry(paper.date.year).or_default();
        for a in paper.resolved_authors() {
            match gender_of(a) {
                Some(true) => {
                    row.0 += part;
                    row.1 += part;
                }
                Some(false) => row.1 += part,
                None => {}
            }
        }
    }
    GenderStats {
        tagged_authors: tagged.len(),
        female_authors_pct: Some(100.0 * females as f64 / tagged.len() as f64),
        shares,
        female_icit_by_year: by_year
            .into_iter()
            .filter(|(_, r)| r.1 > 0.0)
            .map(|(y, r)| (y, 100.0 * r.0 / r.1))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citegraph::build_graph;
    use crate::group_metrics::{institution_shares, tests::dataset};
    use crate::metric::MetricKind;

    #[test]
    fn mean_references_in_a_single_year() {
        let d = dataset(&[
            r#"{"kind":"paper","id":1,"date":"2000","declared_ref_count":4}"#,
            r#"{"kind":"paper","id":2,"date":"2000","declared_ref_count":6}"#,
        ]);
        let (g, _) = build_graph(&d, &Default::default());
        let rows = trend_series(&d, &g, None);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_declared_refs, 5.0);
    }

    #[test]
    fn births_and_deaths_by_year_pairs() {
        let d = dataset(&[
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"2000","authors":[{"id":2}]}"#,
            r#"{"kind":"paper","id":2,"date":"2001","authors":[{"id":1},{"id":2}]}"#,
            r#"{"kind":"paper","id":3,"date":"2003","authors":[{"id":1}]}"#,
            r#"{"kind":"paper","id":4,"date":"2004","authors":[{"id":2}]}"#,
        ]);
        let (g, _) = build_graph(&d, &Default::default());
        let rows = trend_series(&d, &g, None);
        let years: Vec<i32> = rows.iter().map(|r| r.year).collect();
        assert_eq!(years, vec![2000, 2001, 2002, 2003, 2004]);
        // Author 1 is born in 2001 and 2003 and dies in 2002 and 2004.
        assert_eq!(rows[1].author_births_pct, Some(50.0));
        assert_eq!(rows[2].papers, 0);
        assert_eq!(rows[2].author_deaths_pct, Some(100.0));
        assert_eq!(rows[3].author_births_pct, Some(100.0));
        assert_eq!(rows[4].author_deaths_pct, Some(100.0));
        assert_eq!(rows[0].author_births_pct, None);
    }

    #[test]
    fn timeseries_percentages_sum_to_hundred() {
        let d = dataset(&[
            r#"{"kind":"institution","id":1,"name":"A"}"#,
            r#"{"kind":"institution","id":2,"name":"B"}"#,
            r#"{"kind":"author","id":1}"#,
            r#"{"kind":"author","id":2}"#,
            r#"{"kind":"paper","id":1,"date":"2000","authors":[{"id":1,"affiliations":[1]},{"id":2,"affiliations":[2]}]}"#,
            r#"{"kind":"paper","id":2,"date":"2000","authors":[{"id":2,"affiliations":[2]}]}"#,
        ]);
        let s = institution_shares(&d);
        let m = MetricVector::new(MetricKind::Nicit, Entity::Paper, vec![1, 2], vec![2.0, 2.0]);
        let t = timeseries(&s, &d, &m, None).unwrap();
        assert_eq!(t.years, vec![2000]);
        assert_eq!(t.percent[0][0], 25.0);
        assert_eq!(t.percent[1][0], 75.0);
    }

    #[test]
    fn gender_shares_of_icit() {
        let d = dataset(&[
            r#"{"kind":"author","id":1,"gender":"female"}"#,
            r#"{"kind":"author","id":2,"gender":"male"}"#,
            r#"{"kind":"author","id":3}"#,
            r#"{"kind":"paper","id":1,"date":"2000","authors":[{"id":1},{"id":2}]}"#,
        ]);
        let icit = MetricVector::new(MetricKind::Nicit, Entity::Author, vec![1, 2, 3], vec![3.0, 1.0, 9.0]);
        let paper = MetricVector::new(MetricKind::Nicit, Entity::Paper, vec![1], vec![2.0]);
        let g = gender_stats(&d, &[("nicit", &icit)], &paper, None);
        assert_eq!(g.tagged_authors, 2);
        assert_eq!(g.shares[0].female_pct, 75.0);
        assert_eq!(g.shares[0].female_pct + g.shares[0].male_pct, 100.0);
        assert_eq!(g.female_icit_by_year, vec![(2000, 50.0)]);

        let none = dataset(&[r#"{"kind":"author","id":1}"#]);
        assert_eq!(gender_stats(&none, &[], &paper, None).tagged_authors, 0);
    }
}
