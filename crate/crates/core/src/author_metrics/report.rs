use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::Authorship;
use crate::citegraph::CitationGraph;
use crate::dataset::{AuthorId, Dataset};
use crate::error::{Error, Result};
use crate::metric::MetricVector;
use crate::paper_metrics::check_declared;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YearActivity {
    pub year: i32,
    pub papers: usize,
    pub individual_papers: f64,
    /// Citations received by the papers written that year.
    pub citations: usize,
    pub individual_citations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoAuthorFlow {
    pub author_id: u64,
    pub name: String,
    pub individual_citations: f64,
}

/// Profile of one author.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorReport {
    pub author_id: u64,
    pub name: String,
    pub gender: Option<&'static str>,
    pub metrics: BTreeMap<String, f64>,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
    /// Years from first to last paper, inclusive.
    pub scientific_age: i32,
    pub yearly: Vec<YearActivity>,
    /// Share of the individual citations given that go to the author's own
    /// papers, in percent.
    pub self_citations_given_pct: Option<f64>,
    /// Share of the individual citations received that come from the
    /// author's own papers, in percent.
    pub self_citations_received_pct: Option<f64>,
    pub top_citers: Vec<CoAuthorFlow>,
    pub top_citees: Vec<CoAuthorFlow>,
}

/// Build the profile of `author`. `metrics` supplies named author vectors
/// to quote; `top` bounds the citer and citee lists.
pub fn author_report(
    dataset: &Dataset,
    graph: &CitationGraph,
    authorship: &Authorship,
    author: AuthorId,
    metrics: &[(&str, &MetricVector)],
    top: usize,
) -> Result<AuthorReport> {
    check_declared(graph)?;
    let record = dataset
        .author(author)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown author {author}")))?;
    let a = authorship
        .author_index(author)
        .ok_or_else(|| Error::InvalidParameter(format!("author {author} not in graph")))?;

    let mut yearly: BTreeMap<i32, YearActivity> = BTreeMap::new();
    let mut citers: HashMap<u32, f64> = HashMap::new();
    let mut citees: HashMap<u32, f64> = HashMap::new();
    for &v in authorship.papers_of(a) {
        let v = v as usize;
        let n_aut = authorship.n_aut(v) as f64;
        let year = graph.year(v);
        let entry = yearly.entry(year).or_insert(YearActivity {
            year,
            papers: 0,
            individual_papers: 0.0,
            citations: 0,
            individual_citations: 0.0,
        });
        entry.papers += 1;
        entry.individual_papers += 1.0 / n_aut;
        entry.citations += graph.n_cit(v);

        for &c in graph.citers(v) {
            let c = c as usize;
            let share = 1.0 / (graph.declared_ref_count(c) as f64 * n_aut);
            entry.individual_citations += share;
            let k = authorship.n_aut(c) as f64;
            for &b in authorship.authors_of(c) {
                *citers.entry(b).or_default() += share / k;
            }
        }
        if graph.declared_ref_count(v) > 0 {
            let base = 1.0 / (graph.declared_ref_count(v) as f64 * n_aut);
            for &r in graph.references(v) {
                let r = r as usize;
                let k = authorship.n_aut(r) as f64;
                for &b in authorship.authors_of(r) {
                    *citees.entry(b).or_default() += base / k;
                }
            }
        }
    }

    let own = a as u32;
    let pct = |flows: &HashMap<u32, f64>| {
        let total: f64 = sorted_values(flows).iter().sum();
        (total > 0.0).then(|| 100.0 * flows.get(&own).copied().unwrap_or(0.0) / total)
    };
    let ranked = |flows: &HashMap<u32, f64>| -> Vec<CoAuthorFlow> {
        let mut list: Vec<(u32, f64)> = flows.iter().filter(|(&b, _)| b != own).map(|(&b, &w)| (b, w)).collect();
        list.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        list.truncate(top);
        list.into_iter()
            .map(|(b, w)| {
                let rec = &dataset.authors()[b as usize];
                CoAuthorFlow {
                    author_id: rec.author_id.0,
                    name: rec.display_name.clone(),
                    individual_citations: w,
                }
            })
            .collect()
    };

    let first_year = yearly.keys().next().copied();
    let last_year = yearly.keys().next_back().copied();
    Ok(AuthorReport {
        author_id: author.0,
        name: record.display_name.clone(),
        gender: record.gender_tag.map(|g| g.as_str()),
        metrics: metrics
            .iter()
            .filter_map(|(name, m)| m.get(author.0).map(|x| (name.to_string(), x)))
            .collect(),
        first_year,
        last_year,
        scientific_age: match (first_year, last_year) {
            (Some(f), Some(l)) => l - f + 1,
            _ => 0,
        },
        yearly: yearly.into_values().collect(),
        self_citations_given_pct: pct(&citees),
        self_citations_received_pct: pct(&citers),
        top_citers: ranked(&citers),
        top_citees: ranked(&citees),
    })
}

/// Values in key order, so that sums do not depend on hash order.
fn sorted_values(map: &HashMap<u32, f64>) -> Vec<f64> {
    let mut entries: Vec<(u32, f64)> = map.iter().map(|(&k, &v)| (k, v)).collect();
    entries.sort_by_key(|e| e.0);
    entries.into_iter().map(|e| e.1).collect()
}
