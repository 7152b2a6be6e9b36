//! Seeded synthetic datasets with realistic shape: exponential growth in
//! papers per year, Poisson bibliographies with a small external part,
//! preferential attachment of citations, recurring co-authors, and
//! geolocated institutions.

use std::io::Write;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::dataset::{
    AuthorLine, AuthorLinkLine, Continent, Dataset, DatasetBuilder, Gender, IngestOptions, IngestReport,
    InstitutionLine, JournalLine, PaperLine, Record,
};
use crate::error::{Error, Result};

/// Generator settings. Paper ids run `1..=n_papers` in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub seed: u64,
    pub n_papers: usize,
    pub start_year: i32,
    pub n_years: u32,
    /// Yearly growth rate of the number of papers.
    pub growth_rate: f64,
    /// Mean declared bibliography size.
    pub refs_mean: f64,
    /// Probability that a declared reference points outside the dataset.
    pub external_fraction: f64,
    /// Probability that a citation follows earlier citations rather than
    /// picking a uniformly random older paper.
    pub attachment: f64,
    pub authors_mean: f64,
    /// Probability that an author slot is filled by a newcomer.
    pub new_author_prob: f64,
    /// Recent author slots eligible for reuse.
    pub author_window: usize,
    /// Probability that a paper also cites one strictly newer paper.
    pub acausal_fraction: f64,
    pub published_fraction: f64,
    pub n_institutions: Option<usize>,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            seed: 1,
            n_papers: 1000,
            start_year: 1970,
            n_years: 50,
            growth_rate: 0.05,
            refs_mean: 20.0,
            external_fraction: 0.05,
            attachment: 0.8,
            authors_mean: 2.25,
            new_author_prob: 0.07,
            author_window: 2000,
            acausal_fraction: 0.0,
            published_fraction: 0.7,
            n_institutions: None,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.n_papers == 0 {
            problems.push("n_papers must be at least 1".to_string());
        }
        if self.n_papers >= u32::MAX as usize {
            problems.push("n_papers must fit in 32 bits".to_string());
        }
        if self.n_years == 0 {
            problems.push("n_years must be at least 1".to_string());
        }
        if !(self.growth_rate >= 0.0 && self.growth_rate.is_finite()) {
            problems.push("growth_rate must be nonnegative".to_string());
        }
        if !(self.refs_mean >= 0.0 && self.refs_mean.is_finite()) {
            problems.push("refs_mean must be nonnegative".to_string());
        }
        if !(self.authors_mean >= 1.0 && self.authors_mean.is_finite()) {
            problems.push("authors_mean must be at least 1".to_string());
        }
        for (name, x) in [
            ("external_fraction", self.external_fraction),
            ("attachment", self.attachment),
            ("new_author_prob", self.new_author_prob),
            ("acausal_fraction", self.acausal_fraction),
            ("published_fraction", self.published_fraction),
        ] {
            if !unit(x) {
                problems.push(format!("{name} must lie in [0, 1]"));
            }
        }
        if self.author_window == 0 {
            problems.push("author_window must be at least 1".to_string());
        }
        if self.n_institutions == Some(0) {
            problems.push("n_institutions must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }

    fn institutions(&self) -> usize {
        self.n_institutions.unwrap_or((self.n_papers / 100).clamp(5, 5000))
    }

    /// Year of the paper at `index`, so that yearly counts grow at
    /// `growth_rate` over `n_years`.
    fn year_of(&self, index: usize) -> i32 {
        let f = index as f64 / self.n_papers as f64;
        let span = self.n_years as f64;
        let k = if self.growth_rate == 0.0 {
            f * span
        } else {
            let g = self.growth_rate;
            (1.0 + f * ((g * span).exp() - 1.0)).ln() / g
        };
        self.start_year + (k.floor() as i32).min(self.n_years as i32 - 1)
    }
}

const COUNTRIES: &[(&str, Continent, f64, f64)] = &[
    ("US", Continent::NorthAmerica, 39.0, -98.0),
    ("CA", Continent::NorthAmerica, 50.0, -100.0),
    ("BR", Continent::SouthAmerica, -15.0, -50.0),
    ("GB", Continent::Europe, 53.0, -1.5),
    ("DE", Continent::Europe, 51.0, 10.0),
    ("FR", Continent::Europe, 46.5, 2.5),
    ("IT", Continent::Europe, 42.5, 12.5),
    ("CH", Continent::Europe, 46.8, 8.2),
    ("RU", Continent::Europe, 55.7, 37.6),
    ("JP", Continent::Asia, 36.0, 138.0),
    ("CN", Continent::Asia, 35.0, 105.0),
    ("IN", Continent::Asia, 22.0, 79.0),
    ("ZA", Continent::Africa, -29.0, 24.0),
    ("AU", Continent::Oceania, -25.0, 134.0),
];

const CATEGORIES: &[&str] = &["hep-ph", "hep-th", "hep-ex", "astro-ph", "gr-qc", "nucl-th"];
const N_JOURNALS: u64 = 12;

struct Author {
    affiliations: Vec<u64>,
    gender: Option<Gender>,
}

/// Skewed pick in `0..n`: low indices are more likely.
fn skewed(rng: &mut ChaCha8Rng, n: usize) -> usize {
    let u: f64 = rng.random();
    ((u * u * n as f64) as usize).min(n - 1)
}

/// Generate the dataset as canonical records, handing each to `emit` in
/// the order journals, institutions, authors, papers.
pub fn generate_records(params: &SynthParams, mut emit: impl FnMut(Record) -> Result<()>) -> Result<()> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_papers;

    for j in 1..=N_JOURNALS {
        emit(Record::Journal(JournalLine {
            id: j,
            name: format!("Journal {j}"),
        }))?;
    }

    let n_inst = params.institutions();
    let n_cities = n_inst.div_ceil(4).max(1);
    let cities: Vec<(usize, f64, f64)> = (0..n_cities)
        .map(|_| {
            let c = skewed(&mut rng, COUNTRIES.len());
            let (_, _, lat, lon) = COUNTRIES[c];
            (c, lat + rng.random_range(-4.0..4.0), lon + rng.random_range(-4.0..4.0))
        })
        .collect();
    for i in 0..n_inst {
        let (c, lat, lon) = cities[skewed(&mut rng, n_cities)];
        let (code, continent, _, _) = COUNTRIES[c];
        let located = rng.random_bool(0.97);
        let jitter_lat: f64 = rng.random_range(-0.1..0.1);
        let jitter_lon: f64 = rng.random_range(-0.1..0.1);
        emit(Record::Institution(InstitutionLine {
            id: i as u64 + 1,
            name: format!("Institute {}", i + 1),
            lat: located.then_some(lat + jitter_lat),
            lon: located.then_some(lon + jitter_lon),
            country: Some(code.to_string()),
            continent: Some(continent),
        }))?;
    }

    // References: drawn first so that acausal ones can point forward.
    let refs_dist = Poisson::new(params.refs_mean.max(1e-12)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let extra_authors =
        Poisson::new((params.authors_mean - 1.0).max(1e-12)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut urn: Vec<u32> = Vec::new();
    let mut ref_offsets: Vec<usize> = Vec::with_capacity(n + 1);
    let mut refs: Vec<u32> = Vec::new();
    let mut declared: Vec<u32> = Vec::with_capacity(n);
    ref_offsets.push(0);
    let mut picked: Vec<u32> = Vec::new();
    for i in 0..n {
        let d = if params.refs_mean > 0.0 {
            refs_dist.sample(&mut rng) as u32
        } else {
            0
        };
        let wanted = (0..d)
            .filter(|_| !rng.random_bool(params.external_fraction))
            .count()
            .min(i);
        picked.clear();
        let mut attempts = 0;
        while picked.len() < wanted && attempts < 20 * wanted + 20 {
            attempts += 1;
            let target = if !urn.is_empty() && rng.random_bool(params.attachment) {
                *urn.choose(&mut rng).expect("nonempty urn")
            } else {
                rng.random_range(0..i as u32)
            };
            if !picked.contains(&target) {
                picked.push(target);
            }
        }
        let mut count = d.max(picked.len() as u32);
        if i + 1 < n && params.acausal_fraction > 0.0 && rng.random_bool(params.acausal_fraction) {
            picked.push(rng.random_range(i as u32 + 1..n as u32));
            count += 1;
        }
        urn.extend(picked.iter().filter(|&&t| (t as usize) < i));
        picked.sort_unstable();
        refs.extend_from_slice(&picked);
        ref_offsets.push(refs.len());
        declared.push(count);
    }
    drop(urn);

    // Authors.
    let mut authors: Vec<Author> = Vec::new();
    let mut recent: Vec<u32> = Vec::with_capacity(params.author_window);
    let mut recent_next = 0usize;
    let mut paper_authors: Vec<Vec<Option<u32>>> = Vec::with_capacity(n);
    for _ in 0..n {
        let k = 1 + extra_authors.sample(&mut rng) as usize;
        let mut list: Vec<Option<u32>> = Vec::with_capacity(k);
        for _ in 0..k {
            if rng.random_bool(0.01) {
                list.push(None);
                continue;
            }
            let mut chosen = None;
            if !recent.is_empty() && !rng.random_bool(params.new_author_prob) {
                let a = *recent.choose(&mut rng).expect("nonempty window");
                if !list.contains(&Some(a)) {
                    chosen = Some(a);
                }
            }
            let a = match chosen {
                Some(a) => a,
                None => {
                    let home = skewed(&mut rng, n_inst) as u64 + 1;
                    let mut affiliations = vec![home];
                    if rng.random_bool(0.15) {
                        let other = rng.random_range(1..=n_inst as u64);
                        if other != home {
                            affiliations.push(other);
                        }
                    }
                    let u: f64 = rng.random();
                    let gender = if u < 0.15 {
                        Some(Gender::Female)
                    } else if u < 0.6 {
                        Some(Gender::Male)
                    } else if u < 0.85 {
                        Some(Gender::Indeterminate)
                    } else {
                        None
                    };
                    authors.push(Author { affiliations, gender });
                    (authors.len() - 1) as u32
                }
            };
            list.push(Some(a));
            if recent.len() < params.author_window {
                recent.push(a);
            } else {
                recent[recent_next] = a;
                recent_next = (recent_next + 1) % params.author_window;
            }
        }
        paper_authors.push(list);
    }

    for (a, author) in authors.iter().enumerate() {
        emit(Record::Author(AuthorLine {
            id: a as u64 + 1,
            name: format!("Author {}", a + 1),
            gender: author.gender,
        }))?;
    }

    for i in 0..n {
        let month: u8 = rng.random_range(1..=12);
        let published = rng.random_bool(params.published_fraction);
        let journal = published.then(|| skewed(&mut rng, N_JOURNALS as usize) as u64 + 1);
        let category = CATEGORIES[skewed(&mut rng, CATEGORIES.len())];
        let links = paper_authors[i]
            .iter()
            .map(|a| match a {
                Some(a) => AuthorLinkLine {
                    id: Some(*a as u64 + 1),
                    affiliations: authors[*a as usize].affiliations.clone(),
                },
                None => AuthorLinkLine::default(),
            })
            .collect();
        emit(Record::Paper(PaperLine {
            id: i as u64 + 1,
            date: Some(format!("{:04}-{:02}", params.year_of(i), month)),
            dates: None,
            title: format!("Synthetic paper {}", i + 1),
            authors: links,
            journal,
            collaboration: None,
            categories: vec![category.to_string()],
            declared_ref_count: Some(declared[i]),
            references: refs[ref_offsets[i]..ref_offsets[i + 1]]
                .iter()
                .map(|&t| t as u64 + 1)
                .collect(),
            published,
        }))?;
    }
    Ok(())
}

/// Write the dataset as canonical JSONL.
pub fn write_fixture<W: Write>(params: &SynthParams, mut sink: W) -> Result<()> {
    generate_records(params, |record| {
        serde_json::to_writer(&mut sink, &record).map_err(|e| Error::Io(e.into()))?;
        sink.write_all(b"\n")?;
        Ok(())
    })?;
    sink.flush()?;
    Ok(())
}

/// Build the dataset in memory, bypassing JSON.
pub fn generate(params: &SynthParams) -> Result<(Dataset, IngestReport)> {
    let options = IngestOptions {
        strict: true,
        min_year: i32::MIN,
        max_year: i32::MAX,
    };
    let mut builder = DatasetBuilder::new(options);
    generate_records(params, |record| builder.push_record(record))?;
    Ok(builder.finish())
}
