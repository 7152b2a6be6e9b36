//! Canonical in-memory bibliographic model, JSONL ingestion and export.
//!
//! A [`Dataset`] is only produced by [`ingest`] (or the equivalent
//! [`DatasetBuilder`]), which applies the cleaning rules: undated records are
//! dropped, references that do not resolve inside the dataset are removed
//! from the indexed list but stay counted in `declared_ref_count`, and
//! dangling author/affiliation/journal ids are cleared.

mod date;
mod ingest;
mod schema;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

pub use date::{resolve_date, DateCandidates, DateParseError, PaperDate};
pub use ingest::{ingest, DatasetBuilder, DropCounts, IngestOptions, IngestReport};
pub use schema::{AuthorLine, AuthorLinkLine, InstitutionLine, JournalLine, PaperLine, Record};

use crate::error::Result;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u64);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }

        impl From<$name> for u64 {
            fn from(id: $name) -> u64 {
                id.0
            }
        }
    };
}

id_type!(PaperId);
id_type!(AuthorId);
id_type!(InstitutionId);
id_type!(JournalId);

/// One author slot on a paper.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuthorLink {
    /// Absent for names that could not be resolved to an author record.
    pub author_id: Option<AuthorId>,
    pub affiliation_ids: Vec<InstitutionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub paper_id: PaperId,
    pub date: PaperDate,
    pub title: String,
    pub authors: Vec<AuthorLink>,
    pub journal_id: Option<JournalId>,
    pub collaboration: Option<String>,
    pub categories: Vec<String>,
    /// Size of the printed bibliography. Always `>= references.len()`.
    pub declared_ref_count: u32,
    /// Indexed references, sorted and unique, all resolvable in the dataset.
    pub references: Vec<PaperId>,
    pub published: bool,
}

impl PaperRecord {
    /// Number of resolved authors (`N_aut` for author-level sharing).
    pub fn author_count(&self) -> usize {
        self.authors.iter().filter(|a| a.author_id.is_some()).count()
    }

    pub fn resolved_authors(&self) -> impl Iterator<Item = AuthorId> + '_ {
        self.authors.iter().filter_map(|a| a.author_id)
    }

    pub fn has_category(&self, category: &str) -> bool {
        self.categories.iter().any(|c| c == category)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    Indeterminate,
}

impl Gender {
    pub fn as_str(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
            Gender::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorRecord {
    pub author_id: AuthorId,
    pub display_name: String,
    pub gender_tag: Option<Gender>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Continent {
    Africa,
    Antarctica,
    Asia,
    Europe,
    NorthAmerica,
    Oceania,
    SouthAmerica,
}

impl Continent {
    pub const ALL: [Continent; 7] = [
        Continent::Africa,
        Continent::Antarctica,
        Continent::Asia,
        Continent::Europe,
        Continent::NorthAmerica,
        Continent::Oceania,
        Continent::SouthAmerica,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Continent::Africa => "africa",
            Continent::Antarctica => "antarctica",
            Continent::Asia => "asia",
            Continent::Europe => "europe",
            Continent::NorthAmerica => "north_america",
            Continent::Oceania => "oceania",
            Continent::SouthAmerica => "south_america",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstitutionRecord {
    pub institution_id: InstitutionId,
    pub name: String,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    /// ISO-3166 alpha-2.
    pub country_code: Option<String>,
    pub continent: Option<Continent>,
}

impl InstitutionRecord {
    /// Both coordinates, when present and within range.
    pub fn coordinates(&self) -> Option<(f64, f64)> {
        match (self.latitude, self.longitude) {
            (Some(lat), Some(lon)) if valid_coordinates(lat, lon) => Some((lat, lon)),
            _ => None,
        }
    }
}

pub(crate) fn valid_coordinates(lat: f64, lon: f64) -> bool {
    lat.is_finite() && lon.is_finite() && (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)
}

/// A cleaned bibliographic database. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    papers: Vec<PaperRecord>,
    authors: Vec<AuthorRecord>,
    institutions: Vec<InstitutionRecord>,
    journals: BTreeMap<JournalId, String>,
    paper_index: HashMap<PaperId, u32>,
    author_index: HashMap<AuthorId, u32>,
    institution_index: HashMap<InstitutionId, u32>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.papers == other.papers
            && self.authors == other.authors
            && self.institutions == other.institutions
            && self.journals == other.journals
    }
}

impl Dataset {
    /// Assemble from records that are already sorted, unique and resolved.
    pub(crate) fn from_sorted_parts(
        papers: Vec<PaperRecord>,
        authors: Vec<AuthorRecord>,
        institutions: Vec<InstitutionRecord>,
        journals: BTreeMap<JournalId, String>,
    ) -> Self {
        let paper_index = papers.iter().enumerate().map(|(i, p)| (p.paper_id, i as u32)).collect();
        let author_index = authors
            .iter()
            .enumerate()
            .map(|(i, a)| (a.author_id, i as u32))
            .collect();
        let institution_index = institutions
            .iter()
            .enumerate()
            .map(|(i, r)| (r.institution_id, i as u32))
            .collect();
        Dataset {
            papers,
            authors,
            institutions,
            journals,
            paper_index,
            author_index,
            institution_index,
        }
    }

    /// Papers sorted by id.
    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    /// Authors sorted by id.
    pub fn authors(&self) -> &[AuthorRecord] {
        &self.authors
    }

    /// Institutions sorted by id.
    pub fn institutions(&self) -> &[InstitutionRecord] {
        &self.institutions
    }

    pub fn journals(&self) -> &BTreeMap<JournalId, String> {
        &self.journals
    }

    pub fn paper_index(&self, id: PaperId) -> Option<usize> {
        self.paper_index.get(&id).map(|&i| i as usize)
    }

    pub fn paper(&self, id: PaperId) -> Option<&PaperRecord> {
        self.paper_index(id).map(|i| &self.papers[i])
    }

    pub fn author_index(&self, id: AuthorId) -> Option<usize> {
        self.author_index.get(&id).map(|&i| i as usize)
    }

    pub fn author(&self, id: AuthorId) -> Option<&AuthorRecord> {
        self.author_index(id).map(|i| &self.authors[i])
    }

    pub fn institution_index(&self, id: InstitutionId) -> Option<usize> {
        self.institution_index.get(&id).map(|&i| i as usize)
    }

    pub fn institution(&self, id: InstitutionId) -> Option<&InstitutionRecord> {
        self.institution_index(id).map(|i| &self.institutions[i])
    }

    pub fn journal_name(&self, id: JournalId) -> Option<&str> {
        self.journals.get(&id).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty() && self.authors.is_empty() && self.institutions.is_empty() && self.journals.is_empty()
    }

    /// Write the dataset as canonical JSONL: journals, institutions, authors
    /// then papers, each sorted by id. The output is byte-stable.
    pub fn export_canonical<W: Write>(&self, sink: W) -> Result<()> {
        export_canonical(self, sink)
    }
}

/// Write `dataset` as canonical JSONL. See [`Dataset::export_canonical`].
pub fn export_canonical<W: Write>(dataset: &Dataset, sink: W) -> Result<()> {
    let mut sink = std::io::BufWriter::new(sink);
    let mut write = |record: &Record| -> Result<()> {
        serde_json::to_writer(&mut sink, record).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
        Ok(())
    };
    for (id, name) in &dataset.journals {
        write(&Record::Journal(JournalLine::from_parts(*id, name)))?;
    }
    for inst in &dataset.institutions {
        write(&Record::Institution(InstitutionLine::from(inst)))?;
    }
    for author in &dataset.authors {
        write(&Record::Author(AuthorLine::from(author)))?;
    }
    for paper in &dataset.papers {
        write(&Record::Paper(PaperLine::from(paper)))?;
    }
    sink.flush()?;
    Ok(())
}
