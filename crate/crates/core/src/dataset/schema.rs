//! Line types of the canonical JSONL format.
//!
//! Every line is one JSON object with a `kind` discriminator:
//!
//! ```text
//! {"kind":"journal","id":3,"name":"JHEP"}
//! {"kind":"institution","id":1,"name":"CERN","lat":46.23,"lon":6.05,"country":"CH","continent":"europe"}
//! {"kind":"author","id":5,"name":"A. Author","gender":"female"}
//! {"kind":"paper","id":10,"date":"1998-01","title":"...","authors":[{"id":5,"affiliations":[1]}],
//!  "journal":3,"categories":["hep-th"],"declared_ref_count":4,"references":[2,3],"published":true}
//! ```
//!
//! Input papers may carry `dates` (`earliest`/`preprint`/`publication`/`added`)
//! instead of a single `date`; export always writes the resolved `date`.

use serde::{Deserialize, Serialize};

use super::{
    AuthorId, AuthorLink, AuthorRecord, Continent, DateCandidates, Gender, InstitutionId, InstitutionRecord, JournalId,
    PaperId, PaperRecord,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Paper(PaperLine),
    Author(AuthorLine),
    Institution(InstitutionLine),
    Journal(JournalLine),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperLine {
    pub id: u64,
    /// Resolved date; takes precedence over `dates`. Kept as text so that an
    /// unparseable value counts as a bad date rather than a malformed line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dates: Option<RawDates>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub authors: Vec<AuthorLinkLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collaboration: Option<String>,
    #[serde(default)]
    pub categories: Vec<String>,
    /// Defaults to the number of listed references.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_ref_count: Option<u32>,
    #[serde(default)]
    pub references: Vec<u64>,
    #[serde(default)]
    pub published: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub earliest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preprint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publication: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<String>,
}

impl RawDates {
    /// Parse every present candidate; any unparseable value is an error.
    pub fn parse(&self) -> Result<DateCandidates, super::DateParseError> {
        let parse = |s: &Option<String>| s.as_deref().map(str::parse).transpose();
        Ok(DateCandidates {
            earliest: parse(&self.earliest)?,
            preprint: parse(&self.preprint)?,
            publication: parse(&self.publication)?,
            added: parse(&self.added)?,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorLinkLine {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(default)]
    pub affiliations: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorLine {
    pub id: u64,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionLine {
    pub id: u64,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continent: Option<Continent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalLine {
    pub id: u64,
    #[serde(default)]
    pub name: String,
}

impl JournalLine {
    pub(crate) fn from_parts(id: JournalId, name: &str) -> Self {
        JournalLine {
            id: id.0,
            name: name.to_string(),
        }
    }
}

impl From<&PaperRecord> for PaperLine {
    fn from(p: &PaperRecord) -> Self {
        PaperLine {
            id: p.paper_id.0,
            date: Some(p.date.to_string()),
            dates: None,
            title: p.title.clone(),
            authors: p
                .authors
                .iter()
                .map(|a| AuthorLinkLine {
                    id: a.author_id.map(|id| id.0),
                    affiliations: a.affiliation_ids.iter().map(|i| i.0).collect(),
                })
                .collect(),
            journal: p.journal_id.map(|j| j.0),
            collaboration: p.collaboration.clone(),
            categories: p.categories.clone(),
            declared_ref_count: Some(p.declared_ref_count),
            references: p.references.iter().map(|r| r.0).collect(),
            published: p.published,
        }
    }
}

impl From<&AuthorRecord> for AuthorLine {
    fn from(a: &AuthorRecord) -> Self {
        AuthorLine {
            id: a.author_id.0,
            name: a.display_name.clone(),
            gender: a.gender_tag,
        }
    }
}

impl From<&InstitutionRecord> for InstitutionLine {
    fn from(r: &InstitutionRecord) -> Self {
        InstitutionLine {
            id: r.institution_id.0,
            name: r.name.clone(),
            lat: r.latitude,
            lon: r.longitude,
            country: r.country_code.clone(),
            continent: r.continent,
        }
    }
}

impl AuthorLinkLine {
    pub(crate) fn into_link(self) -> AuthorLink {
        AuthorLink {
            author_id: self.id.map(AuthorId),
            affiliation_ids: self.affiliations.into_iter().map(InstitutionId).collect(),
        }
    }
}

impl PaperLine {
    pub(crate) fn references(&self) -> impl Iterator<Item = PaperId> + '_ {
        self.references.iter().copied().map(PaperId)
    }
}
