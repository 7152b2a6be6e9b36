use std::collections::{BTreeMap, HashSet};
use std::io::BufRead;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::schema::{AuthorLine, InstitutionLine, JournalLine, PaperLine, Record};
use super::{
    resolve_date, valid_coordinates, AuthorId, AuthorRecord, Dataset, InstitutionId, InstitutionRecord, JournalId,
    PaperDate, PaperId, PaperRecord,
};
use crate::error::{Error, Result};

/// Oldest year accepted by default; bibliographic dumps reach back to 1230.
pub const DEFAULT_MIN_YEAR: i32 = 1200;

const MAX_ERROR_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IngestOptions {
    /// Fail on malformed lines and duplicate ids instead of skipping them.
    pub strict: bool,
    pub min_year: i32,
    pub max_year: i32,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            strict: false,
            min_year: DEFAULT_MIN_YEAR,
            max_year: chrono::Utc::now().year(),
        }
    }
}

/// Records dropped entirely, per reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub malformed: u64,
    pub bad_date: u64,
    pub duplicate_id: u64,
}

impl DropCounts {
    pub fn total(&self) -> u64 {
        self.malformed + self.bad_date + self.duplicate_id
    }
}

/// Data-quality counters collected while ingesting.
///
/// `records_read == records_kept + dropped.total()` always holds. The
/// remaining counters describe repairs applied to records that were kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub records_read: u64,
    pub records_kept: u64,
    pub dropped: DropCounts,
    pub papers: u64,
    pub authors: u64,
    pub institutions: u64,
    pub journals: u64,
    /// References to papers outside the dataset, removed from the indexed list.
    pub external_refs: u64,
    pub self_refs: u64,
    pub duplicate_refs: u64,
    /// Papers whose declared reference count was below the listed references.
    pub raised_ref_counts: u64,
    pub dangling_author_ids: u64,
    pub duplicate_author_links: u64,
    pub dangling_affiliations: u64,
    pub dangling_journals: u64,
    pub invalid_coordinates: u64,
    pub papers_without_authors: u64,
    /// A few diagnostics for skipped lines.
    pub errors: Vec<String>,
}

impl IngestReport {
    fn sample(&mut self, message: String) {
        if self.errors.len() < MAX_ERROR_SAMPLES {
            self.errors.push(message);
        }
    }
}

/// Incremental construction of a [`Dataset`], one record at a time.
#[derive(Debug)]
pub struct DatasetBuilder {
    options: IngestOptions,
    report: IngestReport,
    line: u64,
    papers: Vec<PaperRecord>,
    paper_ids: HashSet<PaperId>,
    authors: BTreeMap<AuthorId, AuthorRecord>,
    institutions: BTreeMap<InstitutionId, InstitutionRecord>,
    journals: BTreeMap<JournalId, String>,
}

impl DatasetBuilder {
    pub fn new(options: IngestOptions) -> Self {
        DatasetBuilder {
            options,
            report: IngestReport::default(),
            line: 0,
            papers: Vec::new(),
            paper_ids: HashSet::new(),
            authors: BTreeMap::new(),
            institutions: BTreeMap::new(),
            journals: BTreeMap::new(),
        }
    }

    /// Feed one JSONL line. Blank lines are ignored and not counted.
    pub fn push_line(&mut self, text: &str) -> Result<()> {
        self.line += 1;
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(());
        }
        match serde_json::from_str::<Record>(trimmed) {
            Ok(record) => self.push_record(record),
            Err(e) => {
                self.report.records_read += 1;
                if self.options.strict {
                    return Err(Error::Malformed {
                        line: self.line,
                        message: e.to_string(),
                    });
                }
                self.report.dropped.malformed += 1;
                let msg = format!("line {}: {e}", self.line);
                self.report.sample(msg);
                Ok(())
            }
        }
    }

    pub fn push_record(&mut self, record: Record) -> Result<()> {
        self.report.records_read += 1;
        match record {
            Record::Paper(p) => self.push_paper(p),
            Record::Author(a) => self.push_author(a),
            Record::Institution(i) => self.push_institution(i),
            Record::Journal(j) => self.push_journal(j),
        }
    }

    fn duplicate(&mut self, kind: &'static str, id: u64) -> Result<()> {
        if self.options.strict {
            return Err(Error::DuplicateId {
                kind,
                id,
                line: self.line,
            });
        }
        self.report.dropped.duplicate_id += 1;
        let msg = format!("line {}: duplicate {kind} id {id}", self.line);
        self.report.sample(msg);
        Ok(())
    }

    fn bad_date(&mut self, id: u64, why: String) {
        self.report.dropped.bad_date += 1;
        let msg = format!("line {}: paper {id}: {why}", self.line);
        self.report.sample(msg);
    }

    fn push_paper(&mut self, line: PaperLine) -> Result<()> {
        let id = PaperId(line.id);
        let date = match paper_date(&line) {
            Ok(Some(date)) => date,
            Ok(None) => {
                self.bad_date(line.id, "no date".into());
                return Ok(());
            }
            Err(e) => {
                self.bad_date(line.id, e.to_string());
                return Ok(());
            }
        };
        if date.year < self.options.min_year || date.year > self.options.max_year {
            self.bad_date(line.id, format!("year {} out of range", date.year));
            return Ok(());
        }
        if !self.paper_ids.insert(id) {
            return self.duplicate("paper", line.id);
        }

        let mut references: Vec<PaperId> = line.references().collect();
        let listed = references.len();
        references.sort_unstable();
        references.dedup();
        self.report.duplicate_refs += (listed - references.len()) as u64;
        let distinct = references.len() as u32;
        if let Some(pos) = references.iter().position(|&r| r == id) {
            references.remove(pos);
            self.report.self_refs += 1;
        }
        let declared_ref_count = match line.declared_ref_count {
            Some(n) if n >= distinct => n,
            Some(_) => {
                self.report.raised_ref_counts += 1;
                distinct
            }
            None => distinct,
        };

        let mut seen = HashSet::new();
        let mut authors = Vec::with_capacity(line.authors.len());
        for link in line.authors {
            let mut link = link.into_link();
            if let Some(a) = link.author_id {
                if !seen.insert(a) {
                    self.report.duplicate_author_links += 1;
                    continue;
                }
            }
            let mut uniq = HashSet::new();
            link.affiliation_ids.retain(|i| uniq.insert(*i));
            authors.push(link);
        }

        self.papers.push(PaperRecord {
            paper_id: id,
            date,
            title: line.title,
            authors,
            journal_id: line.journal.map(JournalId),
            collaboration: line.collaboration,
            categories: line.categories,
            declared_ref_count,
            references,
            published: line.published,
        });
        Ok(())
    }

    fn push_author(&mut self, line: AuthorLine) -> Result<()> {
        let id = AuthorId(line.id);
        if self.authors.contains_key(&id) {
            return self.duplicate("author", line.id);
        }
        self.authors.insert(
            id,
            AuthorRecord {
                author_id: id,
                display_name: line.name,
                gender_tag: line.gender,
            },
        );
        Ok(())
    }

    fn push_institution(&mut self, line: InstitutionLine) -> Result<()> {
        let id = InstitutionId(line.id);
        if self.institutions.contains_key(&id) {
            return self.duplicate("institution", line.id);
        }
        let (latitude, longitude) = match (line.lat, line.lon) {
            (None, None) => (None, None),
            (Some(lat), Some(lon)) if valid_coordinates(lat, lon) => (Some(lat), Some(lon)),
            _ => {
                self.report.invalid_coordinates += 1;
                (None, None)
            }
        };
        self.institutions.insert(
            id,
            InstitutionRecord {
                institution_id: id,
                name: line.name,
                latitude,
                longitude,
                country_code: line
                    .country
                    .map(|c| c.trim().to_ascii_uppercase())
                    .filter(|c| !c.is_empty()),
                continent: line.continent,
            },
        );
        Ok(())
    }

    fn push_journal(&mut self, line: JournalLine) -> Result<()> {
        let id = JournalId(line.id);
        if self.journals.contains_key(&id) {
            return self.duplicate("journal", line.id);
        }
        self.journals.insert(id, line.name);
        Ok(())
    }

    /// Resolve cross-references and produce the dataset.
    pub fn finish(self) -> (Dataset, IngestReport) {
        let DatasetBuilder {
            mut report,
            mut papers,
            authors,
            institutions,
            journals,
            ..
        } = self;
        drop(self.paper_ids);

        papers.sort_unstable_by_key(|p| p.paper_id);
        let ids: Vec<PaperId> = papers.iter().map(|p| p.paper_id).collect();

        for paper in &mut papers {
            let before = paper.references.len();
            paper.references.retain(|r| ids.binary_search(r).is_ok());
            report.external_refs += (before - paper.references.len()) as u64;

            for link in &mut paper.authors {
                if let Some(a) = link.author_id {
                    if !authors.contains_key(&a) {
                        link.author_id = None;
                        report.dangling_author_ids += 1;
                    }
                }
                let before = link.affiliation_ids.len();
                link.affiliation_ids.retain(|i| institutions.contains_key(i));
                report.dangling_affiliations += (before - link.affiliation_ids.len()) as u64;
            }
            if paper.author_count() == 0 {
                report.papers_without_authors += 1;
            }
            if let Some(j) = paper.journal_id {
                if !journals.contains_key(&j) {
                    paper.journal_id = None;
                    report.dangling_journals += 1;
                }
            }
        }

        report.papers = papers.len() as u64;
        report.authors = authors.len() as u64;
        report.institutions = institutions.len() as u64;
        report.journals = journals.len() as u64;
        report.records_kept = report.papers + report.authors + report.institutions + report.journals;

        let dataset = Dataset::from_sorted_parts(
            papers,
            authors.into_values().collect(),
            institutions.into_values().collect(),
            journals,
        );
        (dataset, report)
    }
}

fn paper_date(line: &PaperLine) -> std::result::Result<Option<PaperDate>, super::DateParseError> {
    if let Some(date) = &line.date {
        return date.parse().map(Some);
    }
    match &line.dates {
        Some(raw) => Ok(resolve_date(&raw.parse()?)),
        None => Ok(None),
    }
}

/// Read canonical JSONL from `source` and build a cleaned [`Dataset`].
pub fn ingest<R: BufRead>(source: R, options: IngestOptions) -> Result<(Dataset, IngestReport)> {
    let mut builder = DatasetBuilder::new(options);
    for line in source.lines() {
        builder.push_line(&line?)?;
    }
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> (Dataset, IngestReport) {
        ingest(text.as_bytes(), IngestOptions::default()).unwrap()
    }

    #[test]
    fn three_valid_papers() {
        let (d, r) = run(concat!(
            r#"{"kind":"paper","id":1,"date":"1990","references":[]}"#,
            "\n",
            r#"{"kind":"paper","id":2,"date":"1995","references":[1]}"#,
            "\n",
            r#"{"kind":"paper","id":3,"date":"2000","references":[1,2]}"#,
            "\n"
        ));
        assert_eq!(d.papers().len(), 3);
        assert_eq!(r.dropped.total(), 0);
        assert_eq!(r.records_read, 3);
        assert_eq!(r.records_kept, 3);
    }

    #[test]
    fn external_reference_is_removed_but_counted() {
        let (d, r) = run(concat!(
            r#"{"kind":"paper","id":1,"date":"1990"}"#,
            "\n",
            r#"{"kind":"paper","id":2,"date":"1995","declared_ref_count":2,"references":[1,999]}"#,
        ));
        let p = d.paper(PaperId(2)).unwrap();
        assert_eq!(p.references, vec![PaperId(1)]);
        assert_eq!(p.declared_ref_count, 2);
        assert_eq!(r.external_refs, 1);
    }

    #[test]
    fn future_year_is_a_bad_date() {
        let (d, r) = run(concat!(
            r#"{"kind":"paper","id":1,"date":"1990"}"#,
            "\n",
            r#"{"kind":"paper","id":2,"date":"3021"}"#,
        ));
        assert_eq!(d.papers().len(), 1);
        assert_eq!(r.dropped.bad_date, 1);
        assert_eq!(r.records_read, r.records_kept + r.dropped.total());
    }

    #[test]
    fn undated_and_unparseable_dates_are_dropped() {
        let (d, r) = run(concat!(
            r#"{"kind":"paper","id":1}"#,
            "\n",
            r#"{"kind":"paper","id":2,"date":"19x0"}"#,
            "\n",
            r#"{"kind":"paper","id":3,"dates":{"publication":"1998-04","preprint":"1998-01"}}"#,
        ));
        assert_eq!(r.dropped.bad_date, 2);
        assert_eq!(d.paper(PaperId(3)).unwrap().date, PaperDate::month(1998, 1));
    }

    #[test]
    fn lenient_skips_malformed_strict_fails() {
        let text = "{\"kind\":\"paper\",\"id\":1,\"date\":\"1990\"}\nnot json\n{\"kind\":\"widget\",\"id\":3}\n";
        let (d, r) = run(text);
        assert_eq!(d.papers().len(), 1);
        assert_eq!(r.dropped.malformed, 2);
        assert_eq!(r.errors.len(), 2);

        let strict = IngestOptions {
            strict: true,
            ..Default::default()
        };
        let err = ingest(text.as_bytes(), strict).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
    }

    #[test]
    fn duplicate_paper_id() {
        let text = "{\"kind\":\"paper\",\"id\":1,\"date\":\"1990\",\"title\":\"a\"}\n{\"kind\":\"paper\",\"id\":1,\"date\":\"1991\",\"title\":\"b\"}\n";
        let (d, r) = run(text);
        assert_eq!(d.papers().len(), 1);
        assert_eq!(d.papers()[0].title, "a");
        assert_eq!(r.dropped.duplicate_id, 1);

        let strict = IngestOptions {
            strict: true,
            ..Default::default()
        };
        assert!(matches!(
            ingest(text.as_bytes(), strict),
            Err(Error::DuplicateId {
                kind: "paper",
                id: 1,
                ..
            })
        ));
    }

    #[test]
    fn dangling_ids_are_cleared() {
        let (d, r) = run(concat!(
            r#"{"kind":"author","id":7,"name":"A"}"#,
            "\n",
            r#"{"kind":"institution","id":3,"name":"I"}"#,
            "\n",
            r#"{"kind":"paper","id":1,"date":"1990","journal":5,"authors":[{"id":7,"affiliations":[3,4]},{"id":8,"affiliations":[3]},{"id":7}]}"#,
        ));
        let p = d.paper(PaperId(1)).unwrap();
        assert_eq!(p.authors.len(), 2);
        assert_eq!(p.authors[0].affiliation_ids, vec![InstitutionId(3)]);
        assert_eq!(p.authors[1].author_id, None);
        assert_eq!(p.journal_id, None);
        assert_eq!(r.dangling_affiliations, 1);
        assert_eq!(r.dangling_author_ids, 1);
        assert_eq!(r.duplicate_author_links, 1);
        assert_eq!(r.dangling_journals, 1);
    }

    #[test]
    fn declared_count_never_below_indexed() {
        let (d, r) = run(concat!(
            r#"{"kind":"paper","id":1,"date":"1990"}"#,
            "\n",
            r#"{"kind":"paper","id":2,"date":"1990"}"#,
            "\n",
            r#"{"kind":"paper","id":3,"date":"1995","declared_ref_count":1,"references":[1,2,2,3]}"#,
        ));
        let p = d.paper(PaperId(3)).unwrap();
        assert_eq!(p.references, vec![PaperId(1), PaperId(2)]);
        assert_eq!(p.declared_ref_count, 3);
        assert_eq!(r.raised_ref_counts, 1);
        assert_eq!(r.duplicate_refs, 1);
        assert_eq!(r.self_refs, 1);
    }

    #[test]
    fn half_coordinates_are_discarded() {
        let (d, r) = run(r#"{"kind":"institution","id":1,"name":"X","lat":45.0,"country":"ch"}"#);
        let inst = &d.institutions()[0];
        assert_eq!(inst.latitude, None);
        assert_eq!(inst.country_code.as_deref(), Some("CH"));
        assert_eq!(r.invalid_coordinates, 1);
    }
}
