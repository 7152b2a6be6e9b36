//! Calendar dates with optional month/day granularity.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A paper date. The year is always known; month and day often are not.
///
/// Ordering is lexicographic on `(year, month, day)` with unknown parts
/// sorting first, which gives a total order usable for sorting. Use
/// [`PaperDate::strictly_before`] when granularity matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PaperDate {
    pub year: i32,
    pub month: Option<u8>,
    pub day: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateParseError(pub String);

impl fmt::Display for DateParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid date '{}'", self.0)
    }
}

impl std::error::Error for DateParseError {}

impl PaperDate {
    pub fn year(year: i32) -> Self {
        Self {
            year,
            month: None,
            day: None,
        }
    }

    pub fn month(year: i32, month: u8) -> Self {
        Self {
            year,
            month: Some(month),
            day: None,
        }
    }

    pub fn ymd(year: i32, month: u8, day: u8) -> Self {
        Self {
            year,
            month: Some(month),
            day: Some(day),
        }
    }

    /// True when `self` is certainly earlier than `other` given the
    /// granularity both dates share.
    pub fn strictly_before(&self, other: &PaperDate) -> bool {
        match self.year.cmp(&other.year) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => match (self.month, other.month) {
                (Some(a), Some(b)) if a != b => a < b,
                (Some(_), Some(_)) => matches!((self.day, other.day), (Some(a), Some(b)) if a < b),
                _ => false,
            },
        }
    }

    fn validate(&self) -> bool {
        match (self.month, self.day) {
            (None, None) => true,
            (Some(m), None) => (1..=12).contains(&m),
            (Some(m), Some(d)) => NaiveDate::from_ymd_opt(self.year, m as u32, d as u32).is_some(),
            (None, Some(_)) => false,
        }
    }
}

impl fmt::Display for PaperDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
            if let Some(d) = self.day {
                write!(f, "-{d:02}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for PaperDate {
    type Err = DateParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || DateParseError(s.to_string());
        let mut parts = s.trim().split('-');
        let year: i32 = parts
            .next()
            .filter(|p| p.len() == 4 && p.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|p| p.parse().ok())
            .ok_or_else(err)?;
        let mut field = |len: usize| -> Result<Option<u8>, DateParseError> {
            match parts.next() {
                None => Ok(None),
                Some(p) if p.len() == len && p.bytes().all(|b| b.is_ascii_digit()) => {
                    p.parse().map(Some).map_err(|_| err())
                }
                Some(_) => Err(err()),
            }
        };
        let month = field(2)?;
        let day = field(2)?;
        if parts.next().is_some() {
            return Err(err());
        }
        let date = PaperDate { year, month, day };
        if date.validate() {
            Ok(date)
        } else {
            Err(err())
        }
    }
}

impl Serialize for PaperDate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PaperDate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The candidate dates a bibliographic dump carries for one record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateCandidates {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub earliest: Option<PaperDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preprint: Option<PaperDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publication: Option<PaperDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub added: Option<PaperDate>,
}

/// Pick the date of a record from its candidates.
///
/// Returns the chronologically earliest candidate. When two candidates cannot
/// be ordered at their shared granularity (equal, or one is year-only), the
/// one with higher priority wins: earliest > preprint > publication > added.
/// Returns `None` when no candidate is present.
pub fn resolve_date(candidates: &DateCandidates) -> Option<PaperDate> {
    [
        candidates.earliest,
        candidates.preprint,
        candidates.publication,
        candidates.added,
    ]
    .into_iter()
    .flatten()
    .reduce(|best, next| if next.strictly_before(&best) { next } else { best })
}
