//! Named score vectors over papers, authors or groups.

use serde::{Deserialize, Serialize};

use crate::citegraph::DateWindow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    /// Number of papers.
    Npap,
    /// Papers shared among co-authors.
    Nipap,
    /// Number of citations.
    Ncit,
    /// Individual citations.
    Nicit,
    HIndex,
    PaperRank,
    AuthorRank,
    AuthorRankOfPapers,
    CitationCoin,
    CitationCoinPlus,
    /// Aggregate of another metric over groups.
    Group(GroupedMetric),
}

/// What a group-level vector aggregates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupedMetric {
    Npap,
    Ncit,
    Nicit,
    PaperRank,
    AuthorRankOfPapers,
    CitationCoin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    Paper,
    Author,
    Group,
}

/// Solver parameters a vector was produced with.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricParams {
    pub damping: Option<f64>,
    /// Target total of the vector after normalization.
    pub normalization: Option<f64>,
    pub tolerance: Option<f64>,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
}

/// Damping, tolerance and iteration cap for the rank solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub damping: f64,
    /// Stop when the largest per-component relative change drops below this.
    pub tolerance: f64,
    pub max_iters: usize,
}

impl SolverOptions {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;
    pub const DEFAULT_MAX_ITERS: usize = 10_000;

    /// Paper ranking defaults: damping 0.99.
    pub fn paperrank() -> Self {
        SolverOptions {
            damping: 0.99,
            tolerance: Self::DEFAULT_TOLERANCE,
            max_iters: Self::DEFAULT_MAX_ITERS,
        }
    }

    /// Author ranking defaults: damping 0.9.
    pub fn authorrank() -> Self {
        SolverOptions {
            damping: 0.9,
            ..Self::paperrank()
        }
    }

    pub fn with_damping(mut self, damping: f64) -> Self {
        self.damping = damping;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0, 1), got {}",
                self.damping
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

/// A score per entity id, ids strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub kind: MetricKind,
    pub entity: Entity,
    pub window: Option<DateWindow>,
    pub params: MetricParams,
    ids: Vec<u64>,
    values: Vec<f64>,
}

impl MetricVector {
    /// Panics if `ids` and `values` differ in length or `ids` is not strictly
    /// increasing; every constructor in this crate upholds both.
    pub fn new(kind: MetricKind, entity: Entity, ids: Vec<u64>, values: Vec<f64>) -> Self {
        assert_eq!(ids.len(), values.len(), "ids/values length mismatch");
        assert!(ids.windows(2).all(|w| w[0] < w[1]), "ids must be strictly increasing");
        MetricVector {
            kind,
            entity,
            window: None,
            params: MetricParams::default(),
            ids,
            values,
        }
    }

    /// Like [`MetricVector::new`] but reports bad input instead of panicking.
    pub fn try_new(kind: MetricKind, entity: Entity, ids: Vec<u64>, values: Vec<f64>) -> Result<Self> {
        if ids.len() != values.len() || ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "metric ids must be strictly increasing and match values".into(),
            ));
        }
        Ok(Self::new(kind, entity, ids, values))
    }

    pub fn with_window(mut self, window: Option<DateWindow>) -> Self {
        self.window = window;
        self
    }

    pub fn with_params(mut self, params: MetricParams) -> Self {
        self.params = params;
        self
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<f64> {
        self.ids.binary_search(&id).ok().map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.ids.iter().copied().zip(self.values.iter().copied())
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Ids ordered by descending score, ties by ascending id.
    pub fn ranking(&self) -> Vec<u64> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.values[b]
                .total_cmp(&self.values[a])
                .then(self.ids[a].cmp(&self.ids[b]))
        });
        order.into_iter().map(|i| self.ids[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranking_breaks_ties_by_id() {
        let m = MetricVector::new(
            MetricKind::Ncit,
            Entity::Paper,
            vec![1, 2, 3, 4],
            vec![1.0, 3.0, 1.0, 2.0],
        );
        assert_eq!(m.ranking(), vec![2, 4, 1, 3]);
        assert_eq!(m.get(4), Some(2.0));
        assert_eq!(m.get(5), None);
    }

    #[test]
    fn solver_options_validation() {
        assert!(SolverOptions::paperrank().validate().is_ok());
        assert!(SolverOptions::paperrank().with_damping(1.5).validate().is_err());
        assert!(SolverOptions::paperrank().with_damping(0.0).validate().is_err());
        assert!(SolverOptions::authorrank().with_tolerance(f64::NAN).validate().is_err());
    }

    #[test]
    fn try_new_rejects_unsorted() {
        assert!(MetricVector::try_new(MetricKind::Ncit, Entity::Paper, vec![2, 1], vec![0.0, 0.0]).is_err());
        assert!(MetricVector::try_new(MetricKind::Ncit, Entity::Paper, vec![1], vec![]).is_err());
    }
}
