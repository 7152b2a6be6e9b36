use crate::citegraph::{prune_leaves, CitationGraph, DateWindow};
use crate::dataset::PaperId;
use crate::error::{Error, Result};
use crate::metric::{Entity, MetricKind, MetricParams, MetricVector};

use super::{inverse_out_degree, pull};

pub const DEFAULT_MAX_GENERATION: usize = 50;

/// Per-paper weights of citation paths by length.
///
/// `profile(v)[g]` sums, over all paths of `g` citations ending at `v`, the
/// product of `1 / indexed references` of every citing paper on the path.
/// Generation 0 is 1 for every paper.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationProfiles {
    pub damping: f64,
    pub max_generation: usize,
    /// Set when the graph has same-year cycles; profiles are then computed
    /// by repeated multiplication and cut off at `max_generation`.
    pub truncated: bool,
    total_citations: f64,
    paper_ids: Vec<PaperId>,
    contributions: Vec<f64>,
    window: Option<DateWindow>,
}

impl GenerationProfiles {
    pub fn len(&self) -> usize {
        self.paper_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paper_ids.is_empty()
    }

    pub fn paper_id(&self, node: usize) -> PaperId {
        self.paper_ids[node]
    }

    pub fn profile(&self, node: usize) -> &[f64] {
        let width = self.max_generation + 1;
        &self.contributions[node * width..(node + 1) * width]
    }

    pub fn profile_of(&self, id: PaperId) -> Option<&[f64]> {
        self.paper_ids.binary_search(&id).ok().map(|v| self.profile(v))
    }

    /// `Σ_g damping^g · profile[g]` for one paper, before normalization.
    pub fn damped_sum(&self, node: usize) -> f64 {
        let mut weight = 1.0;
        let mut sum = 0.0;
        for c in self.profile(node) {
            sum += weight * c;
            weight *= self.damping;
        }
        sum
    }

    /// The damped sums rescaled like PaperRank, to total the citation count.
    pub fn to_paperrank(&self) -> MetricVector {
        let mut values: Vec<f64> = (0..self.len()).map(|v| self.damped_sum(v)).collect();
        if self.total_citations == 0.0 {
            values.iter_mut().for_each(|x| *x = 0.0);
        } else {
            let scale = self.total_citations / values.iter().sum::<f64>();
            values.iter_mut().for_each(|x| *x *= scale);
        }
        let params = MetricParams {
            damping: Some(self.damping),
            normalization: Some(self.total_citations),
            iterations: Some(self.max_generation),
            ..Default::default()
        };
        let ids = self.paper_ids.iter().map(|p| p.0).collect();
        MetricVector::new(MetricKind::PaperRank, Entity::Paper, ids, values)
            .with_window(self.window)
            .with_params(params)
    }
}

/// Expand PaperRank over citation generations `0..=max_generation`.
///
/// On a graph that peels completely, each paper's profile is pushed to its
/// references once, newest layer first. Otherwise the profiles come from
/// `max_generation` pull multiplications and are flagged as truncated.
pub fn generation_expansion(graph: &CitationGraph, damping: f64, max_generation: usize) -> Result<GenerationProfiles> {
    if max_generation < 1 {
        return Err(Error::InvalidParameter("max generation must be at least 1".into()));
    }
    if !(damping > 0.0 && damping < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "damping must lie in (0, 1), got {damping}"
        )));
    }
    let n = graph.n_papers();
    let width = max_generation + 1;
    let inv_out = inverse_out_degree(graph);
    let peeling = prune_leaves(graph);
    let truncated = !peeling.is_complete();
    let mut contributions = vec![0.0; n * width];

    if truncated {
        log::warn!(
            "{} papers lie on or below citation cycles; generation profiles truncated at {max_generation}",
            peeling.residual.len()
        );
        let mut current = vec![1.0; n];
        for v in 0..n {
            contributions[v * width] = 1.0;
        }
        for g in 1..width {
            let weight: Vec<f64> = current.iter().zip(&inv_out).map(|(c, w)| c * w).collect();
            current = pull(graph, &weight);
            for (v, c) in current.iter().enumerate() {
                contributions[v * width + g] = *c;
            }
        }
    } else {
        for v in 0..n {
            contributions[v * width] = 1.0;
        }
        for layer in &peeling.layers {
            for &v in layer {
                let v = v as usize;
                let w = inv_out[v];
                if w == 0.0 {
                    continue;
                }
                for &r in graph.references(v) {
                    let r = r as usize;
                    for g in 0..max_generation {
                        contributions[r * width + g + 1] += contributions[v * width + g] * w;
                    }
                }
            }
        }
    }

    Ok(GenerationProfiles {
        damping,
        max_generation,
        truncated,
        total_citations: graph.n_edges() as f64,
        paper_ids: graph.paper_ids().to_vec(),
        contributions,
        window: graph.filter().window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::SolverOptions;
    use crate::paper_metrics::{n_icit_indexed, paperrank};

    #[test]
    fn chain_profile() {
        let g = CitationGraph::from_edges(3, &[(2, 1), (1, 0)], Some(vec![2000, 2001, 2002]), None).unwrap();
        let p = generation_expansion(&g, 0.5, 2).unwrap();
        assert!(!p.truncated);
        assert_eq!(p.profile(0), &[1.0, 1.0, 1.0]);
        assert_eq!(p.profile(2), &[1.0, 0.0, 0.0]);
        assert_eq!(p.profile_of(PaperId(1)), Some(&[1.0, 1.0, 0.0][..]));
    }

    #[test]
    fn first_generation_is_indexed_icit() {
        let g = CitationGraph::from_edges(5, &[(4, 0), (4, 1), (3, 0), (2, 1), (2, 0), (1, 0)], None, None).unwrap();
        let p = generation_expansion(&g, 0.9, 3).unwrap();
        let icit = n_icit_indexed(&g);
        for v in 0..5 {
            assert!((p.profile(v)[1] - icit.values()[v]).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_paperrank_on_dag() {
        let g = CitationGraph::from_edges(5, &[(4, 0), (4, 1), (3, 0), (2, 1), (2, 0), (1, 0)], None, None).unwrap();
        let p = generation_expansion(&g, 0.5, 40).unwrap();
        let direct = paperrank(&g, &SolverOptions::paperrank().with_damping(0.5)).unwrap();
        for (a, b) in p.to_paperrank().values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn cycles_fall_back_to_multiplication() {
        let g = CitationGraph::from_edges(3, &[(0, 1), (1, 0), (2, 0)], None, None).unwrap();
        let p = generation_expansion(&g, 0.5, 60).unwrap();
        assert!(p.truncated);
        let direct = paperrank(&g, &SolverOptions::paperrank().with_damping(0.5).with_tolerance(1e-14)).unwrap();
        for (a, b) in p.to_paperrank().values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = CitationGraph::from_edges(1, &[], None, None).unwrap();
        assert!(generation_expansion(&g, 0.5, 0).is_err());
        assert!(generation_expansion(&g, 1.0, 5).is_err());
        assert_eq!(
            generation_expansion(&g, 0.5, 3).unwrap().profile(0),
            &[1.0, 0.0, 0.0, 0.0]
        );
    }
}
