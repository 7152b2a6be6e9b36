use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricVector;

/// Gini coefficient `Σ_i Σ_j |x_i - x_j| / (2 n Σ x)`, computed from the
/// sorted values in O(n log n).
pub fn gini(values: &[f64]) -> Result<f64> {
    if values.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidParameter("gini needs finite nonnegative values".into()));
    }
    let total: f64 = values.iter().sum();
    if values.is_empty() || total <= 0.0 {
        return Err(Error::Undefined("gini of an empty or all-zero distribution".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    // Σ_i (2i - n - 1) x_(i) with 1-based ranks.
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok((weighted / (n * total)).max(0.0))
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "correlated vectors must have equal length");
    let n = x.len() as f64;
    if x.is_empty() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties sharing their average rank.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Pairwise correlations of several metrics over the same entities.
/// Entries are `None` where a metric has zero variance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlations {
    pub names: Vec<String>,
    pub pearson: Vec<Vec<Option<f64>>>,
    pub spearman: Vec<Vec<Option<f64>>>,
}

pub fn metric_correlations(vectors: &[(&str, &MetricVector)]) -> Result<Correlations> {
    if vectors.len() < 2 {
        return Err(Error::InvalidParameter("correlations need at least two metrics".into()));
    }
    let ids = vectors[0].1.ids();
    if vectors
        .iter()
        .any(|(_, v)| v.ids() != ids || v.entity != vectors[0].1.entity)
    {
        return Err(Error::InvalidParameter(
            "correlated metrics must cover the same entities".into(),
        ));
    }
    let k = vectors.len();
    let ranks: Vec<Vec<f64>> = vectors.iter().map(|(_, v)| average_ranks(v.values())).collect();
    let mut p = vec![vec![None; k]; k];
    let mut s = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let pv = pearson(vectors[i].1.values(), vectors[j].1.values());
            let sv = pearson(&ranks[i], &ranks[j]);
            let (pv, sv) = if i == j {
                (pv.map(|_| 1.0), sv.map(|_| 1.0))
            } else {
                (pv, sv)
            };
            p[i][j] = pv;
            p[j][i] = pv;
            s[i][j] = sv;
            s[j][i] = sv;
        }
    }
    Ok(Correlations {
        names: vectors.iter().map(|(n, _)| n.to_string()).collect(),
        pearson: p,
        spearman: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Entity, MetricKind};

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert!((gini(&[0.0, 0.0, 0.0, 1.0]).unwrap() - 0.75).abs() < 1e-15);
        assert!((gini(&[1.0, 2.0, 3.0, 4.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(gini(&[0.0, 0.0]).is_err());
        assert!(gini(&[]).is_err());
        assert!(gini(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn correlation_examples() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&x, &[2.0; 4]), None);
        assert!((spearman(&x, &[1.0, 4.0, 9.0, 25.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn correlation_matrix() {
        let a = MetricVector::new(MetricKind::Ncit, Entity::Paper, vec![1, 2, 3], vec![1.0, 2.0, 4.0]);
        let b = MetricVector::new(MetricKind::Nicit, Entity::Paper, vec![1, 2, 3], vec![3.0, 2.0, 1.0]);
        let c = MetricVector::new(MetricKind::PaperRank, Entity::Paper, vec![1, 2, 3], vec![1.0, 1.0, 1.0]);
        let m = metric_correlations(&[("ncit", &a), ("nicit", &b), ("prank", &c)]).unwrap();
        assert_eq!(m.pearson[0][0], Some(1.0));
        assert!((m.spearman[0][1].unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(m.pearson[0][1], m.pearson[1][0]);
        assert_eq!(m.pearson[2][2], None);
        assert_eq!(m.pearson[0][2], None);
        let d = MetricVector::new(MetricKind::Ncit, Entity::Paper, vec![1, 2], vec![1.0, 2.0]);
        assert!(metric_correlations(&[("a", &a), ("d", &d)]).is_err());
        assert!(metric_correlations(&[("a", &a)]).is_err());
    }
}
