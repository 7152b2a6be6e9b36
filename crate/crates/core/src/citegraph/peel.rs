use super::CitationGraph;

/// Result of iteratively removing uncited papers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Peeling {
    /// `layers[0]` holds the papers nobody cites; `layers[k]` the papers
    /// whose citers all sit in earlier layers. Each layer is sorted.
    pub layers: Vec<Vec<u32>>,
    /// Papers never freed, because they sit on or below a same-year cycle.
    pub residual: Vec<u32>,
}

impl Peeling {
    pub fn is_complete(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Peel the graph from its newest leaves inwards (Kahn's algorithm on the
/// reverse edges, grouped by round).
pub fn prune_leaves(graph: &CitationGraph) -> Peeling {
    let n = graph.n_papers();
    let mut pending: Vec<u32> = (0..n).map(|v| graph.n_cit(v) as u32).collect();
    let mut layer: Vec<u32> = (0..n as u32).filter(|&v| pending[v as usize] == 0).collect();
    let mut layers = Vec::new();
    let mut peeled = 0usize;

    while !layer.is_empty() {
        let mut next = Vec::new();
        for &v in &layer {
            for &r in graph.references(v as usize) {
                let slot = &mut pending[r as usize];
                *slot -= 1;
                if *slot == 0 {
                    next.push(r);
                }
            }
        }
        next.sort_unstable();
        peeled += layer.len();
        layers.push(std::mem::replace(&mut layer, next));
    }

    let residual = if peeled == n {
        Vec::new()
    } else {
        (0..n as u32).filter(|&v| pending[v as usize] > 0).collect()
    };
    Peeling { layers, residual }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_of_three() {
        // A=0 <- B=1 <- C=2
        let g = CitationGraph::from_edges(3, &[(2, 1), (1, 0)], Some(vec![2000, 2001, 2002]), None).unwrap();
        let p = prune_leaves(&g);
        assert_eq!(p.layers, vec![vec![2], vec![1], vec![0]]);
        assert!(p.is_complete());
    }

    #[test]
    fn same_year_two_cycle_is_residual() {
        let g = CitationGraph::from_edges(2, &[(0, 1), (1, 0)], None, None).unwrap();
        let p = prune_leaves(&g);
        assert!(p.layers.is_empty());
        assert_eq!(p.residual, vec![0, 1]);
    }

    #[test]
    fn isolated_paper_is_layer_zero() {
        let g = CitationGraph::from_edges(1, &[], None, None).unwrap();
        assert_eq!(prune_leaves(&g).layers, vec![vec![0]]);
    }

    #[test]
    fn layer_waits_for_last_citer() {
        // 3 -> 2 -> 0, 3 -> 0, 1 -> 0
        let g = CitationGraph::from_edges(4, &[(3, 2), (2, 0), (3, 0), (1, 0)], None, None).unwrap();
        let p = prune_leaves(&g);
        assert_eq!(p.layers, vec![vec![1, 3], vec![2], vec![0]]);
    }
}
