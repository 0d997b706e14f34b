//! Seed-clamped label propagation over the undirected weighted view of the
//! retweet graph.
//!
//! Synchronous rounds: an unlabeled node adopts the label with the greater
//! incident-weight sum among its already-labeled neighbors; ties (and nodes
//! with no labeled neighbor) stay unlabeled for that round. Labels never
//! change once assigned and seeds are clamped, so the process reaches a
//! fixpoint in at most `|V|` rounds. Nodes disconnected from every seed stay
//! unlabeled.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::UserId;
use crate::graph::RetweetGraph;
use crate::seeding::{Polarity, SeedLabel};

/// Whether neighbor votes are weighted by edge weight or counted equally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    #[default]
    Weighted,
    Unweighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub labels: BTreeMap<UserId, Polarity>,
    /// Synchronous rounds executed before reaching the fixpoint (or hitting
    /// `max_iter`).
    pub iterations: usize,
    /// Nodes that remained unlabeled.
    pub n_unlabeled: usize,
}

impl PropagationResult {
    pub fn label_of(&self, user: &UserId) -> Option<Polarity> {
        self.labels.get(user).copied()
    }
}

pub fn label_propagation(
    g: &RetweetGraph,
    seeds: &[SeedLabel],
    max_iter: usize,
    mode: WeightMode,
) -> PropagationResult {
    let n = g.node_count();
    let mut labels: Vec<Option<Polarity>> = vec![None; n];
    let mut frontier: Vec<usize> = Vec::new();
    for seed in seeds {
        match g.index_of(&seed.user_id) {
            Some(idx) => {
                if labels[idx].is_none() {
                    labels[idx] = Some(seed.polarity);
                    frontier.push(idx);
                }
            }
            None => log::debug!("seed {} not in graph, ignored", seed.user_id),
        }
    }

    let und_adj: Vec<Vec<(usize, u64)>> =
        (0..n).map(|v| g.undirected_neighbor_indices(v)).collect();

    let mut iterations = 0;
    while !frontier.is_empty() && iterations < max_iter {
        // Only unlabeled nodes adjacent to newly labeled ones can change;
        // everything else saw the same neighbor labels last round.
        let mut candidates: Vec<usize> = frontier
            .iter()
            .flat_map(|&v| und_adj[v].iter().map(|&(u, _)| u))
            .filter(|&u| labels[u].is_none())
            .collect();
        candidates.sort_unstable();
        candidates.dedup();

        let mut assignments: Vec<(usize, Polarity)> = Vec::new();
        for &u in &candidates {
            let mut left = 0u64;
            let mut right = 0u64;
            for &(v, w) in &und_adj[u] {
                let vote = match mode {
                    WeightMode::Weighted => w,
                    WeightMode::Unweighted => 1,
                };
                match labels[v] {
                    Some(Polarity::Left) => left += vote,
                    Some(Polarity::Right) => right += vote,
                    None => {}
                }
            }
            match left.cmp(&right) {
                std::cmp::Ordering::Greater => assignments.push((u, Polarity::Left)),
                std::cmp::Ordering::Less => assignments.push((u, Polarity::Right)),
                std::cmp::Ordering::Equal => {}
            }
        }

        frontier.clear();
        for (u, label) in assignments {
            labels[u] = Some(label);
            frontier.push(u);
        }
        if !frontier.is_empty() {
            iterations += 1;
        }
    }

    let mut out = BTreeMap::new();
    let mut n_unlabeled = 0;
    for (idx, label) in labels.iter().enumerate() {
        match label {
            Some(p) => {
                out.insert(g.user_id(idx).clone(), *p);
            }
            None => n_unlabeled += 1,
        }
    }
    PropagationResult {
        labels: out,
        iterations,
        n_unlabeled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RawEdge;
    use crate::seeding::SeedSource;

    fn edge(src: &str, dst: &str, count: u64) -> RawEdge {
        RawEdge {
            src: src.into(),
            dst: dst.into(),
            count,
        }
    }

    fn seed(id: &str, polarity: Polarity) -> SeedLabel {
        SeedLabel {
            user_id: id.into(),
            polarity,
            source: SeedSource::Hashtag,
        }
    }

    #[test]
    fn single_seed_labels_its_neighbor_in_one_round() {
        let g = RetweetGraph::build(&[edge("L", "x", 2)], 2);
        let result = label_propagation(&g, &[seed("L", Polarity::Left)], 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"x".into()), Some(Polarity::Left));
        assert_eq!(result.iterations, 1);
        assert_eq!(result.n_unlabeled, 0);
    }

    #[test]
    fn permanent_tie_stays_unlabeled() {
        // L - x - R with equal weights: x sees 1 vote each way forever.
        let g = RetweetGraph::build(&[edge("L", "x", 2), edge("x", "R", 2)], 2);
        let seeds = [seed("L", Polarity::Left), seed("R", Polarity::Right)];
        let result = label_propagation(&g, &seeds, 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"x".into()), None);
        assert_eq!(result.n_unlabeled, 1);
    }

    #[test]
    fn weighted_majority_wins() {
        let g = RetweetGraph::build(&[edge("L", "x", 3), edge("x", "R", 1)], 1);
        let seeds = [seed("L", Polarity::Left), seed("R", Polarity::Right)];
        let result = label_propagation(&g, &seeds, 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"x".into()), Some(Polarity::Left));
        // Unweighted mode sees the same tie as equal weights.
        let result = label_propagation(&g, &seeds, 100, WeightMode::Unweighted);
        assert_eq!(result.label_of(&"x".into()), None);
    }

    #[test]
    fn seeds_are_never_relabeled() {
        // A Left seed surrounded by Right seeds keeps its label.
        let g = RetweetGraph::build(
            &[edge("L", "r1", 5), edge("L", "r2", 5), edge("r3", "L", 5)],
            2,
        );
        let seeds = [
            seed("L", Polarity::Left),
            seed("r1", Polarity::Right),
            seed("r2", Polarity::Right),
            seed("r3", Polarity::Right),
        ];
        let result = label_propagation(&g, &seeds, 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"L".into()), Some(Polarity::Left));
    }

    #[test]
    fn disconnected_nodes_stay_unlabeled() {
        let g = RetweetGraph::build(&[edge("L", "x", 2), edge("a", "b", 2)], 2);
        let result = label_propagation(&g, &[seed("L", Polarity::Left)], 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"a".into()), None);
        assert_eq!(result.label_of(&"b".into()), None);
        assert_eq!(result.n_unlabeled, 2);
    }

    #[test]
    fn propagation_crosses_a_long_path() {
        let edges: Vec<RawEdge> = (0..6)
            .map(|i| edge(&format!("n{i}"), &format!("n{}", i + 1), 2))
            .collect();
        let g = RetweetGraph::build(&edges, 2);
        let result = label_propagation(&g, &[seed("n0", Polarity::Right)], 100, WeightMode::Weighted);
        assert_eq!(result.label_of(&"n6".into()), Some(Polarity::Right));
        assert_eq!(result.iterations, 6);
    }

    #[test]
    fn max_iter_caps_the_rounds() {
        let edges: Vec<RawEdge> = (0..6)
            .map(|i| edge(&format!("n{i}"), &format!("n{}", i + 1), 2))
            .collect();
        let g = RetweetGraph::build(&edges, 2);
        let result = label_propagation(&g, &[seed("n0", Polarity::Right)], 2, WeightMode::Weighted);
        assert_eq!(result.label_of(&"n2".into()), Some(Polarity::Right));
        assert_eq!(result.label_of(&"n3".into()), None);
    }
}
