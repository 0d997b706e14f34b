//! node2vec-style node embeddings: biased second-order random walks over the
//! undirected weighted graph, then skip-gram training with negative sampling
//! over the walk corpus.
//!
//! Walk bias from previous node `t` at current node `v`: a candidate `x` is
//! weighted by the undirected edge weight times `1/p` if `x == t`, `1` if `x`
//! is adjacent to `t`, and `1/q` otherwise. Only non-isolated nodes receive
//! embeddings.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::UserId;
use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::head::sigmoid;

/// Walk and skip-gram hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkConfig {
    /// Return parameter: higher discourages immediate backtracking.
    pub p: f64,
    /// In-out parameter: higher keeps walks local.
    pub q: f64,
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Skip-gram context window.
    pub window: usize,
    pub dim: usize,
    pub negative_samples: usize,
    pub rng_seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            p: 1.0,
            q: 1.0,
            walk_length: 20,
            walks_per_node: 10,
            window: 10,
            dim: 128,
            negative_samples: 5,
            rng_seed: 0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("walk.p", self.p),
            ("walk.q", self.q),
            ("walk.walk_length", self.walk_length as f64),
            ("walk.walks_per_node", self.walks_per_node as f64),
            ("walk.window", self.window as f64),
            ("walk.dim", self.dim as f64),
            ("walk.negative_samples", self.negative_samples as f64),
        ];
        for (field, value) in positive {
            if value <= 0.0 {
                return Err(Error::config(field, "must be positive"));
            }
        }
        Ok(())
    }
}

/// Undirected weighted adjacency (both directions summed), sorted by
/// neighbor index.
pub fn undirected_adjacency(g: &RetweetGraph) -> Vec<Vec<(usize, f64)>> {
    (0..g.node_count())
        .map(|v| {
            g.undirected_neighbor_indices(v)
                .into_iter()
                .map(|(n, w)| (n, w as f64))
                .collect()
        })
        .collect()
}

fn adjacent(adj: &[Vec<(usize, f64)>], a: usize, b: usize) -> bool {
    adj[a].binary_search_by_key(&b, |&(n, _)| n).is_ok()
}

/// Unnormalized transition weights out of `cur` given the previous step.
/// With `prev = None` (the first step of a walk) the bias factors drop out
/// and transitions are proportional to edge weight alone.
pub fn transition_weights(
    adj: &[Vec<(usize, f64)>],
    prev: Option<usize>,
    cur: usize,
    p: f64,
    q: f64,
) -> Vec<(usize, f64)> {
    adj[cur]
        .iter()
        .map(|&(x, w)| {
            let bias = match prev {
                None => 1.0,
                Some(t) if x == t => 1.0 / p,
                Some(t) if adjacent(adj, x, t) => 1.0,
                Some(_) => 1.0 / q,
            };
            (x, w * bias)
        })
        .collect()
}

fn sample_weighted(weights: &[(usize, f64)], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    let mut draw = rng.gen::<f64>() * total;
    for &(node, w) in weights {
        draw -= w;
        if draw <= 0.0 {
            return node;
        }
    }
    weights.last().expect("non-empty weights").0
}

/// Biased second-order walks: `walks_per_node` walks of `walk_length` steps
/// from every non-isolated node.
pub fn generate_walks(
    adj: &[Vec<(usize, f64)>],
    cfg: &WalkConfig,
    rng: &mut impl Rng,
) -> Vec<Vec<usize>> {
    let starts: Vec<usize> = (0..adj.len()).filter(|&v| !adj[v].is_empty()).collect();
    let mut walks = Vec::with_capacity(starts.len() * cfg.walks_per_node);
    for _ in 0..cfg.walks_per_node {
        for &start in &starts {
            let mut walk = Vec::with_capacity(cfg.walk_length + 1);
            walk.push(start);
            let mut prev = None;
            let mut cur = start;
            for _ in 0..cfg.walk_length {
                let weights = transition_weights(adj, prev, cur, cfg.p, cfg.q);
                let next = sample_weighted(&weights, rng);
                walk.push(next);
                prev = Some(cur);
                cur = next;
            }
            walks.push(walk);
        }
    }
    walks
}

/// Embed all non-isolated nodes. Deterministic for a fixed `rng_seed`.
pub fn node2vec_embed(g: &RetweetGraph, cfg: &WalkConfig) -> Result<BTreeMap<UserId, Vec<f64>>> {
    cfg.validate()?;
    if g.edge_count() == 0 {
        return Err(Error::config("walk", "graph has no edges"));
    }
    let adj = undirected_adjacency(g);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let walks = generate_walks(&adj, cfg, &mut rng);

    // Dense re-indexing of the non-isolated nodes.
    let vocab: Vec<usize> = (0..adj.len()).filter(|&v| !adj[v].is_empty()).collect();
    let dense: BTreeMap<usize, usize> = vocab.iter().enumerate().map(|(d, &v)| (v, d)).collect();
    let n = vocab.len();
    let dim = cfg.dim;

    let mut in_emb: Vec<f64> = Vec::with_capacity(n * dim);
    let spread = 0.5 / dim as f64;
    for _ in 0..n * dim {
        in_emb.push(rng.gen_range(-spread..spread));
    }
    let mut out_emb = vec![0.0f64; n * dim];

    let lr = 0.025;
    let negatives = cfg.negative_samples;
    let mut acc = vec![0.0f64; dim];
    for walk in &walks {
        for (pos, &center_node) in walk.iter().enumerate() {
            let center = dense[&center_node];
            let lo = pos.saturating_sub(cfg.window);
            let hi = (pos + cfg.window).min(walk.len() - 1);
            for ctx_pos in lo..=hi {
                if ctx_pos == pos {
                    continue;
                }
                let context = dense[&walk[ctx_pos]];
                acc.iter_mut().for_each(|a| *a = 0.0);
                let c_off = center * dim;

                // Positive example plus uniform negatives.
                for sample in 0..=negatives {
                    let (target, label) = if sample == 0 {
                        (context, 1.0)
                    } else {
                        let t = rng.gen_range(0..n);
                        if t == context {
                            continue;
                        }
                        (t, 0.0)
                    };
                    let t_off = target * dim;
                    let dot: f64 = (0..dim)
                        .map(|j| in_emb[c_off + j] * out_emb[t_off + j])
                        .sum();
                    let g = (label - sigmoid(dot)) * lr;
                    for j in 0..dim {
                        acc[j] += g * out_emb[t_off + j];
                        out_emb[t_off + j] += g * in_emb[c_off + j];
                    }
                }
                for j in 0..dim {
                    in_emb[c_off + j] += acc[j];
                }
            }
        }
    }

    Ok(vocab
        .iter()
        .enumerate()
        .map(|(d, &v)| (g.user_id(v).clone(), in_emb[d * dim..(d + 1) * dim].to_vec()))
        .collect())
}
