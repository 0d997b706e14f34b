//! Comparison models: random and majority predictors, averaged external
//! word vectors, label propagation, and node2vec embeddings. Embedding-based
//! baselines share the logistic-head contract with the main model.

pub mod labelprop;
pub mod node2vec;
pub mod predictors;
pub mod vectors;

pub use labelprop::{label_propagation, PropagationResult, WeightMode};
pub use node2vec::{node2vec_embed, WalkConfig};
pub use predictors::{majority_predictor, RandomPredictor};
pub use vectors::{avg_embedding, ExternalVectors};

use std::collections::BTreeMap;

use crate::corpus::UserId;
use crate::error::Result;
use crate::head::{self, HeadParams};
use crate::seeding::{Polarity, SeedLabel};

/// Fit a logistic head on any source of per-user embeddings and score any
/// user present in the map. Same contract as the frozen-encoder head.
pub fn embed_classifier(
    embeddings: &BTreeMap<UserId, Vec<f64>>,
    seeds: &[SeedLabel],
    l2_c: f64,
) -> Result<HeadParams> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for seed in seeds {
        if let Some(x) = embeddings.get(&seed.user_id) {
            xs.push(x.clone());
            ys.push(seed.polarity);
        }
    }
    head::fit(&xs, &ys, l2_c)
}

/// Score a user against a fitted head, or `None` when the user has no
/// embedding (e.g. isolated nodes under node2vec).
pub fn embed_score(
    embeddings: &BTreeMap<UserId, Vec<f64>>,
    head: &HeadParams,
    user: &UserId,
) -> Option<f64> {
    embeddings.get(user).map(|x| head.score(x))
}

/// Convenience: hard labels from an embedding head.
pub fn embed_classify(
    embeddings: &BTreeMap<UserId, Vec<f64>>,
    head: &HeadParams,
    user: &UserId,
) -> Option<Polarity> {
    embed_score(embeddings, head, user).map(|p| {
        if p > 0.5 {
            Polarity::Right
        } else {
            Polarity::Left
        }
    })
}
