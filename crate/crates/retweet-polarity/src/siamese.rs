//! Graph-supervised embedding training and the polarity classifier built on
//! top of it.
//!
//! The encoder is trained without labels on the retweet graph: profiles of
//! users who retweet each other are pulled together, profiles of unrelated
//! users pushed apart, through a triplet margin objective over Euclidean
//! distances. Positive pairs are undirected edges; negatives come from either
//! uniform sampling (`one-neg`) or the other positives in the batch
//! (`mult-neg`). The encoder is then frozen and a logistic-regression head is
//! fit on pseudo-labeled seed users.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{UserId, UserRecord};
use crate::encoder::{EncoderParams, ProfileFeatures};
use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::head::{self, HeadParams};
use crate::seeding::{Polarity, SeedLabel};

/// Negative-sampling strategy for the unsupervised phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingStrategy {
    /// One uniformly sampled non-neighbor per positive pair.
    OneNeg,
    /// Every other positive in the same batch serves as a negative.
    MultNeg,
}

/// Hyperparameters of the unsupervised phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TripletConfig {
    pub margin: f64,
    pub sampling: SamplingStrategy,
    pub batch_size: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub rng_seed: u64,
}

impl Default for TripletConfig {
    fn default() -> Self {
        TripletConfig {
            margin: 1.0,
            sampling: SamplingStrategy::MultNeg,
            batch_size: 32,
            epochs: 1,
            // Tuned for a from-scratch encoder: the hinge gradients are unit
            // scale, so one pass needs steps this large to reorganize the
            // embedding space.
            learning_rate: 4.0,
            rng_seed: 0,
        }
    }
}

impl TripletConfig {
    pub fn validate(&self) -> Result<()> {
        if self.margin <= 0.0 {
            return Err(Error::config("triplet.margin", "must be positive"));
        }
        if self.learning_rate <= 0.0 {
            return Err(Error::config("triplet.learning_rate", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("triplet.batch_size", "must be positive"));
        }
        if self.sampling == SamplingStrategy::MultNeg && self.batch_size < 2 {
            return Err(Error::config(
                "triplet.batch_size",
                "mult-neg needs batches of at least 2 pairs",
            ));
        }
        Ok(())
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "embedding dimension mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `max(||s_i - s_j|| - ||s_i - s_k|| + margin, 0)` with Euclidean norms.
pub fn triplet_loss(anchor: &[f64], positive: &[f64], negative: &[f64], margin: f64) -> f64 {
    (euclidean(anchor, positive) - euclidean(anchor, negative) + margin).max(0.0)
}

/// Gradients of [`triplet_loss`] with respect to the three embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletGrad {
    pub anchor: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

/// Loss plus its gradients; the gradient is `None` when the hinge is
/// inactive (slack <= 0, the standard subgradient choice at the kink).
pub fn triplet_loss_grad(
    anchor: &[f64],
    positive: &[f64],
    negative: &[f64],
    margin: f64,
) -> (f64, Option<TripletGrad>) {
    let d_ap = euclidean(anchor, positive);
    let d_an = euclidean(anchor, negative);
    let slack = d_ap - d_an + margin;
    if slack <= 0.0 {
        return (0.0, None);
    }
    let dim = anchor.len();
    let unit = |from: &[f64], to: &[f64], dist: f64| -> Vec<f64> {
        if dist < 1e-12 {
            vec![0.0; dim]
        } else {
            from.iter().zip(to).map(|(a, b)| (a - b) / dist).collect()
        }
    };
    let u_ap = unit(anchor, positive, d_ap);
    let u_an = unit(anchor, negative, d_an);
    let grad = TripletGrad {
        anchor: u_ap.iter().zip(&u_an).map(|(p, n)| p - n).collect(),
        positive: u_ap.iter().map(|v| -v).collect(),
        negative: u_an,
    };
    (slack, Some(grad))
}

/// One training triplet over graph node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triplet {
    pub anchor: usize,
    pub positive: usize,
    pub negative: usize,
}

/// Expand a batch of positive pairs into triplets.
///
/// `one-neg` draws, for each pair `(i, j)`, one node uniformly from the
/// nodes that are neither `i`, `j`, nor an undirected neighbor of `i`; pairs
/// with no valid negative (e.g. on a complete graph) are skipped with a
/// warning. `mult-neg` uses the positives of the other pairs in the batch,
/// giving `n(n-1)` triplets for `n` pairs.
pub fn sample_triplets(
    g: &RetweetGraph,
    sampling: SamplingStrategy,
    pairs: &[(usize, usize)],
    rng: &mut impl Rng,
) -> Vec<Triplet> {
    let mut triplets = Vec::new();
    match sampling {
        SamplingStrategy::OneNeg => {
            let n = g.node_count();
            for &(i, j) in pairs {
                let forbidden: BTreeSet<usize> = g
                    .undirected_neighbor_indices(i)
                    .into_iter()
                    .map(|(k, _)| k)
                    .chain([i, j])
                    .collect();
                if forbidden.len() >= n {
                    log::warn!(
                        "no valid negative for pair ({}, {}); skipping",
                        g.user_id(i),
                        g.user_id(j)
                    );
                    continue;
                }
                let negative = loop {
                    let candidate = rng.gen_range(0..n);
                    if !forbidden.contains(&candidate) {
                        break candidate;
                    }
                };
                triplets.push(Triplet {
                    anchor: i,
                    positive: j,
                    negative,
                });
            }
        }
        SamplingStrategy::MultNeg => {
            for (t, &(i, j)) in pairs.iter().enumerate() {
                for (t2, &(_, j2)) in pairs.iter().enumerate() {
                    if t != t2 {
                        triplets.push(Triplet {
                            anchor: i,
                            positive: j,
                            negative: j2,
                        });
                    }
                }
            }
        }
    }
    triplets
}

/// Per-epoch training diagnostics.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrainReport {
    /// Mean triplet loss per epoch (absent for epochs that produced no
    /// triplets, e.g. an edgeless graph).
    pub epoch_mean_loss: Vec<f64>,
    pub triplets_per_epoch: Vec<usize>,
    pub skipped_pairs: usize,
}

/// Train the encoder on the retweet graph without labels.
///
/// Runs `epochs` passes over all positive pairs in shuffled order, doing
/// minibatch gradient descent on the mean triplet loss. Deterministic for a
/// fixed `rng_seed`: the same inputs give a bit-identical parameter
/// trajectory.
pub fn train_unsupervised(
    g: &RetweetGraph,
    users: &[UserRecord],
    mut params: EncoderParams,
    cfg: &TripletConfig,
) -> Result<(EncoderParams, TrainReport)> {
    cfg.validate()?;
    params.validate()?;
    let features = node_features(g, users, &params)?;

    let base_pairs = g.undirected_edges();
    let mut report = TrainReport::default();
    if base_pairs.is_empty() {
        return Ok((params, report));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for epoch in 0..cfg.epochs {
        let mut pairs = base_pairs.clone();
        pairs.shuffle(&mut rng);
        // Anchor orientation is random per epoch; the objective treats the
        // pair symmetrically apart from where the negative attaches.
        for pair in &mut pairs {
            if rng.gen_bool(0.5) {
                *pair = (pair.1, pair.0);
            }
        }

        let mut loss_sum = 0.0;
        let mut triplet_count = 0usize;
        for batch in pairs.chunks(cfg.batch_size) {
            let triplets = sample_triplets(g, cfg.sampling, batch, &mut rng);
            if triplets.is_empty() {
                report.skipped_pairs += batch.len();
                continue;
            }

            let nodes: BTreeSet<usize> = triplets
                .iter()
                .flat_map(|t| [t.anchor, t.positive, t.negative])
                .collect();
            let embeddings: BTreeMap<usize, Vec<f64>> = nodes
                .iter()
                .map(|&n| (n, params.encode(&features[n])))
                .collect();

            let mut batch_loss = 0.0;
            let mut node_grads: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            let dim = params.embed_dim();
            for t in &triplets {
                let (loss, grad) = triplet_loss_grad(
                    &embeddings[&t.anchor],
                    &embeddings[&t.positive],
                    &embeddings[&t.negative],
                    cfg.margin,
                );
                batch_loss += loss;
                if let Some(grad) = grad {
                    for (node, g) in [
                        (t.anchor, grad.anchor),
                        (t.positive, grad.positive),
                        (t.negative, grad.negative),
                    ] {
                        let acc = node_grads.entry(node).or_insert_with(|| vec![0.0; dim]);
                        for (a, v) in acc.iter_mut().zip(&g) {
                            *a += v;
                        }
                    }
                }
            }

            let scale = 1.0 / triplets.len() as f64;
            if !batch_loss.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("triplet loss at epoch {epoch}"),
                });
            }
            loss_sum += batch_loss;
            triplet_count += triplets.len();

            for (node, mut grad) in node_grads {
                grad.iter_mut().for_each(|v| *v *= scale);
                let enc_grad = params.encode_backward(&features[node], &grad);
                params.apply_grad(&enc_grad, -cfg.learning_rate);
            }
        }

        if triplet_count > 0 {
            let mean = loss_sum / triplet_count as f64;
            log::info!("epoch {epoch}: mean triplet loss {mean:.6} over {triplet_count} triplets");
            report.epoch_mean_loss.push(mean);
            report.triplets_per_epoch.push(triplet_count);
        }
    }
    params.validate()?;
    Ok((params, report))
}

/// Featurize every node's profile, erroring on nodes without a user record.
pub fn node_features(
    g: &RetweetGraph,
    users: &[UserRecord],
    params: &EncoderParams,
) -> Result<Vec<ProfileFeatures>> {
    let by_id: BTreeMap<&UserId, &str> = users
        .iter()
        .map(|u| (&u.user_id, u.description.as_str()))
        .collect();
    g.nodes()
        .map(|id| {
            by_id
                .get(id)
                .map(|text| params.featurize(text))
                .ok_or_else(|| Error::UnknownUser(id.to_string()))
        })
        .collect()
}

/// Embed every seed user with the frozen encoder and fit the logistic head.
/// The encoder is untouched (it is taken by shared reference and never
/// copied into the optimizer).
pub fn fit_head(
    params: &EncoderParams,
    users: &[UserRecord],
    seeds: &[SeedLabel],
    l2_c: f64,
) -> Result<HeadParams> {
    let by_id: BTreeMap<&UserId, &UserRecord> =
        users.iter().map(|u| (&u.user_id, u)).collect();
    let mut xs = Vec::with_capacity(seeds.len());
    let mut ys = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let user = by_id
            .get(&seed.user_id)
            .ok_or_else(|| Error::UnknownUser(seed.user_id.to_string()))?;
        xs.push(params.encode(&params.featurize(&user.description)));
        ys.push(seed.polarity);
    }
    head::fit(&xs, &ys, l2_c)
}

/// A user's estimated probability of being right-leaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarityScore {
    pub user_id: UserId,
    pub p_right: f64,
}

impl PolarityScore {
    /// Hard label at 0.5; an exact tie goes Left.
    pub fn hard_label(&self) -> Polarity {
        if self.p_right > 0.5 {
            Polarity::Right
        } else {
            Polarity::Left
        }
    }
}

/// Score one user with the frozen encoder and trained head.
pub fn predict(params: &EncoderParams, head: &HeadParams, user: &UserRecord) -> PolarityScore {
    let embedding = params.encode(&params.featurize(&user.description));
    PolarityScore {
        user_id: user.user_id.clone(),
        p_right: head.score(&embedding),
    }
}

/// Write scores as CSV with header `user_id,p_right`, sorted by user id.
pub fn save_scores(path: impl AsRef<Path>, scores: &[PolarityScore]) -> Result<()> {
    let path = path.as_ref();
    let mut sorted: Vec<&PolarityScore> = scores.iter().collect();
    sorted.sort_by(|a, b| a.user_id.cmp(&b.user_id));
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    writer
        .write_record(["user_id", "p_right"])
        .map_err(|e| Error::format(path, e.to_string()))?;
    for score in sorted {
        writer
            .write_record([score.user_id.as_str(), &score.p_right.to_string()])
            .map_err(|e| Error::format(path, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read scores written by [`save_scores`].
pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<PolarityScore>> {
    let path = path.as_ref();
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let mut scores = Vec::new();
    for row in reader.deserialize::<(String, f64)>() {
        let (user_id, p_right) = row.map_err(|e| Error::format(path, e.to_string()))?;
        scores.push(PolarityScore {
            user_id: user_id.into(),
            p_right,
        });
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RawEdge;

    fn edge(src: &str, dst: &str, count: u64) -> RawEdge {
        RawEdge {
            src: src.into(),
            dst: dst.into(),
            count,
        }
    }

    fn user(id: &str, description: &str) -> UserRecord {
        UserRecord {
            user_id: id.into(),
            description: description.to_owned(),
            verified: false,
            in_us: true,
            tweet_count: 5,
            bot_score: None,
        }
    }

    #[test]
    fn triplet_loss_hand_values() {
        assert_eq!(triplet_loss(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 2.0], 1.0), 0.0);
        assert_eq!(triplet_loss(&[0.0, 0.0], &[1.0, 0.0], &[0.5, 0.0], 1.0), 1.5);
    }

    #[test]
    fn triplet_loss_equal_positive_negative_is_margin() {
        let s = [0.3, -0.7, 2.0];
        assert_eq!(triplet_loss(&[0.0, 0.0, 0.0], &s, &s, 1.0), 1.0);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn triplet_loss_dimension_mismatch_is_fatal() {
        triplet_loss(&[0.0], &[1.0, 0.0], &[0.5, 0.0], 1.0);
    }

    #[test]
    fn triplet_grad_matches_finite_differences_at_non_kink_points() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        let mut checked = 0;
        while checked < 100 {
            let dim = 2 + (checked % 4);
            let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()
            };
            let (si, sj, sk) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let d_ap = euclidean(&si, &sj);
            let d_an = euclidean(&si, &sk);
            let slack = d_ap - d_an + 1.0;
            if slack.abs() <= 1e-3 || d_ap < 1e-3 || d_an < 1e-3 {
                continue;
            }
            checked += 1;
            let (_, grad) = triplet_loss_grad(&si, &sj, &sk, 1.0);
            let analytic = match grad {
                Some(g) => [g.anchor, g.positive, g.negative],
                None => [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            };
            let vecs = [&si, &sj, &sk];
            for which in 0..3 {
                for j in 0..dim {
                    let mut perturbed: Vec<Vec<f64>> = vecs.iter().map(|v| v.to_vec()).collect();
                    perturbed[which][j] += h;
                    let plus = triplet_loss(&perturbed[0], &perturbed[1], &perturbed[2], 1.0);
                    perturbed[which][j] -= 2.0 * h;
                    let minus = triplet_loss(&perturbed[0], &perturbed[1], &perturbed[2], 1.0);
                    let fd = (plus - minus) / (2.0 * h);
                    let rel = (analytic[which][j] - fd).abs() / fd.abs().max(1e-6);
                    assert!(
                        rel <= 1e-4,
                        "draw {checked} vec {which} coord {j}: analytic {} vs fd {fd}",
                        analytic[which][j]
                    );
                }
            }
        }
    }

    #[test]
    fn mult_neg_two_pairs_one_negative_each() {
        let g = RetweetGraph::build(
            &[edge("a", "b", 2), edge("c", "d", 2)],
            2,
        );
        let pairs = [(0usize, 1usize), (2, 3)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let triplets = sample_triplets(&g, SamplingStrategy::MultNeg, &pairs, &mut rng);
        assert_eq!(triplets.len(), 2);
        assert_eq!(triplets[0].negative, 3);
        assert_eq!(triplets[1].negative, 1);
    }

    #[test]
    fn mult_neg_batch_yields_n_times_n_minus_one_triplets() {
        let edges: Vec<RawEdge> = (0..5)
            .map(|i| edge(&format!("a{i}"), &format!("b{i}"), 2))
            .collect();
        let g = RetweetGraph::build(&edges, 2);
        let pairs: Vec<(usize, usize)> = g.undirected_edges();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let triplets = sample_triplets(&g, SamplingStrategy::MultNeg, &pairs, &mut rng);
        assert_eq!(triplets.len(), 5 * 4);
    }

    #[test]
    fn one_neg_on_a_path_uses_the_only_non_neighbor() {
        // Path i - j - m: the only valid negative for (i, j) is m.
        let g = RetweetGraph::build(&[edge("i", "j", 2), edge("j", "m", 2)], 2);
        let i = g.index_of(&"i".into()).unwrap();
        let j = g.index_of(&"j".into()).unwrap();
        let m = g.index_of(&"m".into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let triplets =
                sample_triplets(&g, SamplingStrategy::OneNeg, &[(i, j)], &mut rng);
            assert_eq!(triplets, vec![Triplet { anchor: i, positive: j, negative: m }]);
        }
    }

    #[test]
    fn one_neg_skips_pairs_on_complete_graphs() {
        let g = RetweetGraph::build(
            &[edge("a", "b", 2), edge("b", "c", 2), edge("a", "c", 2)],
            2,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let triplets = sample_triplets(&g, SamplingStrategy::OneNeg, &[(0, 1)], &mut rng);
        assert!(triplets.is_empty());
    }

    #[test]
    fn training_on_edgeless_graph_is_a_no_op() {
        let users = vec![user("a", "hello world"), user("b", "more text")];
        let g = RetweetGraph::build_with_nodes(users.iter().map(|u| &u.user_id), &[], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let params = EncoderParams::init(256, 8, 1, &mut rng);
        let before = params.to_bytes();
        let (after, report) =
            train_unsupervised(&g, &users, params, &TripletConfig::default()).unwrap();
        assert_eq!(after.to_bytes(), before);
        assert!(report.epoch_mean_loss.is_empty());
    }

    #[test]
    fn training_is_deterministic_for_a_fixed_seed() {
        let users: Vec<UserRecord> = (0..8)
            .map(|i| user(&format!("u{i}"), &format!("profile text {} {}", i % 3, i % 2)))
            .collect();
        let edges: Vec<RawEdge> = (0..8)
            .map(|i| edge(&format!("u{i}"), &format!("u{}", (i + 1) % 8), 2))
            .collect();
        let g = RetweetGraph::build(&edges, 2);
        let cfg = TripletConfig {
            epochs: 2,
            batch_size: 3,
            sampling: SamplingStrategy::OneNeg,
            rng_seed: 99,
            ..TripletConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = EncoderParams::init(512, 8, 1, &mut rng);
        let (a, ra) = train_unsupervised(&g, &users, params.clone(), &cfg).unwrap();
        let (b, rb) = train_unsupervised(&g, &users, params, &cfg).unwrap();
        assert_eq!(a.to_bytes(), b.to_bytes());
        assert_eq!(ra, rb);
    }

    #[test]
    fn fit_head_leaves_encoder_untouched_and_predicts_consistently() {
        let users = vec![
            user("l1", "blue wave voter"),
            user("l2", "blue voter here"),
            user("r1", "red hat wearer"),
            user("r2", "red wearer proud"),
        ];
        let seeds: Vec<SeedLabel> = users
            .iter()
            .map(|u| SeedLabel {
                user_id: u.user_id.clone(),
                polarity: if u.user_id.as_str().starts_with('l') {
                    Polarity::Left
                } else {
                    Polarity::Right
                },
                source: crate::seeding::SeedSource::Hashtag,
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = EncoderParams::init(1024, 16, 3, &mut rng);
        let before = params.to_bytes();
        let head = fit_head(&params, &users, &seeds, 100.0).unwrap();
        assert_eq!(params.to_bytes(), before, "encoder must stay frozen");

        // A user whose profile equals a seed's profile scores identically.
        let clone_user = user("x", "red hat wearer");
        let a = predict(&params, &head, &clone_user);
        let b = predict(&params, &head, &users[2]);
        assert_eq!(a.p_right, b.p_right);
    }

    #[test]
    fn predict_with_zero_head_gives_half() {
        let params = EncoderParams::zeros(64, 4, 1);
        let head = HeadParams {
            weight: vec![0.0; 4],
            bias: 0.0,
        };
        let score = predict(&params, &head, &user("u", "whatever"));
        assert_eq!(score.p_right, 0.5);
        assert_eq!(score.hard_label(), Polarity::Left);
    }

    #[test]
    fn huge_logit_saturates_in_unit_interval() {
        let params = EncoderParams::zeros(64, 2, 1);
        let head = HeadParams {
            weight: vec![0.0, 0.0],
            bias: 1e6,
        };
        let score = predict(&params, &head, &user("u", "x"));
        assert!(score.p_right > 1.0 - 1e-12 && score.p_right <= 1.0);
    }

    #[test]
    fn scores_csv_round_trip() {
        let scores = vec![
            PolarityScore { user_id: "a".into(), p_right: 0.125 },
            PolarityScore { user_id: "b".into(), p_right: 0.875 },
        ];
        let f = tempfile::NamedTempFile::new().unwrap();
        save_scores(f.path(), &scores).unwrap();
        assert_eq!(load_scores(f.path()).unwrap(), scores);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn loss_is_nonnegative_and_zero_iff_separated(
                si in prop::collection::vec(-3.0..3.0f64, 3),
                sj in prop::collection::vec(-3.0..3.0f64, 3),
                sk in prop::collection::vec(-3.0..3.0f64, 3),
            ) {
                let loss = triplet_loss(&si, &sj, &sk, 1.0);
                prop_assert!(loss >= 0.0);
                let separated = euclidean(&si, &sj) + 1.0 <= euclidean(&si, &sk);
                prop_assert_eq!(loss == 0.0, separated);
            }

            #[test]
            fn one_neg_never_samples_a_neighbor(seed in any::<u64>()) {
                // Star around u0 plus a few outliers.
                let mut edges = vec![
                    edge("u0", "u1", 2),
                    edge("u2", "u0", 2),
                    edge("u0", "u3", 2),
                    edge("u4", "u5", 2),
                    edge("u6", "u7", 2),
                ];
                edges.push(edge("u1", "u2", 2));
                let g = RetweetGraph::build(&edges, 2);
                let u0 = g.index_of(&"u0".into()).unwrap();
                let u1 = g.index_of(&"u1".into()).unwrap();
                let neighbors: BTreeSet<usize> = g
                    .undirected_neighbor_indices(u0)
                    .into_iter()
                    .map(|(n, _)| n)
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for t in sample_triplets(&g, SamplingStrategy::OneNeg, &[(u0, u1)], &mut rng) {
                    prop_assert!(!neighbors.contains(&t.negative));
                    prop_assert!(t.negative != u0 && t.negative != u1);
                }
            }
        }
    }
}
