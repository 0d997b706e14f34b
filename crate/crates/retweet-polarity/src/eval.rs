//! Stratified k-fold cross-validation and classification metrics
//! (accuracy, rank-statistic ROC-AUC, macro-F1) over the registered models.
//!
//! The unsupervised embedding phase sees no labels, so it runs once on the
//! full graph; only the head is refit per fold. Grid search over the
//! regularization grid selects by mean macro-F1.

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    avg_embedding, embed_classifier, label_propagation, majority_predictor, node2vec_embed,
    ExternalVectors, RandomPredictor, WalkConfig, WeightMode,
};
use crate::corpus::{UserId, UserRecord};
use crate::encoder::EncoderConfig;
use crate::error::{Error, Result};
use crate::graph::RetweetGraph;
use crate::seeding::{Polarity, SeedLabel};
use crate::siamese::{train_unsupervised, TripletConfig};

/// Disjoint fold assignment over the seed users.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldPlan {
    pub folds: Vec<Vec<UserId>>,
    pub rng_seed: u64,
}

/// Per-class shuffle followed by round-robin assignment, so per-fold class
/// counts differ from perfect stratification by at most one.
pub fn stratified_kfold(seeds: &[SeedLabel], k: usize, rng_seed: u64) -> Result<FoldPlan> {
    if k == 0 {
        return Err(Error::config("eval.k", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut folds: Vec<Vec<UserId>> = vec![Vec::new(); k];
    for class in [Polarity::Left, Polarity::Right] {
        let mut members: Vec<&UserId> = seeds
            .iter()
            .filter(|s| s.polarity == class)
            .map(|s| &s.user_id)
            .collect();
        members.sort();
        members.dedup();
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                class: class.to_string(),
                size: members.len(),
                k,
            });
        }
        use rand::seq::SliceRandom;
        members.shuffle(&mut rng);
        for (i, member) in members.into_iter().enumerate() {
            folds[i % k].push(member.clone());
        }
    }
    for fold in &mut folds {
        fold.sort();
    }
    Ok(FoldPlan { folds, rng_seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub accuracy: f64,
    /// Absent when only one class appears in the true labels.
    pub auc: Option<f64>,
    pub macro_f1: f64,
    pub left: ClassMetrics,
    pub right: ClassMetrics,
    pub n: usize,
}

fn class_metrics(tp: usize, fp: usize, fn_: usize) -> ClassMetrics {
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if tp + fp == 0 || tp + fn_ == 0 || precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics { precision, recall, f1 }
}

/// Accuracy at the threshold (Right iff score strictly above), ROC-AUC by
/// the rank statistic with ties contributing one half, and macro-F1 with the
/// 0/0 -> 0 convention.
pub fn compute_metrics(y_true: &[Polarity], y_score: &[f64], threshold: f64) -> MetricReport {
    assert_eq!(y_true.len(), y_score.len(), "labels/scores length mismatch");
    assert!(!y_true.is_empty(), "cannot score an empty prediction set");
    let n = y_true.len();

    let mut tp_r = 0;
    let mut fp_r = 0;
    let mut fn_r = 0;
    let mut tp_l = 0;
    let mut fp_l = 0;
    let mut fn_l = 0;
    let mut correct = 0;
    for (&truth, &score) in y_true.iter().zip(y_score) {
        let pred = if score > threshold { Polarity::Right } else { Polarity::Left };
        if pred == truth {
            correct += 1;
        }
        match (truth, pred) {
            (Polarity::Right, Polarity::Right) => tp_r += 1,
            (Polarity::Left, Polarity::Right) => fp_r += 1,
            (Polarity::Right, Polarity::Left) => fn_r += 1,
            (Polarity::Left, Polarity::Left) => {}
        }
        match (truth, pred) {
            (Polarity::Left, Polarity::Left) => tp_l += 1,
            (Polarity::Right, Polarity::Left) => fp_l += 1,
            (Polarity::Left, Polarity::Right) => fn_l += 1,
            (Polarity::Right, Polarity::Right) => {}
        }
    }

    let left = class_metrics(tp_l, fp_l, fn_l);
    let right = class_metrics(tp_r, fp_r, fn_r);
    MetricReport {
        accuracy: correct as f64 / n as f64,
        auc: rank_auc(y_true, y_score),
        macro_f1: (left.f1 + right.f1) / 2.0,
        left,
        right,
        n,
    }
}

/// Mann-Whitney AUC: mean rank of the positive class, ties averaged.
fn rank_auc(y_true: &[Polarity], y_score: &[f64]) -> Option<f64> {
    let n_pos = y_true.iter().filter(|&&y| y == Polarity::Right).count();
    let n_neg = y_true.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..y_true.len()).collect();
    order.sort_by(|&a, &b| y_score[a].partial_cmp(&y_score[b]).expect("finite scores"));

    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && y_score[order[end + 1]] == y_score[order[start]] {
            end += 1;
        }
        // 1-based mean rank over the tie group [start, end].
        let mean_rank = (start + end + 2) as f64 / 2.0;
        for &idx in &order[start..=end] {
            if y_true[idx] == Polarity::Right {
                rank_sum_pos += mean_rank;
            }
        }
        start = end + 1;
    }
    let auc = (rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0)
        / (n_pos as f64 * n_neg as f64);
    Some(auc)
}

/// The models `cross_validate` knows how to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    RetweetBertOneNeg,
    RetweetBertMultNeg,
    AvgVectors,
    Node2Vec,
    LabelProp,
    Random,
    Majority,
}

pub const MODEL_NAMES: &str = "retweet-bert-oneneg, retweet-bert-multneg, avg-vectors, \
                               node2vec, label-prop, random, majority";

impl ModelId {
    pub const ALL: [ModelId; 7] = [
        ModelId::RetweetBertOneNeg,
        ModelId::RetweetBertMultNeg,
        ModelId::AvgVectors,
        ModelId::Node2Vec,
        ModelId::LabelProp,
        ModelId::Random,
        ModelId::Majority,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::RetweetBertOneNeg => "retweet-bert-oneneg",
            ModelId::RetweetBertMultNeg => "retweet-bert-multneg",
            ModelId::AvgVectors => "avg-vectors",
            ModelId::Node2Vec => "node2vec",
            ModelId::LabelProp => "label-prop",
            ModelId::Random => "random",
            ModelId::Majority => "majority",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownModel(s.to_owned(), MODEL_NAMES))
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a cross-validation run reads.
#[derive(Debug, Clone, Copy)]
pub struct EvalDataset<'a> {
    pub users: &'a [UserRecord],
    pub graph: &'a RetweetGraph,
    pub seeds: &'a [SeedLabel],
    /// Required by the `avg-vectors` model.
    pub vectors: Option<&'a ExternalVectors>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub k: usize,
    pub rng_seed: u64,
    pub c_grid: Vec<f64>,
    pub encoder: EncoderConfig,
    pub triplet: TripletConfig,
    pub walk: WalkConfig,
    pub prop_max_iter: usize,
    pub prop_weighting: WeightMode,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            k: 5,
            rng_seed: 0,
            c_grid: vec![1.0, 10.0, 100.0, 1000.0],
            encoder: EncoderConfig::default(),
            triplet: TripletConfig::default(),
            walk: WalkConfig::default(),
            prop_max_iter: 100,
            prop_weighting: WeightMode::Weighted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub acc: f64,
    pub auc: Option<f64>,
    pub f1: f64,
}

impl FoldMetrics {
    fn from_report(report: &MetricReport) -> Self {
        FoldMetrics {
            acc: report.accuracy,
            auc: report.auc,
            f1: report.macro_f1,
        }
    }
}

/// Cross-validated results for one model, in the `metrics.json` schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValReport {
    pub model: String,
    pub folds: Vec<FoldMetrics>,
    pub mean: FoldMetrics,
    pub config_hash: String,
    /// Regularization chosen by the grid search, for models with a head.
    #[serde(skip)]
    pub best_c: Option<f64>,
    /// Test points the model could not score (isolated nodes for node2vec,
    /// nodes unreachable from the training seeds for label propagation).
    #[serde(skip)]
    pub n_excluded: usize,
}

fn mean_metrics(folds: &[FoldMetrics]) -> FoldMetrics {
    let n = folds.len() as f64;
    let aucs: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
    FoldMetrics {
        acc: folds.iter().map(|f| f.acc).sum::<f64>() / n,
        auc: if aucs.is_empty() {
            None
        } else {
            Some(aucs.iter().sum::<f64>() / aucs.len() as f64)
        },
        f1: folds.iter().map(|f| f.f1).sum::<f64>() / n,
    }
}

fn config_hash(model: ModelId, cfg: &EvalConfig) -> String {
    let payload = serde_json::to_string(&(model.as_str(), cfg)).expect("config serializes");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in payload.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

struct FoldSplit<'a> {
    test: &'a [UserId],
    train: Vec<SeedLabel>,
}

fn splits<'a>(plan: &'a FoldPlan, seeds: &[SeedLabel]) -> Vec<FoldSplit<'a>> {
    plan.folds
        .iter()
        .map(|test| {
            let test_set: BTreeSet<&UserId> = test.iter().collect();
            FoldSplit {
                test,
                train: seeds
                    .iter()
                    .filter(|s| !test_set.contains(&s.user_id))
                    .cloned()
                    .collect(),
            }
        })
        .collect()
}

/// Run one model through k-fold cross-validation.
pub fn cross_validate(
    model: ModelId,
    data: &EvalDataset<'_>,
    cfg: &EvalConfig,
) -> Result<CrossValReport> {
    let plan = stratified_kfold(data.seeds, cfg.k, cfg.rng_seed)?;
    let label_of: BTreeMap<&UserId, Polarity> =
        data.seeds.iter().map(|s| (&s.user_id, s.polarity)).collect();
    let folds = splits(&plan, data.seeds);

    let (fold_metrics, best_c, n_excluded) = match model {
        ModelId::Majority => {
            let mut out = Vec::new();
            for split in &folds {
                let modal = majority_predictor(&split.train).ok_or(Error::SingleClass)?;
                let y_true: Vec<Polarity> = split.test.iter().map(|u| label_of[u]).collect();
                let y_score: Vec<f64> = split
                    .test
                    .iter()
                    .map(|_| if modal == Polarity::Right { 1.0 } else { 0.0 })
                    .collect();
                out.push(FoldMetrics::from_report(&compute_metrics(&y_true, &y_score, 0.5)));
            }
            (out, None, 0)
        }
        ModelId::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(cfg.rng_seed, "random"));
            let mut out = Vec::new();
            for split in &folds {
                let predictor = RandomPredictor::fit(&split.train);
                let y_true: Vec<Polarity> = split.test.iter().map(|u| label_of[u]).collect();
                let y_score: Vec<f64> = split
                    .test
                    .iter()
                    .map(|_| match predictor.predict_one(&mut rng) {
                        Polarity::Right => 1.0,
                        Polarity::Left => 0.0,
                    })
                    .collect();
                out.push(FoldMetrics::from_report(&compute_metrics(&y_true, &y_score, 0.5)));
            }
            (out, None, 0)
        }
        ModelId::LabelProp => {
            let mut out = Vec::new();
            let mut excluded = 0;
            for split in &folds {
                let result =
                    label_propagation(data.graph, &split.train, cfg.prop_max_iter, cfg.prop_weighting);
                let mut y_true = Vec::new();
                let mut y_score = Vec::new();
                for user in split.test {
                    match result.label_of(user) {
                        Some(Polarity::Right) => {
                            y_true.push(label_of[user]);
                            y_score.push(1.0);
                        }
                        Some(Polarity::Left) => {
                            y_true.push(label_of[user]);
                            y_score.push(0.0);
                        }
                        None => excluded += 1,
                    }
                }
                if y_true.is_empty() {
                    return Err(Error::config(
                        "eval",
                        "label propagation reached no held-out seed",
                    ));
                }
                out.push(FoldMetrics::from_report(&compute_metrics(&y_true, &y_score, 0.5)));
            }
            log::info!("label-prop: {excluded} held-out seeds not reachable, excluded");
            (out, None, excluded)
        }
        ModelId::AvgVectors | ModelId::Node2Vec | ModelId::RetweetBertOneNeg
        | ModelId::RetweetBertMultNeg => {
            let embeddings = seed_embeddings(model, data, cfg)?;
            head_grid_cv(&embeddings, &folds, &label_of, &cfg.c_grid)?
        }
    };

    let mean = mean_metrics(&fold_metrics);
    Ok(CrossValReport {
        model: model.as_str().to_owned(),
        folds: fold_metrics,
        mean,
        config_hash: config_hash(model, cfg),
        best_c,
        n_excluded,
    })
}

/// Embeddings for every seed user the model can represent.
fn seed_embeddings(
    model: ModelId,
    data: &EvalDataset<'_>,
    cfg: &EvalConfig,
) -> Result<BTreeMap<UserId, Vec<f64>>> {
    let users_by_id: BTreeMap<&UserId, &UserRecord> =
        data.users.iter().map(|u| (&u.user_id, u)).collect();
    let description = |id: &UserId| -> Result<&str> {
        users_by_id
            .get(id)
            .map(|u| u.description.as_str())
            .ok_or_else(|| Error::UnknownUser(id.to_string()))
    };

    match model {
        ModelId::AvgVectors => {
            let vectors = data.vectors.ok_or_else(|| {
                Error::config("eval", "avg-vectors needs an external vector file")
            })?;
            data.seeds
                .iter()
                .map(|s| Ok((s.user_id.clone(), avg_embedding(description(&s.user_id)?, vectors))))
                .collect()
        }
        ModelId::Node2Vec => {
            let all = node2vec_embed(data.graph, &cfg.walk)?;
            Ok(data
                .seeds
                .iter()
                .filter_map(|s| all.get(&s.user_id).map(|e| (s.user_id.clone(), e.clone())))
                .collect())
        }
        ModelId::RetweetBertOneNeg | ModelId::RetweetBertMultNeg => {
            let mut triplet = cfg.triplet.clone();
            triplet.sampling = match model {
                ModelId::RetweetBertOneNeg => crate::siamese::SamplingStrategy::OneNeg,
                _ => crate::siamese::SamplingStrategy::MultNeg,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(triplet.rng_seed, "enc-init"));
            let params = cfg.encoder.init_params(&mut rng);
            let (params, _) = train_unsupervised(data.graph, data.users, params, &triplet)?;
            data.seeds
                .iter()
                .map(|s| {
                    let features = params.featurize(description(&s.user_id)?);
                    Ok((s.user_id.clone(), params.encode(&features)))
                })
                .collect()
        }
        _ => unreachable!("not an embedding model"),
    }
}

/// Grid-search the head's regularization by mean macro-F1 and return the
/// winning C's per-fold metrics.
fn head_grid_cv(
    embeddings: &BTreeMap<UserId, Vec<f64>>,
    folds: &[FoldSplit<'_>],
    label_of: &BTreeMap<&UserId, Polarity>,
    c_grid: &[f64],
) -> Result<(Vec<FoldMetrics>, Option<f64>, usize)> {
    if c_grid.is_empty() {
        return Err(Error::config("eval.c_grid", "must not be empty"));
    }
    let mut best: Option<(f64, Vec<FoldMetrics>, f64)> = None;
    let mut n_excluded = 0;
    for (ci, &c) in c_grid.iter().enumerate() {
        let mut fold_metrics = Vec::new();
        let mut excluded_this_c = 0;
        for split in folds {
            let head = embed_classifier(embeddings, &split.train, c)?;
            let mut y_true = Vec::new();
            let mut y_score = Vec::new();
            for user in split.test {
                match embeddings.get(user) {
                    Some(x) => {
                        y_true.push(label_of[user]);
                        y_score.push(head.score(x));
                    }
                    None => excluded_this_c += 1,
                }
            }
            if y_true.is_empty() {
                return Err(Error::config("eval", "no scorable seeds in a test fold"));
            }
            fold_metrics.push(FoldMetrics::from_report(&compute_metrics(&y_true, &y_score, 0.5)));
        }
        if ci == 0 {
            n_excluded = excluded_this_c;
        }
        let mean_f1 = mean_metrics(&fold_metrics).f1;
        let better = match &best {
            None => true,
            Some((_, _, best_f1)) => mean_f1 > *best_f1,
        };
        if better {
            best = Some((c, fold_metrics, mean_f1));
        }
    }
    let (c, folds_out, _) = best.expect("grid is non-empty");
    Ok((folds_out, Some(c), n_excluded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::SeedSource;

    fn seed(id: &str, polarity: Polarity) -> SeedLabel {
        SeedLabel {
            user_id: id.into(),
            polarity,
            source: SeedSource::Hashtag,
        }
    }

    fn seeds(n_left: usize, n_right: usize) -> Vec<SeedLabel> {
        let mut out: Vec<SeedLabel> = (0..n_left)
            .map(|i| seed(&format!("l{i:03}"), Polarity::Left))
            .collect();
        out.extend((0..n_right).map(|i| seed(&format!("r{i:03}"), Polarity::Right)));
        out
    }

    #[test]
    fn stratified_folds_preserve_class_ratios() {
        let plan = stratified_kfold(&seeds(75, 25), 5, 3).unwrap();
        for fold in &plan.folds {
            let n_left = fold.iter().filter(|u| u.as_str().starts_with('l')).count();
            assert_eq!(n_left, 15);
            assert_eq!(fold.len() - n_left, 5);
        }
    }

    #[test]
    fn k_equal_one_returns_everything_in_one_fold() {
        let plan = stratified_kfold(&seeds(3, 2), 1, 0).unwrap();
        assert_eq!(plan.folds.len(), 1);
        assert_eq!(plan.folds[0].len(), 5);
    }

    #[test]
    fn same_seed_same_plan() {
        let s = seeds(20, 10);
        assert_eq!(stratified_kfold(&s, 5, 42).unwrap(), stratified_kfold(&s, 5, 42).unwrap());
    }

    #[test]
    fn class_smaller_than_k_errors() {
        assert!(matches!(
            stratified_kfold(&seeds(10, 3), 5, 0),
            Err(Error::ClassTooSmall { .. })
        ));
    }

    #[test]
    fn folds_cover_every_seed_exactly_once() {
        let s = seeds(23, 11);
        let plan = stratified_kfold(&s, 5, 7).unwrap();
        let mut all: Vec<UserId> = plan.folds.iter().flatten().cloned().collect();
        all.sort();
        let mut expected: Vec<UserId> = s.iter().map(|x| x.user_id.clone()).collect();
        expected.sort();
        assert_eq!(all, expected);
    }

    #[test]
    fn metrics_hand_example() {
        use Polarity::*;
        // truth [L, L, R, R], predictions [L, R, R, R]
        let y_true = [Left, Left, Right, Right];
        let y_score = [0.1, 0.9, 0.8, 0.7];
        let report = compute_metrics(&y_true, &y_score, 0.5);
        assert!((report.macro_f1 - (2.0 / 3.0 + 4.0 / 5.0) / 2.0).abs() < 1e-12);
        assert_eq!(report.accuracy, 0.75);
    }

    #[test]
    fn perfect_scores_are_all_ones() {
        use Polarity::*;
        let y_true = [Left, Right, Left, Right];
        let y_score = [0.1, 0.9, 0.2, 0.8];
        let report = compute_metrics(&y_true, &y_score, 0.5);
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.auc, Some(1.0));
        assert_eq!(report.macro_f1, 1.0);
    }

    #[test]
    fn all_left_predictor_on_skewed_labels() {
        use Polarity::*;
        let y_true = [Left, Left, Left, Right];
        let y_score = [0.0; 4];
        let report = compute_metrics(&y_true, &y_score, 0.5);
        assert_eq!(report.accuracy, 0.75);
        assert_eq!(report.right.f1, 0.0);
        // All scores tied: AUC is exactly one half.
        assert_eq!(report.auc, Some(0.5));
    }

    #[test]
    fn single_class_truth_has_no_auc() {
        let y_true = [Polarity::Left, Polarity::Left];
        let report = compute_metrics(&y_true, &[0.3, 0.4], 0.5);
        assert_eq!(report.auc, None);
    }

    #[test]
    fn model_ids_round_trip() {
        for model in ModelId::ALL {
            assert_eq!(ModelId::parse(model.as_str()).unwrap(), model);
        }
        assert!(matches!(ModelId::parse("nope"), Err(Error::UnknownModel(..))));
    }

    /// A hand-built working set: two 6-user cliques plus one seed that is
    /// disconnected from everything.
    fn tiny_dataset() -> (Vec<UserRecord>, RetweetGraph, Vec<SeedLabel>) {
        let mut users = Vec::new();
        let mut edges = Vec::new();
        let mut seeds = Vec::new();
        for (prefix, polarity, vocab) in
            [("l", Polarity::Left, "blue wave"), ("r", Polarity::Right, "red train")]
        {
            for i in 0..6 {
                let id = format!("{prefix}{i}");
                users.push(UserRecord {
                    user_id: id.clone().into(),
                    description: format!("{vocab} voice {i}"),
                    verified: false,
                    in_us: true,
                    tweet_count: 5,
                    bot_score: None,
                });
                seeds.push(SeedLabel {
                    user_id: id.clone().into(),
                    polarity,
                    source: SeedSource::Hashtag,
                });
                edges.push(crate::corpus::RawEdge {
                    src: id.into(),
                    dst: format!("{prefix}{}", (i + 1) % 6).into(),
                    count: 2,
                });
            }
        }
        // A ninth left seed with no edges at all.
        users.push(UserRecord {
            user_id: "lonely".into(),
            description: "blue wave quiet".into(),
            verified: false,
            in_us: true,
            tweet_count: 5,
            bot_score: None,
        });
        seeds.push(SeedLabel {
            user_id: "lonely".into(),
            polarity: Polarity::Left,
            source: SeedSource::Hashtag,
        });
        let graph = RetweetGraph::build_with_nodes(users.iter().map(|u| &u.user_id), &edges, 2);
        (users, graph, seeds)
    }

    fn tiny_config() -> EvalConfig {
        EvalConfig {
            k: 2,
            rng_seed: 5,
            c_grid: vec![10.0],
            encoder: crate::encoder::EncoderConfig {
                vocab_dim: 512,
                embed_dim: 8,
                token_hash_seed: 1,
            },
            walk: WalkConfig {
                dim: 8,
                walk_length: 6,
                walks_per_node: 4,
                window: 2,
                ..WalkConfig::default()
            },
            ..EvalConfig::default()
        }
    }

    #[test]
    fn majority_cv_accuracy_matches_class_fraction() {
        let (users, graph, seeds) = tiny_dataset();
        let data = EvalDataset {
            users: &users,
            graph: &graph,
            seeds: &seeds,
            vectors: None,
        };
        let report = cross_validate(ModelId::Majority, &data, &tiny_config()).unwrap();
        // 7 of 13 seeds are Left; folds split them 4/3 against 3/3.
        let global_fraction = 7.0 / 13.0;
        assert!((report.mean.acc - global_fraction).abs() < 0.1, "{}", report.mean.acc);
    }

    #[test]
    fn label_prop_excludes_unreachable_seeds_and_reports_them() {
        let (users, graph, seeds) = tiny_dataset();
        let data = EvalDataset {
            users: &users,
            graph: &graph,
            seeds: &seeds,
            vectors: None,
        };
        let report = cross_validate(ModelId::LabelProp, &data, &tiny_config()).unwrap();
        // The isolated seed can never be reached from training seeds.
        assert_eq!(report.n_excluded, 1);
        assert!(report.mean.f1 > 0.9, "cliques should propagate cleanly");
    }

    #[test]
    fn node2vec_cv_excludes_isolated_seeds() {
        let (users, graph, seeds) = tiny_dataset();
        let data = EvalDataset {
            users: &users,
            graph: &graph,
            seeds: &seeds,
            vectors: None,
        };
        let report = cross_validate(ModelId::Node2Vec, &data, &tiny_config()).unwrap();
        assert_eq!(report.n_excluded, 1);
    }

    #[test]
    fn avg_vectors_requires_a_vector_file() {
        let (users, graph, seeds) = tiny_dataset();
        let data = EvalDataset {
            users: &users,
            graph: &graph,
            seeds: &seeds,
            vectors: None,
        };
        assert!(cross_validate(ModelId::AvgVectors, &data, &tiny_config()).is_err());
    }

    #[test]
    fn fold_test_sets_cover_each_seed_once_in_cv() {
        let (_, _, seeds) = tiny_dataset();
        let plan = stratified_kfold(&seeds, 2, 5).unwrap();
        let total: usize = plan.folds.iter().map(Vec::len).sum();
        assert_eq!(total, seeds.len());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_labeled() -> impl Strategy<Value = (Vec<Polarity>, Vec<f64>)> {
            prop::collection::vec((any::<bool>(), 0.0..1.0f64), 4..40).prop_map(|rows| {
                let mut labels: Vec<Polarity> = rows
                    .iter()
                    .map(|&(b, _)| if b { Polarity::Right } else { Polarity::Left })
                    .collect();
                // Force both classes present.
                labels[0] = Polarity::Left;
                labels[1] = Polarity::Right;
                let scores = rows.into_iter().map(|(_, s)| s).collect();
                (labels, scores)
            })
        }

        proptest! {
            #[test]
            fn auc_invariant_under_monotone_transform((y, s) in arb_labeled()) {
                let transformed: Vec<f64> = s.iter().map(|v| (3.0 * v + 1.0).exp()).collect();
                let a = compute_metrics(&y, &s, 0.5).auc.unwrap();
                let b = compute_metrics(&y, &transformed, 0.5).auc.unwrap();
                prop_assert!((a - b).abs() < 1e-12);
            }

            #[test]
            fn macro_f1_invariant_under_permutation((y, s) in arb_labeled(), seed in any::<u64>()) {
                let mut order: Vec<usize> = (0..y.len()).collect();
                let n = order.len();
                for i in 0..n {
                    order.swap(i, (seed as usize).wrapping_mul(i + 1) % n);
                }
                let y2: Vec<Polarity> = order.iter().map(|&i| y[i]).collect();
                let s2: Vec<f64> = order.iter().map(|&i| s[i]).collect();
                let a = compute_metrics(&y, &s, 0.5);
                let b = compute_metrics(&y2, &s2, 0.5);
                prop_assert!((a.macro_f1 - b.macro_f1).abs() < 1e-12);
            }
        }
    }
}
