//! Synthetic two-community corpus generator, the self-contained stand-in
//! for a real retweet dataset.
//!
//! Users split into a left and a right community. Edges are drawn from a
//! stochastic block model with asymmetric in-community densities (the right
//! community is denser by default, planting the echo-chamber ground truth).
//! Profiles mix community vocabularies: each token comes from the user's own
//! community vocabulary with probability `keyword_mix`, otherwise from the
//! other community's. An exact fraction of each community is made
//! pseudo-labelable, mostly through media endorsements and sometimes through
//! a partisan profile hashtag, mirroring how sparse hashtag seeds are in real
//! profile data. Everything is deterministic under `rng_seed`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::ExternalVectors;
use crate::corpus::{self, EndorsementRecord, RawEdge, UserId, UserRecord};
use crate::error::{Error, Result};
use crate::seeding::Polarity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_left: usize,
    pub n_right: usize,
    /// Directed edge probability within the left community.
    pub p_in_left: f64,
    /// Directed edge probability within the right community.
    pub p_in_right: f64,
    /// Directed edge probability across communities.
    pub p_out: f64,
    /// Tokens per community vocabulary.
    pub vocab_size: usize,
    /// Probability that a profile token comes from the user's own community
    /// vocabulary (1.0 makes the two communities' profiles fully disjoint).
    pub keyword_mix: f64,
    /// Fraction of each community that gets a plantable seed signal.
    pub seed_fraction: f64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_left: 1200,
            n_right: 800,
            p_in_left: 0.010,
            p_in_right: 0.020,
            p_out: 0.001,
            vocab_size: 150,
            keyword_mix: 0.8,
            seed_fraction: 0.3,
            rng_seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn n(&self) -> usize {
        self.n_left + self.n_right
    }

    pub fn validate(&self) -> Result<()> {
        for (field, p) in [
            ("synth.p_in_left", self.p_in_left),
            ("synth.p_in_right", self.p_in_right),
            ("synth.p_out", self.p_out),
            ("synth.keyword_mix", self.keyword_mix),
            ("synth.seed_fraction", self.seed_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(field, format!("{p} not in [0,1]")));
            }
        }
        if self.n() == 0 {
            return Err(Error::config("synth.n_left", "no users to generate"));
        }
        if self.vocab_size == 0 {
            return Err(Error::config("synth.vocab_size", "must be positive"));
        }
        Ok(())
    }
}

/// A generated corpus plus the planted ground truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub users: Vec<UserRecord>,
    pub edges: Vec<RawEdge>,
    pub endorsements: Vec<EndorsementRecord>,
    pub truth: Vec<(UserId, Polarity)>,
    /// Random per-token vectors covering both vocabularies, for the
    /// averaged-word-vector baseline.
    pub vectors: ExternalVectors,
}

const LEFT_HASHTAGS: [&str; 5] = ["#Resist", "#VoteBlue", "#BlueWave", "#TheResistance", "#ImpeachTrump"];
const RIGHT_HASHTAGS: [&str; 5] = ["#MAGA", "#KAG", "#Trump2020", "#BuildTheWall", "#AmericaFirst"];
const LEFT_MEDIA: [&str; 6] = ["HuffPost", "MSNBC", "VICE", "CNN", "nytimes", "washingtonpost"];
const RIGHT_MEDIA: [&str; 6] = ["FoxNews", "OANN", "BreitbartNews", "DailyCaller", "DailyMail", "InfoWars"];
const CENTER_MEDIA: [&str; 5] = ["Reuters", "NPR", "BBCWorld", "WSJ", "USATODAY"];

/// Share of planted seeds that get a profile hashtag (the rest are
/// labelable only through their endorsements, which text models cannot see).
const HASHTAG_SEED_SHARE: f64 = 0.25;
/// Share of hashtag seeds that additionally endorse same-side media.
const BOTH_SEED_SHARE: f64 = 0.4;
/// Probability that a non-seed user endorses neutral outlets.
const NEUTRAL_ENDORSER_RATE: f64 = 0.10;
/// Dimension of the generated external vectors.
const VECTOR_DIM: usize = 64;

fn token(side: Polarity, index: usize) -> String {
    match side {
        Polarity::Left => format!("wl{index:03}"),
        Polarity::Right => format!("wr{index:03}"),
    }
}

/// Generate a corpus. Deterministic for a fixed config.
pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let n = cfg.n();

    // Community assignment, decoupled from user-id order.
    let mut community: Vec<Polarity> = std::iter::repeat_n(Polarity::Left, cfg.n_left)
        .chain(std::iter::repeat_n(Polarity::Right, cfg.n_right))
        .collect();
    community.shuffle(&mut rng);

    let ids: Vec<UserId> = (0..n).map(|i| UserId::new(format!("u{i:05}"))).collect();

    // Profiles: community-vocabulary mixtures.
    let mut descriptions: Vec<String> = Vec::with_capacity(n);
    for &side in &community {
        let len = rng.gen_range(8..=16);
        let mut words = Vec::with_capacity(len);
        for _ in 0..len {
            let from = if rng.gen_bool(cfg.keyword_mix) { side } else { side.opposite() };
            words.push(token(from, rng.gen_range(0..cfg.vocab_size)));
        }
        descriptions.push(words.join(" "));
    }

    // Plant seed signals on an exact per-community count.
    let mut endorsements: Vec<EndorsementRecord> = Vec::new();
    for side in [Polarity::Left, Polarity::Right] {
        let mut members: Vec<usize> = (0..n).filter(|&i| community[i] == side).collect();
        let n_seeds = (cfg.seed_fraction * members.len() as f64).round() as usize;
        members.shuffle(&mut rng);
        for &user in members.iter().take(n_seeds) {
            let hashtag = rng.gen_bool(HASHTAG_SEED_SHARE);
            let media = !hashtag || rng.gen_bool(BOTH_SEED_SHARE);
            if hashtag {
                let pool = match side {
                    Polarity::Left => &LEFT_HASHTAGS,
                    Polarity::Right => &RIGHT_HASHTAGS,
                };
                let tag = pool[rng.gen_range(0..pool.len())];
                descriptions[user].push(' ');
                descriptions[user].push_str(tag);
            }
            if media {
                let pool = match side {
                    Polarity::Left => &LEFT_MEDIA,
                    Polarity::Right => &RIGHT_MEDIA,
                };
                let first = pool[rng.gen_range(0..pool.len())];
                endorsements.push(EndorsementRecord {
                    user_id: ids[user].clone(),
                    media_handle: first.to_owned(),
                    count: rng.gen_range(2..=4),
                });
                if rng.gen_bool(0.5) {
                    let second = pool[rng.gen_range(0..pool.len())];
                    if second != first {
                        endorsements.push(EndorsementRecord {
                            user_id: ids[user].clone(),
                            media_handle: second.to_owned(),
                            count: rng.gen_range(1..=3),
                        });
                    }
                }
            }
        }
        // Some non-seeds share neutral outlets; their mean rating of 3
        // labels nobody.
        for &user in members.iter().skip(n_seeds) {
            if rng.gen_bool(NEUTRAL_ENDORSER_RATE) {
                let outlet = CENTER_MEDIA[rng.gen_range(0..CENTER_MEDIA.len())];
                endorsements.push(EndorsementRecord {
                    user_id: ids[user].clone(),
                    media_handle: outlet.to_owned(),
                    count: rng.gen_range(1..=4),
                });
            }
        }
    }

    let users: Vec<UserRecord> = (0..n)
        .map(|i| UserRecord {
            user_id: ids[i].clone(),
            description: descriptions[i].clone(),
            verified: rng.gen_bool(0.05),
            in_us: true,
            tweet_count: rng.gen_range(2..200),
            bot_score: Some(rng.gen::<f64>()),
        })
        .collect();

    // Stochastic block model over ordered pairs; counts always survive the
    // weight-2 filter.
    let mut edges: Vec<RawEdge> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let p = match (community[i], community[j]) {
                (Polarity::Left, Polarity::Left) => cfg.p_in_left,
                (Polarity::Right, Polarity::Right) => cfg.p_in_right,
                _ => cfg.p_out,
            };
            if p > 0.0 && rng.gen_bool(p) {
                let extra = match rng.gen_range(0..100) {
                    0..=59 => 0,
                    60..=84 => 1,
                    85..=94 => 2,
                    _ => 3,
                };
                edges.push(RawEdge {
                    src: ids[i].clone(),
                    dst: ids[j].clone(),
                    count: 2 + extra,
                });
            }
        }
    }

    // Random token vectors over both vocabularies plus the hashtag words.
    let mut vector_map = std::collections::BTreeMap::new();
    let mut all_tokens: Vec<String> = Vec::new();
    for side in [Polarity::Left, Polarity::Right] {
        for idx in 0..cfg.vocab_size {
            all_tokens.push(token(side, idx));
        }
    }
    for tag in LEFT_HASHTAGS.iter().chain(&RIGHT_HASHTAGS) {
        all_tokens.push(tag.trim_start_matches('#').to_lowercase());
    }
    for tok in all_tokens {
        let v: Vec<f64> = (0..VECTOR_DIM).map(|_| rng.gen_range(-1.0..1.0)).collect();
        vector_map.insert(tok, v);
    }
    let vectors = ExternalVectors::new(vector_map)?;

    let truth: Vec<(UserId, Polarity)> =
        (0..n).map(|i| (ids[i].clone(), community[i])).collect();

    Ok(SynthCorpus {
        users,
        edges,
        endorsements,
        truth,
        vectors,
    })
}

/// Write `users.jsonl`, `edges.csv`, `endorsements.csv`, `truth.csv`, and
/// `vectors.txt` into a directory.
pub fn write_corpus(dir: impl AsRef<Path>, corpus: &SynthCorpus) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    corpus::save_users(dir.join("users.jsonl"), &corpus.users)?;
    corpus::save_edges(dir.join("edges.csv"), &corpus.edges)?;

    let endorsements_path = dir.join("endorsements.csv");
    let mut writer = csv::Writer::from_path(&endorsements_path)
        .map_err(|e| Error::format(&endorsements_path, e.to_string()))?;
    for rec in &corpus.endorsements {
        writer
            .serialize(rec)
            .map_err(|e| Error::format(&endorsements_path, e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(&endorsements_path, e))?;

    let truth_path = dir.join("truth.csv");
    let mut out = BufWriter::new(File::create(&truth_path).map_err(|e| Error::io(&truth_path, e))?);
    writeln!(out, "user_id,polarity").map_err(|e| Error::io(&truth_path, e))?;
    for (id, polarity) in &corpus.truth {
        writeln!(out, "{id},{polarity}").map_err(|e| Error::io(&truth_path, e))?;
    }
    out.flush().map_err(|e| Error::io(&truth_path, e))?;

    corpus.vectors.save(dir.join("vectors.txt"))?;
    Ok(())
}

/// Read the planted labels written by [`write_corpus`].
pub fn load_truth(path: impl AsRef<Path>) -> Result<Vec<(UserId, Polarity)>> {
    let path = path.as_ref();
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let mut truth = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::format(path, e.to_string()))?;
        let polarity = row
            .get(1)
            .and_then(Polarity::parse)
            .ok_or_else(|| Error::format(path, format!("bad polarity in {row:?}")))?;
        truth.push((row.get(0).unwrap_or_default().into(), polarity));
    }
    Ok(truth)
}
