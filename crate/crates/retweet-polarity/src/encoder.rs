//! Trainable text encoder: hashed bag-of-ngrams features through a linear
//! projection into a d-dimensional embedding.
//!
//! A profile description is lowercased and split into word tokens; unigrams
//! and bigrams are hashed into `vocab_dim` buckets. At encode time the sparse
//! count vector is L2-normalized and projected, so embedding magnitudes stay
//! on a consistent scale regardless of profile length.
//!
//! # Checkpoint format
//!
//! Binary, little-endian, versioned by magic:
//!
//! ```text
//! bytes 0..8   magic "RTPLENC1"
//! bytes 8..12  vocab_dim  (u32)
//! bytes 12..16 embed_dim  (u32)
//! bytes 16..24 token_hash_seed (u64)
//! then vocab_dim * embed_dim f64: projection, row-major (row = feature)
//! then embed_dim f64: bias
//! ```

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CHECKPOINT_MAGIC: &[u8; 8] = b"RTPLENC1";

/// Sparse hashed term-frequency vector: feature index -> count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProfileFeatures {
    counts: BTreeMap<u32, u32>,
}

impl ProfileFeatures {
    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    /// The counts scaled to unit L2 norm; empty input stays empty.
    pub fn normalized(&self) -> Vec<(u32, f64)> {
        let norm = (self
            .counts
            .values()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>())
        .sqrt();
        if norm == 0.0 {
            return Vec::new();
        }
        self.counts
            .iter()
            .map(|(&f, &c)| (f, c as f64 / norm))
            .collect()
    }
}

/// Lowercased word tokens: maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Seeded FNV-1a over the term bytes. Stable across runs and platforms,
/// unlike the std hasher.
fn hash_term(term: &str, seed: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for byte in term.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Hash unigrams and bigrams of the text into `vocab_dim` buckets.
/// Deterministic for a fixed `(text, vocab_dim, seed)`; empty text gives an
/// empty feature map.
pub fn featurize(text: &str, vocab_dim: u32, seed: u64) -> ProfileFeatures {
    assert!(vocab_dim > 0, "vocab_dim must be positive");
    let tokens = tokenize(text);
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    let mut bump = |term: &str| {
        let idx = (hash_term(term, seed) % u64::from(vocab_dim)) as u32;
        *counts.entry(idx).or_insert(0) += 1;
    };
    for token in &tokens {
        bump(token);
    }
    for pair in tokens.windows(2) {
        bump(&format!("{} {}", pair[0], pair[1]));
    }
    ProfileFeatures { counts }
}

/// Encoder dimensions and hashing seed, as configured from file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncoderConfig {
    pub vocab_dim: u32,
    pub embed_dim: usize,
    pub token_hash_seed: u64,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            vocab_dim: EncoderParams::DEFAULT_VOCAB_DIM,
            embed_dim: EncoderParams::DEFAULT_EMBED_DIM,
            token_hash_seed: 0,
        }
    }
}

impl EncoderConfig {
    pub fn init_params(&self, rng: &mut impl Rng) -> EncoderParams {
        EncoderParams::init(self.vocab_dim, self.embed_dim, self.token_hash_seed, rng)
    }
}

/// Sparse gradient of an encoding with respect to the parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EncodeGrad {
    /// Gradients of the projection rows touched by the input features.
    pub rows: BTreeMap<u32, Vec<f64>>,
    /// Gradient of the bias.
    pub bias: Vec<f64>,
}

/// The encoder's trainable parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    vocab_dim: u32,
    embed_dim: usize,
    /// Row-major `vocab_dim x embed_dim`.
    projection: Vec<f64>,
    bias: Vec<f64>,
    token_hash_seed: u64,
}

impl EncoderParams {
    pub const DEFAULT_VOCAB_DIM: u32 = 1 << 16;
    pub const DEFAULT_EMBED_DIM: usize = 64;

    /// Zero-initialized parameters (encodes everything to the zero vector).
    pub fn zeros(vocab_dim: u32, embed_dim: usize, token_hash_seed: u64) -> Self {
        assert!(vocab_dim > 0 && embed_dim >= 2);
        EncoderParams {
            vocab_dim,
            embed_dim,
            projection: vec![0.0; vocab_dim as usize * embed_dim],
            bias: vec![0.0; embed_dim],
            token_hash_seed,
        }
    }

    /// Random initialization with projection entries of variance `1/embed_dim`,
    /// which puts embeddings of unit feature vectors at norm ~1.
    pub fn init(vocab_dim: u32, embed_dim: usize, token_hash_seed: u64, rng: &mut impl Rng) -> Self {
        let mut params = Self::zeros(vocab_dim, embed_dim, token_hash_seed);
        let bound = (3.0 / embed_dim as f64).sqrt();
        for w in &mut params.projection {
            *w = rng.gen_range(-bound..bound);
        }
        params
    }

    pub fn vocab_dim(&self) -> u32 {
        self.vocab_dim
    }

    pub fn embed_dim(&self) -> usize {
        self.embed_dim
    }

    pub fn token_hash_seed(&self) -> u64 {
        self.token_hash_seed
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    fn row(&self, feature: u32) -> &[f64] {
        let start = feature as usize * self.embed_dim;
        &self.projection[start..start + self.embed_dim]
    }

    /// Featurize text with this encoder's hashing configuration.
    pub fn featurize(&self, text: &str) -> ProfileFeatures {
        featurize(text, self.vocab_dim, self.token_hash_seed)
    }

    /// `projection^T · x + bias` for an already-normalized sparse vector.
    pub fn project(&self, x: &[(u32, f64)]) -> Vec<f64> {
        let mut out = self.bias.clone();
        for &(f, v) in x {
            assert!(f < self.vocab_dim, "feature index {f} out of range");
            for (o, w) in out.iter_mut().zip(self.row(f)) {
                *o += v * w;
            }
        }
        out
    }

    /// Embed a feature map: L2-normalize, project, add bias. Empty features
    /// encode to the bias vector.
    pub fn encode(&self, features: &ProfileFeatures) -> Vec<f64> {
        let out = self.project(&features.normalized());
        debug_assert!(out.iter().all(|v| v.is_finite()), "non-finite embedding");
        out
    }

    /// Exact gradients of `upstream · encode(features)` with respect to the
    /// projection rows touched by `features` and the bias.
    pub fn encode_backward(&self, features: &ProfileFeatures, upstream: &[f64]) -> EncodeGrad {
        assert_eq!(upstream.len(), self.embed_dim, "upstream dimension mismatch");
        let mut rows = BTreeMap::new();
        for (f, v) in features.normalized() {
            rows.insert(f, upstream.iter().map(|&u| u * v).collect());
        }
        EncodeGrad {
            rows,
            bias: upstream.to_vec(),
        }
    }

    /// Add `scale * grad` into the parameters (gradient-descent step with
    /// `scale = -learning_rate`).
    pub fn apply_grad(&mut self, grad: &EncodeGrad, scale: f64) {
        for (&f, g) in &grad.rows {
            let start = f as usize * self.embed_dim;
            for (w, &gv) in self.projection[start..start + self.embed_dim]
                .iter_mut()
                .zip(g)
            {
                *w += scale * gv;
            }
        }
        for (b, &gv) in self.bias.iter_mut().zip(&grad.bias) {
            *b += scale * gv;
        }
    }

    /// Check that every parameter is finite.
    pub fn validate(&self) -> Result<()> {
        if self.projection.iter().chain(&self.bias).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: "encoder parameters".to_owned(),
            })
        }
    }

    /// Write the versioned binary checkpoint described in the module docs.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        let write = |out: &mut BufWriter<File>, bytes: &[u8]| -> Result<()> {
            out.write_all(bytes).map_err(|e| Error::io(path, e))
        };
        write(&mut out, CHECKPOINT_MAGIC)?;
        write(&mut out, &self.vocab_dim.to_le_bytes())?;
        write(&mut out, &(self.embed_dim as u32).to_le_bytes())?;
        write(&mut out, &self.token_hash_seed.to_le_bytes())?;
        for v in self.projection.iter().chain(&self.bias) {
            write(&mut out, &v.to_le_bytes())?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Load a checkpoint written by [`EncoderParams::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(Error::format(path, "not an encoder checkpoint (bad magic)"));
        }
        let mut u32buf = [0u8; 4];
        reader.read_exact(&mut u32buf).map_err(|e| Error::io(path, e))?;
        let vocab_dim = u32::from_le_bytes(u32buf);
        reader.read_exact(&mut u32buf).map_err(|e| Error::io(path, e))?;
        let embed_dim = u32::from_le_bytes(u32buf) as usize;
        let mut u64buf = [0u8; 8];
        reader.read_exact(&mut u64buf).map_err(|e| Error::io(path, e))?;
        let token_hash_seed = u64::from_le_bytes(u64buf);
        if vocab_dim == 0 || embed_dim < 2 {
            return Err(Error::format(path, "invalid checkpoint dimensions"));
        }
        let n = vocab_dim as usize * embed_dim + embed_dim;
        let mut values = Vec::with_capacity(n);
        let mut f64buf = [0u8; 8];
        for _ in 0..n {
            reader.read_exact(&mut f64buf).map_err(|e| Error::io(path, e))?;
            values.push(f64::from_le_bytes(f64buf));
        }
        let bias = values.split_off(vocab_dim as usize * embed_dim);
        let params = EncoderParams {
            vocab_dim,
            embed_dim,
            projection: values,
            bias,
            token_hash_seed,
        };
        params.validate()?;
        Ok(params)
    }

    /// Stable byte serialization, used by tests to check the freezing
    /// contract bit-for-bit.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut bytes = Vec::with_capacity(24 + 8 * (self.projection.len() + self.bias.len()));
        bytes.extend_from_slice(&self.vocab_dim.to_le_bytes());
        bytes.extend_from_slice(&(self.embed_dim as u32).to_le_bytes());
        bytes.extend_from_slice(&self.token_hash_seed.to_le_bytes());
        for v in self.projection.iter().chain(&self.bias) {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bytes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn featurize_empty_text() {
        assert!(featurize("", 1 << 16, 7).is_empty());
        assert!(featurize("  \t ", 1 << 16, 7).is_empty());
    }

    #[test]
    fn featurize_is_deterministic() {
        let a = featurize("Proud parent. #VoteBlue", 1 << 16, 7);
        let b = featurize("Proud parent. #VoteBlue", 1 << 16, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn featurize_two_words_gives_three_features() {
        // Two unigrams plus one bigram, all with count 1.
        let f = featurize("vote blue", 1 << 16, 7);
        assert_eq!(f.len(), 3);
        assert!(f.iter().all(|(_, c)| c == 1));
    }

    #[test]
    fn tokenize_lowercases_and_splits_on_punctuation() {
        assert_eq!(tokenize("Vote BLUE!"), vec!["vote", "blue"]);
        assert_eq!(tokenize("#MAGA all-the-way"), vec!["maga", "all", "the", "way"]);
    }

    #[test]
    fn encode_empty_features_returns_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut params = EncoderParams::init(64, 4, 7, &mut rng);
        params.bias = vec![0.5, -1.0, 0.0, 2.0];
        let out = params.encode(&ProfileFeatures::default());
        assert_eq!(out, vec![0.5, -1.0, 0.0, 2.0]);
    }

    #[test]
    fn encode_zero_params_gives_zero_vector() {
        let params = EncoderParams::zeros(64, 4, 7);
        let out = params.encode(&params.featurize("anything at all"));
        assert_eq!(out, vec![0.0; 4]);
    }

    #[test]
    fn encode_one_hot_feature_selects_projection_row() {
        let mut params = EncoderParams::zeros(8, 3, 7);
        params.bias = vec![1.0, 1.0, 1.0];
        let row = 5usize;
        params.projection[row * 3..row * 3 + 3].copy_from_slice(&[2.0, 0.0, -4.0]);
        // A single feature normalizes to 1.0 regardless of count.
        let out = params.project(&[(5, 1.0)]);
        assert_eq!(out, vec![3.0, 1.0, -3.0]);
    }

    #[test]
    fn backward_zero_upstream_gives_zero_grads() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let params = EncoderParams::init(64, 4, 7, &mut rng);
        let grad = params.encode_backward(&params.featurize("some words"), &[0.0; 4]);
        assert!(grad.bias.iter().all(|&g| g == 0.0));
        assert!(grad.rows.values().flatten().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_empty_features_touches_only_bias() {
        let params = EncoderParams::zeros(64, 4, 7);
        let upstream = [1.0, -2.0, 3.0, 0.5];
        let grad = params.encode_backward(&ProfileFeatures::default(), &upstream);
        assert!(grad.rows.is_empty());
        assert_eq!(grad.bias, upstream.to_vec());
    }

    /// Central-difference check of `encode_backward` on random draws.
    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-5;
        for draw in 0..100 {
            let vocab = 32;
            let dim = 2 + (draw % 5);
            let mut params = EncoderParams::init(vocab, dim, draw as u64, &mut rng);
            let text: String = (0..(1 + draw % 6))
                .map(|i| format!("w{} ", (draw * 7 + i * 3) % 11))
                .collect();
            let features = params.featurize(&text);
            let upstream: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();

            let scalar = |p: &EncoderParams| -> f64 {
                p.encode(&features)
                    .iter()
                    .zip(&upstream)
                    .map(|(a, b)| a * b)
                    .sum()
            };

            let grad = params.encode_backward(&features, &upstream);
            let mut max_rel = 0.0f64;
            let mut check = |params: &mut EncoderParams, idx: GradIdx, analytic: f64| {
                let orig = idx.get(params);
                idx.set(params, orig + h);
                let plus = scalar(params);
                idx.set(params, orig - h);
                let minus = scalar(params);
                idx.set(params, orig);
                let fd = (plus - minus) / (2.0 * h);
                let rel = (analytic - fd).abs() / fd.abs().max(1e-8);
                max_rel = max_rel.max(rel);
            };

            for (&f, g) in &grad.rows {
                for (j, &gj) in g.iter().enumerate() {
                    check(&mut params, GradIdx::Proj(f as usize * dim + j), gj);
                }
            }
            for j in 0..dim {
                check(&mut params, GradIdx::Bias(j), grad.bias[j]);
            }
            // A row not touched by the features must have zero gradient.
            let untouched = (0..vocab).find(|f| !grad.rows.contains_key(f));
            if let Some(f) = untouched {
                check(&mut params, GradIdx::Proj(f as usize * dim), 0.0);
            }
            assert!(max_rel <= 1e-4, "draw {draw}: relative error {max_rel}");
        }
    }

    enum GradIdx {
        Proj(usize),
        Bias(usize),
    }

    impl GradIdx {
        fn get(&self, p: &EncoderParams) -> f64 {
            match *self {
                GradIdx::Proj(i) => p.projection[i],
                GradIdx::Bias(i) => p.bias[i],
            }
        }

        fn set(&self, p: &mut EncoderParams, v: f64) {
            match *self {
                GradIdx::Proj(i) => p.projection[i] = v,
                GradIdx::Bias(i) => p.bias[i] = v,
            }
        }
    }

    #[test]
    fn project_is_linear_modulo_bias() {
        // encode(ax + by) = a*encode(x) + b*encode(y) - (a+b-1)*bias for
        // vectors that are already normalized.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = EncoderParams::init(16, 3, 7, &mut rng);
        let x = vec![(2u32, 0.6), (5u32, 0.8)];
        let y = vec![(3u32, 1.0)];
        let (a, b) = (0.7, -1.3);
        let combo: Vec<(u32, f64)> = vec![(2, a * 0.6), (5, a * 0.8), (3, b)];
        let lhs = params.project(&combo);
        let ex = params.project(&x);
        let ey = params.project(&y);
        for j in 0..3 {
            let rhs = a * ex[j] + b * ey[j] - (a + b - 1.0) * params.bias[j];
            assert!((lhs[j] - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn checkpoint_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = EncoderParams::init(128, 8, 42, &mut rng);
        let f = tempfile::NamedTempFile::new().unwrap();
        params.save(f.path()).unwrap();
        let loaded = EncoderParams::load(f.path()).unwrap();
        assert_eq!(params, loaded);
        assert_eq!(params.to_bytes(), loaded.to_bytes());
    }

    #[test]
    fn load_rejects_wrong_magic() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), b"NOTACKPT________").unwrap();
        assert!(EncoderParams::load(f.path()).is_err());
    }

    #[test]
    fn validate_rejects_non_finite() {
        let mut params = EncoderParams::zeros(8, 2, 7);
        params.projection[3] = f64::NAN;
        assert!(params.validate().is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn featurize_deterministic(text in "[a-z #]{0,40}", seed in any::<u64>()) {
                prop_assert_eq!(
                    featurize(&text, 1 << 12, seed),
                    featurize(&text, 1 << 12, seed)
                );
            }

            #[test]
            fn feature_indices_in_range(text in "\\PC{0,60}", vocab in 1..5000u32) {
                let f = featurize(&text, vocab, 9);
                prop_assert!(f.iter().all(|(idx, c)| idx < vocab && c >= 1));
            }
        }
    }
}
