//! Political-leaning estimation of social-media users from two weak signals
//! that tend to agree: who they retweet, and how they describe themselves.
//!
//! The pipeline ingests user profiles and retweet edges, pseudo-labels a
//! seed set from partisan profile hashtags and media endorsements, trains a
//! text encoder on the retweet graph with a Siamese triplet objective, and
//! fits a logistic head on the frozen embeddings. Baselines (averaged word
//! vectors, node2vec, label propagation, random/majority), stratified
//! cross-validation, and echo-chamber audience reports round out the
//! toolkit, along with a synthetic corpus generator that makes everything
//! runnable without real data.
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run --example synth_corpus       # generate a synthetic corpus
//! cargo run --example ingest_and_filter  # preprocessing filters
//! cargo run --example build_graph        # the retweet graph
//! cargo run --example seed_users         # pseudo-labeling rules
//! cargo run --example train_embeddings   # Siamese triplet training
//! cargo run --example score_users        # head fitting and scoring
//! cargo run --example compare_models     # cross-validated model comparison
//! cargo run --example echo_chambers      # audience-distribution analysis
//! ```
//!
//! The same stages are scriptable through the `retweet-polarity` binary; see
//! the README for the file formats it reads and writes.

pub mod analysis;
pub mod baselines;
pub mod corpus;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod graph;
pub mod head;
pub mod pipeline;
pub mod seeding;
pub mod siamese;
pub mod synth;

pub use corpus::{UserId, UserRecord};
pub use error::{Error, Result};
pub use graph::RetweetGraph;
pub use seeding::{Polarity, SeedLabel};
pub use siamese::PolarityScore;

/// Split one master seed into independent per-stage seeds, so stages are
/// reproducible in isolation.
pub fn derive_seed(master: u64, stage: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in master.to_le_bytes().iter().chain(stage.as_bytes()) {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
