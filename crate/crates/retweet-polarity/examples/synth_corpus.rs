//! Generate a synthetic two-community corpus and write its files.
//!
//! ```bash
//! cargo run --example synth_corpus -- /tmp/corpus
//! ```

use retweet_polarity::seeding::Polarity;
use retweet_polarity::synth::{generate, write_corpus, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "/tmp/retweet-polarity-corpus".to_owned());

    let cfg = SynthConfig {
        n_left: 600,
        n_right: 400,
        rng_seed: 42,
        ..SynthConfig::default()
    };
    let corpus = generate(&cfg)?;

    let n_right_truth = corpus
        .truth
        .iter()
        .filter(|(_, p)| *p == Polarity::Right)
        .count();
    println!("users:        {}", corpus.users.len());
    println!("edges:        {}", corpus.edges.len());
    println!("endorsements: {}", corpus.endorsements.len());
    println!("planted right-leaning: {n_right_truth}");
    println!();
    for user in corpus.users.iter().take(3) {
        println!("{}: {:?}", user.user_id, user.description);
    }

    write_corpus(&out_dir, &corpus)?;
    println!("\nwrote users.jsonl, edges.csv, endorsements.csv, truth.csv, vectors.txt to {out_dir}");
    Ok(())
}
