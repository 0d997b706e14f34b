//! The preprocessing filters: activity, profile, bot-score quantile, and
//! the cascading minimum-degree rule.
//!
//! ```bash
//! cargo run --example ingest_and_filter
//! ```

use retweet_polarity::corpus::{preprocess, FilterConfig};
use retweet_polarity::synth::{generate, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();

    let corpus = generate(&SynthConfig {
        n_left: 600,
        n_right: 400,
        p_in_left: 0.03,
        p_in_right: 0.06,
        p_out: 0.003,
        rng_seed: 7,
        ..SynthConfig::default()
    })?;

    let cfg = FilterConfig::default();
    println!(
        "filters: tweets >= {}, non-empty profile, drop top {:.0}% bot scores,",
        cfg.min_tweets,
        cfg.drop_bot_quantile * 100.0
    );
    println!(
        "         then cascade-remove users with degree < {} on weight-{}+ edges\n",
        cfg.min_degree, cfg.min_weight
    );

    let (users, edges) = preprocess(&corpus.users, &corpus.edges, &cfg);
    println!("users: {} -> {}", corpus.users.len(), users.len());
    println!("edges: {} -> {}", corpus.edges.len(), edges.len());

    // The filters are a fixpoint: running them again changes nothing.
    let (again_users, again_edges) = preprocess(&users, &edges, &cfg);
    assert_eq!(users, again_users);
    assert_eq!(edges, again_edges);
    println!("second pass is a no-op (fixpoint reached)");
    Ok(())
}
