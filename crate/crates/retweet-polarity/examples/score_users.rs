//! Freeze the trained encoder, fit the logistic head on seed users, and
//! score everyone.
//!
//! ```bash
//! cargo run --example score_users
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retweet_polarity::corpus::{preprocess, FilterConfig};
use retweet_polarity::encoder::EncoderConfig;
use retweet_polarity::graph::RetweetGraph;
use retweet_polarity::seeding::{generate_seeds, HashtagLexicon, MediaTable, SeedingConfig};
use retweet_polarity::siamese::{fit_head, predict, train_unsupervised, TripletConfig};
use retweet_polarity::synth::{generate, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();

    let corpus = generate(&SynthConfig {
        n_left: 600,
        n_right: 400,
        p_in_left: 0.03,
        p_in_right: 0.06,
        p_out: 0.003,
        rng_seed: 9,
        ..SynthConfig::default()
    })?;
    let (users, edges) = preprocess(&corpus.users, &corpus.edges, &FilterConfig::default());
    let graph = RetweetGraph::build_with_nodes(users.iter().map(|u| &u.user_id), &edges, 2);
    let (seeds, _) = generate_seeds(
        &users,
        &corpus.endorsements,
        &HashtagLexicon::builtin(),
        &MediaTable::builtin(),
        &SeedingConfig::default(),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = EncoderConfig::default().init_params(&mut rng);
    let (params, _) = train_unsupervised(
        &graph,
        &users,
        params,
        &TripletConfig {
            rng_seed: 4,
            ..TripletConfig::default()
        },
    )?;

    // The encoder stays frozen; only the head sees labels.
    let head = fit_head(&params, &users, &seeds, 100.0)?;
    let mut scores: Vec<_> = users.iter().map(|u| predict(&params, &head, u)).collect();
    scores.sort_by(|a, b| a.p_right.partial_cmp(&b.p_right).unwrap());

    println!("{} users scored; p_right percentiles:", scores.len());
    for pct in [0, 10, 25, 50, 75, 90, 99] {
        let idx = (pct * (scores.len() - 1)) / 100;
        println!("  p{pct:<3} {:.4}", scores[idx].p_right);
    }
    println!("\nmost right-leaning profiles:");
    for s in scores.iter().rev().take(3) {
        let user = users.iter().find(|u| u.user_id == s.user_id).unwrap();
        println!("  {:.4} {}", s.p_right, user.description);
    }
    println!("most left-leaning profiles:");
    for s in scores.iter().take(3) {
        let user = users.iter().find(|u| u.user_id == s.user_id).unwrap();
        println!("  {:.4} {}", s.p_right, user.description);
    }
    Ok(())
}
