//! Audience-distribution analysis: partition users by score quantile, find
//! each extreme's most-retweeted accounts, and measure how partisan their
//! audiences are.
//!
//! ```bash
//! cargo run --example echo_chambers
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retweet_polarity::analysis::{echo_report, PartitionTag};
use retweet_polarity::corpus::{preprocess, FilterConfig};
use retweet_polarity::encoder::EncoderConfig;
use retweet_polarity::graph::RetweetGraph;
use retweet_polarity::seeding::{generate_seeds, HashtagLexicon, MediaTable, SeedingConfig};
use retweet_polarity::siamese::{fit_head, predict, train_unsupervised, TripletConfig};
use retweet_polarity::synth::{generate, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();

    // The default corpus plants asymmetric homophily: the right community
    // is twice as dense, so its audiences should skew harder toward their
    // own side.
    let corpus = generate(&SynthConfig {
        rng_seed: 1,
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
            rng_seed: 2,
            ..TripletConfig::default()
        },
    )?;
    let head = fit_head(&params, &users, &seeds, 100.0)?;
    let scores: Vec<_> = users.iter().map(|u| predict(&params, &head, u)).collect();

    let report = echo_report(&graph, &scores, 0.2, 10)?;
    for group in [&report.far_left, &report.far_right] {
        println!("top accounts among {} users:", group.group.as_str());
        println!(
            "  {:<8} {:>5} {:>6} {:>7} {:>7} {:>7}",
            "account", "rank", "n", "f-left", "middle", "f-right"
        );
        for account in &group.accounts {
            println!(
                "  {:<8} {:>5} {:>6} {:>7.3} {:>7.3} {:>7.3}",
                account.account.as_str(),
                account.rank,
                account.n_retweeters,
                account.frac_left,
                account.frac_middle,
                account.frac_right
            );
        }
        println!(
            "  mean own-group audience share: {:.3}\n",
            group.mean_own_group_fraction()
        );
    }
    println!(
        "far-left audience share of far-right-popular accounts: {:.4}",
        report.far_right.mean_fraction(PartitionTag::FarLeft)
    );
    Ok(())
}
