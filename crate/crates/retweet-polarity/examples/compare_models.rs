//! Cross-validated comparison of every registered model on a synthetic
//! corpus, printed as a small results table.
//!
//! ```bash
//! cargo run --release --example compare_models
//! ```

use retweet_polarity::corpus::{preprocess, FilterConfig};
use retweet_polarity::eval::{cross_validate, EvalConfig, EvalDataset, ModelId};
use retweet_polarity::graph::RetweetGraph;
use retweet_polarity::seeding::{generate_seeds, HashtagLexicon, MediaTable, SeedingConfig};
use retweet_polarity::synth::{generate, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::Builder::new().parse_filters("warn").init();

    let corpus = generate(&SynthConfig {
        rng_seed: 7,
        ..SynthConfig::default()
    })?;
    let (users, edges) = preprocess(&corpus.users, &corpus.edges, &FilterConfig::default());
    let graph = RetweetGraph::build_with_nodes(users.iter().map(|u| &u.user_id), &edges, 2);
    let (seeds, summary) = generate_seeds(
        &users,
        &corpus.endorsements,
        &HashtagLexicon::builtin(),
        &MediaTable::builtin(),
        &SeedingConfig::default(),
    );
    println!(
        "{} users, {} edges, {} seeds ({:.0}% left)\n",
        users.len(),
        graph.edge_count(),
        summary.n_seeds,
        summary.left_fraction * 100.0
    );

    let data = EvalDataset {
        users: &users,
        graph: &graph,
        seeds: &seeds,
        vectors: Some(&corpus.vectors),
    };
    let cfg = EvalConfig {
        rng_seed: 11,
        ..EvalConfig::default()
    };

    println!("{:<22} {:>7} {:>7} {:>9} {:>7}", "model", "acc", "auc", "macro-F1", "C");
    for model in ModelId::ALL {
        let report = cross_validate(model, &data, &cfg)?;
        println!(
            "{:<22} {:>7.3} {:>7} {:>9.3} {:>7}",
            report.model,
            report.mean.acc,
            report
                .mean
                .auc
                .map_or_else(|| "n/a".into(), |a| format!("{a:.3}")),
            report.mean.f1,
            report
                .best_c
                .map_or_else(|| "-".into(), |c| format!("{c}")),
        );
    }
    Ok(())
}
