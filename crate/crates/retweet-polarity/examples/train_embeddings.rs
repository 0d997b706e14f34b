//! Unsupervised Siamese triplet training on the retweet graph, and what it
//! does to the embedding geometry.
//!
//! ```bash
//! cargo run --example train_embeddings
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retweet_polarity::corpus::{preprocess, FilterConfig};
use retweet_polarity::encoder::EncoderConfig;
use retweet_polarity::graph::RetweetGraph;
use retweet_polarity::seeding::Polarity;
use retweet_polarity::siamese::{train_unsupervised, TripletConfig};
use retweet_polarity::synth::{generate, SynthConfig};
use std::collections::BTreeMap;

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb).max(1e-12)
}

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();

    let corpus = generate(&SynthConfig {
        n_left: 600,
        n_right: 400,
        p_in_left: 0.03,
        p_in_right: 0.06,
        p_out: 0.003,
        rng_seed: 3,
        ..SynthConfig::default()
    })?;
    let (users, edges) = preprocess(&corpus.users, &corpus.edges, &FilterConfig::default());
    let graph = RetweetGraph::build_with_nodes(users.iter().map(|u| &u.user_id), &edges, 2);

    let triplet = TripletConfig {
        epochs: 3,
        rng_seed: 11,
        ..TripletConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let params = EncoderConfig {
        embed_dim: 64,
        ..EncoderConfig::default()
    }
    .init_params(&mut rng);

    println!(
        "training on {} positive pairs ({:?} sampling, lr {}, {} epochs)...",
        graph.undirected_edges().len(),
        triplet.sampling,
        triplet.learning_rate,
        triplet.epochs
    );
    let (params, report) = train_unsupervised(&graph, &users, params, &triplet)?;
    for (epoch, loss) in report.epoch_mean_loss.iter().enumerate() {
        println!("  epoch {epoch}: mean triplet loss {loss:.4}");
    }

    // Embeddings of same-community users should now be closer than
    // cross-community ones.
    let side: BTreeMap<_, _> = corpus.truth.iter().cloned().collect();
    let embeddings: Vec<(Polarity, Vec<f64>)> = users
        .iter()
        .map(|u| (side[&u.user_id], params.encode(&params.featurize(&u.description))))
        .collect();
    let (mut intra, mut inter) = ((0.0, 0usize), (0.0, 0usize));
    for i in 0..embeddings.len() {
        for j in (i + 1)..embeddings.len().min(i + 40) {
            let c = cosine(&embeddings[i].1, &embeddings[j].1);
            if embeddings[i].0 == embeddings[j].0 {
                intra = (intra.0 + c, intra.1 + 1);
            } else {
                inter = (inter.0 + c, inter.1 + 1);
            }
        }
    }
    println!(
        "\nmean cosine within community: {:.3}, across: {:.3}",
        intra.0 / intra.1 as f64,
        inter.0 / inter.1 as f64
    );
    Ok(())
}
