//! Pseudo-labeling: partisan profile hashtags, media-endorsement scores,
//! and the combination rule.
//!
//! ```bash
//! cargo run --example seed_users
//! ```

use retweet_polarity::corpus::EndorsementRecord;
use retweet_polarity::seeding::{
    generate_seeds, hashtag_label, media_label, media_score, HashtagLexicon, MediaMeanMode,
    MediaTable, SeedingConfig,
};
use retweet_polarity::synth::{generate, SynthConfig};

fn main() -> retweet_polarity::Result<()> {
    env_logger::init();
    let lexicon = HashtagLexicon::builtin();
    let media = MediaTable::builtin();
    println!(
        "builtin lexicon: {} left / {} right hashtags; media table: {} outlets\n",
        lexicon.left().len(),
        lexicon.right().len(),
        media.len()
    );

    for profile in ["Mom of 3. #Resist!", "#MAGA all the way", "#Resist #MAGA", "just vibes"] {
        println!("hashtag_label({profile:?}) = {:?}", hashtag_label(profile, &lexicon));
    }

    let endorsements = vec![
        EndorsementRecord { user_id: "u".into(), media_handle: "FoxNews".into(), count: 3 },
        EndorsementRecord { user_id: "u".into(), media_handle: "CNN".into(), count: 1 },
    ];
    let score = media_score(&endorsements, &media, 2, MediaMeanMode::CountWeighted).unwrap();
    println!("\nFoxNews x3 + CNN x1 -> media score {score} -> {:?}", media_label(score));

    // Full corpus run.
    let corpus = generate(&SynthConfig {
        n_left: 600,
        n_right: 400,
        rng_seed: 5,
        ..SynthConfig::default()
    })?;
    let (seeds, summary) = generate_seeds(
        &corpus.users,
        &corpus.endorsements,
        &lexicon,
        &media,
        &SeedingConfig::default(),
    );
    println!("\ncorpus of {} users:", corpus.users.len());
    println!("  seeds:     {}", seeds.len());
    println!("  hashtag:   {}", summary.n_hashtag);
    println!("  media:     {}", summary.n_media);
    println!("  overlap:   {}", summary.n_overlap);
    println!("  conflicts: {}", summary.n_conflict);
    println!("  left frac: {:.3}", summary.left_fraction);
    Ok(())
}
