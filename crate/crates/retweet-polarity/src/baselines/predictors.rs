//! Label-distribution predictors: the floor any real model has to beat.

use rand::Rng;

use crate::seeding::{Polarity, SeedLabel};

/// Draws labels from the empirical class distribution of the training seeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomPredictor {
    p_left: f64,
}

impl RandomPredictor {
    pub fn fit(seeds: &[SeedLabel]) -> Self {
        let n_left = seeds.iter().filter(|s| s.polarity == Polarity::Left).count();
        let p_left = if seeds.is_empty() {
            0.5
        } else {
            n_left as f64 / seeds.len() as f64
        };
        RandomPredictor { p_left }
    }

    pub fn p_left(&self) -> f64 {
        self.p_left
    }

    pub fn predict_one(&self, rng: &mut impl Rng) -> Polarity {
        if rng.gen::<f64>() < self.p_left {
            Polarity::Left
        } else {
            Polarity::Right
        }
    }

    pub fn predict(&self, n: usize, rng: &mut impl Rng) -> Vec<Polarity> {
        (0..n).map(|_| self.predict_one(rng)).collect()
    }
}

/// The modal class of the seed set, predicted for everyone. An exact tie
/// breaks to Left. `None` on an empty seed set.
pub fn majority_predictor(seeds: &[SeedLabel]) -> Option<Polarity> {
    if seeds.is_empty() {
        return None;
    }
    let n_left = seeds.iter().filter(|s| s.polarity == Polarity::Left).count();
    let n_right = seeds.len() - n_left;
    Some(if n_right > n_left {
        Polarity::Right
    } else {
        Polarity::Left
    })
}
