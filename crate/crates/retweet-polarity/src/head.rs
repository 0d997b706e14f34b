//! L2-regularized logistic regression used as the classification head over
//! frozen embeddings (and over the baseline embeddings, which share the same
//! contract). Right is the positive class.
//!
//! The objective is mean log-loss plus `||w||^2 / (2C)` with an unregularized
//! intercept, minimized by Nesterov-accelerated gradient descent with a fixed
//! `1/L` step. The mean formulation makes the optimum invariant under
//! duplicating the training set, and starting from zero makes label flips
//! negate the trajectory exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::Polarity;

/// Weights of the classification head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeadParams {
    pub weight: Vec<f64>,
    pub bias: f64,
}

impl HeadParams {
    /// `sigmoid(w . x + b)`: the probability of the Right class.
    pub fn score(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.weight.len(), "embedding dimension mismatch");
        let z = self.bias + self.weight.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        sigmoid(z)
    }

    /// Hard label at the 0.5 threshold; an exact tie goes Left.
    pub fn classify(&self, x: &[f64]) -> Polarity {
        if self.score(x) > 0.5 {
            Polarity::Right
        } else {
            Polarity::Left
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::format(path, e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?);
        serde_json::from_reader(file).map_err(|e| Error::format(path, e.to_string()))
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

const MAX_ITER: usize = 1500;
const GRAD_TOL: f64 = 1e-10;

/// Fit the head on embeddings and labels. `c` is the inverse regularization
/// strength; larger values regularize less. Fails unless both classes are
/// present.
pub fn fit(xs: &[Vec<f64>], ys: &[Polarity], c: f64) -> Result<HeadParams> {
    assert_eq!(xs.len(), ys.len(), "features/labels length mismatch");
    let n = xs.len();
    if n == 0
        || ys.iter().all(|&y| y == Polarity::Right)
        || ys.iter().all(|&y| y == Polarity::Left)
    {
        return Err(Error::SingleClass);
    }
    let dim = xs[0].len();
    let signs: Vec<f64> = ys
        .iter()
        .map(|&y| if y == Polarity::Right { 1.0 } else { -1.0 })
        .collect();

    // Lipschitz bound for the gradient of the objective: the log-loss part is
    // at most trace(X~^T X~) / (4n) with the intercept column included, plus
    // 1/C from the regularizer.
    let mean_sq: f64 = xs
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .sum::<f64>()
        / n as f64;
    let lipschitz = 0.25 * mean_sq + 1.0 / c;
    let step = 1.0 / lipschitz;

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut vw = w.clone();
    let mut vb = b;

    let mut grad_w = vec![0.0; dim];
    for t in 0..MAX_ITER {
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (x, &sign) in xs.iter().zip(&signs) {
            let z = vb + vw.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            // d/dz mean log(1 + exp(-sign z)) = -sign * sigmoid(-sign z) / n
            let coeff = -sign * sigmoid(-sign * z) / n as f64;
            for (g, v) in grad_w.iter_mut().zip(x) {
                *g += coeff * v;
            }
            grad_b += coeff;
        }
        for (g, wv) in grad_w.iter_mut().zip(&vw) {
            *g += wv / c;
        }

        let max_grad = grad_w
            .iter()
            .chain(std::iter::once(&grad_b))
            .fold(0.0f64, |m, g| m.max(g.abs()));
        if max_grad < GRAD_TOL {
            w = vw;
            b = vb;
            break;
        }

        let momentum = t as f64 / (t as f64 + 3.0);
        let mut next_w = Vec::with_capacity(dim);
        for j in 0..dim {
            let nw = vw[j] - step * grad_w[j];
            next_w.push(nw);
        }
        let next_b = vb - step * grad_b;
        for j in 0..dim {
            vw[j] = next_w[j] + momentum * (next_w[j] - w[j]);
        }
        vb = next_b + momentum * (next_b - b);
        w = next_w;
        b = next_b;
    }

    if w.iter().chain(std::iter::once(&b)).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "classification head".to_owned(),
        });
    }
    Ok(HeadParams { weight: w, bias: b })
}
