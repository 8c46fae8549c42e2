//! Boundary-count-weighted loss.
//!
//! Videos with more boundaries are harder, so each sample's BCE term is
//! weighted by `n / 10` where `n` is its boundary count:
//!
//! ```text
//! loss = sum_i (n[i] / 10) * bce[i]
//! ```
//!
//! The formula is applied literally, including zero weight for samples
//! with no boundaries; [`focal_loss_floored`] exists for callers that
//! cannot afford to drop those samples entirely. A tiny logistic model
//! and full-batch trainer exercise the loss and its analytic gradient.

use crate::error::{Error, Result};
use crate::rnd;

/// Probabilities are clamped to `[EPS, 1 - EPS]` before taking logs.
const BCE_EPS: f64 = 1e-12;

/// Binary cross entropy of one probability against a 0/1 label.
pub fn bce(prob: f64, label: u8) -> f64 {
    let p = prob.clamp(BCE_EPS, 1.0 - BCE_EPS);
    if label == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// Per-sample BCE terms paired with per-sample boundary counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FocalBatch {
    bce: Vec<f64>,
    counts: Vec<u32>,
}

impl FocalBatch {
    pub fn new(bce: Vec<f64>, counts: Vec<u32>) -> Result<Self> {
        if bce.len() != counts.len() {
            return Err(Error::InvalidInput(format!(
                "{} bce terms but {} counts",
                bce.len(),
                counts.len()
            )));
        }
        if let Some(bad) = bce.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidInput(format!(
                "bce terms must be finite and >= 0, got {bad}"
            )));
        }
        Ok(FocalBatch { bce, counts })
    }

    pub fn bce(&self) -> &[f64] {
        &self.bce
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }
}

/// The literal count-weighted sum.
pub fn focal_loss(batch: &FocalBatch) -> f64 {
    batch
        .bce
        .iter()
        .zip(&batch.counts)
        .map(|(&l, &n)| (n as f64 / 10.0) * l)
        .sum()
}

/// Count-weighted sum with a lower bound on each weight, so samples with
/// zero boundaries still contribute. Off by default everywhere; the
/// literal formula is [`focal_loss`].
pub fn focal_loss_floored(batch: &FocalBatch, weight_floor: f64) -> f64 {
    batch
        .bce
        .iter()
        .zip(&batch.counts)
        .map(|(&l, &n)| (n as f64 / 10.0).max(weight_floor) * l)
        .sum()
}

/// Logistic model over a fixed-width feature window.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl ToyModel {
    pub fn prob(&self, features: &[f64]) -> f64 {
        let z: f64 = self
            .weights
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias;
        1.0 / (1.0 + (-z).exp())
    }
}

fn check_shapes(
    model: &ToyModel,
    features: &[Vec<f64>],
    labels: &[u8],
    counts: &[u32],
) -> Result<()> {
    if features.len() != labels.len() || features.len() != counts.len() {
        return Err(Error::InvalidInput(format!(
            "inconsistent batch: {} feature rows, {} labels, {} counts",
            features.len(),
            labels.len(),
            counts.len()
        )));
    }
    if let Some(row) = features.iter().find(|r| r.len() != model.weights.len()) {
        return Err(Error::InvalidInput(format!(
            "feature row of width {} does not match {} weights",
            row.len(),
            model.weights.len()
        )));
    }
    Ok(())
}

/// Count-weighted loss of a logistic model over a batch.
pub fn focal_objective(
    model: &ToyModel,
    features: &[Vec<f64>],
    labels: &[u8],
    counts: &[u32],
) -> Result<f64> {
    check_shapes(model, features, labels, counts)?;
    let bce_terms: Vec<f64> = features
        .iter()
        .zip(labels)
        .map(|(x, &y)| bce(model.prob(x), y))
        .collect();
    Ok(focal_loss(&FocalBatch::new(bce_terms, counts.to_vec())?))
}

/// Analytic gradient of [`focal_objective`] with respect to the weights
/// and the bias. For a logistic head the per-sample BCE gradient is
/// `(p - y) * x`, so each sample contributes `(n / 10) * (p - y) * x`.
pub fn focal_grad(
    model: &ToyModel,
    features: &[Vec<f64>],
    labels: &[u8],
    counts: &[u32],
) -> Result<(Vec<f64>, f64)> {
    check_shapes(model, features, labels, counts)?;
    let mut grad_w = vec![0.0; model.weights.len()];
    let mut grad_b = 0.0;
    for ((x, &y), &n) in features.iter().zip(labels).zip(counts) {
        let weight = n as f64 / 10.0;
        let residual = weight * (model.prob(x) - y as f64);
        for (g, xi) in grad_w.iter_mut().zip(x) {
            *g += residual * xi;
        }
        grad_b += residual;
    }
    Ok((grad_w, grad_b))
}

/// Full-batch gradient descent on the count-weighted loss.
///
/// Only the initialization is random; two runs with the same seed produce
/// identical models. Aborts when the loss exceeds the divergence guard.
pub fn train_toy(
    features: &[Vec<f64>],
    labels: &[u8],
    counts: &[u32],
    lr: f64,
    epochs: usize,
    seed: u64,
) -> Result<ToyModel> {
    if !lr.is_finite() || lr < 0.0 {
        return Err(Error::InvalidConfig(format!("learning rate must be >= 0, got {lr}")));
    }
    let width = features.first().map_or(0, Vec::len);
    let mut rng = rnd::substream(seed, 0);
    let mut model = ToyModel {
        weights: (0..width).map(|_| rnd::range(&mut rng, -0.1, 0.1)).collect(),
        bias: rnd::range(&mut rng, -0.1, 0.1),
    };
    check_shapes(&model, features, labels, counts)?;

    for epoch in 0..epochs {
        let (grad_w, grad_b) = focal_grad(&model, features, labels, counts)?;
        for (w, g) in model.weights.iter_mut().zip(&grad_w) {
            *w -= lr * g;
        }
        model.bias -= lr * grad_b;
        let loss = focal_objective(&model, features, labels, counts)?;
        if !loss.is_finite() || loss > 1e6 {
            return Err(Error::Diverged { epoch, loss });
        }
    }
    Ok(model)
}
