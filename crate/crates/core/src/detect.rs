//! Score-curve to boundary conversion.
//!
//! A curve is optionally smoothed, split into maximal runs of positions at
//! or above the threshold, and each run becomes one boundary. Positioning
//! the boundary at the run's score-weighted centroid (rather than a fixed
//! segment center) frees predictions from the fixed-length segment grid.

use crate::data::{BoundaryList, Prediction, ScoreCurve};
use crate::error::{Error, Result};

/// Detection parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    /// Scores at or above this value are boundary-positive.
    pub threshold: f64,
    /// Gaussian smoothing width in seconds; 0 disables smoothing.
    pub smooth_sd: f64,
    /// Use the score-weighted centroid of each run instead of its peak.
    pub refine: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            threshold: 0.5,
            smooth_sd: 0.0,
            refine: true,
        }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.threshold.is_finite() || self.threshold <= 0.0 || self.threshold >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "detect.threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if !self.smooth_sd.is_finite() || self.smooth_sd < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "detect.smooth_sd must be >= 0, got {}",
                self.smooth_sd
            )));
        }
        Ok(())
    }
}

/// Discrete Gaussian smoothing with kernel radius `ceil(3 * sd / stride)`
/// and mirrored boundary handling. `sd = 0` returns the curve unchanged;
/// constant curves pass through exactly because the kernel is normalized.
pub fn smooth(curve: &ScoreCurve, sd: f64) -> ScoreCurve {
    if sd <= 0.0 {
        return curve.clone();
    }
    let stride = curve.stride();
    let radius = (3.0 * sd / stride).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for j in -(radius as isize)..=(radius as isize) {
        let x = j as f64 * stride;
        kernel.push((-x * x / (2.0 * sd * sd)).exp());
    }
    let norm: f64 = kernel.iter().sum();

    let scores = curve.scores();
    let n = scores.len();
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let j = i as isize + k as isize - radius as isize;
                acc += w * scores[reflect(j, n)];
            }
            (acc / norm).clamp(0.0, 1.0)
        })
        .collect();

    ScoreCurve::new(curve.meta().clone(), stride, curve.offset(), smoothed)
        .expect("smoothing preserves curve invariants")
}

/// Mirrors an index about the first/last sample (x[-1] maps to x[1]).
fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

/// Detects boundaries and keeps each run's peak score as its confidence.
pub fn detect(curve: &ScoreCurve, config: &DetectConfig) -> Prediction {
    let smoothed;
    let curve = if config.smooth_sd > 0.0 {
        smoothed = smooth(curve, config.smooth_sd);
        &smoothed
    } else {
        curve
    };

    let scores = curve.scores();
    let duration = curve.meta().duration();
    // Keep outputs strictly inside the video even when the grid touches 0.
    let edge = duration * 1e-9;

    let mut times = Vec::new();
    let mut confidences = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..=scores.len() {
        let above = i < scores.len() && scores[i] >= config.threshold;
        match (run_start, above) {
            (None, true) => run_start = Some(i),
            (Some(start), false) => {
                let run = &scores[start..i];
                let t = if config.refine {
                    let mass: f64 = run.iter().sum();
                    let weighted: f64 = run
                        .iter()
                        .enumerate()
                        .map(|(k, s)| s * curve.position(start + k))
                        .sum();
                    weighted / mass
                } else {
                    let peak = argmax(run);
                    curve.position(start + peak)
                };
                let clamped = t.clamp(edge, duration - edge);
                if times.last().is_none_or(|&prev| clamped > prev) {
                    times.push(clamped);
                    confidences.push(run[argmax(run)]);
                }
                run_start = None;
            }
            _ => {}
        }
    }

    let boundaries = BoundaryList::new(curve.meta().clone(), times)
        .expect("run centroids stay inside the video");
    Prediction::new(boundaries, confidences).expect("one confidence per run")
}

/// Earliest index of the maximum value.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Detection without the per-boundary confidences.
pub fn detect_boundaries(curve: &ScoreCurve, config: &DetectConfig) -> BoundaryList {
    detect(curve, config).boundaries().clone()
}

/// Peak prominence of a curve: `max(scores) - mean(scores)`.
///
/// Zero for constant curves. A flat curve marks a hard sample, a bumpy
/// one an easy sample; the cutoff between the two lives in the pipeline
/// configuration.
pub fn flatness(curve: &ScoreCurve) -> f64 {
    let scores = curve.scores();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = scores.iter().sum::<f64>() / scores.len() as f64;
    max - mean
}
