//! Deterministic synthetic corpus generator.
//!
//! Produces ground-truth boundaries, jittered extra raters, and model-like
//! score curves (Gaussian bumps at the true boundaries plus noise), so the
//! whole pipeline runs at desk scale without any video data.
//!
//! Determinism: video `i` consumes ChaCha8 substream `(seed, i)` (see
//! [`crate::rnd`]) in a fixed draw order: duration, boundary count,
//! boundary candidates, rater jitter (rater by rater), then score noise.
//! Regenerating with the same config is bit-identical, and per-video
//! streams make the output independent of any parallel scheduling.

use crate::data::{AnnotationSet, Provenance, ScoreCurve, VideoMeta};
use crate::error::{Error, Result};
use crate::rnd;

/// Duration mixture components, in the order of
/// [`SimConfig::duration_weights`]: three uniform ranges and a point mass.
const DURATION_COMPONENTS: [(f64, f64); 4] = [(2.0, 4.0), (4.0, 8.0), (8.0, 10.0), (10.0, 10.0)];

/// Generator parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub seed: u64,
    pub n_videos: usize,
    /// Mixture weights over the four duration components
    /// uniform(2,4), uniform(4,8), uniform(8,10), exactly 10.
    pub duration_weights: [f64; 4],
    /// Expected boundaries per second.
    pub boundary_rate: f64,
    /// Minimum gap between ground-truth boundaries, seconds.
    pub min_gap: f64,
    /// Boundaries stay this far from both ends, seconds.
    pub margin: f64,
    pub n_raters: usize,
    /// Gaussian jitter applied to the extra raters, seconds.
    pub rater_jitter_sd: f64,
    /// Width of the score bumps at true boundaries, seconds.
    pub bump_width: f64,
    /// Gaussian score noise.
    pub noise_sd: f64,
    /// Score grid stride, seconds.
    pub stride: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 42,
            n_videos: 100,
            duration_weights: [0.25, 0.25, 0.25, 0.25],
            boundary_rate: 0.5,
            min_gap: 0.5,
            margin: 0.3,
            n_raters: 3,
            rater_jitter_sd: 0.1,
            bump_width: 0.12,
            noise_sd: 0.05,
            stride: 0.25,
        }
    }
}

impl SimConfig {
    /// Smallest duration the configured mixture can produce.
    fn min_duration(&self) -> f64 {
        DURATION_COMPONENTS
            .iter()
            .zip(&self.duration_weights)
            .filter(|(_, &w)| w > 0.0)
            .map(|(&(lo, _), _)| lo)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_videos == 0 {
            return Err(Error::InvalidConfig("sim.n_videos must be positive".into()));
        }
        if self.duration_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig("duration weights must be >= 0".into()));
        }
        let sum: f64 = self.duration_weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "duration weights must sum to 1 within 1e-9, got {sum:.12}"
            )));
        }
        for (name, v) in [
            ("sim.boundary_rate", self.boundary_rate),
            ("sim.min_gap", self.min_gap),
            ("sim.margin", self.margin),
            ("sim.rater_jitter_sd", self.rater_jitter_sd),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidConfig(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.noise_sd.is_finite() && (0.0..=1.0).contains(&self.noise_sd)) {
            return Err(Error::InvalidConfig(format!(
                "sim.noise_sd must lie in [0, 1], got {}",
                self.noise_sd
            )));
        }
        if !(self.bump_width.is_finite() && self.bump_width > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sim.bump_width must be > 0, got {}",
                self.bump_width
            )));
        }
        if !(self.stride.is_finite() && self.stride > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sim.stride must be > 0, got {}",
                self.stride
            )));
        }
        if self.n_raters == 0 {
            return Err(Error::InvalidConfig("sim.n_raters must be positive".into()));
        }
        let min_duration = self.min_duration();
        if 2.0 * self.margin >= min_duration {
            return Err(Error::InvalidConfig(format!(
                "twice the margin ({}) must be below the smallest duration ({min_duration})",
                2.0 * self.margin
            )));
        }
        if self.stride / 2.0 >= min_duration {
            return Err(Error::InvalidConfig(format!(
                "stride {} too coarse for the smallest duration {min_duration}",
                self.stride
            )));
        }
        Ok(())
    }
}

/// Generator output. `truncated_videos` counts videos whose boundary
/// target could not be met under the margin and min-gap constraints; the
/// generator shortens those lists instead of failing.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub curves: Vec<ScoreCurve>,
    pub annotations: Vec<AnnotationSet>,
    pub truncated_videos: usize,
}

/// Generates a corpus. Pure function of the config.
pub fn generate(config: &SimConfig) -> Result<Generated> {
    config.validate()?;
    let mut curves = Vec::with_capacity(config.n_videos);
    let mut annotations = Vec::with_capacity(config.n_videos);
    let mut truncated_videos = 0;

    for index in 0..config.n_videos {
        let mut rng = rnd::substream(config.seed, index as u64);
        let meta = VideoMeta::new(format!("v{index:05}"), draw_duration(config, &mut rng))?;

        let (boundaries, truncated) = draw_boundaries(config, meta.duration(), &mut rng);
        if truncated {
            truncated_videos += 1;
        }

        let mut raters = Vec::with_capacity(config.n_raters);
        raters.push(boundaries.clone());
        for _ in 1..config.n_raters {
            raters.push(jitter_rater(config, meta.duration(), &boundaries, &mut rng));
        }

        let scores = draw_scores(config, meta.duration(), &boundaries, &mut rng);
        curves.push(ScoreCurve::with_center_offset(meta.clone(), config.stride, scores)?);
        annotations.push(AnnotationSet::new(meta, raters, Provenance::Human)?);
    }

    Ok(Generated {
        curves,
        annotations,
        truncated_videos,
    })
}

fn draw_duration(config: &SimConfig, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let u = rnd::unit(rng);
    let mut acc = 0.0;
    for (&(lo, hi), &w) in DURATION_COMPONENTS.iter().zip(&config.duration_weights) {
        acc += w;
        if u < acc {
            return if lo == hi { lo } else { rnd::range(rng, lo, hi) };
        }
    }
    // weights sum to 1, so only rounding can land here: take the last
    // positive-weight component
    let last = DURATION_COMPONENTS
        .iter()
        .zip(&config.duration_weights)
        .filter(|(_, &w)| w > 0.0)
        .next_back()
        .map(|(&c, _)| c)
        .unwrap_or((10.0, 10.0));
    if last.0 == last.1 {
        last.0
    } else {
        rnd::range(rng, last.0, last.1)
    }
}

/// Sequential renewal sampling: target a count of `rate * duration`
/// (stochastically rounded so the expectation is exact), then draw
/// candidates uniformly in the margin window and accept those at least
/// `min_gap` from every accepted boundary. Returns the sorted list and
/// whether the target had to be truncated.
fn draw_boundaries(
    config: &SimConfig,
    duration: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> (Vec<f64>, bool) {
    let lo = effective_margin(config.margin, duration);
    let hi = duration - lo;
    let span = hi - lo;

    let expected = config.boundary_rate * duration;
    let mut target = expected.floor() as usize;
    if rnd::unit(rng) < expected - expected.floor() {
        target += 1;
    }

    // Hard capacity of the margin window under the min-gap constraint.
    let capacity = if config.min_gap > 0.0 {
        (span / config.min_gap + 1e-9).floor() as usize + 1
    } else {
        usize::MAX
    };
    let mut truncated = false;
    if target > capacity {
        target = capacity;
        truncated = true;
    }

    let mut accepted: Vec<f64> = Vec::with_capacity(target);
    let mut attempts = 0usize;
    let budget = 64 + 64 * target;
    while accepted.len() < target && attempts < budget {
        attempts += 1;
        let candidate = rnd::range(rng, lo, hi);
        let min_sep = if config.min_gap > 0.0 { config.min_gap } else { 1e-9 };
        if accepted.iter().all(|b| (candidate - b).abs() >= min_sep) {
            accepted.push(candidate);
        }
    }
    if accepted.len() < target {
        truncated = true;
    }
    accepted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (accepted, truncated)
}

/// Rater noise: canonical times plus i.i.d. Gaussian jitter, clamped back
/// into the margin window, re-sorted, and deduplicated at 1e-6 seconds
/// keeping the earlier time.
fn jitter_rater(
    config: &SimConfig,
    duration: f64,
    canonical: &[f64],
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<f64> {
    let lo = effective_margin(config.margin, duration);
    let hi = duration - lo;
    let mut times: Vec<f64> = canonical
        .iter()
        .map(|t| (t + config.rater_jitter_sd * rnd::normal(rng)).clamp(lo, hi))
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut deduped: Vec<f64> = Vec::with_capacity(times.len());
    for t in times {
        if deduped.last().is_none_or(|&prev| t - prev > 1e-6) {
            deduped.push(t);
        }
    }
    deduped
}

fn draw_scores(
    config: &SimConfig,
    duration: f64,
    boundaries: &[f64],
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Vec<f64> {
    let offset = config.stride / 2.0;
    let len = ((duration - offset) / config.stride).floor() as usize + 1;
    let two_var = 2.0 * config.bump_width * config.bump_width;
    (0..len)
        .map(|i| {
            let t = offset + i as f64 * config.stride;
            let signal: f64 = boundaries
                .iter()
                .map(|b| (-(t - b) * (t - b) / two_var).exp())
                .sum();
            let noise = config.noise_sd * rnd::normal(rng);
            (signal + noise).clamp(0.0, 1.0)
        })
        .collect()
}

/// A zero margin still needs boundaries strictly inside the video.
fn effective_margin(margin: f64, duration: f64) -> f64 {
    if margin > 0.0 {
        margin
    } else {
        duration * 1e-9
    }
}
