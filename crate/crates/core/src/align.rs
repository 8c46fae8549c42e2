//! Segmentation alignment.
//!
//! Human annotations never fall within the first or last 0.3 seconds of a
//! video, and a prediction counts as correct anywhere within 5% of the
//! duration around it. Alignment exploits both facts: it clamps boundaries
//! into the annotatable window and spreads them out to a minimum gap so
//! their true-positive windows cover more ground. When a video cannot fit
//! all predictions at the required gap, the lowest-confidence ones are
//! discarded.
//!
//! The static strategy uses one gap for every video (10% of the duration
//! by default). The dynamic strategy adapts the gap to the video's
//! taxonomy group: crowded videos (more predictions than
//! [`AlignConfig::dense_trigger`]) get their gap relaxed down to a floor
//! of 5% of the duration so fewer predictions are discarded, and explicit
//! per-group overrides can pin any group's gap outright.

use std::collections::BTreeMap;

use crate::data::{BoundaryList, Prediction};
use crate::error::{Error, Result};
use crate::groups::{classify_group, GroupKey};

/// Tolerance used when checking gap feasibility and capacity.
const GAP_EPS: f64 = 1e-9;

/// Alignment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignConfig {
    /// Keep boundaries at least this far from both ends, in seconds.
    pub margin: f64,
    /// Minimum gap between boundaries as a fraction of the duration.
    pub gap_factor: f64,
    /// Lower limit for the relaxed gap of crowded videos, as a fraction
    /// of the duration.
    pub dense_gap_floor_factor: f64,
    /// Boundary count above which the dynamic strategy relaxes the gap.
    pub dense_trigger: usize,
    /// Per-group gap overrides; takes precedence over the dense rule.
    pub per_group_gap: BTreeMap<GroupKey, f64>,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            margin: 0.3,
            gap_factor: 0.10,
            dense_gap_floor_factor: 0.05,
            dense_trigger: 10,
            per_group_gap: BTreeMap::new(),
        }
    }
}

impl AlignConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.margin.is_finite() || self.margin < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "align.margin must be >= 0, got {}",
                self.margin
            )));
        }
        let ok = self.dense_gap_floor_factor >= 0.0
            && self.dense_gap_floor_factor <= self.gap_factor
            && self.gap_factor <= 1.0;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "require 0 <= dense_gap_floor_factor <= gap_factor <= 1, got {} and {}",
                self.dense_gap_floor_factor, self.gap_factor
            )));
        }
        for (key, &g) in &self.per_group_gap {
            if !g.is_finite() || g <= 0.0 || g > 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "per-group gap for {key} must lie in (0, 1], got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Static alignment: every video uses `gap_factor * duration`.
pub fn align_static(pred: &Prediction, config: &AlignConfig) -> Prediction {
    let gap = config.gap_factor * pred.meta().duration();
    align_with_gap(pred, config.margin, gap)
}

/// Dynamic alignment: the gap depends on the video's taxonomy group.
///
/// Resolution order: an explicit per-group override wins; otherwise a
/// video with more than `dense_trigger` predictions gets
/// `max(floor, min(default, span / (n - 1)))` where `span` is the
/// annotatable window; otherwise the static gap applies. With no override
/// and at most `dense_trigger` predictions this is exactly [`align_static`].
pub fn align_dynamic(pred: &Prediction, config: &AlignConfig) -> Prediction {
    let duration = pred.meta().duration();
    let gap = effective_gap(duration, pred.len(), config);
    align_with_gap(pred, config.margin, gap)
}

/// The gap in seconds that [`align_dynamic`] settles on for a video of
/// this duration and prediction count.
///
/// The group rule alone is not stable: a crowded video whose overflow
/// gets discarded ends up with fewer boundaries, which may fall under a
/// different rule with a different gap. The gap and the retained count
/// are therefore iterated to a fixed point (the count only ever shrinks,
/// so this takes at most `count` steps); re-aligning an aligned list is
/// then a no-op.
pub fn effective_gap(duration: f64, count: usize, config: &AlignConfig) -> f64 {
    let margin = if config.margin > 0.0 {
        config.margin
    } else {
        duration * 1e-9
    };
    let span = duration - 2.0 * margin;
    let mut retained = count;
    loop {
        let gap = group_rule_gap(duration, retained, config);
        if span < 0.0 || gap <= GAP_EPS {
            return gap;
        }
        let capacity = (span / gap + GAP_EPS).floor() as usize + 1;
        if retained <= capacity {
            return gap;
        }
        retained = capacity;
    }
}

/// One application of the dynamic gap rule: per-group override, then the
/// relaxed gap for crowded videos, then the static default.
fn group_rule_gap(duration: f64, count: usize, config: &AlignConfig) -> f64 {
    let key = classify_group(duration, count);
    if let Some(&factor) = config.per_group_gap.get(&key) {
        return factor * duration;
    }
    if count > config.dense_trigger && count > 1 {
        let span = duration - 2.0 * config.margin;
        let fitted = span / (count - 1) as f64;
        let default = config.gap_factor * duration;
        let floor = config.dense_gap_floor_factor * duration;
        return fitted.min(default).max(floor);
    }
    config.gap_factor * duration
}

/// Alignment with an explicit gap factor, bypassing the dynamic rule.
/// This is what a per-group override resolves to; the tuner uses it to
/// score candidate gaps.
pub fn align_with_gap_factor(pred: &Prediction, margin: f64, gap_factor: f64) -> Prediction {
    let gap = gap_factor * pred.meta().duration();
    align_with_gap(pred, margin, gap)
}

/// Core alignment pass.
///
/// Order: discard down to capacity (lowest confidence first, latest time
/// on ties), clamp into the margin window, push left-to-right to restore
/// the gap, and if the chain ran past the right margin pull it back
/// right-to-left. One forward/backward sweep reaches a fixed point, so
/// aligning an already-feasible list returns it unchanged.
fn align_with_gap(pred: &Prediction, margin: f64, gap: f64) -> Prediction {
    let duration = pred.meta().duration();
    // A zero margin would let clamped boundaries sit exactly on 0 or the
    // duration; nudge them strictly inside instead.
    let margin = if margin > 0.0 {
        margin
    } else {
        duration * 1e-9
    };
    let span = duration - 2.0 * margin;

    if span < 0.0 || pred.is_empty() {
        return Prediction::unscored(BoundaryList::empty(pred.meta().clone()));
    }

    let mut times: Vec<f64> = pred.times().to_vec();
    let mut scores: Vec<f64> = pred.scores().to_vec();

    // Capacity drop.
    if gap > GAP_EPS {
        let capacity = (span / gap + GAP_EPS).floor() as usize + 1;
        if times.len() > capacity {
            let excess = times.len() - capacity;
            let mut order: Vec<usize> = (0..times.len()).collect();
            // lowest score first; among equal scores drop the latest time
            order.sort_by(|&a, &b| {
                scores[a]
                    .partial_cmp(&scores[b])
                    .unwrap()
                    .then(times[b].partial_cmp(&times[a]).unwrap())
            });
            let mut drop = vec![false; times.len()];
            for &i in order.iter().take(excess) {
                drop[i] = true;
            }
            let kept: Vec<(f64, f64)> = times
                .iter()
                .zip(&scores)
                .enumerate()
                .filter(|(i, _)| !drop[*i])
                .map(|(_, (&t, &s))| (t, s))
                .collect();
            times = kept.iter().map(|&(t, _)| t).collect();
            scores = kept.iter().map(|&(_, s)| s).collect();
        }
    }

    // Gap shortfalls within GAP_EPS count as satisfied; otherwise the
    // forward pass could re-push values the backward pass derived (they
    // can sit one ulp apart) and alignment would not be a fixed point.
    let lo = margin;
    let hi = duration - margin;
    for t in &mut times {
        *t = t.clamp(lo, hi);
    }
    for i in 1..times.len() {
        let pushed = times[i - 1] + gap;
        if times[i] + GAP_EPS < pushed {
            times[i] = pushed;
        }
    }
    if times.last().is_some_and(|&t| t > hi) {
        let last = times.len() - 1;
        times[last] = hi;
        for i in (0..last).rev() {
            let pulled = times[i + 1] - gap;
            if times[i] > pulled + GAP_EPS {
                times[i] = pulled;
            }
        }
    }
    for t in &mut times {
        *t = t.clamp(lo, hi);
    }

    // A zero gap (or a degenerate window) can leave exact ties; keep the
    // earliest of each tie to preserve strict ordering.
    let mut out_times = Vec::with_capacity(times.len());
    let mut out_scores = Vec::with_capacity(times.len());
    for (t, s) in times.iter().zip(&scores) {
        if out_times.last().is_none_or(|&prev| *t > prev) {
            out_times.push(*t);
            out_scores.push(*s);
        }
    }

    let boundaries = BoundaryList::new(pred.meta().clone(), out_times)
        .expect("aligned boundaries satisfy ordering and margin invariants");
    Prediction::new(boundaries, out_scores).expect("scores tracked per kept boundary")
}
