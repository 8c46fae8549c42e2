//! Tolerance-based F1 evaluation.
//!
//! A predicted boundary is a true positive when it lies within
//! `rel_dis * duration` of an unmatched ground-truth boundary; matching is
//! maximum-cardinality and one-to-one. Multi-rater ground truth scores a
//! video as the best F1 over its raters.

use std::collections::{BTreeMap, HashMap};

use crate::data::{AnnotationSet, BoundaryList};
use crate::error::{Error, Result};
use crate::groups::{classify_group, GroupKey};

/// F1 equality tolerance for strategy comparisons.
const F1_EPS: f64 = 1e-9;

/// How per-video results aggregate into a corpus score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Mean of per-video F1 values.
    PerVideoMean,
    /// Sum each video's best-rater counts globally, then one F1.
    Micro,
}

/// Evaluation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Tolerance radius as a fraction of the video duration.
    pub rel_dis: f64,
    pub aggregation: Aggregation,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            rel_dis: 0.05,
            aggregation: Aggregation::PerVideoMean,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.rel_dis.is_finite() || self.rel_dis <= 0.0 || self.rel_dis >= 0.5 {
            return Err(Error::InvalidConfig(format!(
                "eval.rel_dis must lie in (0, 0.5), got {}",
                self.rel_dis
            )));
        }
        Ok(())
    }
}

/// Outcome of matching a prediction list against one ground-truth list.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// Matched (prediction, ground truth) time pairs.
    pub pairs: Vec<(f64, f64)>,
}

impl MatchResult {
    pub fn f1(&self) -> f64 {
        f1_from_counts(self.true_positives, self.false_positives, self.false_negatives)
    }
}

/// F1 from raw counts. Empty against empty is a solved video (F1 = 1);
/// empty against non-empty scores 0.
pub fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    if tp + fp + fn_ == 0 {
        return 1.0;
    }
    if tp == 0 {
        return 0.0;
    }
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fn_) as f64;
    2.0 * p * r / (p + r)
}

/// Maximum-cardinality one-to-one matching under `|pred - gt| <= tol`.
///
/// Both inputs must be sorted ascending. Because match windows are
/// intervals on a line, a single greedy sweep over the two sorted lists
/// attains the maximum; the tests verify this against an exhaustive
/// matcher.
pub fn match_boundaries(pred: &[f64], gt: &[f64], tol: f64) -> MatchResult {
    debug_assert!(pred.windows(2).all(|w| w[0] <= w[1]));
    debug_assert!(gt.windows(2).all(|w| w[0] <= w[1]));

    let mut pairs = Vec::new();
    let mut i = 0;
    let mut j = 0;
    while i < pred.len() && j < gt.len() {
        let d = pred[i] - gt[j];
        if d.abs() <= tol {
            pairs.push((pred[i], gt[j]));
            i += 1;
            j += 1;
        } else if d < 0.0 {
            // pred[i] lies left of gt[j]'s window and of every later one
            i += 1;
        } else {
            j += 1;
        }
    }
    MatchResult {
        true_positives: pairs.len(),
        false_positives: pred.len() - pairs.len(),
        false_negatives: gt.len() - pairs.len(),
        pairs,
    }
}

/// Best F1 over the annotation set's raters.
pub fn f1_video(pred: &BoundaryList, ann: &AnnotationSet, config: &EvalConfig) -> Result<f64> {
    Ok(best_rater_match(pred, ann, config)?.f1())
}

/// The per-rater match that maximizes F1 (ties go to the earliest rater).
pub fn best_rater_match(
    pred: &BoundaryList,
    ann: &AnnotationSet,
    config: &EvalConfig,
) -> Result<MatchResult> {
    if pred.meta().id() != ann.meta().id() {
        return Err(Error::VideoMismatch {
            expected: ann.meta().id().to_string(),
            found: pred.meta().id().to_string(),
        });
    }
    let tol = config.rel_dis * ann.meta().duration();
    let mut best: Option<MatchResult> = None;
    for rater in ann.raters() {
        let m = match_boundaries(pred.times(), rater.times(), tol);
        if best.as_ref().is_none_or(|b| m.f1() > b.f1()) {
            best = Some(m);
        }
    }
    Ok(best.expect("annotation sets have at least one rater"))
}

fn pair_by_id<'a>(
    preds: &'a [BoundaryList],
    annotations: &'a [AnnotationSet],
) -> Result<Vec<(&'a BoundaryList, &'a AnnotationSet)>> {
    let by_id: HashMap<&str, &BoundaryList> =
        preds.iter().map(|p| (p.meta().id(), p)).collect();
    annotations
        .iter()
        .map(|ann| {
            by_id
                .get(ann.meta().id())
                .map(|p| (*p, ann))
                .ok_or_else(|| Error::MissingPrediction(ann.meta().id().to_string()))
        })
        .collect()
}

/// Corpus-level F1 under the configured aggregation.
pub fn f1_corpus(
    preds: &[BoundaryList],
    annotations: &[AnnotationSet],
    config: &EvalConfig,
) -> Result<f64> {
    if annotations.is_empty() {
        return Err(Error::InvalidInput("cannot evaluate an empty corpus".into()));
    }
    let paired = pair_by_id(preds, annotations)?;
    match config.aggregation {
        Aggregation::PerVideoMean => {
            let mut sum = 0.0;
            for (pred, ann) in &paired {
                sum += f1_video(pred, ann, config)?;
            }
            Ok(sum / paired.len() as f64)
        }
        Aggregation::Micro => {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for (pred, ann) in &paired {
                let m = best_rater_match(pred, ann, config)?;
                tp += m.true_positives;
                fp += m.false_positives;
                fn_ += m.false_negatives;
            }
            Ok(f1_from_counts(tp, fp, fn_))
        }
    }
}

/// Share of videos per splits-per-second band, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    /// Order: no split, up to 0.55/s, up to 1/s, over 1/s.
    pub percent: [f64; 4],
    pub videos: usize,
}

pub const DENSITY_LABELS: [&str; 4] = ["none", "r0-0.55", "r0.55-1", "r1+"];

/// Builds the density distribution from (duration, boundary count) pairs.
pub fn density_table(items: impl IntoIterator<Item = (f64, usize)>) -> Result<DensityTable> {
    let mut counts = [0usize; 4];
    let mut total = 0usize;
    for (duration, count) in items {
        let idx = if count == 0 {
            0
        } else {
            let rate = count as f64 / duration;
            if rate <= 0.55 {
                1
            } else if rate <= 1.0 {
                2
            } else {
                3
            }
        };
        counts[idx] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::InvalidInput("density table needs a non-empty corpus".into()));
    }
    let percent = counts.map(|c| 100.0 * c as f64 / total as f64);
    Ok(DensityTable {
        percent,
        videos: total,
    })
}

/// Density distribution of annotation sets, counting each video's first
/// rater.
pub fn annotation_density(annotations: &[AnnotationSet]) -> Result<DensityTable> {
    density_table(
        annotations
            .iter()
            .map(|a| (a.meta().duration(), a.primary().len())),
    )
}

/// Density distribution of prediction lists.
pub fn prediction_density(preds: &[BoundaryList]) -> Result<DensityTable> {
    density_table(preds.iter().map(|p| (p.meta().duration(), p.len())))
}

/// Per-group improved/lowered/unchanged shares, in percent of the group.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub videos: usize,
    pub improved_pct: f64,
    pub lowered_pct: f64,
    pub unchanged_pct: f64,
}

/// Video-level outcome of switching from strategy A to strategy B.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyComparison {
    pub overall: ComparisonRow,
    pub per_group: BTreeMap<GroupKey, ComparisonRow>,
}

/// Compares two prediction sets video by video. Groups come from the
/// duration and the boundary count of strategy A's predictions. F1 values
/// closer than 1e-9 count as unchanged.
pub fn compare_strategies(
    preds_a: &[BoundaryList],
    preds_b: &[BoundaryList],
    annotations: &[AnnotationSet],
    config: &EvalConfig,
) -> Result<StrategyComparison> {
    if annotations.is_empty() {
        return Err(Error::InvalidInput("cannot compare on an empty corpus".into()));
    }
    let b_by_id: HashMap<&str, &BoundaryList> =
        preds_b.iter().map(|p| (p.meta().id(), p)).collect();
    let paired_a = pair_by_id(preds_a, annotations)?;

    struct Tally {
        videos: usize,
        improved: usize,
        lowered: usize,
    }
    let mut overall = Tally { videos: 0, improved: 0, lowered: 0 };
    let mut groups: BTreeMap<GroupKey, Tally> = BTreeMap::new();

    for (pred_a, ann) in paired_a {
        let pred_b = b_by_id.get(ann.meta().id()).ok_or_else(|| {
            Error::CoverageMismatch(format!(
                "strategy B has no prediction for video '{}'",
                ann.meta().id()
            ))
        })?;
        let f1_a = f1_video(pred_a, ann, config)?;
        let f1_b = f1_video(pred_b, ann, config)?;
        let key = classify_group(ann.meta().duration(), pred_a.len());
        let group = groups.entry(key).or_insert(Tally { videos: 0, improved: 0, lowered: 0 });
        for tally in [&mut overall, group] {
            tally.videos += 1;
            if f1_b > f1_a + F1_EPS {
                tally.improved += 1;
            } else if f1_b < f1_a - F1_EPS {
                tally.lowered += 1;
            }
        }
    }

    let to_row = |t: &Tally| {
        let n = t.videos as f64;
        ComparisonRow {
            videos: t.videos,
            improved_pct: 100.0 * t.improved as f64 / n,
            lowered_pct: 100.0 * t.lowered as f64 / n,
            unchanged_pct: 100.0 * (t.videos - t.improved - t.lowered) as f64 / n,
        }
    };
    Ok(StrategyComparison {
        overall: to_row(&overall),
        per_group: groups.iter().map(|(k, t)| (*k, to_row(t))).collect(),
    })
}
