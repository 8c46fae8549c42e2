//! End-to-end orchestration: pseudo-labeling, easy/hard splits, per-group
//! grid search, and the full detect -> align -> evaluate run.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::align::{align_dynamic, align_static, align_with_gap_factor, AlignConfig};
use crate::data::{AnnotationSet, BoundaryList, Prediction, Provenance, ScoreCurve};
use crate::detect::{detect, flatness, DetectConfig};
use crate::error::{Error, Result};
use crate::eval::{
    annotation_density, best_rater_match, compare_strategies, f1_from_counts, prediction_density,
    Aggregation, EvalConfig,
};
use crate::groups::{classify_group, GroupKey};
use crate::report::{GroupStat, Report};

/// Candidate grid for per-group tuning.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridSpec {
    pub thresholds: Vec<f64>,
    pub gap_factors: Vec<f64>,
}

/// Configuration for every pipeline stage.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub detect: DetectConfig,
    pub align: AlignConfig,
    pub eval: EvalConfig,
    /// Flatness below this marks a video as a hard sample.
    pub hard_threshold: f64,
    pub grid: GridSpec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            detect: DetectConfig::default(),
            align: AlignConfig::default(),
            eval: EvalConfig::default(),
            hard_threshold: 0.2,
            grid: GridSpec::default(),
        }
    }
}

/// Which alignment runs after detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignMode {
    None,
    Static,
    Dynamic,
}

impl fmt::Display for AlignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlignMode::None => "none",
            AlignMode::Static => "static",
            AlignMode::Dynamic => "dynamic",
        })
    }
}

impl FromStr for AlignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<AlignMode> {
        match s {
            "none" => Ok(AlignMode::None),
            "static" => Ok(AlignMode::Static),
            "dynamic" => Ok(AlignMode::Dynamic),
            other => Err(Error::InvalidConfig(format!(
                "alignment mode must be none, static, or dynamic, got '{other}'"
            ))),
        }
    }
}

/// Applies the configured alignment to one prediction.
pub fn apply_alignment(pred: &Prediction, config: &AlignConfig, mode: AlignMode) -> Prediction {
    match mode {
        AlignMode::None => pred.clone(),
        AlignMode::Static => align_static(pred, config),
        AlignMode::Dynamic => align_dynamic(pred, config),
    }
}

/// Labels unlabeled curves with the current model output: detect, align
/// dynamically, and wrap each result as a single-rater pseudo annotation.
/// Emits exactly one annotation set per curve, ids preserved, including
/// empty ones for flat curves.
pub fn pseudo_label(curves: &[ScoreCurve], config: &PipelineConfig) -> Vec<AnnotationSet> {
    curves
        .iter()
        .map(|curve| {
            let aligned = align_dynamic(&detect(curve, &config.detect), &config.align);
            AnnotationSet::new(
                curve.meta().clone(),
                vec![aligned.times().to_vec()],
                Provenance::Pseudo,
            )
            .expect("aligned detections satisfy annotation invariants")
        })
        .collect()
}

/// Partitions curve ids into (easy, hard) by score-curve flatness: a
/// curve is hard when `flatness(curve) < hard_threshold`.
pub fn split_easy_hard(curves: &[ScoreCurve], hard_threshold: f64) -> (Vec<String>, Vec<String>) {
    let mut easy = Vec::new();
    let mut hard = Vec::new();
    for curve in curves {
        let id = curve.meta().id().to_string();
        if flatness(curve) < hard_threshold {
            hard.push(id);
        } else {
            easy.push(id);
        }
    }
    (easy, hard)
}

/// Grid-search winner for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedGroup {
    pub threshold: f64,
    pub gap_factor: f64,
    /// Group F1 under the base configuration.
    pub f1_before: f64,
    /// Group F1 under the winning grid point.
    pub f1_after: f64,
    pub videos: usize,
}

/// Result of [`tune_per_group`]. Groups with no videos are listed in
/// `empty_groups` instead of getting an entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneOutcome {
    pub entries: BTreeMap<GroupKey, TunedGroup>,
    pub empty_groups: Vec<GroupKey>,
}

impl TuneOutcome {
    /// The winning gap factors as a per-group override table.
    pub fn gap_table(&self) -> BTreeMap<GroupKey, f64> {
        self.entries
            .iter()
            .map(|(k, e)| (*k, e.gap_factor))
            .collect()
    }
}

/// Exhaustive per-group grid search over (threshold, gap factor),
/// maximizing the group-restricted corpus F1.
///
/// Videos are grouped once, by their detection count under the base
/// detect configuration, which is the key the dynamic aligner would see
/// at inference time. Ties prefer the smaller threshold, then the larger
/// gap.
pub fn tune_per_group(
    curves: &[ScoreCurve],
    annotations: &[AnnotationSet],
    config: &PipelineConfig,
) -> Result<TuneOutcome> {
    if config.grid.thresholds.is_empty() || config.grid.gap_factors.is_empty() {
        return Err(Error::InvalidConfig(
            "tuning needs a non-empty threshold and gap-factor grid".into(),
        ));
    }
    let pairs = pair_curves(curves, annotations)?;

    let mut thresholds = config.grid.thresholds.clone();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    thresholds.dedup();
    let mut gap_factors = config.grid.gap_factors.clone();
    gap_factors.sort_by(|a, b| b.partial_cmp(a).unwrap());
    gap_factors.dedup();

    // Group membership from the base detection.
    let mut members: BTreeMap<GroupKey, Vec<usize>> = BTreeMap::new();
    for (i, (curve, _)) in pairs.iter().enumerate() {
        let base = detect(curve, &config.detect);
        let key = classify_group(curve.meta().duration(), base.len());
        members.entry(key).or_default().push(i);
    }

    // Detection depends only on the threshold; share it across gaps.
    let mut preds_by_threshold: Vec<Vec<Prediction>> = Vec::with_capacity(thresholds.len());
    for &threshold in &thresholds {
        let detect_cfg = DetectConfig {
            threshold,
            ..config.detect.clone()
        };
        preds_by_threshold.push(pairs.iter().map(|(c, _)| detect(c, &detect_cfg)).collect());
    }

    let group_f1 = |indices: &[usize], preds: &[Prediction], gap_factor: f64| -> f64 {
        let scored: Vec<(BoundaryList, &AnnotationSet)> = indices
            .iter()
            .map(|&i| {
                let aligned =
                    align_with_gap_factor(&preds[i], config.align.margin, gap_factor);
                (aligned.boundaries().clone(), pairs[i].1)
            })
            .collect();
        restricted_f1(&scored, &config.eval)
    };

    let base_preds: Vec<Prediction> =
        pairs.iter().map(|(c, _)| detect(c, &config.detect)).collect();

    let mut entries = BTreeMap::new();
    for (key, indices) in &members {
        let mut best: Option<(f64, f64, f64)> = None; // (f1, threshold, gap)
        for (ti, &threshold) in thresholds.iter().enumerate() {
            for &gap_factor in &gap_factors {
                let f1 = group_f1(indices, &preds_by_threshold[ti], gap_factor);
                if best.is_none_or(|(b, _, _)| f1 > b) {
                    best = Some((f1, threshold, gap_factor));
                }
            }
        }
        let (f1_after, threshold, gap_factor) = best.expect("grid is non-empty");
        let f1_before = group_f1(indices, &base_preds, config.align.gap_factor);

        entries.insert(
            *key,
            TunedGroup {
                threshold,
                gap_factor,
                f1_before,
                f1_after,
                videos: indices.len(),
            },
        );
    }

    let empty_groups = GroupKey::all()
        .into_iter()
        .filter(|k| !members.contains_key(k))
        .collect();
    Ok(TuneOutcome {
        entries,
        empty_groups,
    })
}

/// F1 over an explicit (prediction, annotation) subset.
fn restricted_f1(scored: &[(BoundaryList, &AnnotationSet)], config: &EvalConfig) -> f64 {
    match config.aggregation {
        Aggregation::PerVideoMean => {
            let sum: f64 = scored
                .iter()
                .map(|(p, a)| best_rater_match(p, a, config).expect("ids were paired").f1())
                .sum();
            sum / scored.len() as f64
        }
        Aggregation::Micro => {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for (p, a) in scored {
                let m = best_rater_match(p, a, config).expect("ids were paired");
                tp += m.true_positives;
                fp += m.false_positives;
                fn_ += m.false_negatives;
            }
            f1_from_counts(tp, fp, fn_)
        }
    }
}

fn pair_curves<'a>(
    curves: &'a [ScoreCurve],
    annotations: &'a [AnnotationSet],
) -> Result<Vec<(&'a ScoreCurve, &'a AnnotationSet)>> {
    let by_id: HashMap<&str, &AnnotationSet> =
        annotations.iter().map(|a| (a.meta().id(), a)).collect();
    if curves.is_empty() {
        return Err(Error::InvalidInput("no score curves to process".into()));
    }
    if annotations.len() != curves.len() {
        return Err(Error::CoverageMismatch(format!(
            "{} curves but {} annotation sets",
            curves.len(),
            annotations.len()
        )));
    }
    curves
        .iter()
        .map(|c| {
            by_id
                .get(c.meta().id())
                .map(|a| (c, *a))
                .ok_or_else(|| {
                    Error::CoverageMismatch(format!(
                        "no annotation for video '{}'",
                        c.meta().id()
                    ))
                })
        })
        .collect()
}

/// Output of a full pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    /// Detections before alignment, in curve order.
    pub raw: Vec<Prediction>,
    /// Predictions after the configured alignment, in curve order.
    pub aligned: Vec<Prediction>,
}

/// Runs detect -> align -> evaluate over an in-memory corpus.
///
/// When `compare_to` is given, the same detections are also pushed through
/// that alignment mode and the report carries the per-group strategy
/// comparison (baseline = `compare_to`, candidate = `mode`). The curve and
/// annotation id sets must match exactly.
pub fn run_pipeline(
    curves: &[ScoreCurve],
    annotations: &[AnnotationSet],
    config: &PipelineConfig,
    mode: AlignMode,
    compare_to: Option<AlignMode>,
) -> Result<RunOutput> {
    config.detect.validate().map_err(|e| Error::stage("detect", e))?;
    config.align.validate().map_err(|e| Error::stage("align", e))?;
    config.eval.validate().map_err(|e| Error::stage("eval", e))?;
    let pairs = pair_curves(curves, annotations).map_err(|e| Error::stage("load", e))?;

    let raw: Vec<Prediction> = pairs.iter().map(|(c, _)| detect(c, &config.detect)).collect();
    let aligned: Vec<Prediction> = raw
        .iter()
        .map(|p| apply_alignment(p, &config.align, mode))
        .collect();

    let aligned_lists: Vec<BoundaryList> =
        aligned.iter().map(|p| p.boundaries().clone()).collect();
    let mut report = evaluate_report(&aligned_lists, annotations, &config.eval, &mode.to_string())
        .map_err(|e| Error::stage("eval", e))?;

    if let Some(baseline_mode) = compare_to {
        let baseline: Vec<BoundaryList> = raw
            .iter()
            .map(|p| apply_alignment(p, &config.align, baseline_mode).boundaries().clone())
            .collect();
        let cmp = compare_strategies(&baseline, &aligned_lists, annotations, &config.eval)
            .map_err(|e| Error::stage("eval", e))?;
        report.comparison = Some((baseline_mode.to_string(), cmp));
    }

    Ok(RunOutput {
        report,
        raw,
        aligned,
    })
}

/// Builds the full evaluation report for a prediction set: corpus F1,
/// per-group F1 (groups keyed by the duration and each video's predicted
/// boundary count), and the two density tables. `align_mode` only labels
/// the report.
pub fn evaluate_report(
    preds: &[BoundaryList],
    annotations: &[AnnotationSet],
    config: &EvalConfig,
    align_mode: &str,
) -> Result<Report> {
    if annotations.is_empty() {
        return Err(Error::InvalidInput("cannot evaluate an empty corpus".into()));
    }
    let by_id: HashMap<&str, &BoundaryList> = preds.iter().map(|p| (p.meta().id(), p)).collect();

    struct VideoEval {
        group: GroupKey,
        f1: f64,
        counts: (usize, usize, usize),
    }
    let mut evals = Vec::with_capacity(annotations.len());
    for ann in annotations {
        let pred = by_id
            .get(ann.meta().id())
            .ok_or_else(|| Error::MissingPrediction(ann.meta().id().to_string()))?;
        let m = best_rater_match(pred, ann, config)?;
        evals.push(VideoEval {
            group: classify_group(ann.meta().duration(), pred.len()),
            f1: m.f1(),
            counts: (m.true_positives, m.false_positives, m.false_negatives),
        });
    }

    let aggregate = |group: &[&VideoEval]| match config.aggregation {
        Aggregation::PerVideoMean => {
            group.iter().map(|e| e.f1).sum::<f64>() / group.len() as f64
        }
        Aggregation::Micro => {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for e in group {
                tp += e.counts.0;
                fp += e.counts.1;
                fn_ += e.counts.2;
            }
            f1_from_counts(tp, fp, fn_)
        }
    };

    let all: Vec<&VideoEval> = evals.iter().collect();
    let corpus_f1 = aggregate(&all);
    let mut grouped: BTreeMap<GroupKey, Vec<&VideoEval>> = BTreeMap::new();
    for e in &evals {
        grouped.entry(e.group).or_default().push(e);
    }
    let per_group = grouped
        .into_iter()
        .map(|(key, group)| {
            let f1 = aggregate(&group);
            (key, GroupStat { videos: group.len(), f1 })
        })
        .collect();

    Ok(Report {
        align_mode: align_mode.to_string(),
        videos: evals.len(),
        corpus_f1,
        per_group,
        density_gt: annotation_density(annotations)?,
        density_pred: prediction_density(preds)?,
        comparison: None,
    })
}

/// File-based front end for [`run_pipeline`]: loads the corpus, optionally
/// fuses an ensemble of score files, and tags errors with their stage.
pub fn run_pipeline_files(
    scores: Option<&Path>,
    ensemble: Option<&Path>,
    annotations: &Path,
    config: &PipelineConfig,
    mode: AlignMode,
    compare_to: Option<AlignMode>,
) -> Result<RunOutput> {
    let annotations =
        crate::io::load_annotations(annotations).map_err(|e| Error::stage("load", e))?;
    let curves = match (scores, ensemble) {
        (Some(path), None) => {
            crate::io::load_scores(path).map_err(|e| Error::stage("load", e))?
        }
        (None, Some(path)) => {
            let spec = crate::config::load_ensemble_spec(path)
                .map_err(|e| Error::stage("load", e))?;
            fuse_members(&spec).map_err(|e| Error::stage("fuse", e))?
        }
        _ => {
            return Err(Error::stage(
                "load",
                Error::InvalidInput("provide exactly one of a scores file or an ensemble spec".into()),
            ))
        }
    };
    run_pipeline(&curves, &annotations, config, mode, compare_to)
}

/// Loads every member score file of an ensemble and fuses them per video.
/// Member files must cover identical video id sets; the first member's
/// video order and grid define the output.
pub fn fuse_members(spec: &crate::fuse::EnsembleSpec) -> Result<Vec<ScoreCurve>> {
    let weights = spec.weights();
    let mut member_curves: Vec<Vec<ScoreCurve>> = Vec::with_capacity(spec.members().len());
    for member in spec.members() {
        member_curves.push(crate::io::load_scores(Path::new(&member.source))?);
    }
    let first = &member_curves[0];
    let mut by_id: Vec<HashMap<&str, &ScoreCurve>> = Vec::new();
    for curves in &member_curves[1..] {
        if curves.len() != first.len() {
            return Err(Error::CoverageMismatch(format!(
                "ensemble members cover {} vs {} videos",
                first.len(),
                curves.len()
            )));
        }
        by_id.push(curves.iter().map(|c| (c.meta().id(), c)).collect());
    }

    let mut fused = Vec::with_capacity(first.len());
    for lead in first {
        let mut stack: Vec<ScoreCurve> = Vec::with_capacity(member_curves.len());
        stack.push(lead.clone());
        for members in &by_id {
            let curve = members.get(lead.meta().id()).ok_or_else(|| {
                Error::CoverageMismatch(format!(
                    "ensemble member missing video '{}'",
                    lead.meta().id()
                ))
            })?;
            stack.push((*curve).clone());
        }
        fused.push(crate::fuse::fuse(&stack, &weights)?);
    }
    Ok(fused)
}
