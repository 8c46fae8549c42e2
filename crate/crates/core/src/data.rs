//! Core domain types.
//!
//! Every type validates its invariants at construction and is immutable
//! afterwards, so instances can be shared freely across threads. Invariant
//! failures report the offending video id and field.

use crate::error::{Error, Result};

/// Identity and duration of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoMeta {
    id: String,
    duration: f64,
}

impl VideoMeta {
    /// Requires a non-empty id without control characters and a strictly
    /// positive, finite duration in seconds.
    pub fn new(id: impl Into<String>, duration: f64) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::invariant("<unnamed>", "id", "id must be non-empty"));
        }
        if id.chars().any(|c| c == '\t' || c == '\n' || c == '\r') {
            return Err(Error::invariant(&id, "id", "id must not contain tabs or newlines"));
        }
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::invariant(
                &id,
                "duration",
                format!("duration must be > 0, got {duration}"),
            ));
        }
        Ok(VideoMeta { id, duration })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

/// Per-position boundary probabilities at a fixed stride.
///
/// Index `i` is the score at time `offset + i * stride`. The offset is the
/// timestamp of the first score, conventionally the center of the first
/// segment (`stride / 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCurve {
    meta: VideoMeta,
    stride: f64,
    offset: f64,
    scores: Vec<f64>,
}

impl ScoreCurve {
    pub fn new(meta: VideoMeta, stride: f64, offset: f64, scores: Vec<f64>) -> Result<Self> {
        if !stride.is_finite() || stride <= 0.0 {
            return Err(Error::invariant(
                meta.id(),
                "stride",
                format!("stride must be > 0, got {stride}"),
            ));
        }
        if !offset.is_finite() || offset < 0.0 {
            return Err(Error::invariant(
                meta.id(),
                "offset",
                format!("offset must be >= 0, got {offset}"),
            ));
        }
        if scores.is_empty() {
            return Err(Error::invariant(meta.id(), "scores", "at least one score required"));
        }
        let last = offset + (scores.len() - 1) as f64 * stride;
        if last > meta.duration() + 1e-9 {
            return Err(Error::invariant(
                meta.id(),
                "scores",
                format!(
                    "last score position {last:.6} exceeds duration {:.6}",
                    meta.duration()
                ),
            ));
        }
        for (i, &s) in scores.iter().enumerate() {
            if !s.is_finite() || !(0.0..=1.0).contains(&s) {
                return Err(Error::invariant(
                    meta.id(),
                    "scores",
                    format!("score {s} at index {i} outside [0, 1]"),
                ));
            }
        }
        Ok(ScoreCurve {
            meta,
            stride,
            offset,
            scores,
        })
    }

    /// Builds a curve with the segment-center convention: the first score
    /// sits at `stride / 2`.
    pub fn with_center_offset(meta: VideoMeta, stride: f64, scores: Vec<f64>) -> Result<Self> {
        let offset = stride / 2.0;
        ScoreCurve::new(meta, stride, offset, scores)
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn stride(&self) -> f64 {
        self.stride
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        false // len >= 1 by invariant
    }

    /// Timestamp of score index `i`.
    pub fn position(&self, i: usize) -> f64 {
        self.offset + i as f64 * self.stride
    }
}

/// Sorted boundary timestamps for one video, strictly inside (0, duration).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryList {
    meta: VideoMeta,
    times: Vec<f64>,
}

impl BoundaryList {
    pub fn new(meta: VideoMeta, times: Vec<f64>) -> Result<Self> {
        for &t in &times {
            if !t.is_finite() || t <= 0.0 || t >= meta.duration() {
                return Err(Error::invariant(
                    meta.id(),
                    "times",
                    format!(
                        "boundary {t:.6} outside open interval (0, {:.6})",
                        meta.duration()
                    ),
                ));
            }
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::invariant(
                    meta.id(),
                    "times",
                    format!("times not strictly increasing at {:.6} -> {:.6}", w[0], w[1]),
                ));
            }
        }
        Ok(BoundaryList { meta, times })
    }

    pub fn empty(meta: VideoMeta) -> Self {
        BoundaryList { meta, times: Vec::new() }
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Where an annotation set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Human,
    /// Produced by a model rather than a human rater.
    Pseudo,
}

/// Ground truth for one video: one boundary list per rater.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationSet {
    meta: VideoMeta,
    raters: Vec<BoundaryList>,
    provenance: Provenance,
}

impl AnnotationSet {
    pub fn new(meta: VideoMeta, raters: Vec<Vec<f64>>, provenance: Provenance) -> Result<Self> {
        if raters.is_empty() {
            return Err(Error::invariant(
                meta.id(),
                "raters",
                "at least one rater required",
            ));
        }
        let raters = raters
            .into_iter()
            .map(|times| BoundaryList::new(meta.clone(), times))
            .collect::<Result<Vec<_>>>()?;
        Ok(AnnotationSet {
            meta,
            raters,
            provenance,
        })
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn raters(&self) -> &[BoundaryList] {
        &self.raters
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The first rater, used as the canonical list for density statistics.
    pub fn primary(&self) -> &BoundaryList {
        &self.raters[0]
    }
}

/// A boundary list plus one confidence per boundary.
///
/// Detection fills in the peak score of each run; lists loaded without
/// scores default every confidence to 1.0. Alignment uses the scores to
/// decide which boundaries to discard when a video is overcrowded.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    boundaries: BoundaryList,
    scores: Vec<f64>,
}

impl Prediction {
    pub fn new(boundaries: BoundaryList, scores: Vec<f64>) -> Result<Self> {
        if scores.len() != boundaries.len() {
            return Err(Error::invariant(
                boundaries.meta().id(),
                "scores",
                format!(
                    "expected {} boundary scores, got {}",
                    boundaries.len(),
                    scores.len()
                ),
            ));
        }
        for &s in &scores {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::invariant(
                    boundaries.meta().id(),
                    "scores",
                    format!("boundary score {s} must be finite and >= 0"),
                ));
            }
        }
        Ok(Prediction { boundaries, scores })
    }

    /// Wraps a plain boundary list with unit confidence everywhere.
    pub fn unscored(boundaries: BoundaryList) -> Self {
        let scores = vec![1.0; boundaries.len()];
        Prediction { boundaries, scores }
    }

    pub fn boundaries(&self) -> &BoundaryList {
        &self.boundaries
    }

    pub fn meta(&self) -> &VideoMeta {
        self.boundaries.meta()
    }

    pub fn times(&self) -> &[f64] {
        self.boundaries.times()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}
