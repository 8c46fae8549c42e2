//! Post-processing toolkit for event boundary detection.
//!
//! Models that slice a video into equal-length segments and classify each
//! segment emit a per-position score curve. This crate turns such curves
//! into boundary timestamps and evaluates them: thresholded detection with
//! score-weighted refinement, margin/min-gap segmentation alignment (static
//! and per-group dynamic variants), weighted-sum ensemble fusion,
//! tolerance-based F1 scoring, a boundary-count-weighted loss, pseudo-label
//! generation, and per-group grid-search tuning. A seeded synthetic corpus
//! generator makes the whole pipeline runnable without any video data.
//!
//! See the `bk` command-line tool for the file-based workflow; the file
//! formats live in [`io`].

pub mod align;
pub mod config;
pub mod data;
pub mod detect;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod fuse;
pub mod groups;
pub mod io;
pub mod losses;
pub mod pipeline;
pub mod report;
pub mod simgen;

mod rnd;

pub use align::{align_dynamic, align_static, AlignConfig};
pub use config::ToolConfig;
pub use data::{AnnotationSet, BoundaryList, Prediction, Provenance, ScoreCurve, VideoMeta};
pub use detect::{detect, detect_boundaries, flatness, smooth, DetectConfig};
pub use error::{Error, Result};
pub use eval::{
    compare_strategies, density_table, f1_corpus, f1_video, match_boundaries, Aggregation,
    DensityTable, EvalConfig, MatchResult, StrategyComparison,
};
pub use fuse::{fuse, resample, EnsembleSpec};
pub use groups::{classify_group, GroupKey};
pub use losses::{bce, focal_grad, focal_loss, train_toy, FocalBatch, ToyModel};
pub use pipeline::{
    pseudo_label, run_pipeline, split_easy_hard, tune_per_group, AlignMode, PipelineConfig,
};
pub use report::Report;
pub use simgen::{generate, Generated, SimConfig};
