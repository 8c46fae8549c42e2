//! `bk` — event boundary post-processing toolkit.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bk",
    version,
    about = "Post-process event-boundary score curves: detect, align, fuse, evaluate",
    after_help = "Every run prints its resolved configuration to stderr. \
                  A key = value config file (--config) sets defaults; flags override it."
)]
pub struct Cli {
    /// Key = value configuration file applied before any flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic corpus (scores + annotations).
    Simulate(SimulateArgs),
    /// Turn score curves into boundary predictions.
    Detect(DetectArgs),
    /// Apply segmentation alignment to predictions.
    Align(AlignArgs),
    /// Fuse several score files into one by weighted sum.
    Fuse(FuseArgs),
    /// Score predictions against annotations.
    Eval(EvalArgs),
    /// Show the 23-group taxonomy breakdown and density table.
    Groups(GroupsArgs),
    /// Partition videos into easy and hard by score-curve flatness.
    Split(SplitArgs),
    /// Label curves with the current pipeline as single-rater pseudo annotations.
    #[command(name = "pseudo-label")]
    PseudoLabel(PseudoLabelArgs),
    /// Grid-search per-group thresholds and gap factors.
    Tune(TuneArgs),
    /// Full pipeline run with a written report.
    Report(ReportArgs),
}

/// Detection overrides shared by several commands.
#[derive(Args, Default)]
pub struct DetectFlags {
    /// Detection threshold in (0, 1).
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Gaussian smoothing width in seconds (0 disables).
    #[arg(long)]
    pub smooth_sd: Option<f64>,
    /// Refine boundaries to the score-weighted run centroid.
    #[arg(long)]
    pub refine: Option<bool>,
}

/// Alignment overrides shared by several commands.
#[derive(Args, Default)]
pub struct AlignFlags {
    /// Margin from both video ends, seconds.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Minimum gap as a fraction of the duration.
    #[arg(long)]
    pub gap_factor: Option<f64>,
    /// Gap floor for crowded videos, fraction of the duration.
    #[arg(long)]
    pub dense_floor: Option<f64>,
    /// Prediction count above which the gap relaxes.
    #[arg(long)]
    pub dense_trigger: Option<usize>,
    /// Per-group gap override table (group label = gap factor lines).
    #[arg(long, value_name = "FILE")]
    pub per_group_gaps: Option<PathBuf>,
}

/// Evaluation overrides.
#[derive(Args, Default)]
pub struct EvalFlags {
    /// Tolerance as a fraction of the duration, in (0, 0.5).
    #[arg(long)]
    pub rel_dis: Option<f64>,
    /// Corpus aggregation: mean or micro.
    #[arg(long)]
    pub aggregation: Option<String>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Directory for scores.bk and annotations.bk.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_videos: Option<usize>,
    /// Expected boundaries per second.
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long)]
    pub min_gap: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub raters: Option<usize>,
    #[arg(long)]
    pub jitter_sd: Option<f64>,
    #[arg(long)]
    pub bump_width: Option<f64>,
    #[arg(long)]
    pub noise_sd: Option<f64>,
    #[arg(long)]
    pub stride: Option<f64>,
    /// Four comma-separated weights for the duration mixture.
    #[arg(long, value_name = "W,W,W,W")]
    pub duration_weights: Option<String>,
}

#[derive(Args)]
pub struct DetectArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub detect: DetectFlags,
}

#[derive(Args)]
pub struct AlignArgs {
    #[arg(long, value_name = "FILE")]
    pub preds: PathBuf,
    /// Scores or annotations file supplying per-video durations.
    #[arg(long, value_name = "FILE")]
    pub durations_from: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// static or dynamic.
    #[arg(long, default_value = "dynamic")]
    pub mode: String,
    #[command(flatten)]
    pub align: AlignFlags,
}

#[derive(Args)]
pub struct FuseArgs {
    /// Ensemble spec: one `<score file> <weight>` line per member.
    #[arg(long, value_name = "FILE")]
    pub spec: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    pub preds: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// Write the full report in record form.
    #[arg(long, value_name = "FILE")]
    pub report_out: Option<PathBuf>,
    #[command(flatten)]
    pub eval: EvalFlags,
}

#[derive(Args)]
pub struct GroupsArgs {
    /// Annotations file; groups use each video's first rater.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["preds", "durations_from"])]
    pub annotations: Option<PathBuf>,
    /// Predictions file; requires --durations-from.
    #[arg(long, value_name = "FILE", requires = "durations_from")]
    pub preds: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub durations_from: Option<PathBuf>,
    /// Write the breakdown in record form.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SplitArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    /// Flatness below this marks a hard sample.
    #[arg(long)]
    pub hard_threshold: Option<f64>,
    /// Write easy video ids, one per line.
    #[arg(long, value_name = "FILE")]
    pub out_easy: Option<PathBuf>,
    /// Write hard video ids, one per line.
    #[arg(long, value_name = "FILE")]
    pub out_hard: Option<PathBuf>,
}

#[derive(Args)]
pub struct PseudoLabelArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    /// Output annotations file, marked with pseudo provenance.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    #[command(flatten)]
    pub detect: DetectFlags,
    #[command(flatten)]
    pub align: AlignFlags,
}

#[derive(Args)]
pub struct TuneArgs {
    #[arg(long, value_name = "FILE")]
    pub scores: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// Comma-separated candidate thresholds.
    #[arg(long, value_name = "T,T,...")]
    pub thresholds: Option<String>,
    /// Comma-separated candidate gap factors.
    #[arg(long, value_name = "G,G,...")]
    pub gap_factors: Option<String>,
    /// Write the winning gap factors as a per-group override table.
    #[arg(long, value_name = "FILE")]
    pub out_gaps: Option<PathBuf>,
    /// Write the full tuning table in record form.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub detect: DetectFlags,
    #[command(flatten)]
    pub align: AlignFlags,
    #[command(flatten)]
    pub eval: EvalFlags,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Score curves to run the pipeline on.
    #[arg(long, value_name = "FILE", conflicts_with = "fuse_spec")]
    pub scores: Option<PathBuf>,
    /// Fuse an ensemble of score files instead of reading one.
    #[arg(long, value_name = "FILE")]
    pub fuse_spec: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub annotations: PathBuf,
    /// none, static, or dynamic.
    #[arg(long, default_value = "dynamic")]
    pub align_mode: String,
    /// Also run this mode and report per-group improved/lowered shares.
    #[arg(long, value_name = "MODE")]
    pub compare_to: Option<String>,
    /// Directory for report.txt, report.bk, and predictions.bk.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub detect: DetectFlags,
    #[command(flatten)]
    pub align: AlignFlags,
    #[command(flatten)]
    pub eval: EvalFlags,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
