//! Evaluation reports, in plain text and as record files.
//!
//! The machine-readable form uses the same line-record family as the
//! corpus files: a `bk1 report` header, then `section<TAB>key<TAB>value`
//! rows with six-digit numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::{DensityTable, StrategyComparison, DENSITY_LABELS};
use crate::groups::GroupKey;
use crate::io::{fmt6, FORMAT_VERSION};

/// Per-group evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStat {
    pub videos: usize,
    pub f1: f64,
}

/// Everything one pipeline run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Alignment mode the predictions went through.
    pub align_mode: String,
    pub videos: usize,
    pub corpus_f1: f64,
    pub per_group: BTreeMap<GroupKey, GroupStat>,
    pub density_gt: DensityTable,
    pub density_pred: DensityTable,
    /// Present when the run compared two strategies; the label names the
    /// baseline strategy (A); the report's own predictions are B.
    pub comparison: Option<(String, StrategyComparison)>,
}

impl Report {
    /// Machine-readable record form.
    pub fn to_records(&self) -> String {
        let mut out = format!("{FORMAT_VERSION} report\n");
        let mut row = |section: &str, key: &str, value: String| {
            out.push_str(section);
            out.push('\t');
            out.push_str(key);
            out.push('\t');
            out.push_str(&value);
            out.push('\n');
        };
        row("meta", "align_mode", self.align_mode.clone());
        row("meta", "videos", self.videos.to_string());
        row("f1", "corpus", fmt6(self.corpus_f1));
        for (group, stat) in &self.per_group {
            row("group_videos", &group.to_string(), stat.videos.to_string());
            row("group_f1", &group.to_string(), fmt6(stat.f1));
        }
        for (label, pct) in DENSITY_LABELS.iter().zip(self.density_gt.percent) {
            row("density_gt", label, fmt6(pct));
        }
        for (label, pct) in DENSITY_LABELS.iter().zip(self.density_pred.percent) {
            row("density_pred", label, fmt6(pct));
        }
        if let Some((baseline, cmp)) = &self.comparison {
            row("compare", "baseline", baseline.clone());
            row("compare", "overall:improved", fmt6(cmp.overall.improved_pct));
            row("compare", "overall:lowered", fmt6(cmp.overall.lowered_pct));
            row("compare", "overall:unchanged", fmt6(cmp.overall.unchanged_pct));
            for (group, d) in &cmp.per_group {
                row("compare", &format!("{group}:improved"), fmt6(d.improved_pct));
                row("compare", &format!("{group}:lowered"), fmt6(d.lowered_pct));
                row("compare", &format!("{group}:unchanged"), fmt6(d.unchanged_pct));
            }
        }
        out
    }

    /// Human-readable form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "videos:     {}", self.videos);
        let _ = writeln!(out, "alignment:  {}", self.align_mode);
        let _ = writeln!(out, "corpus F1:  {}", fmt6(self.corpus_f1));
        let _ = writeln!(out);
        let _ = writeln!(out, "group            videos  F1");
        for (group, stat) in &self.per_group {
            let _ = writeln!(out, "{:<16} {:>6}  {}", group.to_string(), stat.videos, fmt6(stat.f1));
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "splits per second   {:>8} {:>8} {:>8} {:>8}",
            DENSITY_LABELS[0], DENSITY_LABELS[1], DENSITY_LABELS[2], DENSITY_LABELS[3]);
        let fmt_row = |name: &str, t: &DensityTable| {
            format!(
                "{name:<19} {:>7.2}% {:>7.2}% {:>7.2}% {:>7.2}%",
                t.percent[0], t.percent[1], t.percent[2], t.percent[3]
            )
        };
        let _ = writeln!(out, "{}", fmt_row("ground truth", &self.density_gt));
        let _ = writeln!(out, "{}", fmt_row("predictions", &self.density_pred));
        if let Some((baseline, cmp)) = &self.comparison {
            let _ = writeln!(out);
            let _ = writeln!(out, "vs {baseline}: improved / lowered / unchanged (% of videos)");
            let _ = writeln!(
                out,
                "{:<16} {:>6}  {:>7.2}% {:>7.2}% {:>7.2}%",
                "overall", cmp.overall.videos, cmp.overall.improved_pct,
                cmp.overall.lowered_pct, cmp.overall.unchanged_pct
            );
            for (group, d) in &cmp.per_group {
                let _ = writeln!(
                    out,
                    "{:<16} {:>6}  {:>7.2}% {:>7.2}% {:>7.2}%",
                    group.to_string(), d.videos, d.improved_pct, d.lowered_pct, d.unchanged_pct
                );
            }
        }
        out
    }

    pub fn write_records(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path.as_ref(), self.to_records()).map_err(|e| Error::io(path.as_ref(), e))
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path.as_ref(), self.to_text()).map_err(|e| Error::io(path.as_ref(), e))
    }
}
