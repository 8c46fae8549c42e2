//! Key = value configuration files.
//!
//! One flat file can set every tunable default; command-line flags then
//! override individual values. Lines are `key = value`, `#` starts a
//! comment. Keys:
//!
//! ```text
//! detect.threshold           (0, 1)            default 0.5
//! detect.smooth_sd           seconds >= 0      default 0
//! detect.refine              true | false      default true
//! align.margin               seconds >= 0      default 0.3
//! align.gap_factor           fraction          default 0.10
//! align.dense_gap_floor_factor fraction        default 0.05
//! align.dense_trigger        integer           default 10
//! align.group.<label>        fraction          per-group gap override
//! eval.rel_dis               (0, 0.5)          default 0.05
//! eval.aggregation           mean | micro      default mean
//! pipeline.hard_threshold    flatness cutoff   default 0.2
//! tune.thresholds            comma list        default empty
//! tune.gap_factors           comma list        default empty
//! sim.seed                   integer           default 42
//! sim.n_videos               integer           default 100
//! sim.duration_weights       four comma reals  default 0.25,0.25,0.25,0.25
//! sim.boundary_rate          per second        default 0.5
//! sim.min_gap                seconds           default 0.5
//! sim.margin                 seconds           default 0.3
//! sim.n_raters               integer           default 3
//! sim.rater_jitter_sd        seconds           default 0.1
//! sim.bump_width             seconds           default 0.12
//! sim.noise_sd               [0, 1]            default 0.05
//! sim.stride                 seconds           default 0.25
//! ```
//!
//! Group labels are listed in [`crate::groups`]; the same
//! `<label> = <gap factor>` lines form the standalone per-group gap file
//! accepted by the align command.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::eval::Aggregation;
use crate::fuse::{EnsembleMember, EnsembleSpec};
use crate::groups::GroupKey;
use crate::io::fmt6;
use crate::pipeline::PipelineConfig;
use crate::simgen::SimConfig;

/// Everything the command-line tool can configure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ToolConfig {
    pub pipeline: PipelineConfig,
    pub sim: SimConfig,
}

impl ToolConfig {
    /// Reads a key = value file over the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<ToolConfig> {
        let mut config = ToolConfig::default();
        config.merge_file(path)?;
        Ok(config)
    }

    /// Applies a key = value file on top of the current values.
    pub fn merge_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        for (line_no, key, value) in kv_lines(path)? {
            self.set(&key, &value)
                .map_err(|e| Error::InvalidConfig(format!("{}:{line_no}: {e}", path.display())))?;
        }
        Ok(())
    }

    /// Sets one configuration key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.pipeline;
        match key {
            "detect.threshold" => p.detect.threshold = number(key, value)?,
            "detect.smooth_sd" => p.detect.smooth_sd = number(key, value)?,
            "detect.refine" => p.detect.refine = boolean(key, value)?,
            "align.margin" => p.align.margin = number(key, value)?,
            "align.gap_factor" => p.align.gap_factor = number(key, value)?,
            "align.dense_gap_floor_factor" => {
                p.align.dense_gap_floor_factor = number(key, value)?
            }
            "align.dense_trigger" => p.align.dense_trigger = integer(key, value)?,
            "eval.rel_dis" => p.eval.rel_dis = number(key, value)?,
            "eval.aggregation" => {
                p.eval.aggregation = match value {
                    "mean" => Aggregation::PerVideoMean,
                    "micro" => Aggregation::Micro,
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "eval.aggregation must be 'mean' or 'micro', got '{other}'"
                        )))
                    }
                }
            }
            "pipeline.hard_threshold" => p.hard_threshold = number(key, value)?,
            "tune.thresholds" => p.grid.thresholds = number_list(key, value)?,
            "tune.gap_factors" => p.grid.gap_factors = number_list(key, value)?,
            "sim.seed" => self.sim.seed = integer(key, value)? as u64,
            "sim.n_videos" => self.sim.n_videos = integer(key, value)?,
            "sim.duration_weights" => {
                let w = number_list(key, value)?;
                if w.len() != 4 {
                    return Err(Error::InvalidConfig(format!(
                        "sim.duration_weights needs exactly 4 values, got {}",
                        w.len()
                    )));
                }
                self.sim.duration_weights = [w[0], w[1], w[2], w[3]];
            }
            "sim.boundary_rate" => self.sim.boundary_rate = number(key, value)?,
            "sim.min_gap" => self.sim.min_gap = number(key, value)?,
            "sim.margin" => self.sim.margin = number(key, value)?,
            "sim.n_raters" => self.sim.n_raters = integer(key, value)?,
            "sim.rater_jitter_sd" => self.sim.rater_jitter_sd = number(key, value)?,
            "sim.bump_width" => self.sim.bump_width = number(key, value)?,
            "sim.noise_sd" => self.sim.noise_sd = number(key, value)?,
            "sim.stride" => self.sim.stride = number(key, value)?,
            _ => {
                if let Some(label) = key.strip_prefix("align.group.") {
                    let group: GroupKey = label
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("unknown group label '{label}'")))?;
                    p.align.per_group_gap.insert(group, number(key, value)?);
                } else {
                    return Err(Error::InvalidConfig(format!("unknown key '{key}'")));
                }
            }
        }
        Ok(())
    }

    /// Every key with its current value, in documentation order. This is
    /// what commands print as their resolved configuration.
    pub fn entries(&self) -> Vec<(String, String)> {
        let p = &self.pipeline;
        let s = &self.sim;
        let mut out: Vec<(String, String)> = vec![
            ("detect.threshold".into(), fmt6(p.detect.threshold)),
            ("detect.smooth_sd".into(), fmt6(p.detect.smooth_sd)),
            ("detect.refine".into(), p.detect.refine.to_string()),
            ("align.margin".into(), fmt6(p.align.margin)),
            ("align.gap_factor".into(), fmt6(p.align.gap_factor)),
            (
                "align.dense_gap_floor_factor".into(),
                fmt6(p.align.dense_gap_floor_factor),
            ),
            ("align.dense_trigger".into(), p.align.dense_trigger.to_string()),
            ("eval.rel_dis".into(), fmt6(p.eval.rel_dis)),
            (
                "eval.aggregation".into(),
                match p.eval.aggregation {
                    Aggregation::PerVideoMean => "mean".into(),
                    Aggregation::Micro => "micro".into(),
                },
            ),
            ("pipeline.hard_threshold".into(), fmt6(p.hard_threshold)),
            ("tune.thresholds".into(), join6(&p.grid.thresholds)),
            ("tune.gap_factors".into(), join6(&p.grid.gap_factors)),
            ("sim.seed".into(), s.seed.to_string()),
            ("sim.n_videos".into(), s.n_videos.to_string()),
            (
                "sim.duration_weights".into(),
                join6(&s.duration_weights),
            ),
            ("sim.boundary_rate".into(), fmt6(s.boundary_rate)),
            ("sim.min_gap".into(), fmt6(s.min_gap)),
            ("sim.margin".into(), fmt6(s.margin)),
            ("sim.n_raters".into(), s.n_raters.to_string()),
            ("sim.rater_jitter_sd".into(), fmt6(s.rater_jitter_sd)),
            ("sim.bump_width".into(), fmt6(s.bump_width)),
            ("sim.noise_sd".into(), fmt6(s.noise_sd)),
            ("sim.stride".into(), fmt6(s.stride)),
        ];
        for (group, gap) in &p.align.per_group_gap {
            out.push((format!("align.group.{group}"), fmt6(*gap)));
        }
        out
    }

    /// Validates every section.
    pub fn validate(&self) -> Result<()> {
        self.pipeline.detect.validate()?;
        self.pipeline.align.validate()?;
        self.pipeline.eval.validate()?;
        if !self.pipeline.hard_threshold.is_finite() || self.pipeline.hard_threshold < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "pipeline.hard_threshold must be >= 0, got {}",
                self.pipeline.hard_threshold
            )));
        }
        self.sim.validate()
    }
}

fn join6(values: &[f64]) -> String {
    values.iter().map(|v| fmt6(*v)).collect::<Vec<_>>().join(",")
}

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: expected a number, got '{value}'")))?;
    if !v.is_finite() {
        return Err(Error::InvalidConfig(format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn integer(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: expected an integer, got '{value}'")))
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::InvalidConfig(format!(
            "{key}: expected true or false, got '{other}'"
        ))),
    }
}

fn number_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|tok| number(key, tok.trim())).collect()
}

/// Parses `key = value` lines, skipping blanks and `#` comments.
fn kv_lines(path: &Path) -> Result<Vec<(usize, String, String)>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidConfig(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                i + 1
            )));
        };
        out.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Loads a standalone per-group gap override table
/// (`<group label> = <gap factor>` lines).
pub fn load_group_gaps(path: impl AsRef<Path>) -> Result<BTreeMap<GroupKey, f64>> {
    let path = path.as_ref();
    let mut gaps = BTreeMap::new();
    for (line_no, key, value) in kv_lines(path)? {
        let group: GroupKey = key.parse().map_err(|_| {
            Error::InvalidConfig(format!(
                "{}:{line_no}: unknown group label '{key}'",
                path.display()
            ))
        })?;
        gaps.insert(group, number(&key, &value)?);
    }
    Ok(gaps)
}

/// Writes a per-group gap table in the format [`load_group_gaps`] reads.
pub fn save_group_gaps(gaps: &BTreeMap<GroupKey, f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("# group gap-factor overrides\n");
    for (group, gap) in gaps {
        out.push_str(&format!("{group} = {}\n", fmt6(*gap)));
    }
    fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
}

/// Loads an ensemble spec file. Each non-comment line names a member
/// score file and its weight, whitespace-separated with the weight last;
/// relative paths are resolved against the spec file's directory.
pub fn load_ensemble_spec(path: impl AsRef<Path>) -> Result<EnsembleSpec> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut members = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((source, weight)) = line.rsplit_once(char::is_whitespace) else {
            return Err(Error::InvalidConfig(format!(
                "{}:{}: expected '<score file> <weight>', got '{raw}'",
                path.display(),
                i + 1
            )));
        };
        let source = source.trim();
        let resolved = {
            let p = Path::new(source);
            if p.is_absolute() {
                p.to_path_buf()
            } else {
                base.join(p)
            }
        };
        members.push(EnsembleMember {
            source: resolved.to_string_lossy().into_owned(),
            weight: number("ensemble weight", weight.trim())?,
        });
    }
    EnsembleSpec::new(members)
}
