//! Line-delimited record files, format version `bk1`.
//!
//! Every file starts with a header line naming the format version and
//! flavor, e.g. `bk1 scores`. One record per line, tab-separated fields,
//! all numbers printed with exactly six fractional digits so that files
//! round-trip bit for bit.
//!
//! Flavors:
//!
//! ```text
//! bk1 scores        id  duration  stride  offset  s0,s1,...
//! bk1 annotations   id  duration  t,t;t,t;...      [pseudo]
//! bk1 predictions   id  t,t,...                    [s,s,...]
//! bk1 report        section  key  value
//! ```
//!
//! Annotation raters are separated by `;`, timestamps within a rater by
//! `,`. The optional trailing field marks pseudo-labeled annotations; for
//! predictions it carries per-boundary confidences. Loading validates
//! every type invariant and fails on the first violation, so a loaded
//! corpus is always fully valid.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::data::{AnnotationSet, BoundaryList, Prediction, Provenance, ScoreCurve, VideoMeta};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "bk1";
/// Scores file name used by directory-level corpus helpers.
pub const SCORES_FILE: &str = "scores.bk";
/// Annotations file name used by directory-level corpus helpers.
pub const ANNOTATIONS_FILE: &str = "annotations.bk";

/// Formats a number with the canonical six fractional digits.
pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn join6(values: &[f64], sep: char) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        out.push_str(&fmt6(*v));
    }
    out
}

struct LineParser<'a> {
    path: &'a Path,
    line_no: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.line_no, msg)
    }

    fn number(&self, field: &str, text: &str) -> Result<f64> {
        let v: f64 = text
            .parse()
            .map_err(|_| self.err(format!("bad {field} '{text}'")))?;
        if !v.is_finite() {
            return Err(self.err(format!("non-finite {field} '{text}'")));
        }
        Ok(v)
    }

    fn number_list(&self, field: &str, text: &str, sep: char) -> Result<Vec<f64>> {
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(sep)
            .map(|tok| self.number(field, tok))
            .collect()
    }
}

fn read_lines(path: &Path, flavor: &str) -> Result<Vec<(usize, String)>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) => {
            let expect = format!("{FORMAT_VERSION} {flavor}");
            if header != expect {
                return Err(Error::parse(
                    path,
                    1,
                    format!("expected header '{expect}', found '{header}'"),
                ));
            }
        }
        None => return Err(Error::parse(path, 1, format!("missing '{FORMAT_VERSION} {flavor}' header"))),
    }
    Ok(lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i + 1, l.to_string()))
        .collect())
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn check_unique<'a>(path: &Path, ids: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    let mut seen = HashSet::new();
    for (line, id) in ids {
        if !seen.insert(id.to_string()) {
            return Err(Error::parse(path, line, format!("duplicate video id '{id}'")));
        }
    }
    Ok(())
}

pub fn save_scores(curves: &[ScoreCurve], path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("{FORMAT_VERSION} scores\n");
    for c in curves {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            c.meta().id(),
            fmt6(c.meta().duration()),
            fmt6(c.stride()),
            fmt6(c.offset()),
            join6(c.scores(), ','),
        ));
    }
    write_file(path.as_ref(), &out)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<Vec<ScoreCurve>> {
    let path = path.as_ref();
    let mut curves = Vec::new();
    for (line_no, line) in read_lines(path, "scores")? {
        let p = LineParser { path, line_no };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(p.err(format!("expected 5 fields, found {}", fields.len())));
        }
        let meta = VideoMeta::new(fields[0], p.number("duration", fields[1])?)?;
        let stride = p.number("stride", fields[2])?;
        let offset = p.number("offset", fields[3])?;
        let scores = p.number_list("score", fields[4], ',')?;
        curves.push(ScoreCurve::new(meta, stride, offset, scores)?);
    }
    check_unique(
        path,
        curves.iter().enumerate().map(|(i, c)| (i + 2, c.meta().id())),
    )?;
    Ok(curves)
}

pub fn save_annotations(annotations: &[AnnotationSet], path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("{FORMAT_VERSION} annotations\n");
    for a in annotations {
        let raters = a
            .raters()
            .iter()
            .map(|r| join6(r.times(), ','))
            .collect::<Vec<_>>()
            .join(";");
        out.push_str(a.meta().id());
        out.push('\t');
        out.push_str(&fmt6(a.meta().duration()));
        out.push('\t');
        out.push_str(&raters);
        if a.provenance() == Provenance::Pseudo {
            out.push_str("\tpseudo");
        }
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<AnnotationSet>> {
    let path = path.as_ref();
    let mut annotations = Vec::new();
    for (line_no, line) in read_lines(path, "annotations")? {
        let p = LineParser { path, line_no };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(p.err(format!("expected 3 or 4 fields, found {}", fields.len())));
        }
        let meta = VideoMeta::new(fields[0], p.number("duration", fields[1])?)?;
        let raters = fields[2]
            .split(';')
            .map(|r| p.number_list("timestamp", r, ','))
            .collect::<Result<Vec<_>>>()?;
        let provenance = match fields.get(3) {
            None => Provenance::Human,
            Some(&"pseudo") => Provenance::Pseudo,
            Some(&"human") => Provenance::Human,
            Some(other) => return Err(p.err(format!("unknown provenance '{other}'"))),
        };
        annotations.push(AnnotationSet::new(meta, raters, provenance)?);
    }
    check_unique(
        path,
        annotations
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 2, a.meta().id())),
    )?;
    Ok(annotations)
}

pub fn save_predictions(predictions: &[Prediction], path: impl AsRef<Path>) -> Result<()> {
    let mut out = format!("{FORMAT_VERSION} predictions\n");
    for p in predictions {
        out.push_str(p.meta().id());
        out.push('\t');
        out.push_str(&join6(p.times(), ','));
        out.push('\t');
        out.push_str(&join6(p.scores(), ','));
        out.push('\n');
    }
    write_file(path.as_ref(), &out)
}

/// Loads predictions, resolving durations through `metas`. Prediction
/// records carry no duration of their own, so every id must appear in
/// `metas` for the boundary invariants to be checkable.
pub fn load_predictions(path: impl AsRef<Path>, metas: &[VideoMeta]) -> Result<Vec<Prediction>> {
    let path = path.as_ref();
    let by_id: std::collections::HashMap<&str, &VideoMeta> =
        metas.iter().map(|m| (m.id(), m)).collect();
    let mut predictions = Vec::new();
    for (line_no, line) in read_lines(path, "predictions")? {
        let p = LineParser { path, line_no };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(p.err(format!("expected 2 or 3 fields, found {}", fields.len())));
        }
        let meta = by_id
            .get(fields[0])
            .ok_or_else(|| p.err(format!("no duration known for video '{}'", fields[0])))?;
        let times = p.number_list("timestamp", fields[1], ',')?;
        let boundaries = BoundaryList::new((*meta).clone(), times)?;
        let prediction = match fields.get(2) {
            Some(scores) => {
                Prediction::new(boundaries, p.number_list("boundary score", scores, ',')?)?
            }
            None => Prediction::unscored(boundaries),
        };
        predictions.push(prediction);
    }
    check_unique(
        path,
        predictions
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 2, p.meta().id())),
    )?;
    Ok(predictions)
}

/// Reads video metas from either a scores or an annotations file, sniffed
/// from the header.
pub fn load_metas(path: impl AsRef<Path>) -> Result<Vec<VideoMeta>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header = content.lines().next().unwrap_or("");
    match header {
        h if h == format!("{FORMAT_VERSION} scores") => {
            Ok(load_scores(path)?.into_iter().map(|c| c.meta().clone()).collect())
        }
        h if h == format!("{FORMAT_VERSION} annotations") => Ok(load_annotations(path)?
            .into_iter()
            .map(|a| a.meta().clone())
            .collect()),
        other => Err(Error::parse(
            path,
            1,
            format!("expected a scores or annotations header, found '{other}'"),
        )),
    }
}

/// Saves a corpus as `scores.bk` plus `annotations.bk` under `dir`.
pub fn save_corpus(
    curves: &[ScoreCurve],
    annotations: &[AnnotationSet],
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_scores(curves, dir.join(SCORES_FILE))?;
    save_annotations(annotations, dir.join(ANNOTATIONS_FILE))
}

/// Loads a corpus saved by [`save_corpus`].
pub fn load_corpus(dir: impl AsRef<Path>) -> Result<(Vec<ScoreCurve>, Vec<AnnotationSet>)> {
    let dir = dir.as_ref();
    let curves = load_scores(dir.join(SCORES_FILE))?;
    let annotations = load_annotations(dir.join(ANNOTATIONS_FILE))?;
    Ok((curves, annotations))
}

/// Quantizes a value to the six-digit precision the file format keeps.
/// Useful when constructing corpora that must round-trip exactly.
pub fn quantize6(x: f64) -> f64 {
    fmt6(x).parse().expect("formatted float always parses")
}
