//! Weighted-sum fusion of score curves from multiple models.
//!
//! All members are resampled onto the first member's grid, then combined
//! per position as a convex combination. Fusion happens in score space,
//! before detection, so the detector runs once on the fused curve.

use crate::data::ScoreCurve;
use crate::error::{Error, Result};

/// One ensemble member: where its scores come from and its weight.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    /// Identifier of the member's score source, typically a file path.
    pub source: String,
    pub weight: f64,
}

/// A validated list of ensemble members whose weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    members: Vec<EnsembleMember>,
}

impl EnsembleSpec {
    /// Requires at least one member, nonnegative weights, and a weight sum
    /// within 1e-6 of 1.
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidConfig("ensemble needs at least one member".into()));
        }
        for m in &members {
            if !m.weight.is_finite() || m.weight < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "ensemble weight for '{}' must be >= 0, got {}",
                    m.source, m.weight
                )));
            }
        }
        let sum: f64 = members.iter().map(|m| m.weight).sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "ensemble weights must sum to 1 within 1e-6, got {sum:.9}"
            )));
        }
        Ok(EnsembleSpec { members })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }
}

/// Resamples a curve onto a new grid by linear interpolation, extending
/// the first and last samples as constants beyond the source grid.
pub fn resample(curve: &ScoreCurve, stride: f64, offset: f64, len: usize) -> Result<ScoreCurve> {
    if len == 0 {
        return Err(Error::InvalidInput("resample target needs at least one position".into()));
    }
    if !stride.is_finite() || stride <= 0.0 {
        return Err(Error::InvalidInput(format!("resample stride must be > 0, got {stride}")));
    }
    let duration = curve.meta().duration();
    let last = offset + (len - 1) as f64 * stride;
    if offset < 0.0 || last > duration + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "resample grid [{offset:.6}, {last:.6}] outside [0, {duration:.6}]"
        )));
    }

    let scores: Vec<f64> = (0..len)
        .map(|i| sample_at(curve, offset + i as f64 * stride).clamp(0.0, 1.0))
        .collect();
    ScoreCurve::new(curve.meta().clone(), stride, offset, scores)
}

/// Linearly interpolated score at time `t`, constant beyond the grid ends.
fn sample_at(curve: &ScoreCurve, t: f64) -> f64 {
    let scores = curve.scores();
    let pos = (t - curve.offset()) / curve.stride();
    if pos <= 0.0 {
        return scores[0];
    }
    let last = (scores.len() - 1) as f64;
    if pos >= last {
        return scores[scores.len() - 1];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    scores[lo] * (1.0 - frac) + scores[lo + 1] * frac
}

/// Weighted sum of curves for one video on the first curve's grid.
///
/// Weights are used as given (they are validated to sum to one when they
/// come from an [`EnsembleSpec`]), so the output is a per-position convex
/// combination of the resampled member scores: permuting members along
/// with their weights changes nothing once all members share a grid, and
/// fusing a single curve with weight 1 is the identity.
pub fn fuse(curves: &[ScoreCurve], weights: &[f64]) -> Result<ScoreCurve> {
    if curves.is_empty() {
        return Err(Error::InvalidInput("fuse needs at least one curve".into()));
    }
    if curves.len() != weights.len() {
        return Err(Error::InvalidInput(format!(
            "{} curves but {} weights",
            curves.len(),
            weights.len()
        )));
    }
    let first = &curves[0];
    for c in curves {
        if c.meta().id() != first.meta().id() {
            return Err(Error::VideoMismatch {
                expected: first.meta().id().to_string(),
                found: c.meta().id().to_string(),
            });
        }
    }

    let mut acc = vec![0.0f64; first.len()];
    for (curve, &w) in curves.iter().zip(weights) {
        let member = resample(curve, first.stride(), first.offset(), first.len())?;
        for (a, s) in acc.iter_mut().zip(member.scores()) {
            *a += w * s;
        }
    }
    for a in &mut acc {
        *a = a.clamp(0.0, 1.0);
    }
    ScoreCurve::new(first.meta().clone(), first.stride(), first.offset(), acc)
}

/// [`fuse`] with weights drawn from a spec; curve order must match the
/// spec's member order.
pub fn fuse_with_spec(curves: &[ScoreCurve], spec: &EnsembleSpec) -> Result<ScoreCurve> {
    fuse(curves, &spec.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::VideoMeta;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn curve(scores: Vec<f64>) -> ScoreCurve {
        let meta = VideoMeta::new("v", 40.0).unwrap();
        ScoreCurve::new(meta, 1.0, 0.5, scores).unwrap()
    }

    #[test]
    fn resample_identity_grid() {
        let c = curve(vec![0.1, 0.7, 0.3]);
        let r = resample(&c, 1.0, 0.5, 3).unwrap();
        assert_eq!(r, c);
    }

    #[test]
    fn resample_midpoint_interpolates() {
        let meta = VideoMeta::new("v", 2.0).unwrap();
        let c = ScoreCurve::new(meta, 1.0, 0.5, vec![0.0, 1.0]).unwrap();
        let r = resample(&c, 0.5, 1.0, 1).unwrap();
        assert_relative_eq!(r.scores()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn resample_extends_constantly() {
        let meta = VideoMeta::new("v", 4.0).unwrap();
        let c = ScoreCurve::new(meta, 1.0, 1.0, vec![0.2, 0.8]).unwrap();
        let r = resample(&c, 1.0, 0.5, 4).unwrap();
        assert_relative_eq!(r.scores()[0], 0.2, epsilon = 1e-12); // before first sample
        assert_relative_eq!(r.scores()[3], 0.8, epsilon = 1e-12); // past last sample
    }

    #[test]
    fn resample_rejects_grid_outside_video() {
        let c = curve(vec![0.1, 0.7]);
        assert!(resample(&c, 25.0, 1.0, 3).is_err());
        assert!(resample(&c, 1.0, -0.5, 2).is_err());
    }

    #[test]
    fn fusing_identical_curves_is_identity() {
        let c = curve(vec![0.1, 0.7, 0.3]);
        let f = fuse(&[c.clone(), c.clone()], &[0.5, 0.5]).unwrap();
        for (a, b) in f.scores().iter().zip(c.scores()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_curves_mix_linearly() {
        let a = curve(vec![0.2; 4]);
        let b = curve(vec![0.6; 4]);
        let f = fuse(&[a, b], &[0.25, 0.75]).unwrap();
        for &s in f.scores() {
            assert_relative_eq!(s, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn challenge_weight_layout_is_valid() {
        // 20 lighter members plus 4 heavier ones: 0.77 + 0.23 = 1.
        let mut members: Vec<EnsembleMember> = (0..20)
            .map(|i| EnsembleMember {
                source: format!("light-{i}"),
                weight: 0.0385,
            })
            .collect();
        members.extend((0..4).map(|i| EnsembleMember {
            source: format!("heavy-{i}"),
            weight: 0.0575,
        }));
        let spec = EnsembleSpec::new(members).unwrap();
        let sum: f64 = spec.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_weight_sums_rejected() {
        let member = |w: f64| EnsembleMember { source: "m".into(), weight: w };
        assert!(EnsembleSpec::new(vec![member(0.5), member(0.6)]).is_err());
        assert!(EnsembleSpec::new(vec![]).is_err());
        assert!(EnsembleSpec::new(vec![member(-0.2), member(1.2)]).is_err());
        assert!(EnsembleSpec::new(vec![member(1.0)]).is_ok());
    }

    #[test]
    fn mismatched_videos_rejected() {
        let a = curve(vec![0.5, 0.5]);
        let meta = VideoMeta::new("other", 10.0).unwrap();
        let b = ScoreCurve::new(meta, 1.0, 0.5, vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            fuse(&[a, b], &[0.5, 0.5]),
            Err(Error::VideoMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn weight_one_is_identity(scores in proptest::collection::vec(0.0f64..=1.0, 1..30)) {
            let c = curve(scores);
            let f = fuse(std::slice::from_ref(&c), &[1.0]).unwrap();
            prop_assert_eq!(f, c);
        }

        #[test]
        fn convexity_and_permutation_on_common_grid(
            a in proptest::collection::vec(0.0f64..=1.0, 5),
            b in proptest::collection::vec(0.0f64..=1.0, 5),
            w in 0.0f64..=1.0,
        ) {
            let ca = curve(a.clone());
            let cb = curve(b.clone());
            let f = fuse(&[ca.clone(), cb.clone()], &[w, 1.0 - w]).unwrap();
            for i in 0..5 {
                let lo = a[i].min(b[i]);
                let hi = a[i].max(b[i]);
                prop_assert!(f.scores()[i] >= lo - 1e-12);
                prop_assert!(f.scores()[i] <= hi + 1e-12);
            }
            let swapped = fuse(&[cb, ca], &[1.0 - w, w]).unwrap();
            for (x, y) in f.scores().iter().zip(swapped.scores()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
