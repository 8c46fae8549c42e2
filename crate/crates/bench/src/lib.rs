//! Input builders shared by the benchmarks.

use bk_core::data::{BoundaryList, Prediction, ScoreCurve, VideoMeta};
use bk_core::simgen::{generate, Generated, SimConfig};

/// A ten-second curve with evenly spaced bumps.
pub fn bumpy_curve(n_bumps: usize, samples: usize) -> ScoreCurve {
    let meta = VideoMeta::new("bench", 10.0).unwrap();
    let stride = 10.0 / samples as f64;
    let scores: Vec<f64> = (0..samples)
        .map(|i| {
            let t = stride / 2.0 + i as f64 * stride;
            (0..n_bumps)
                .map(|b| {
                    let center = 0.5 + 9.0 * (b as f64 + 0.5) / n_bumps as f64;
                    (-(t - center) * (t - center) / 0.02).exp()
                })
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect();
    ScoreCurve::with_center_offset(meta, stride, scores).unwrap()
}

/// A crowded prediction list for alignment benchmarks.
pub fn crowded_prediction(count: usize) -> Prediction {
    let meta = VideoMeta::new("bench", 10.0).unwrap();
    let times: Vec<f64> = (0..count)
        .map(|i| 0.2 + 9.6 * i as f64 / count as f64)
        .collect();
    Prediction::unscored(BoundaryList::new(meta, times).unwrap())
}

/// Evenly spaced timestamps for matching benchmarks.
pub fn lattice(count: usize, phase: f64) -> Vec<f64> {
    (0..count)
        .map(|i| phase + 100.0 * i as f64 / count as f64)
        .collect()
}

/// A small synthetic corpus.
pub fn corpus(n_videos: usize) -> Generated {
    generate(&SimConfig {
        seed: 99,
        n_videos,
        ..SimConfig::default()
    })
    .unwrap()
}
