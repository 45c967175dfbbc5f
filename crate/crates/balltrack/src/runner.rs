//! Timed frame processing over frame sequences.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use balltrack_core::pipeline::{FrameResult, Pipeline};
use balltrack_core::track::TrackState;
use balltrack_core::RgbImage;

use crate::overlay::{draw_circle, OTHER, SELECTED};
use crate::ppm::{load_ppm, save_ppm, PpmError};
use crate::report::FrameRecord;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StageTimings {
    pub classify: Duration,
    pub components: Duration,
    pub vote: Duration,
    pub refine: Duration,
    /// All stages plus pose recovery and tracking.
    pub total: Duration,
}

/// Seed for frame `index` of a run seeded with `seed`.
pub fn frame_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn run_frame(
    pipeline: &Pipeline,
    frame: &RgbImage,
    state: &TrackState,
    seed: u64,
) -> (FrameResult, StageTimings) {
    let start = Instant::now();
    let classes = pipeline.classify(frame);
    let t1 = Instant::now();
    let regions = pipeline.components(&classes);
    let t2 = Instant::now();
    let detections = pipeline.vote(frame, regions, seed);
    let t3 = Instant::now();
    let estimates = pipeline.refine(frame, detections);
    let t4 = Instant::now();
    let result = pipeline.track(state, estimates);
    let end = Instant::now();
    let timings = StageTimings {
        classify: t1 - start,
        components: t2 - t1,
        vote: t3 - t2,
        refine: t4 - t3,
        total: end - start,
    };
    (result, timings)
}

pub fn record_for(frame: String, result: &FrameResult, t: &StageTimings) -> FrameRecord {
    let us = |d: Duration| Some(d.as_micros() as u64);
    let sel = result.selected_estimate();
    let pose = sel.and_then(|e| e.pose);
    FrameRecord {
        frame,
        cx: sel.map(|e| e.circle.cx),
        cy: sel.map(|e| e.circle.cy),
        cr: sel.map(|e| e.circle.r),
        qc: sel.map(|e| e.quality()),
        x_m: pose.map(|p| p.x),
        y_m: pose.map(|p| p.y),
        z_m: pose.map(|p| p.z),
        status: result.state.status.as_str().to_owned(),
        t_classify_us: us(t.classify),
        t_components_us: us(t.components),
        t_vote_us: us(t.vote),
        t_refine_us: us(t.refine),
        t_total_us: us(t.total),
    }
}

/// `*.ppm` files in `dir`, sorted by file name.
pub fn list_frames(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut frames: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")))
        .collect();
    frames.sort();
    Ok(frames)
}

pub fn overlay(frame: &RgbImage, pipeline: &Pipeline, result: &FrameResult) -> RgbImage {
    let mut out = frame.clone();
    let camera = pipeline.camera.as_ref().map(|m| m.intrinsics());
    for (i, e) in result.estimates.iter().enumerate() {
        let color = if Some(i) == result.selected {
            SELECTED
        } else {
            OTHER
        };
        draw_circle(&mut out, &e.circle, color, camera);
    }
    out
}

/// Tracks `frames` in order. Unreadable frames produce an `ERROR` record
/// and leave the track state untouched.
pub fn track_files(
    pipeline: &Pipeline,
    frames: &[PathBuf],
    seed: u64,
    overlay_dir: Option<&Path>,
) -> Result<Vec<FrameRecord>, PpmError> {
    let mut state = TrackState::new();
    let mut records = Vec::with_capacity(frames.len());
    for (i, path) in frames.iter().enumerate() {
        let name = path.file_name().map_or_else(
            || path.display().to_string(),
            |n| n.to_string_lossy().into_owned(),
        );
        let frame = match load_ppm(path) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("warning: {}: {e}", path.display());
                records.push(FrameRecord::error(name));
                continue;
            }
        };
        let (result, timings) = run_frame(pipeline, &frame, &state, frame_seed(seed, i));
        if let Some(dir) = overlay_dir {
            save_ppm(&overlay(&frame, pipeline, &result), dir.join(&name))?;
        }
        records.push(record_for(name, &result, &timings));
        state = result.state;
    }
    Ok(records)
}

/// Per-stage timing samples from repeated runs on one frame.
#[derive(Debug, Clone, Default)]
pub struct BenchSamples {
    pub samples: Vec<StageTimings>,
}

/// Median and 95th percentile of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSummary {
    pub median: Duration,
    pub p95: Duration,
}

impl BenchSamples {
    pub fn stage(&self, pick: impl Fn(&StageTimings) -> Duration) -> StageSummary {
        let mut v: Vec<Duration> = self.samples.iter().map(pick).collect();
        v.sort();
        let at = |q: f64| v[((v.len() - 1) as f64 * q).round() as usize];
        StageSummary {
            median: at(0.5),
            p95: at(0.95),
        }
    }

    pub fn stages(&self) -> [(&'static str, StageSummary); 5] {
        [
            ("classify", self.stage(|t| t.classify)),
            ("components", self.stage(|t| t.components)),
            ("vote", self.stage(|t| t.vote)),
            ("refine", self.stage(|t| t.refine)),
            ("total", self.stage(|t| t.total)),
        ]
    }
}

/// Runs the full pipeline `reps` times on `frame` from a fresh track.
pub fn bench(pipeline: &Pipeline, frame: &RgbImage, reps: usize, seed: u64) -> BenchSamples {
    assert!(reps > 0, "at least one repetition");
    let state = TrackState::new();
    BenchSamples {
        samples: (0..reps)
            .map(|i| run_frame(pipeline, frame, &state, frame_seed(seed, i)).1)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_single_sample() {
        let t = StageTimings {
            total: Duration::from_micros(7),
            ..Default::default()
        };
        let b = BenchSamples { samples: vec![t] };
        assert_eq!(b.stage(|t| t.total).median, Duration::from_micros(7));
        assert_eq!(b.stage(|t| t.total).p95, Duration::from_micros(7));
    }

    #[test]
    fn frame_seeds_differ() {
        assert_ne!(frame_seed(1, 0), frame_seed(1, 1));
        assert_eq!(frame_seed(5, 0), 5);
    }
}
