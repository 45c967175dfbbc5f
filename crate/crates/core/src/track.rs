//! Frame-to-frame association by last known position.
//!
//! Among same-class detections the one nearest to the previous ball wins,
//! provided it lies within a gate. Without history, or after the track was
//! lost, the best-scoring detection is taken. Missed frames are bridged by
//! holding the last circle frozen for up to `coast_limit` frames.

use core::fmt;

use crate::camera::BallPose;
use crate::geom::Circle;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum TrackStatus {
    Tracking,
    Coasting,
    Lost,
}

impl TrackStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tracking => "TRACKING",
            Self::Coasting => "COASTING",
            Self::Lost => "LOST",
        }
    }
}

impl fmt::Display for TrackStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackParams {
    /// Largest center displacement, in pixels, accepted between frames.
    pub gate_radius: f64,
    /// Missed frames tolerated before the track is lost.
    pub coast_limit: u32,
}

impl Default for TrackParams {
    fn default() -> Self {
        Self {
            gate_radius: 60.0,
            coast_limit: 5,
        }
    }
}

impl TrackParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gate_radius >= 0.0) {
            return Err(Error::InvalidParameter(
                "gate_radius must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// A scored detection as seen by the tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub circle: Circle,
    pub quality: f64,
    pub pose: Option<BallPose>,
}

/// Invariants: `Tracking` iff `frames_since_seen == 0`; `Lost` implies
/// `frames_since_seen > coast_limit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackState {
    pub last_circle: Option<Circle>,
    pub last_pose: Option<BallPose>,
    pub frames_since_seen: u32,
    pub status: TrackStatus,
}

impl Default for TrackState {
    fn default() -> Self {
        Self::new()
    }
}

impl TrackState {
    pub const fn new() -> Self {
        Self {
            last_circle: None,
            last_pose: None,
            frames_since_seen: u32::MAX,
            status: TrackStatus::Lost,
        }
    }
}

/// Index of the detection the tracker would select.
pub fn select(
    state: &TrackState,
    observations: &[Observation],
    params: &TrackParams,
) -> Option<usize> {
    match state.last_circle {
        Some(last) if state.status != TrackStatus::Lost => observations
            .iter()
            .enumerate()
            .map(|(i, o)| (i, o.circle.center_distance(&last)))
            .filter(|&(_, d)| d <= params.gate_radius)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i),
        _ => observations
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.quality.total_cmp(&b.1.quality).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i),
    }
}

/// Pure state transition. Returns the next state and the selected index.
pub fn update(
    state: &TrackState,
    observations: &[Observation],
    params: &TrackParams,
) -> (TrackState, Option<usize>) {
    match select(state, observations, params) {
        Some(i) => {
            let o = &observations[i];
            let next = TrackState {
                last_circle: Some(o.circle),
                last_pose: o.pose.or(state.last_pose),
                frames_since_seen: 0,
                status: TrackStatus::Tracking,
            };
            (next, Some(i))
        }
        None => {
            let missed = state.frames_since_seen.saturating_add(1);
            let status = if missed > params.coast_limit {
                TrackStatus::Lost
            } else {
                TrackStatus::Coasting
            };
            let next = TrackState {
                frames_since_seen: missed,
                status,
                ..*state
            };
            (next, None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(cx: f64, cy: f64, q: f64) -> Observation {
        Observation {
            circle: Circle::new(cx, cy, 10.0),
            quality: q,
            pose: None,
        }
    }

    fn tracking_at(cx: f64, cy: f64) -> TrackState {
        update(
            &TrackState::new(),
            &[obs(cx, cy, 0.1)],
            &TrackParams::default(),
        )
        .0
    }

    #[test]
    fn nearest_within_gate_wins() {
        let s = tracking_at(100.0, 100.0);
        let params = TrackParams {
            gate_radius: 50.0,
            ..TrackParams::default()
        };
        let dets = [obs(190.0, 100.0, 0.9), obs(112.0, 100.0, 0.1)];
        let (next, sel) = update(&s, &dets, &params);
        assert_eq!(sel, Some(1));
        assert_eq!(next.last_circle, Some(dets[1].circle));
    }

    #[test]
    fn outside_gate_coasts() {
        let s = tracking_at(100.0, 100.0);
        let (next, sel) = update(&s, &[obs(300.0, 100.0, 0.9)], &TrackParams::default());
        assert_eq!(sel, None);
        assert_eq!(next.status, TrackStatus::Coasting);
        assert_eq!(next.last_circle, s.last_circle);
    }

    #[test]
    fn fresh_state_takes_best_quality() {
        let (_, sel) = update(
            &TrackState::new(),
            &[obs(0.0, 0.0, 0.02), obs(50.0, 0.0, 0.05)],
            &TrackParams::default(),
        );
        assert_eq!(sel, Some(1));
    }

    #[test]
    fn lost_after_coast_limit() {
        let params = TrackParams::default();
        let mut s = tracking_at(10.0, 10.0);
        for k in 1..=params.coast_limit + 1 {
            s = update(&s, &[], &params).0;
            assert_eq!(s.frames_since_seen, k);
            let expect = if k > params.coast_limit {
                TrackStatus::Lost
            } else {
                TrackStatus::Coasting
            };
            assert_eq!(s.status, expect);
        }
    }

    #[test]
    fn lost_track_reacquires_anywhere() {
        let params = TrackParams::default();
        let mut s = tracking_at(10.0, 10.0);
        for _ in 0..=params.coast_limit {
            s = update(&s, &[], &params).0;
        }
        let (next, sel) = update(&s, &[obs(500.0, 400.0, 0.05)], &params);
        assert_eq!(sel, Some(0));
        assert_eq!(next.status, TrackStatus::Tracking);
    }

    #[test]
    fn fresh_state_without_detections_stays_lost() {
        let (s, _) = update(&TrackState::new(), &[], &TrackParams::default());
        assert_eq!(s.status, TrackStatus::Lost);
        assert_eq!(s.frames_since_seen, u32::MAX);
    }
}
