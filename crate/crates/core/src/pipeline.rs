//! Per-frame processing split into separately callable stages.

use alloc::vec::Vec;

use crate::camera::{pose_from_circle, BallPose, CameraIntrinsics, UndistortMap};
use crate::colorcal::ColorLut;
use crate::components::{connected_components, Region};
use crate::detect::{detect_in_regions, segment, Bounds, DetectParams, Detection};
use crate::geom::Circle;
use crate::image::{luminance, ClassMap, RgbImage};
use crate::refine::{refine_circle_mapped, RefineParams};
use crate::track::{update, Observation, TrackParams, TrackState};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameParams {
    pub detect: DetectParams,
    pub refine: RefineParams,
    pub track: TrackParams,
    /// Physical ball radius in meters.
    pub ball_radius: f64,
}

impl Default for FrameParams {
    fn default() -> Self {
        Self {
            detect: DetectParams::default(),
            refine: RefineParams::default(),
            track: TrackParams::default(),
            ball_radius: 0.035,
        }
    }
}

impl FrameParams {
    pub fn validate(&self) -> Result<()> {
        self.detect.vote.validate()?;
        self.refine.validate()?;
        self.track.validate()?;
        if !(self.ball_radius > 0.0) {
            return Err(crate::Error::InvalidParameter(
                "ball_radius must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A detection after refinement and back-projection.
#[derive(Debug, Clone, PartialEq)]
pub struct BallEstimate {
    pub detection: Detection,
    /// Refined circle in ideal pixel coordinates.
    pub circle: Circle,
    pub refined: bool,
    pub pose: Option<BallPose>,
}

impl BallEstimate {
    pub fn quality(&self) -> f64 {
        self.detection.vote.quality
    }

    pub fn observation(&self) -> Observation {
        Observation {
            circle: self.circle,
            quality: self.quality(),
            pose: self.pose,
        }
    }
}

/// Everything a frame needs besides the image.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub lut: ColorLut,
    pub camera: Option<UndistortMap>,
    pub params: FrameParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub estimates: Vec<BallEstimate>,
    pub selected: Option<usize>,
    pub state: TrackState,
}

impl FrameResult {
    pub fn selected_estimate(&self) -> Option<&BallEstimate> {
        self.selected.map(|i| &self.estimates[i])
    }
}

impl Pipeline {
    pub fn new(
        lut: ColorLut,
        camera: Option<&CameraIntrinsics>,
        params: FrameParams,
    ) -> Result<Self> {
        params.validate()?;
        let camera = match camera {
            Some(intr) => {
                intr.validate()?;
                Some(crate::camera::build_undistort_map(intr))
            }
            None => None,
        };
        Ok(Self {
            lut,
            camera,
            params,
        })
    }

    pub fn classify(&self, frame: &RgbImage) -> ClassMap {
        segment(frame, &self.lut, &self.params.detect)
    }

    pub fn components(&self, classes: &ClassMap) -> Vec<Region> {
        connected_components(classes, self.params.detect.vote.min_region_size)
    }

    pub fn vote(&self, frame: &RgbImage, regions: Vec<Region>, seed: u64) -> Vec<Detection> {
        let params = crate::detect::VoteParams {
            seed,
            ..self.params.detect.vote
        };
        detect_in_regions(
            regions,
            self.camera.as_ref(),
            Bounds::new(frame.width(), frame.height()),
            &params,
        )
    }

    /// Refines every detection and back-projects it when intrinsics are
    /// known.
    pub fn refine(&self, frame: &RgbImage, detections: Vec<Detection>) -> Vec<BallEstimate> {
        if detections.is_empty() {
            return Vec::new();
        }
        let gray = luminance(frame);
        detections
            .into_iter()
            .map(|detection| {
                let r = refine_circle_mapped(
                    &gray,
                    &detection.vote.circle,
                    &self.params.refine,
                    self.camera.as_ref(),
                );
                let pose = self.camera.as_ref().and_then(|m| {
                    let intr = m.intrinsics();
                    (r.circle.r > 0.0).then(|| {
                        pose_from_circle(&intr.centered(&r.circle), intr, self.params.ball_radius)
                    })
                });
                BallEstimate {
                    detection,
                    circle: r.circle,
                    refined: r.refined,
                    pose,
                }
            })
            .collect()
    }

    pub fn track(&self, state: &TrackState, estimates: Vec<BallEstimate>) -> FrameResult {
        let obs: Vec<Observation> = estimates.iter().map(BallEstimate::observation).collect();
        let (state, selected) = update(state, &obs, &self.params.track);
        FrameResult {
            estimates,
            selected,
            state,
        }
    }

    /// All stages in order.
    pub fn process(&self, frame: &RgbImage, state: &TrackState, seed: u64) -> FrameResult {
        let classes = self.classify(frame);
        let regions = self.components(&classes);
        let detections = self.vote(frame, regions, seed);
        let estimates = self.refine(frame, detections);
        self.track(state, estimates)
    }
}
