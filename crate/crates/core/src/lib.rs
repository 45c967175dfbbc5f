//! Real-time single-colored-ball detection and tracking.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. File formats,
//! timing and the command-line front end live in the `balltrack` crate.
//!
//! Processing happens in two phases:
//!
//! 1. **Calibration** (offline): [`colorcal::calibrate`] learns an RGB → class
//!    lookup table from a sample image, and [`camera::build_undistort_map`]
//!    precomputes the radial-distortion tables.
//! 2. **Tracking** (per frame): [`image::classify`] segments the frame,
//!    [`components::connected_components`] extracts regions with ordered
//!    boundaries, [`detect`] votes a circle per region and scores it,
//!    [`refine`] improves it to sub-pixel accuracy with a weighted
//!    Gauss-Newton step, [`camera::pose_from_circle`] recovers the metric
//!    position and [`track`] associates detections over time.
//!
//! [`synth`] renders synthetic scenes with exact ground truth.

#![no_std]
// Validation comparisons are written negated so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod camera;
pub mod colorcal;
pub mod components;
pub mod detect;
mod error;
pub mod geom;
pub mod image;
mod math;
pub mod morph;
pub mod pipeline;
pub mod refine;
pub mod synth;
pub mod track;

pub use error::Error;
pub use geom::{Circle, Point};
pub use image::{ClassMap, GrayImage, Mask, Rgb, RgbImage};

pub type Result<T, E = Error> = core::result::Result<T, E>;
