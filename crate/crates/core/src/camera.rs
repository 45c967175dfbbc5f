//! Pinhole camera with two-coefficient radial distortion.
//!
//! The normalized image point `(x, y) = ((u - cx) / fx, (v - cy) / fy)` is
//! distorted as `x_d = x (1 + k1 r^2 + k2 r^4)`. Depth recovery assumes
//! near-square pixels and uses the mean focal length `f = (fx + fy) / 2`.

use alloc::format;
use alloc::vec::Vec;

use crate::geom::{Circle, Point};
use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub k1: f64,
    pub k2: f64,
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    /// Undistorted camera with the principal point at the image center.
    pub fn ideal(f: f64, width: usize, height: usize) -> Self {
        Self {
            fx: f,
            fy: f,
            cx: (width as f64 - 1.0) / 2.0,
            cy: (height as f64 - 1.0) / 2.0,
            k1: 0.0,
            k2: 0.0,
            width,
            height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "focal lengths must be positive (fx={}, fy={})",
                self.fx, self.fy
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDimensions {
                width: self.width,
                height: self.height,
            });
        }
        let inside = (0.0..=(self.width - 1) as f64).contains(&self.cx)
            && (0.0..=(self.height - 1) as f64).contains(&self.cy);
        if !inside {
            return Err(Error::InvalidParameter(format!(
                "principal point ({}, {}) outside {}x{} image",
                self.cx, self.cy, self.width, self.height
            )));
        }
        if !(self.k1.is_finite() && self.k2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "distortion coefficients must be finite (k1={}, k2={})",
                self.k1, self.k2
            )));
        }
        Ok(())
    }

    /// Isotropic focal length used for depth recovery.
    pub fn focal(&self) -> f64 {
        (self.fx + self.fy) / 2.0
    }

    pub fn has_distortion(&self) -> bool {
        self.k1 != 0.0 || self.k2 != 0.0
    }

    fn radial_factor(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        1.0 + self.k1 * r2 + self.k2 * r2 * r2
    }

    /// Ideal pixel → where the lens images it.
    pub fn distort(&self, p: Point) -> Point {
        let x = (p.x - self.cx) / self.fx;
        let y = (p.y - self.cy) / self.fy;
        let s = self.radial_factor(x, y);
        Point::new(self.cx + self.fx * x * s, self.cy + self.fy * y * s)
    }

    /// Observed pixel → ideal pixel, by fixed-point inversion of the radial
    /// polynomial.
    pub fn undistort(&self, p: Point) -> Point {
        if !self.has_distortion() {
            return p;
        }
        let xd = (p.x - self.cx) / self.fx;
        let yd = (p.y - self.cy) / self.fy;
        let (mut x, mut y) = (xd, yd);
        for _ in 0..50 {
            let s = self.radial_factor(x, y);
            let (nx, ny) = (xd / s, yd / s);
            let delta = math::hypot(nx - x, ny - y);
            x = nx;
            y = ny;
            if delta < 1e-14 {
                break;
            }
        }
        Point::new(self.cx + self.fx * x, self.cy + self.fy * y)
    }

    /// Shifts a pixel-space circle so its center is relative to the
    /// principal point, as [`pose_from_circle`] expects.
    pub fn centered(&self, c: &Circle) -> Circle {
        Circle::new(c.cx - self.cx, c.cy - self.cy, c.r)
    }
}

/// Precomputed per-pixel distortion tables.
#[derive(Debug, Clone, PartialEq)]
pub struct UndistortMap {
    intrinsics: CameraIntrinsics,
    /// For every ideal pixel, its distorted source location.
    source: Vec<Point>,
    /// For every observed pixel, its ideal (corrected) location.
    corrected: Vec<Point>,
}

pub fn build_undistort_map(intr: &CameraIntrinsics) -> UndistortMap {
    let (w, h) = (intr.width, intr.height);
    let mut source = Vec::with_capacity(w * h);
    let mut corrected = Vec::with_capacity(w * h);
    for v in 0..h {
        for u in 0..w {
            let p = Point::new(u as f64, v as f64);
            source.push(intr.distort(p));
            corrected.push(intr.undistort(p));
        }
    }
    UndistortMap {
        intrinsics: *intr,
        source,
        corrected,
    }
}

impl UndistortMap {
    pub fn intrinsics(&self) -> &CameraIntrinsics {
        &self.intrinsics
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    fn index(&self, x: i32, y: i32) -> Option<usize> {
        let (w, h) = (self.intrinsics.width, self.intrinsics.height);
        (x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h)
            .then(|| y as usize * w + x as usize)
    }

    /// Distorted source location of ideal pixel `(x, y)`.
    pub fn source(&self, x: i32, y: i32) -> Point {
        match self.index(x, y) {
            Some(i) => self.source[i],
            None => self.intrinsics.distort(Point::from((x, y))),
        }
    }

    /// Ideal location of observed pixel `(x, y)`.
    pub fn corrected(&self, x: i32, y: i32) -> Point {
        match self.index(x, y) {
            Some(i) => self.corrected[i],
            None => self.intrinsics.undistort(Point::from((x, y))),
        }
    }

    pub fn correct_all(&self, pixels: &[(i32, i32)]) -> Vec<Point> {
        pixels.iter().map(|&(x, y)| self.corrected(x, y)).collect()
    }
}

/// Metric ball position in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BallPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub ball_radius: f64,
}

/// Perspective back-projection of an image circle.
///
/// `circle` must be expressed relative to the principal point (see
/// [`CameraIntrinsics::centered`]). Depth is
/// `z = R sqrt(1 + f^2 / c_r^2)`, the distance at which a sphere of radius
/// `R` on the optical axis subtends a cone of image radius `c_r`.
///
/// Panics when `circle.r <= 0`.
pub fn pose_from_circle(circle: &Circle, intr: &CameraIntrinsics, ball_radius: f64) -> BallPose {
    assert!(
        circle.r > 0.0,
        "circle radius must be positive, got {}",
        circle.r
    );
    let f = intr.focal();
    let z = ball_radius * math::sqrt(1.0 + (f * f) / (circle.r * circle.r));
    BallPose {
        x: circle.cx * z / f,
        y: circle.cy * z / f,
        z,
        ball_radius,
    }
}
