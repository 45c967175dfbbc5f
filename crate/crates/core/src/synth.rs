//! Synthetic scenes with exact ground truth.
//!
//! Objects are painted back to front with 4x4 supersampling, so edges carry
//! sub-pixel position information. A vertical luminance ramp and clamped
//! Gaussian noise are applied afterwards. Pixel `(x, y)` covers the square
//! centered on the integer point `(x, y)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::camera::{BallPose, CameraIntrinsics};
use crate::geom::{Circle, Point};
use crate::image::{Mask, Rgb, RgbImage};
use crate::math;
use crate::{Error, Result};

/// Subsamples per pixel axis.
pub const SUPERSAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "shape", rename_all = "lowercase"))]
pub enum Shape {
    Disk {
        cx: f64,
        cy: f64,
        r: f64,
    },
    /// Rectangle with half extents, rotated by `angle` radians about its
    /// center.
    Rect {
        cx: f64,
        cy: f64,
        half_w: f64,
        half_h: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        angle: f64,
    },
}

impl Shape {
    pub fn center(&self) -> Point {
        match *self {
            Shape::Disk { cx, cy, .. } | Shape::Rect { cx, cy, .. } => Point::new(cx, cy),
        }
    }

    fn translated(&self, dx: f64, dy: f64) -> Shape {
        let mut s = *self;
        match &mut s {
            Shape::Disk { cx, cy, .. } | Shape::Rect { cx, cy, .. } => {
                *cx += dx;
                *cy += dy;
            }
        }
        s
    }

    /// Radius of the smallest centered disk containing the shape.
    fn reach(&self) -> f64 {
        match *self {
            Shape::Disk { r, .. } => r,
            Shape::Rect { half_w, half_h, .. } => math::hypot(half_w, half_h),
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Disk { cx, cy, r } => {
                let (dx, dy) = (x - cx, y - cy);
                dx * dx + dy * dy <= r * r
            }
            Shape::Rect {
                cx,
                cy,
                half_w,
                half_h,
                angle,
            } => {
                let (s, c) = (math::sin(angle), math::cos(angle));
                let (dx, dy) = (x - cx, y - cy);
                let u = c * dx + s * dy;
                let v = -s * dx + c * dy;
                u.abs() <= half_w && v.abs() <= half_h
            }
        }
    }
}

/// Hides the part of an object beyond a chord.
///
/// The hidden side faces `direction` (radians, image axes). For a disk,
/// `fraction` of its boundary arc is hidden.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Occlusion {
    pub fraction: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub direction: f64,
}

impl Occlusion {
    /// Signed offset of the chord from the center for an object of reach
    /// `r`.
    pub fn chord_offset(&self, r: f64) -> f64 {
        r * math::cos(core::f64::consts::PI * self.fraction)
    }

    fn hides(&self, center: Point, reach: f64, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - center.x, y - center.y);
        dx * math::cos(self.direction) + dy * math::sin(self.direction) > self.chord_offset(reach)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SceneObject {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub shape: Shape,
    pub color: Rgb,
    #[cfg_attr(feature = "serde", serde(default))]
    pub occlusion: Option<Occlusion>,
    /// Pixels per frame, used by [`render_frame`].
    #[cfg_attr(feature = "serde", serde(default))]
    pub velocity: Option<(f64, f64)>,
}

impl SceneObject {
    pub fn new(shape: Shape, color: Rgb) -> Self {
        Self {
            shape,
            color,
            occlusion: None,
            velocity: None,
        }
    }

    fn covers(&self, x: f64, y: f64) -> bool {
        self.shape.contains(x, y)
            && !self
                .occlusion
                .is_some_and(|o| o.hides(self.shape.center(), self.shape.reach(), x, y))
    }

    fn at_frame(&self, t: u32) -> SceneObject {
        let (vx, vy) = self.velocity.unwrap_or((0.0, 0.0));
        let t = f64::from(t);
        SceneObject {
            shape: self.shape.translated(vx * t, vy * t),
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub background: Rgb,
    pub objects: Vec<SceneObject>,
    /// Per-channel noise standard deviation in 8-bit units.
    #[cfg_attr(feature = "serde", serde(default))]
    pub noise_sigma: f64,
    /// Gain goes from `1 - ramp` on the top row to `1 + ramp` on the bottom.
    #[cfg_attr(feature = "serde", serde(default))]
    pub luminance_ramp: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
}

impl SceneSpec {
    pub fn new(width: usize, height: usize, background: Rgb) -> Self {
        Self {
            width,
            height,
            background,
            objects: Vec::new(),
            noise_sigma: 0.0,
            luminance_ramp: 0.0,
            seed: 0,
        }
    }

    pub fn with_object(mut self, object: SceneObject) -> Self {
        self.objects.push(object);
        self
    }

    /// Checks dimensions, noise parameters and that every object lies inside
    /// the image.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDimensions {
                width: self.width,
                height: self.height,
            });
        }
        if !(self.noise_sigma >= 0.0) || !(0.0..1.0).contains(&self.luminance_ramp) {
            return Err(Error::InvalidParameter(
                "noise_sigma must be >= 0 and luminance_ramp in [0, 1)".into(),
            ));
        }
        for (i, o) in self.objects.iter().enumerate() {
            let (lo, hi) = extent(&o.shape);
            let inside = lo.x >= -0.5
                && lo.y >= -0.5
                && hi.x <= self.width as f64 - 0.5
                && hi.y <= self.height as f64 - 0.5;
            if !inside {
                return Err(Error::InvalidParameter(alloc::format!(
                    "object {i} extends outside the {}x{} image",
                    self.width,
                    self.height
                )));
            }
            if o.occlusion
                .is_some_and(|oc| !(0.0..=1.0).contains(&oc.fraction))
            {
                return Err(Error::InvalidParameter(alloc::format!(
                    "object {i} occlusion fraction must be in [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// The scene as it appears at frame `t`: objects moved by their
    /// velocity and a frame-specific noise seed.
    pub fn at_frame(&self, t: u32) -> SceneSpec {
        SceneSpec {
            objects: self.objects.iter().map(|o| o.at_frame(t)).collect(),
            seed: self.seed ^ u64::from(t).wrapping_mul(0xD1B5_4A32_D192_ED03),
            ..self.clone()
        }
    }
}

fn extent(shape: &Shape) -> (Point, Point) {
    match *shape {
        Shape::Disk { cx, cy, r } => (Point::new(cx - r, cy - r), Point::new(cx + r, cy + r)),
        Shape::Rect {
            cx,
            cy,
            half_w,
            half_h,
            angle,
        } => {
            let (s, c) = (math::sin(angle), math::cos(angle));
            let ex = (c * half_w).abs() + (s * half_h).abs();
            let ey = (s * half_w).abs() + (c * half_h).abs();
            (Point::new(cx - ex, cy - ey), Point::new(cx + ex, cy + ey))
        }
    }
}

/// Rendered image plus ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Render {
    pub image: RgbImage,
    /// One circle per disk object, in object order, ignoring occlusion.
    pub circles: Vec<Circle>,
    /// Per pixel, `1 + index` of the object covering at least half of the
    /// pixel's subsamples, or `0`.
    pub owner: Vec<u16>,
}

impl Render {
    /// Pixels owned by any of the listed objects.
    pub fn mask_of(&self, objects: &[usize]) -> Mask {
        let bits = self
            .owner
            .iter()
            .map(|&o| o > 0 && objects.contains(&(usize::from(o) - 1)))
            .collect();
        Mask::new(self.image.width(), self.image.height(), bits).expect("owner matches image")
    }
}

/// Renders `spec`. Panics when `spec` fails validation.
pub fn render(spec: &SceneSpec) -> (RgbImage, Vec<Circle>) {
    let r = render_detailed(spec);
    (r.image, r.circles)
}

/// Renders frame `t` of a moving scene.
pub fn render_frame(spec: &SceneSpec, t: u32) -> (RgbImage, Vec<Circle>) {
    render(&spec.at_frame(t))
}

pub fn render_detailed(spec: &SceneSpec) -> Render {
    if let Err(e) = spec.validate() {
        panic!("invalid scene: {e}");
    }
    let (w, h) = (spec.width, spec.height);
    let n = spec.objects.len();
    let mut acc = vec![[0.0f64; 3]; w * h];
    let mut owner = vec![0u16; w * h];
    let bg = spec.background.map(f64::from);

    let boxes: Vec<(usize, usize, usize, usize)> = spec
        .objects
        .iter()
        .map(|o| {
            let (lo, hi) = extent(&o.shape);
            let x0 = math::floor(lo.x + 0.5).max(0.0) as usize;
            let y0 = math::floor(lo.y + 0.5).max(0.0) as usize;
            let x1 = (math::ceil(hi.x + 0.5) as usize).min(w - 1);
            let y1 = (math::ceil(hi.y + 0.5) as usize).min(h - 1);
            (x0, y0, x1, y1)
        })
        .collect();

    let step = 1.0 / SUPERSAMPLE as f64;
    let mut counts = vec![0u8; n + 1];
    let mut touching = Vec::with_capacity(n);
    for y in 0..h {
        for x in 0..w {
            touching.clear();
            touching.extend((0..n).filter(|&i| {
                let (x0, y0, x1, y1) = boxes[i];
                x >= x0 && x <= x1 && y >= y0 && y <= y1
            }));
            let idx = y * w + x;
            if touching.is_empty() {
                acc[idx] = bg;
                continue;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            let mut sum = [0.0; 3];
            for sy in 0..SUPERSAMPLE {
                for sx in 0..SUPERSAMPLE {
                    let px = x as f64 - 0.5 + (sx as f64 + 0.5) * step;
                    let py = y as f64 - 0.5 + (sy as f64 + 0.5) * step;
                    let top = touching
                        .iter()
                        .rev()
                        .copied()
                        .find(|&i| spec.objects[i].covers(px, py));
                    let color = match top {
                        Some(i) => {
                            counts[i + 1] += 1;
                            spec.objects[i].color.map(f64::from)
                        }
                        None => {
                            counts[0] += 1;
                            bg
                        }
                    };
                    for c in 0..3 {
                        sum[c] += color[c];
                    }
                }
            }
            let k = (SUPERSAMPLE * SUPERSAMPLE) as f64;
            acc[idx] = sum.map(|s| s / k);
            let half = (SUPERSAMPLE * SUPERSAMPLE / 2) as u8;
            if let Some(i) = (1..=n).find(|&i| counts[i] >= half) {
                owner[idx] = i as u16;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = (spec.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.noise_sigma).expect("sigma checked by validate"));
    let pixels = acc
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let gain = ramp_gain(spec.luminance_ramp, i / w, h);
            v.map(|c| {
                let mut c = c * gain;
                if let Some(d) = &noise {
                    c += d.sample(&mut rng);
                }
                math::round(c).clamp(0.0, 255.0) as u8
            })
        })
        .collect();

    let circles = spec
        .objects
        .iter()
        .filter_map(|o| match o.shape {
            Shape::Disk { cx, cy, r } => Some(Circle::new(cx, cy, r)),
            Shape::Rect { .. } => None,
        })
        .collect();

    Render {
        image: RgbImage::new(w, h, pixels).expect("dimensions validated"),
        circles,
        owner,
    }
}

fn ramp_gain(ramp: f64, y: usize, h: usize) -> f64 {
    if h < 2 {
        return 1.0;
    }
    1.0 + ramp * (2.0 * y as f64 / (h - 1) as f64 - 1.0)
}

/// Apparent image circle of a sphere: center at the projected sphere
/// center, radius `f R / sqrt(z^2 - R^2)`.
pub fn projected_circle(ball: &BallPose, intr: &CameraIntrinsics) -> Circle {
    assert!(
        ball.z > ball.ball_radius,
        "ball must lie in front of the camera, got z = {}",
        ball.z
    );
    let f = intr.focal();
    let r =
        f * ball.ball_radius / math::sqrt(ball.z * ball.z - ball.ball_radius * ball.ball_radius);
    Circle::new(
        intr.cx + f * ball.x / ball.z,
        intr.cy + f * ball.y / ball.z,
        r,
    )
}

/// Renders the exact silhouette of a sphere seen through `intr`, including
/// its radial distortion, over a flat background.
///
/// A subsample is covered when its viewing ray meets the sphere. The returned
/// circle is [`projected_circle`], the inverse of
/// [`crate::camera::pose_from_circle`]. Panics when the ball is not in front
/// of the camera.
pub fn render_projected(
    ball: &BallPose,
    intr: &CameraIntrinsics,
    color: Rgb,
    background: Rgb,
) -> (RgbImage, Circle) {
    let truth = projected_circle(ball, intr);
    let (w, h) = (intr.width, intr.height);
    let (px, py, pz) = (ball.x, ball.y, ball.z);
    let d2 = px * px + py * py + pz * pz;
    let cos2 = (d2 - ball.ball_radius * ball.ball_radius) / d2;
    let hits = |u: f64, v: f64| {
        let ideal = if intr.has_distortion() {
            intr.undistort(Point::new(u, v))
        } else {
            Point::new(u, v)
        };
        let (dx, dy) = ((ideal.x - intr.cx) / intr.fx, (ideal.y - intr.cy) / intr.fy);
        let dot = dx * px + dy * py + pz;
        dot > 0.0 && dot * dot >= cos2 * d2 * (dx * dx + dy * dy + 1.0)
    };

    // Silhouette search window: generous around the projected circle,
    // widened for distortion.
    let slack = truth.r * 0.5
        + 4.0
        + if intr.has_distortion() {
            0.1 * (w + h) as f64
        } else {
            0.0
        };
    let x0 = math::floor(truth.cx - truth.r - slack).max(0.0) as usize;
    let y0 = math::floor(truth.cy - truth.r - slack).max(0.0) as usize;
    let x1 = (math::ceil(truth.cx + truth.r + slack).max(0.0) as usize).min(w.saturating_sub(1));
    let y1 = (math::ceil(truth.cy + truth.r + slack).max(0.0) as usize).min(h.saturating_sub(1));

    let mut img = RgbImage::filled(w, h, background).expect("intrinsics carry valid dimensions");
    let step = 1.0 / SUPERSAMPLE as f64;
    let k = (SUPERSAMPLE * SUPERSAMPLE) as f64;
    for y in y0..=y1 {
        for x in x0..=x1 {
            let mut covered = 0usize;
            for sy in 0..SUPERSAMPLE {
                for sx in 0..SUPERSAMPLE {
                    let u = x as f64 - 0.5 + (sx as f64 + 0.5) * step;
                    let v = y as f64 - 0.5 + (sy as f64 + 0.5) * step;
                    covered += usize::from(hits(u, v));
                }
            }
            if covered > 0 {
                let a = covered as f64 / k;
                let mix: [u8; 3] = core::array::from_fn(|c| {
                    math::round(f64::from(color[c]) * a + f64::from(background[c]) * (1.0 - a))
                        as u8
                });
                img.set(x, y, mix);
            }
        }
    }
    (img, truth)
}

/// Side of the square whose area equals that of a disk of radius `r`.
pub fn matched_square_side(r: f64) -> f64 {
    r * math::sqrt(core::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RED: Rgb = [200, 30, 30];
    const BG: Rgb = [40, 90, 40];

    fn one_disk(cx: f64, cy: f64, r: f64) -> SceneSpec {
        SceneSpec::new(120, 100, BG).with_object(SceneObject::new(Shape::Disk { cx, cy, r }, RED))
    }

    #[test]
    fn ground_truth_passes_through() {
        let (_, circles) = render(&one_disk(60.0, 50.0, 20.0));
        assert_eq!(circles, vec![Circle::new(60.0, 50.0, 20.0)]);
    }

    #[test]
    fn noise_free_colors_are_exact_away_from_edges() {
        let (img, _) = render(&one_disk(60.0, 50.0, 20.0));
        assert_eq!(img.get(60, 50), RED);
        assert_eq!(img.get(2, 2), BG);
        let edge = img.get(80, 50);
        assert!(edge != RED && edge != BG);
    }

    #[test]
    fn seeded_noise_is_deterministic() {
        let mut spec = one_disk(60.0, 50.0, 20.0);
        spec.noise_sigma = 8.0;
        spec.seed = 7;
        assert_eq!(render(&spec), render(&spec));
        let mut other = spec.clone();
        other.seed = 8;
        assert_ne!(render(&spec).0, render(&other).0);
    }

    #[test]
    fn objects_outside_bounds_are_rejected() {
        assert!(one_disk(10.0, 10.0, 20.0).validate().is_err());
    }

    #[test]
    fn half_occlusion_hides_half_the_disk() {
        let mut spec = one_disk(60.0, 50.0, 20.0);
        spec.objects[0].occlusion = Some(Occlusion {
            fraction: 0.5,
            direction: 0.0,
        });
        let r = render_detailed(&spec);
        assert_eq!(r.image.get(70, 50), BG);
        assert_eq!(r.image.get(50, 50), RED);
        let area = r.mask_of(&[0]).count() as f64;
        let half = core::f64::consts::PI * 400.0 / 2.0;
        assert!((area - half).abs() < 0.05 * half);
    }

    #[test]
    fn frames_move_objects() {
        let mut spec = one_disk(30.0, 50.0, 10.0);
        spec.objects[0].velocity = Some((5.0, 0.0));
        let (_, c) = render_frame(&spec, 4);
        assert_eq!(c[0], Circle::new(50.0, 50.0, 10.0));
    }

    #[test]
    fn projected_radius_scales_inversely_with_depth() {
        let intr = CameraIntrinsics::ideal(500.0, 640, 480);
        let at = |z| {
            projected_circle(
                &BallPose {
                    x: 0.0,
                    y: 0.0,
                    z,
                    ball_radius: 0.035,
                },
                &intr,
            )
        };
        let (a, b) = (at(1.0), at(2.0));
        assert!((a.r / b.r - 2.0).abs() < 0.01 * 2.0);
    }

    #[test]
    #[should_panic(expected = "in front")]
    fn ball_behind_camera_panics() {
        let intr = CameraIntrinsics::ideal(500.0, 64, 48);
        projected_circle(
            &BallPose {
                x: 0.0,
                y: 0.0,
                z: -1.0,
                ball_radius: 0.035,
            },
            &intr,
        );
    }
}
