//! Sub-pixel circle refinement.
//!
//! Pixels in a thin annulus around the voted circle are weighted by their
//! squared intensity-gradient magnitude and the circle is moved to minimize
//!
//! ```text
//! E(c) = sum_p |grad I(p)|^2 * C_p(c)^2,    C_p(c) = |p - (c_x, c_y)| - c_r
//! ```
//!
//! with Gauss-Newton steps
//! `dc = -(J^T W J)^-1 (J^T W C)`, where row `p` of `J` is
//! `((c_x - p_x) / d, (c_y - p_y) / d, -1)` and `W = diag(|grad I|^2)`.
//! A single step is the default; more iterations tend to chase clutter.

use alloc::vec::Vec;

use crate::camera::UndistortMap;
use crate::geom::{Circle, Point};
use crate::image::GrayImage;
use crate::math;
use crate::{Error, Result};

const MIN_SAMPLES: usize = 6;
const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSample {
    pub x: f64,
    pub y: f64,
    /// `|grad I|^2` at the pixel.
    pub weight: f64,
    /// Signed distance to the circle at selection time.
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefineParams {
    pub half_width: f64,
    pub top_fraction: f64,
    pub iterations: u32,
}

impl Default for RefineParams {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            top_fraction: 0.5,
            iterations: 1,
        }
    }
}

impl RefineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width >= 1.0) {
            return Err(Error::InvalidParameter(
                "annulus_half_width must be >= 1".into(),
            ));
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(Error::InvalidParameter(
                "annulus_top_fraction must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Signed distance from `p` to the circle: negative inside.
pub fn point_circle_distance(p: Point, c: &Circle) -> f64 {
    math::sqrt((p.x - c.cx) * (p.x - c.cx) + (p.y - c.cy) * (p.y - c.cy)) - c.r
}

/// Gradient of [`point_circle_distance`] with respect to `(c_x, c_y, c_r)`;
/// `None` at the center, where it is undefined.
pub fn jacobian_row(p: Point, c: &Circle) -> Option<[f64; 3]> {
    let d = math::hypot(p.x - c.cx, p.y - c.cy);
    (d > 0.0).then(|| [(c.cx - p.x) / d, (c.cy - p.y) / d, -1.0])
}

/// Weighted energy of `samples` against `c`.
pub fn energy(samples: &[AnnulusSample], c: &Circle) -> f64 {
    samples
        .iter()
        .map(|s| {
            let r = point_circle_distance(Point::new(s.x, s.y), c);
            s.weight * r * r
        })
        .sum()
}

pub fn collect_annulus(
    image: &GrayImage,
    c: &Circle,
    half_width: f64,
    top_fraction: f64,
) -> Result<Vec<AnnulusSample>> {
    collect_annulus_mapped(image, c, half_width, top_fraction, None)
}

/// Like [`collect_annulus`], with sample positions expressed in ideal
/// (undistorted) coordinates when `map` carries distortion. Gradients are
/// always taken on the observed pixel grid.
pub fn collect_annulus_mapped(
    image: &GrayImage,
    c: &Circle,
    half_width: f64,
    top_fraction: f64,
    map: Option<&UndistortMap>,
) -> Result<Vec<AnnulusSample>> {
    let map = map.filter(|m| m.intrinsics().has_distortion());
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(Error::RefinementNotPossible(
            "image too small for gradients",
        ));
    }
    let reach = c.r + half_width + 1.0;
    let (mut x0, mut y0, mut x1, mut y1) = (c.cx - reach, c.cy - reach, c.cx + reach, c.cy + reach);
    if let Some(m) = map {
        let intr = m.intrinsics();
        let corners = [
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x0, y1),
            Point::new(x1, y1),
            Point::new(c.cx, y0),
            Point::new(c.cx, y1),
            Point::new(x0, c.cy),
            Point::new(x1, c.cy),
        ]
        .map(|p| intr.distort(p));
        x0 = corners.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - 2.0;
        x1 = corners
            .iter()
            .map(|p| p.x)
            .fold(f64::NEG_INFINITY, f64::max)
            + 2.0;
        y0 = corners.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - 2.0;
        y1 = corners
            .iter()
            .map(|p| p.y)
            .fold(f64::NEG_INFINITY, f64::max)
            + 2.0;
    }
    let clamp = |v: f64, hi: usize| -> usize { v.max(1.0).min((hi - 2) as f64) as usize };
    let (xs, xe) = (clamp(math::floor(x0), w), clamp(math::ceil(x1), w));
    let (ys, ye) = (clamp(math::floor(y0), h), clamp(math::ceil(y1), h));

    let mut samples = Vec::new();
    for y in ys..=ye {
        for x in xs..=xe {
            let pos = match map {
                Some(m) => m.corrected(x as i32, y as i32),
                None => Point::new(x as f64, y as f64),
            };
            let distance = point_circle_distance(pos, c);
            if distance.abs() > half_width {
                continue;
            }
            if distance + c.r <= 0.0 {
                // exactly at the center; cannot happen when c_r > half_width
                debug_assert!(c.r <= half_width);
                continue;
            }
            let (gx, gy) = image.gradient_at(x, y);
            samples.push(AnnulusSample {
                x: pos.x,
                y: pos.y,
                weight: gx * gx + gy * gy,
                distance,
            });
        }
    }
    if samples.len() < MIN_SAMPLES {
        return Err(Error::RefinementNotPossible("fewer than 6 annulus pixels"));
    }
    // Stable: equal weights keep scan order.
    samples.sort_by(|a, b| b.weight.total_cmp(&a.weight));
    let keep = (math::ceil(samples.len() as f64 * top_fraction) as usize).max(MIN_SAMPLES);
    samples.truncate(keep);
    if samples.iter().all(|s| s.weight == 0.0) {
        return Err(Error::RefinementNotPossible("no gradient in annulus"));
    }
    Ok(samples)
}

/// One weighted Gauss-Newton increment `(dc_x, dc_y, dc_r)`.
pub fn gauss_newton_step(samples: &[AnnulusSample], c: &Circle) -> Result<[f64; 3]> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::RefinementNotPossible("fewer than 6 samples"));
    }
    let mut n = [[0.0f64; 3]; 3];
    let mut g = [0.0f64; 3];
    for s in samples {
        let p = Point::new(s.x, s.y);
        let Some(j) = jacobian_row(p, c) else {
            continue;
        };
        let r = point_circle_distance(p, c);
        for a in 0..3 {
            g[a] += s.weight * j[a] * r;
            for b in 0..3 {
                n[a][b] += s.weight * j[a] * j[b];
            }
        }
    }
    let x = solve3(&n, &g)?;
    Ok([-x[0], -x[1], -x[2]])
}

fn norm1(m: &[[f64; 3]; 3]) -> f64 {
    (0..3)
        .map(|col| (0..3).map(|row| m[row][col].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `m x = v` for a symmetric 3x3 normal matrix.
fn solve3(m: &[[f64; 3]; 3], v: &[f64; 3]) -> Result<[f64; 3]> {
    let cof =
        |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    if det != 0.0 && det.is_finite() {
        let inv = adj.map(|row| row.map(|a| a / det));
        if norm1(m) * norm1(&inv) > MAX_CONDITION {
            return Err(Error::RefinementNotPossible(
                "ill-conditioned normal matrix",
            ));
        }
        let x = [0, 1, 2].map(|r| inv[r][0] * v[0] + inv[r][1] * v[1] + inv[r][2] * v[2]);
        if x.iter().all(|x| x.is_finite()) {
            return Ok(x);
        }
    }
    solve3_pivot(m, v)
}

#[allow(clippy::needless_range_loop)]
fn solve3_pivot(m: &[[f64; 3]; 3], v: &[f64; 3]) -> Result<[f64; 3]> {
    let mut a = [
        [m[0][0], m[0][1], m[0][2], v[0]],
        [m[1][0], m[1][1], m[1][2], v[1]],
        [m[2][0], m[2][1], m[2][2], v[2]],
    ];
    let scale = norm1(m);
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if !(a[pivot][col].abs() > scale / MAX_CONDITION) {
            return Err(Error::RefinementNotPossible("singular normal matrix"));
        }
        a.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (a[row][3] - tail) / a[row][row];
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub circle: Circle,
    /// `false` when refinement was not possible and `circle` is the input.
    pub refined: bool,
}

pub fn refine_circle(image: &GrayImage, c: &Circle, params: &RefineParams) -> Refinement {
    refine_circle_mapped(image, c, params, None)
}

/// Runs `params.iterations` annulus + Gauss-Newton rounds. Each increment
/// component is clamped to the annulus half-width.
pub fn refine_circle_mapped(
    image: &GrayImage,
    c: &Circle,
    params: &RefineParams,
    map: Option<&UndistortMap>,
) -> Refinement {
    let attempt = || -> Result<Circle> {
        let mut cur = *c;
        for _ in 0..params.iterations {
            let samples =
                collect_annulus_mapped(image, &cur, params.half_width, params.top_fraction, map)?;
            let d = gauss_newton_step(&samples, &cur)?;
            let hw = params.half_width;
            cur.cx += d[0].clamp(-hw, hw);
            cur.cy += d[1].clamp(-hw, hw);
            cur.r += d[2].clamp(-hw, hw);
            if !(cur.r > 0.0) {
                return Err(Error::RefinementNotPossible("radius collapsed"));
            }
        }
        Ok(cur)
    };
    match attempt() {
        Ok(circle) => Refinement {
            circle,
            refined: true,
        },
        Err(_) => Refinement {
            circle: *c,
            refined: false,
        },
    }
}
