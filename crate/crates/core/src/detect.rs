//! Randomized circle estimation on region boundaries.
//!
//! Three boundary points are drawn at random and their circumcenter is voted
//! into a 2D accumulator at image resolution. Voting stops as soon as one bin
//! collects `center_threshold` votes, or after `max_votes` draws. The radius
//! is then the mode of the rounded point-to-center distances, and the circle
//! is scored with
//!
//! ```text
//! Q_c = (c_max * r_max) / (n_votes * n_points)
//! ```
//!
//! where `c_max` and `r_max` are the accumulator and radius-histogram peaks.
//! Circular regions produce a sharp center peak quickly; other shapes spread
//! their votes and score several times lower.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::camera::UndistortMap;
use crate::colorcal::ColorLut;
use crate::components::{connected_components, Region, DEFAULT_MIN_SIZE};
use crate::geom::{Circle, Point};
use crate::image::{classify, ClassMap, RgbImage};
use crate::math;
use crate::morph::{self, MorphOp};
use crate::{Error, Result};

/// Default acceptance threshold on `Q_c`.
///
/// Chosen between the highest square score and the lowest half-occluded
/// disk score measured on synthetic regions under the default vote
/// parameters; see `tests/quality_threshold.rs`.
pub const DEFAULT_QUALITY_THRESHOLD: f64 = 0.0075;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VoteParams {
    /// Votes in one accumulator bin that end the center vote.
    pub center_threshold: u32,
    /// Cap on random draws before giving up on a sharp peak.
    pub max_votes: u32,
    pub quality_threshold: f64,
    pub min_region_size: usize,
    pub seed: u64,
}

impl Default for VoteParams {
    fn default() -> Self {
        Self {
            center_threshold: 16,
            max_votes: 1200,
            quality_threshold: DEFAULT_QUALITY_THRESHOLD,
            min_region_size: DEFAULT_MIN_SIZE,
            seed: 0,
        }
    }
}

impl VoteParams {
    pub fn validate(&self) -> Result<()> {
        if self.center_threshold == 0 || self.max_votes == 0 {
            return Err(Error::InvalidParameter(
                "center_threshold and max_votes must be positive".into(),
            ));
        }
        if !(self.quality_threshold >= 0.0) {
            return Err(Error::InvalidParameter(
                "quality_threshold must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Image extent used to bound the center accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub width: usize,
    pub height: usize,
}

impl Bounds {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    /// Accepts bins inside the image grown by 20% on every side.
    fn accepts(&self, bx: i64, by: i64) -> bool {
        let mx = (self.width as f64 * 0.2) as i64;
        let my = (self.height as f64 * 0.2) as i64;
        bx >= -mx && by >= -my && bx < self.width as i64 + mx && by < self.height as i64 + my
    }
}

/// Circumcenter of three points, or `None` when they are (numerically)
/// collinear.
///
/// Evaluated relative to the lexicographically smallest point, so the result
/// is bit-identical under any permutation of the arguments.
pub fn circumcenter(p1: Point, p2: Point, p3: Point) -> Option<Point> {
    let (origin, u) = circumcenter_offset(p1, p2, p3)?;
    Some(Point::new(origin.x + u.x, origin.y + u.y))
}

fn lex_lt(a: Point, b: Point) -> bool {
    a.x < b.x || (a.x == b.x && a.y < b.y)
}

/// Returns the reference point and the center offset from it.
fn circumcenter_offset(p1: Point, p2: Point, p3: Point) -> Option<(Point, Point)> {
    let mut pts = [p1, p2, p3];
    for i in 1..3 {
        let mut j = i;
        while j > 0 && lex_lt(pts[j], pts[j - 1]) {
            pts.swap(j, j - 1);
            j -= 1;
        }
    }
    let [o, a, b] = pts;
    let (ax, ay) = (a.x - o.x, a.y - o.y);
    let (bx, by) = (b.x - o.x, b.y - o.y);
    let d = 2.0 * (ax * by - ay * bx);
    if d.abs() < 1e-9 {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let ux = (by * a2 - ay * b2) / d;
    let uy = (ax * b2 - bx * a2) / d;
    Some((o, Point::new(ux, uy)))
}

/// Outcome of the randomized center vote.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterVote {
    /// Peak accumulator bin.
    pub center: Point,
    pub c_max: u32,
    /// Votes that landed inside the accumulator.
    pub n_votes: u32,
    /// Random triples drawn, degenerate ones included.
    pub draws: u32,
    /// `true` when the vote ended on `center_threshold`.
    pub converged: bool,
}

pub fn vote_center(
    points: &[Point],
    bounds: Bounds,
    params: &VoteParams,
    seed: u64,
) -> Result<CenterVote> {
    let n = points.len();
    if n < 3 {
        return Err(Error::BoundaryTooShort(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc: BTreeMap<(i64, i64), u32> = BTreeMap::new();
    let mut best = ((0i64, 0i64), 0u32);
    let mut n_votes = 0u32;
    let mut draws = 0u32;
    let mut converged = false;

    while draws < params.max_votes {
        draws += 1;
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut k = rng.random_range(0..n - 2);
        for skip in [i.min(j), i.max(j)] {
            if k >= skip {
                k += 1;
            }
        }
        let Some((origin, u)) = circumcenter_offset(points[i], points[j], points[k]) else {
            continue;
        };
        // floor(o + u + 1/2) == o + floor(u + 1/2) for integer o, which keeps
        // the binning exactly translation-equivariant.
        let bx = math::floor(origin.x + u.x + 0.5);
        let by = math::floor(origin.y + u.y + 0.5);
        if !(bx.is_finite() && by.is_finite()) || bx.abs() > 1e9 || by.abs() > 1e9 {
            continue;
        }
        let bin = (bx as i64, by as i64);
        if !bounds.accepts(bin.0, bin.1) {
            continue;
        }
        n_votes += 1;
        let count = acc.entry(bin).or_insert(0);
        *count += 1;
        if *count > best.1 {
            best = (bin, *count);
        }
        if *count >= params.center_threshold {
            converged = true;
            break;
        }
    }

    if n_votes == 0 {
        return Err(Error::NoVotes(draws));
    }
    Ok(CenterVote {
        center: Point::new(best.0 .0 as f64, best.0 .1 as f64),
        c_max: best.1,
        n_votes,
        draws,
        converged,
    })
}

/// Mode of the rounded distances from `center`; ties go to the smaller
/// radius. Returns `(c_r, r_max)`.
pub fn vote_radius(points: &[Point], center: Point) -> (f64, u32) {
    let mut hist: Vec<u32> = Vec::new();
    for p in points {
        let d = math::round(p.distance(center)) as usize;
        if d >= hist.len() {
            hist.resize(d + 1, 0);
        }
        hist[d] += 1;
    }
    let mut best = (0usize, 0u32);
    for (r, &count) in hist.iter().enumerate() {
        if count > best.1 {
            best = (r, count);
        }
    }
    (best.0 as f64, best.1)
}

/// `Q_c = c_max r_max / (n_votes n_points)`. Panics on a zero denominator.
pub fn assess_quality(c_max: u32, r_max: u32, n_votes: u32, n_points: usize) -> f64 {
    assert!(
        n_votes > 0 && n_points > 0,
        "quality needs votes and points"
    );
    (f64::from(c_max) * f64::from(r_max)) / (f64::from(n_votes) * n_points as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoteResult {
    pub circle: Circle,
    pub c_max: u32,
    pub r_max: u32,
    pub n_votes: u32,
    pub n_points: usize,
    pub quality: f64,
    pub draws: u32,
    /// Set when the center vote hit `max_votes` without a sharp peak.
    pub low_quality: bool,
}

/// Center vote, radius vote and quality for one boundary.
pub fn vote_circle(
    points: &[Point],
    bounds: Bounds,
    params: &VoteParams,
    seed: u64,
) -> Result<VoteResult> {
    let cv = vote_center(points, bounds, params, seed)?;
    let (r, r_max) = vote_radius(points, cv.center);
    Ok(VoteResult {
        circle: Circle::new(cv.center.x, cv.center.y, r),
        c_max: cv.c_max,
        r_max,
        n_votes: cv.n_votes,
        n_points: points.len(),
        quality: assess_quality(cv.c_max, r_max, cv.n_votes, points.len()),
        draws: cv.draws,
        low_quality: !cv.converged,
    })
}

/// Per-region seed derived from the frame seed.
pub fn region_seed(seed: u64, label: u32) -> u64 {
    seed ^ u64::from(label).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Boundary of `region` in ideal (undistorted) pixel coordinates.
pub fn region_points(region: &Region, map: Option<&UndistortMap>) -> Vec<Point> {
    match map {
        Some(m) if m.intrinsics().has_distortion() => m.correct_all(&region.boundary),
        _ => region.boundary_points(),
    }
}

/// Votes a circle for `region`; `None` when the boundary cannot be voted.
pub fn evaluate_region(
    region: &Region,
    map: Option<&UndistortMap>,
    bounds: Bounds,
    params: &VoteParams,
) -> Option<VoteResult> {
    let points = region_points(region, map);
    let vote = vote_circle(
        &points,
        bounds,
        params,
        region_seed(params.seed, region.label),
    )
    .ok()?;
    (vote.circle.r > 0.0).then_some(vote)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectParams {
    pub vote: VoteParams,
    /// Radius of the open-then-close noise cleanup; `0` disables it.
    pub cleanup_radius: usize,
}

impl Default for DetectParams {
    fn default() -> Self {
        Self {
            vote: VoteParams::default(),
            cleanup_radius: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub region: Region,
    pub vote: VoteResult,
}

/// Opens then closes every learned class. Pixels claimed by an earlier class
/// are not overwritten by a later one.
pub fn cleanup(map: &ClassMap, radius: usize) -> ClassMap {
    if radius == 0 {
        return map.clone();
    }
    let (w, h) = (map.width(), map.height());
    let mut present = vec![false; usize::from(map.max_class()) + 1];
    for &c in map.classes() {
        present[usize::from(c)] = true;
    }
    let mut out = vec![0u16; w * h];
    for (class, _) in present.iter().enumerate().skip(1).filter(|(_, &p)| p) {
        let class = class as u16;
        let mask = map.mask_of(class);
        let cleaned = morph::morph(
            &morph::morph(&mask, MorphOp::Open, radius),
            MorphOp::Close,
            radius,
        );
        for (o, &b) in out.iter_mut().zip(cleaned.bits()) {
            if b && *o == 0 {
                *o = class;
            }
        }
    }
    ClassMap::new(w, h, out).expect("dimensions preserved")
}

/// Classifies and cleans a frame.
pub fn segment(frame: &RgbImage, lut: &ColorLut, params: &DetectParams) -> ClassMap {
    cleanup(&classify(frame, lut), params.cleanup_radius)
}

/// Scores every region and keeps those passing the quality threshold,
/// best first.
pub fn detect_in_regions(
    regions: Vec<Region>,
    map: Option<&UndistortMap>,
    bounds: Bounds,
    params: &VoteParams,
) -> Vec<Detection> {
    let mut out: Vec<Detection> = regions
        .into_iter()
        .filter_map(|region| {
            let vote = evaluate_region(&region, map, bounds, params)?;
            (vote.quality >= params.quality_threshold).then_some(Detection { region, vote })
        })
        .collect();
    out.sort_by(|a, b| {
        b.vote
            .quality
            .total_cmp(&a.vote.quality)
            .then(a.region.label.cmp(&b.region.label))
    });
    out
}

/// Full detection path: classify, clean up, label, undistort boundaries,
/// vote and filter by `Q_c`.
pub fn detect_balls(
    frame: &RgbImage,
    lut: &ColorLut,
    map: Option<&UndistortMap>,
    params: &DetectParams,
) -> Vec<Detection> {
    let classes = segment(frame, lut, params);
    let regions = connected_components(&classes, params.vote.min_region_size);
    detect_in_regions(
        regions,
        map,
        Bounds::new(frame.width(), frame.height()),
        &params.vote,
    )
}
