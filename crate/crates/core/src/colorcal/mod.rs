//! Offline color calibration.
//!
//! A sample image is segmented by chroma-only mean-shift, regions are
//! labeled, and each sufficiently large region is voted as a circle. Regions
//! whose `Q_c` comes close to that of an ideal digital disk of the same
//! radius are taken as balls. Their interior chroma is accumulated into a
//! 64x64 histogram per color class, the histogram support is closed with a
//! 3x3 element, and finally every 6-bit RGB cell is assigned the class whose
//! closed support contains its chroma.

mod chroma;
mod lut;
mod meanshift;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use chroma::{lightness, rgb_to_chroma, Chroma, ALPHA_RANGE, BETA_RANGE};
pub use lut::{cell_color, cell_index, ColorLut, LUT_LEN, LUT_SIDE};
pub use meanshift::{meanshift_segment, MAX_ITERATIONS, MIN_SHIFT};

use crate::components::{label_components, Region};
use crate::detect::{region_seed, vote_circle, Bounds, VoteParams};
use crate::geom::Circle;
use crate::image::{ClassMap, Mask, RgbImage};
use crate::morph::{self, MorphOp};
use crate::{Error, Result};

/// Histogram bins per chroma axis.
pub const CHROMA_BINS: usize = 64;
/// Upper bound on learned classes.
pub const MAX_CLASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CalibrationConfig {
    pub spatial_bw: f64,
    pub chroma_bw: f64,
    /// Regions smaller than this are not considered.
    pub min_region_size: usize,
    pub vote: VoteParams,
    /// Minimum `Q_c / Q_c(ideal disk)` for a region to count as a ball.
    pub fit_ratio_threshold: f64,
    /// Seeds voted on the ideal disk; the baseline is their median `Q_c`.
    pub baseline_runs: u32,
    /// Interior samples stay this many pixels inside the voted circle.
    pub interior_margin: f64,
    pub closing_radius: usize,
    pub max_classes: usize,
    /// Cells darker than this `L*` have no reliable chroma and stay
    /// background.
    pub min_lightness: f64,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            spatial_bw: 8.0,
            chroma_bw: 8.0,
            min_region_size: 25,
            vote: VoteParams::default(),
            fit_ratio_threshold: 0.5,
            baseline_runs: 5,
            interior_margin: 1.5,
            closing_radius: 1,
            max_classes: MAX_CLASSES,
            min_lightness: 10.0,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.spatial_bw > 0.0 && self.chroma_bw > 0.0) {
            return Err(Error::InvalidParameter(
                "bandwidths must be positive".into(),
            ));
        }
        if self.max_classes == 0 || self.max_classes > MAX_CLASSES {
            return Err(Error::InvalidParameter(
                "max_classes must be in 1..=8".into(),
            ));
        }
        if self.baseline_runs == 0 {
            return Err(Error::InvalidParameter(
                "baseline_runs must be positive".into(),
            ));
        }
        self.vote.validate()
    }
}

/// Chroma histogram of one learned class.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaDistribution {
    pub class_index: u8,
    /// Row-major `[alpha_bin][beta_bin]` sample counts.
    pub counts: Vec<u32>,
    /// Support of `counts` after closing.
    pub closed: Mask,
}

impl ChromaDistribution {
    pub fn raw_support(&self) -> Mask {
        Mask::new(
            CHROMA_BINS,
            CHROMA_BINS,
            self.counts.iter().map(|&c| c > 0).collect(),
        )
        .expect("histogram is square")
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn contains(&self, c: Chroma) -> bool {
        let (i, j) = chroma_bin(c);
        self.closed.get(j, i)
    }
}

/// Histogram bin `(alpha_bin, beta_bin)` of a chroma value, clamped to the
/// fixed range.
pub fn chroma_bin(c: Chroma) -> (usize, usize) {
    let bin = |v: f64, (lo, hi): (f64, f64)| {
        let t = (v - lo) / (hi - lo) * CHROMA_BINS as f64;
        (t.max(0.0) as usize).min(CHROMA_BINS - 1)
    };
    (bin(c.alpha, ALPHA_RANGE), bin(c.beta, BETA_RANGE))
}

/// Diagnostics for one candidate region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionFit {
    pub label: u32,
    pub mode: u16,
    pub pixel_count: usize,
    pub circle: Circle,
    pub quality: f64,
    pub baseline: f64,
    pub fit_ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub lut: ColorLut,
    pub distributions: Vec<ChromaDistribution>,
    pub fits: Vec<RegionFit>,
}

impl Calibration {
    pub fn class_samples(&self) -> Vec<u64> {
        self.distributions
            .iter()
            .map(ChromaDistribution::total)
            .collect()
    }
}

pub fn calibrate(image: &RgbImage, config: &CalibrationConfig) -> Result<ColorLut> {
    calibrate_detailed(image, config).map(|c| c.lut)
}

pub fn calibrate_detailed(image: &RgbImage, config: &CalibrationConfig) -> Result<Calibration> {
    config.validate()?;
    let modes = meanshift_segment(image, config.spatial_bw, config.chroma_bw);
    let (labels, regions) = label_components(&modes, config.min_region_size);
    let bounds = Bounds::new(image.width(), image.height());

    let mut baselines = BTreeMap::new();
    let mut fits = Vec::new();
    for region in &regions {
        let Ok(vote) = vote_circle(
            &region.boundary_points(),
            bounds,
            &config.vote,
            region_seed(config.vote.seed, region.label),
        ) else {
            continue;
        };
        if vote.circle.r < 2.0 {
            continue;
        }
        let radius = vote.circle.r as u32;
        let baseline = *baselines
            .entry(radius)
            .or_insert_with(|| disk_baseline(radius, &config.vote, config.baseline_runs));
        let fit_ratio = if baseline > 0.0 {
            vote.quality / baseline
        } else {
            0.0
        };
        fits.push(RegionFit {
            label: region.label,
            mode: region.class_index,
            pixel_count: region.pixel_count,
            circle: vote.circle,
            quality: vote.quality,
            baseline,
            fit_ratio,
            accepted: fit_ratio >= config.fit_ratio_threshold,
        });
    }

    // Classes in order of their first accepted ball; balls sharing a
    // mean-shift mode share a class.
    let mut class_of_mode: BTreeMap<u16, usize> = BTreeMap::new();
    let mut class_order: Vec<u16> = Vec::new();
    for fit in fits.iter().filter(|f| f.accepted) {
        if !class_of_mode.contains_key(&fit.mode) && class_order.len() < config.max_classes {
            class_of_mode.insert(fit.mode, class_order.len());
            class_order.push(fit.mode);
        }
    }
    if class_order.is_empty() {
        return Err(Error::NoCircularRegion {
            ratios: fits.iter().map(|f| f.fit_ratio).collect(),
        });
    }

    let mut counts = vec![vec![0u32; CHROMA_BINS * CHROMA_BINS]; class_order.len()];
    let by_label: BTreeMap<u32, &Region> = regions.iter().map(|r| (r.label, r)).collect();
    for fit in fits.iter().filter(|f| f.accepted) {
        let Some(&class) = class_of_mode.get(&fit.mode) else {
            continue;
        };
        let region = by_label[&fit.label];
        let inner = fit.circle.r - config.interior_margin;
        if inner <= 0.0 {
            continue;
        }
        let b = region.bbox;
        for y in b.min_y..=b.max_y {
            for x in b.min_x..=b.max_x {
                let (xu, yu) = (x as usize, y as usize);
                if labels.get(xu, yu) != region.label {
                    continue;
                }
                let (dx, dy) = (x as f64 - fit.circle.cx, y as f64 - fit.circle.cy);
                if dx * dx + dy * dy > inner * inner {
                    continue;
                }
                // Sample the cell the lookup table will use for this pixel.
                let rgb = image.get(xu, yu);
                let q = cell_color(rgb.map(|c| c >> 2));
                let (i, j) = chroma_bin(rgb_to_chroma(q[0], q[1], q[2]));
                counts[class][i * CHROMA_BINS + j] += 1;
            }
        }
    }

    let distributions: Vec<ChromaDistribution> = counts
        .into_iter()
        .enumerate()
        .map(|(k, counts)| {
            let raw = Mask::new(
                CHROMA_BINS,
                CHROMA_BINS,
                counts.iter().map(|&c| c > 0).collect(),
            )
            .expect("histogram is square");
            let closed = if config.closing_radius > 0 {
                morph::morph(&raw, MorphOp::Close, config.closing_radius)
            } else {
                raw
            };
            ChromaDistribution {
                class_index: k as u8 + 1,
                counts,
                closed,
            }
        })
        .collect();

    let lut = build_lut(&distributions, config.min_lightness)?;
    Ok(Calibration {
        lut,
        distributions,
        fits,
    })
}

/// Projects closed chroma distributions onto the 6-bit RGB cube. Overlaps
/// go to the class with the higher raw count at that bin, then to the lower
/// class index.
pub fn build_lut(distributions: &[ChromaDistribution], min_lightness: f64) -> Result<ColorLut> {
    let linear: Vec<f64> = (0..LUT_SIDE as u8)
        .map(|q| chroma::srgb_to_linear(f64::from(cell_color([q; 3])[0])))
        .collect();
    let mut table = Vec::with_capacity(LUT_LEN);
    for r in 0..LUT_SIDE {
        for g in 0..LUT_SIDE {
            for b in 0..LUT_SIDE {
                let lin = [linear[r], linear[g], linear[b]];
                if chroma::linear_lightness(lin) < min_lightness {
                    table.push(0);
                    continue;
                }
                let (i, j) = chroma_bin(chroma::linear_to_chroma(lin));
                let mut best: Option<(u32, u8)> = None;
                for d in distributions {
                    if !d.closed.get(j, i) {
                        continue;
                    }
                    let count = d.counts[i * CHROMA_BINS + j];
                    if best.is_none_or(|(bc, _)| count > bc) {
                        best = Some((count, d.class_index));
                    }
                }
                table.push(best.map_or(0, |(_, k)| k));
            }
        }
    }
    ColorLut::new(distributions.len() as u8, table)
}

/// Median `Q_c` of an ideal digital disk of the given radius.
pub fn disk_baseline(radius: u32, params: &VoteParams, runs: u32) -> f64 {
    let r = f64::from(radius);
    let pad = 3;
    let size = 2 * radius as usize + 2 * pad + 1;
    let c = (radius as usize + pad) as f64;
    let classes = (0..size * size)
        .map(|i| {
            let (dx, dy) = ((i % size) as f64 - c, (i / size) as f64 - c);
            u16::from(dx * dx + dy * dy <= r * r)
        })
        .collect();
    let map = ClassMap::new(size, size, classes).expect("square raster");
    let (_, regions) = label_components(&map, 1);
    let Some(region) = regions.first() else {
        return 0.0;
    };
    let points = region.boundary_points();
    let mut qs: Vec<f64> = (0..runs)
        .filter_map(|k| {
            vote_circle(
                &points,
                Bounds::new(size, size),
                params,
                region_seed(params.seed, k + 1),
            )
            .ok()
            .map(|v| v.quality)
        })
        .collect();
    if qs.is_empty() {
        return 0.0;
    }
    qs.sort_by(f64::total_cmp);
    qs[qs.len() / 2]
}
