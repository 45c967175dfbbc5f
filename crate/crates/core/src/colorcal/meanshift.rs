//! Mean-shift segmentation in joint `(x, y, alpha, beta)` space.
//!
//! Only chroma enters the range domain, so shading across a uniformly
//! colored object does not split it. Both kernels are flat: a pixel
//! contributes to the mean when it lies within `spatial_bw` pixels and
//! `chroma_bw` chroma units of the current estimate.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::chroma::{rgb_to_chroma, Chroma};
use crate::image::{ClassMap, RgbImage};
use crate::math;

pub const MAX_ITERATIONS: u32 = 20;
pub const MIN_SHIFT: f64 = 0.1;

/// Per-pixel mode labels, starting at 1. Converged modes whose chroma lies
/// within `chroma_bw` of an earlier cluster representative share its label.
pub fn meanshift_segment(image: &RgbImage, spatial_bw: f64, chroma_bw: f64) -> ClassMap {
    assert!(
        spatial_bw > 0.0 && chroma_bw > 0.0,
        "bandwidths must be positive"
    );
    let (w, h) = (image.width(), image.height());
    let chroma: Vec<Chroma> = image
        .pixels()
        .iter()
        .map(|&[r, g, b]| rgb_to_chroma(r, g, b))
        .collect();

    let reach = math::floor(spatial_bw) as i64;
    let hs2 = spatial_bw * spatial_bw;
    let offsets: Vec<(i64, i64)> = (-reach..=reach)
        .flat_map(|dy| (-reach..=reach).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| ((dx * dx + dy * dy) as f64) <= hs2)
        .collect();
    let hr2 = chroma_bw * chroma_bw;

    let mut modes = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let mut pos = [x as f64, y as f64];
            let mut c = chroma[y * w + x];
            for _ in 0..MAX_ITERATIONS {
                let (ox, oy) = (math::round(pos[0]) as i64, math::round(pos[1]) as i64);
                let (mut sx, mut sy, mut sa, mut sb, mut n) = (0.0, 0.0, 0.0, 0.0, 0u32);
                for &(dx, dy) in &offsets {
                    let (nx, ny) = (ox + dx, oy + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (fx, fy) = (nx as f64 - pos[0], ny as f64 - pos[1]);
                    if fx * fx + fy * fy > hs2 {
                        continue;
                    }
                    let q = chroma[ny as usize * w + nx as usize];
                    let (da, db) = (q.alpha - c.alpha, q.beta - c.beta);
                    if da * da + db * db > hr2 {
                        continue;
                    }
                    sx += nx as f64;
                    sy += ny as f64;
                    sa += q.alpha;
                    sb += q.beta;
                    n += 1;
                }
                if n == 0 {
                    break;
                }
                let inv = 1.0 / f64::from(n);
                let next = (
                    [sx * inv, sy * inv],
                    Chroma {
                        alpha: sa * inv,
                        beta: sb * inv,
                    },
                );
                let d = [
                    next.0[0] - pos[0],
                    next.0[1] - pos[1],
                    next.1.alpha - c.alpha,
                    next.1.beta - c.beta,
                ];
                let shift = math::sqrt(d.iter().map(|v| v * v).sum());
                pos = next.0;
                c = next.1;
                if shift < MIN_SHIFT {
                    break;
                }
            }
            modes.push(c);
        }
    }

    let labels = group_modes(&modes, chroma_bw);
    ClassMap::new(w, h, labels).expect("dimensions preserved")
}

/// Greedy clustering in raster order on a hashed grid of cell size
/// `radius`.
fn group_modes(modes: &[Chroma], radius: f64) -> Vec<u16> {
    let cell = |c: Chroma| {
        (
            math::floor(c.alpha / radius) as i64,
            math::floor(c.beta / radius) as i64,
        )
    };
    let mut reps: Vec<Chroma> = Vec::new();
    let mut grid: BTreeMap<(i64, i64), Vec<u16>> = BTreeMap::new();
    let mut labels = Vec::with_capacity(modes.len());
    for &m in modes {
        let (gx, gy) = cell(m);
        let mut best: Option<(f64, u16)> = None;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(ids) = grid.get(&(gx + dx, gy + dy)) {
                    for &id in ids {
                        let d = reps[usize::from(id) - 1].distance(m);
                        if d <= radius
                            && best.is_none_or(|(bd, bid)| d < bd || (d == bd && id < bid))
                        {
                            best = Some((d, id));
                        }
                    }
                }
            }
        }
        let label = match best {
            Some((_, id)) => id,
            None if reps.len() < usize::from(u16::MAX) => {
                reps.push(m);
                let id = reps.len() as u16;
                grid.entry((gx, gy)).or_default().push(id);
                id
            }
            None => {
                // Label space exhausted: fall back to the nearest cluster.
                reps.iter()
                    .enumerate()
                    .min_by(|a, b| a.1.distance(m).total_cmp(&b.1.distance(m)))
                    .map(|(i, _)| i as u16 + 1)
                    .expect("at least one cluster")
            }
        };
        labels.push(label);
    }
    labels
}
