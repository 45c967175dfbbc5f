//! Binary morphology with a square `(2r+1) x (2r+1)` structuring element.
//!
//! Out-of-raster pixels are ignored: they never erode a shape touching the
//! border and never dilate into it. Erosion and dilation are therefore exact
//! duals under complement. Both passes are separable and run in
//! O(width * height) regardless of the radius.

use alloc::vec;

use crate::image::Mask;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MorphOp {
    Erode,
    Dilate,
    /// Erode then dilate.
    Open,
    /// Dilate then erode.
    Close,
}

pub fn morph(mask: &Mask, op: MorphOp, radius: usize) -> Mask {
    assert!(radius >= 1, "structuring element radius must be >= 1");
    match op {
        MorphOp::Erode => erode(mask, radius),
        MorphOp::Dilate => dilate(mask, radius),
        MorphOp::Open => dilate(&erode(mask, radius), radius),
        MorphOp::Close => erode(&dilate(mask, radius), radius),
    }
}

pub fn erode(mask: &Mask, radius: usize) -> Mask {
    separable(mask, radius, Rule::All)
}

pub fn dilate(mask: &Mask, radius: usize) -> Mask {
    separable(mask, radius, Rule::Any)
}

#[derive(Clone, Copy)]
enum Rule {
    Any,
    All,
}

fn separable(mask: &Mask, radius: usize, rule: Rule) -> Mask {
    let (w, h) = (mask.width(), mask.height());
    let mut tmp = vec![false; w * h];
    for (row, out) in mask.bits().chunks_exact(w).zip(tmp.chunks_exact_mut(w)) {
        window_1d(row, radius, rule, out);
    }

    // Vertical pass keeps one running count per column.
    let mut out = vec![false; w * h];
    let mut counts = vec![0u32; w];
    let add_row = |counts: &mut [u32], y: usize, delta: i32| {
        for (c, &b) in counts.iter_mut().zip(&tmp[y * w..(y + 1) * w]) {
            if b {
                *c = c.wrapping_add_signed(delta);
            }
        }
    };
    for y in 0..(radius + 1).min(h) {
        add_row(&mut counts, y, 1);
    }
    for y in 0..h {
        let lo = y.saturating_sub(radius);
        let hi = (y + radius + 1).min(h);
        let full = (hi - lo) as u32;
        for (o, &c) in out[y * w..(y + 1) * w].iter_mut().zip(&counts) {
            *o = rule.holds(c, full);
        }
        if hi < h {
            add_row(&mut counts, hi, 1);
        }
        if y >= radius {
            add_row(&mut counts, y - radius, -1);
        }
    }
    Mask::new(w, h, out).expect("dimensions preserved")
}

impl Rule {
    /// `count` set pixels among `full` in-range ones.
    #[inline]
    fn holds(self, count: u32, full: u32) -> bool {
        match self {
            Rule::Any => count > 0,
            Rule::All => count == full,
        }
    }
}

/// Sliding-window any/all over the in-range part of each window.
fn window_1d(line: &[bool], radius: usize, rule: Rule, out: &mut [bool]) {
    let n = line.len();
    let mut count = line[..(radius + 1).min(n)].iter().filter(|&&b| b).count() as u32;
    for i in 0..n {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius + 1).min(n);
        out[i] = rule.holds(count, (hi - lo) as u32);
        if hi < n && line[hi] {
            count += 1;
        }
        if i >= radius && line[i - radius] {
            count -= 1;
        }
    }
}
