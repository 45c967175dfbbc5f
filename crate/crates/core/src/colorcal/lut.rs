use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::image::Rgb;
use crate::{Error, Result};

/// Cells per channel (6 bits).
pub const LUT_SIDE: usize = 64;
pub const LUT_LEN: usize = LUT_SIDE * LUT_SIDE * LUT_SIDE;

/// RGB → class table over 6-bit-per-channel cells, r-major, b-minor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorLut {
    classes: u8,
    table: Vec<u8>,
}

#[inline]
pub fn cell_index(rgb: Rgb) -> usize {
    (usize::from(rgb[0] >> 2) << 12) | (usize::from(rgb[1] >> 2) << 6) | usize::from(rgb[2] >> 2)
}

/// Representative 8-bit color of a 6-bit cell (its rounded center).
#[inline]
pub fn cell_color(q: [u8; 3]) -> Rgb {
    q.map(|c| (c << 2) | 2)
}

impl ColorLut {
    pub fn new(classes: u8, table: Vec<u8>) -> Result<Self> {
        if table.len() != LUT_LEN {
            return Err(Error::InvalidParameter(format!(
                "lookup table has {} entries, expected {LUT_LEN}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&c| c > classes) {
            return Err(Error::InvalidParameter(format!(
                "table entry {bad} exceeds class count {classes}"
            )));
        }
        Ok(Self { classes, table })
    }

    /// Everything maps to background.
    pub fn empty() -> Self {
        Self {
            classes: 0,
            table: vec![0; LUT_LEN],
        }
    }

    /// Builds a table by evaluating `f` on each cell's representative color.
    pub fn from_fn(classes: u8, mut f: impl FnMut(Rgb) -> u8) -> Result<Self> {
        let mut table = Vec::with_capacity(LUT_LEN);
        for r in 0..LUT_SIDE as u8 {
            for g in 0..LUT_SIDE as u8 {
                for b in 0..LUT_SIDE as u8 {
                    table.push(f(cell_color([r, g, b])));
                }
            }
        }
        Self::new(classes, table)
    }

    pub fn classes(&self) -> u8 {
        self.classes
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    #[inline]
    pub fn lookup(&self, rgb: Rgb) -> u8 {
        self.table[cell_index(rgb)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_bits_ignored() {
        let lut = ColorLut::from_fn(1, |[r, g, b]| u8::from(r > 150 && g < 60 && b < 60)).unwrap();
        assert_eq!(lut.lookup([200, 30, 30]), 1);
        assert_eq!(lut.lookup([203, 29, 31]), lut.lookup([200, 28, 28]));
        assert_eq!(lut.lookup([0, 0, 0]), 0);
    }

    #[test]
    fn validation() {
        assert!(ColorLut::new(1, vec![0; 10]).is_err());
        let mut t = vec![0; LUT_LEN];
        t[5] = 3;
        assert!(ColorLut::new(2, t.clone()).is_err());
        assert!(ColorLut::new(3, t).is_ok());
    }
}
