//! Raster containers and the per-pixel primitives built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::colorcal::ColorLut;
use crate::{Error, Result};

/// 8-bit RGB triplet.
pub type Rgb = [u8; 3];

fn check_dims(width: usize, height: usize, actual: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(Error::InvalidDimensions { width, height })?;
    if expected != actual {
        return Err(Error::BufferLength {
            width,
            height,
            expected,
            actual,
        });
    }
    Ok(())
}

/// Row-major color frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self> {
        Self::new(width, height, vec![color; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, color: Rgb) {
        self.pixels[y * self.width + x] = color;
    }

    pub fn into_pixels(self) -> Vec<Rgb> {
        self.pixels
    }
}

/// Row-major scalar intensity image, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Central-difference gradient `(gx, gy)` at an interior pixel.
    ///
    /// Panics when `(x, y)` lies on the one-pixel border, where the
    /// gradient is undefined.
    #[inline]
    pub fn gradient_at(&self, x: usize, y: usize) -> (f64, f64) {
        assert!(
            x >= 1 && y >= 1 && x + 1 < self.width && y + 1 < self.height,
            "gradient sampled at border pixel ({x}, {y}) of {}x{} image",
            self.width,
            self.height
        );
        let w = self.width;
        let i = y * w + x;
        let gx = (self.values[i + 1] - self.values[i - 1]) / 2.0;
        let gy = (self.values[i + w] - self.values[i - w]) / 2.0;
        (gx, gy)
    }
}

/// Per-pixel color class indices; `0` is background.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMap {
    width: usize,
    height: usize,
    classes: Vec<u16>,
}

impl ClassMap {
    pub fn new(width: usize, height: usize, classes: Vec<u16>) -> Result<Self> {
        check_dims(width, height, classes.len())?;
        Ok(Self {
            width,
            height,
            classes,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn classes(&self) -> &[u16] {
        &self.classes
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.classes[y * self.width + x]
    }

    /// Largest class index present.
    pub fn max_class(&self) -> u16 {
        self.classes.iter().copied().max().unwrap_or(0)
    }

    /// Binary mask of the pixels carrying `class`.
    pub fn mask_of(&self, class: u16) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.classes.iter().map(|&c| c == class).collect(),
        }
    }
}

/// Binary raster used by the morphology operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(width, height, bits.len())?;
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![false; width.saturating_mul(height)])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }
}

/// Applies the 6-bit-per-channel lookup table to every pixel.
pub fn classify(image: &RgbImage, lut: &ColorLut) -> ClassMap {
    let classes = image
        .pixels
        .iter()
        .map(|&rgb| u16::from(lut.lookup(rgb)))
        .collect();
    ClassMap {
        width: image.width,
        height: image.height,
        classes,
    }
}

/// `(0.299 r + 0.587 g + 0.114 b) / 255` per pixel.
pub fn luminance(image: &RgbImage) -> GrayImage {
    let values = image
        .pixels
        .iter()
        .map(|&[r, g, b]| {
            (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)) / 255.0
        })
        .collect();
    GrayImage {
        width: image.width,
        height: image.height,
        values,
    }
}

/// Free-function form of [`GrayImage::gradient_at`].
pub fn gradient_at(image: &GrayImage, x: usize, y: usize) -> (f64, f64) {
    image.gradient_at(x, y)
}
