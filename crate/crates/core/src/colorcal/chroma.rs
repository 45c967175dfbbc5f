//! Luminance-free chroma coordinates.
//!
//! Colors are mapped sRGB → linear RGB → CIE XYZ (D65) → CIE 1976 `(u', v')`
//! chromaticity. The returned pair is `13 * 100 * (u' - u'_n, v' - v'_n)`,
//! i.e. the LUV `(u*, v*)` a color of that chromaticity has at lightness
//! `L* = 100`. Scaling a color's linear RGB leaves it unchanged, and every
//! gray maps to the origin.

use crate::math;

/// Chroma pair `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Chroma {
    pub alpha: f64,
    pub beta: f64,
}

impl Chroma {
    pub fn distance(self, other: Chroma) -> f64 {
        math::hypot(self.alpha - other.alpha, self.beta - other.beta)
    }
}

/// Fixed chroma range covering the sRGB gamut, used for histogram binning.
pub const ALPHA_RANGE: (f64, f64) = (-100.0, 340.0);
pub const BETA_RANGE: (f64, f64) = (-410.0, 130.0);

const M: [[f64; 3]; 3] = [
    [0.412_456_4, 0.357_576_1, 0.180_437_5],
    [0.212_672_9, 0.715_152_2, 0.072_175_0],
    [0.019_333_9, 0.119_192_0, 0.950_304_1],
];

pub(crate) fn srgb_to_linear(c: f64) -> f64 {
    let c = c / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        math::powf((c + 0.055) / 1.055, 2.4)
    }
}

fn xyz(lin: [f64; 3]) -> [f64; 3] {
    M.map(|row| row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2])
}

fn uv_prime([x, y, z]: [f64; 3]) -> Option<(f64, f64)> {
    let den = x + 15.0 * y + 3.0 * z;
    (den > 0.0).then(|| (4.0 * x / den, 9.0 * y / den))
}

fn white_uv() -> (f64, f64) {
    uv_prime(xyz([1.0, 1.0, 1.0])).expect("white has positive luminance")
}

/// Chroma of linear RGB values; black maps to the white point.
pub(crate) fn linear_to_chroma(lin: [f64; 3]) -> Chroma {
    let (un, vn) = white_uv();
    match uv_prime(xyz(lin)) {
        Some((u, v)) => Chroma {
            alpha: 1300.0 * (u - un),
            beta: 1300.0 * (v - vn),
        },
        None => Chroma::default(),
    }
}

/// CIE lightness `L*` in `[0, 100]` of linear RGB values.
pub(crate) fn linear_lightness(lin: [f64; 3]) -> f64 {
    let y = xyz(lin)[1];
    if y > 216.0 / 24389.0 {
        116.0 * math::cbrt(y) - 16.0
    } else {
        y * 24389.0 / 27.0
    }
}

pub fn rgb_to_chroma(r: u8, g: u8, b: u8) -> Chroma {
    linear_to_chroma([r, g, b].map(|c| srgb_to_linear(f64::from(c))))
}

pub fn lightness(r: u8, g: u8, b: u8) -> f64 {
    linear_lightness([r, g, b].map(|c| srgb_to_linear(f64::from(c))))
}
